"""The first, second and dual homogeneous Koszul complexes of a quadratic dual pair."""
from __future__ import annotations

from dataclasses import dataclass

from .bimodule import (
    Bimodule,
    DualModule,
    _vec_left,
    _vec_right,
    right_dual,
    tensor_many,
)
from .complexes import CochainComplex, ComplexError
from .linalg import Field, Subspace, kernel, kron, solve, unit, vstack
from .quadratic import (
    GradedAlgebraSlice,
    PreconditionError,
    QuadraticPresentation,
    build_quadratic_slice,
    quadratic_dual,
)


def canonical_element(A1: Bimodule, pair: list, dB: int):
    """E with sum_{b,g} E[b, g] <v, b_b> a_g = v for every v in A_1.

    ``pair[a][b]`` is the R-valued pairing of A_1 with B_1; the element
    sum E[b, g] b_b (x) a_g represents the identity of A_1.
    """
    F = A1.field
    dA = A1.dim
    if dA == 0 or dB == 0:
        return F.mat(dB, dA)
    # unknown vec(E) indexed b * dA + g; equation rows indexed v * dA + i
    M = F.mat(dA * dA, dB * dA)
    for v in range(dA):
        for b in range(dB):
            pv = pair[v][b]
            for l, c in enumerate(pv):
                if c == 0:
                    continue
                act = A1.left[l]
                for g in range(dA):
                    for i in range(dA):
                        y = act[i, g]
                        if y != 0:
                            M[v * dA + i, b * dA + g] += c * y
    rhs = F.mat(dA * dA, 1)
    for v in range(dA):
        rhs[v * dA + v, 0] = 1
    X = solve(M, rhs)
    if X is None:
        raise PreconditionError("generators admit no canonical element (not finitely projective)")
    E = F.mat(dB, dA)
    for b in range(dB):
        for g in range(dA):
            E[b, g] = X[b * dA + g, 0]
    return E


@dataclass
class KoszulPair:
    """A quadratic ring A, its quadratic dual B, both sliced to degree N, and e in B_1 (x) A_1."""
    A_pres: QuadraticPresentation
    B_pres: QuadraticPresentation
    A: GradedAlgebraSlice
    B: GradedAlgebraSlice
    E: object
    N: int

    @property
    def field(self) -> Field:
        return self.A.field

    def gen_terms(self):
        """Nonzero (beta, gamma, coefficient) of e."""
        E = self.E
        return [(b, g, E[b, g]) for b in range(E.nrows()) for g in range(E.ncols()) if E[b, g] != 0]

    def B_gen(self, b: int):
        return unit(self.field, self.B.comps[1].dim, b)

    def A_gen(self, g: int):
        return unit(self.field, self.A.comps[1].dim, g)


def koszul_pair(Q: QuadraticPresentation, N: int, B: QuadraticPresentation | None = None) -> KoszulPair:
    if Q.side != "left":
        raise PreconditionError("Koszul complexes are built for left-projective presentations")
    dual = quadratic_dual(Q)
    if B is not None and not (B.V.dim == dual.V.dim and B.rel == dual.rel):
        raise PreconditionError("second presentation is not the quadratic dual of the first")
    B = dual
    A_slice = build_quadratic_slice(Q, N)
    B_slice = build_quadratic_slice(B, N)
    E = canonical_element(Q.V, B.duality.pair, B.V.dim)
    return KoszulPair(Q, B, A_slice, B_slice, E, N)


def _right_hom_space(F: Field, src: Bimodule, tgt: Bimodule) -> Subspace:
    """Right R-linear maps src -> tgt as row-major vectors of tgt.dim x src.dim matrices."""
    m, n = tgt.dim, src.dim
    if m * n == 0:
        return Subspace.zero(F, m * n)
    if src.S.dim == 1:
        return Subspace.full(F, m * n)
    eqs = [_vec_right(F, src.right[i], m) - _vec_left(F, tgt.right[i], n) for i in range(src.S.dim)]
    return kernel(vstack(F, eqs, m * n))


def _coords(space: Subspace, rows):
    return space.coordinates(rows).transpose()


def first_koszul_complex(P: KoszulPair) -> CochainComplex:
    """Hom_{R^op}(B_i, A_{n-i}) in position -i, with (d phi)(b) = sum phi(b u^a) v_a."""
    F = P.field
    A, B, N = P.A, P.B, P.N
    C = CochainComplex(F, "first Koszul complex")
    spaces = {}
    for n in range(N + 1):
        for i in range(n + 1):
            H = _right_hom_space(F, B.comps[i], A.comps[n - i])
            spaces[(i, n)] = H
            C.add(-i, n, H.dim)
    terms = P.gen_terms()
    for n in range(1, N + 1):
        for i in range(1, n + 1):
            src, dst = spaces[(i, n)], spaces[(i - 1, n)]
            if src.dim == 0 or dst.dim == 0:
                continue
            j = n - i
            L = None
            for b, g, c in terms:
                RA = A.right_mult(j, 1, P.A_gen(g))
                RB = B.right_mult(i - 1, 1, P.B_gen(b))
                term = kron(F, RA, RB.transpose()) * c
                L = term if L is None else L + term
            if L is None:
                continue
            C.set_differential(-i, n, _coords(dst, src.basis * L.transpose()))
    _finish(C)
    return C


def second_koszul_complex(P: KoszulPair) -> CochainComplex:
    """C_i (x)_R A_{n-i} in position -i with C_i = Hom_{R^op}(B_i, R)."""
    F = P.field
    A, B, N = P.A, P.B, P.N
    Cs = [right_dual(B.comps[i]) for i in range(N + 1)]
    K = CochainComplex(F, "second Koszul complex")
    tps = {}
    for n in range(N + 1):
        for i in range(n + 1):
            tp = tensor_many([Cs[i], A.comps[n - i]])
            tps[(i, n)] = tp
            K.add(-i, n, tp.dim, tp.module)
    terms = P.gen_terms()
    for n in range(1, N + 1):
        for i in range(1, n + 1):
            src, dst = tps[(i, n)], tps[(i - 1, n)]
            if src.dim == 0 or dst.dim == 0:
                continue
            j = n - i
            acts = {}
            M = None
            for b, g, c in terms:
                if b not in acts:
                    acts[b] = dual_precompose(Cs[i], Cs[i - 1], B.left_mult(1, i - 1, P.B_gen(b)))
                LA = A.left_mult(1, j, P.A_gen(g))
                term = kron(F, acts[b], LA) * c
                M = term if M is None else M + term
            if M is None:
                continue
            K.set_differential(-i, n, dst.proj * M * src.lift)
    _finish(K)
    return K


def dual_precompose(Ci: DualModule, Cj: DualModule, L):
    """Matrix of c -> c o L from Hom(B_i, R) to Hom(B_j, R) for L: B_j -> B_i."""
    F = Ci.field
    M = F.mat(Cj.dim, Ci.dim)
    for k in range(Ci.dim):
        f = Ci.maps[k] * L
        coords = Cj.coordinates_of(f)
        for r, x in enumerate(coords):
            if x != 0:
                M[r, k] = x
    return M


def dual_koszul_complex(P: KoszulPair) -> CochainComplex:
    """B_i (x)_R A_j in position i, internal index j - i, with b (x) a -> sum b u^a (x) v_a a."""
    F = P.field
    A, B, N = P.A, P.B, P.N
    K = CochainComplex(F, "dual Koszul complex")
    tps = {}
    for i in range(N + 1):
        for j in range(N + 1):
            tp = tensor_many([B.comps[i], A.comps[j]])
            tps[(i, j)] = tp
            K.add(i, j - i, tp.dim, tp.module)
    terms = P.gen_terms()
    for i in range(N):
        for j in range(N):
            src, dst = tps[(i, j)], tps[(i + 1, j + 1)]
            if src.dim == 0 or dst.dim == 0:
                continue
            M = None
            for b, g, c in terms:
                RB = B.right_mult(i, 1, P.B_gen(b))
                LA = A.left_mult(1, j, P.A_gen(g))
                term = kron(F, RB, LA) * c
                M = term if M is None else M + term
            if M is not None:
                K.set_differential(i, j - i, dst.proj * M * src.lift)
    # positions whose outgoing or incoming neighbour is beyond degree N
    for i in range(N + 1):
        for j in range(N + 1):
            out_missing = (i == N or j == N) and not _known_zero(B, A, i + 1, j + 1)
            if out_missing and tps[(i, j)].dim:
                K.truncated.add((i, j - i))
    _finish(K)
    return K


def _known_zero(B: GradedAlgebraSlice, A: GradedAlgebraSlice, i: int, j: int) -> bool:
    """B_i (x) A_j vanishes for a reason visible inside the slices."""
    return any(B.comps[t].dim == 0 for t in range(min(i, B.N + 1))) or \
        any(A.comps[t].dim == 0 for t in range(1, min(j, A.N + 1)))


def _finish(C: CochainComplex):
    bad = C.square_zero_failures()
    if bad:
        raise ComplexError(f"{C.name}: d^2 != 0 at {bad[0]} (input pair is not quadratic dual)")


def koszul_complex_exact(C: CochainComplex, N: int) -> dict:
    """{n: exact?} for internal degrees 1..N of a first/second complex."""
    return {n: C.is_exact(n) for n in range(1, N + 1)}
