"""Quadratic presentations over a base algebra, graded slices, quadratic duality and Koszulity."""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from math import prod

from .bimodule import (
    AlgebraError,
    BaseAlgebra,
    Bimodule,
    DualModule,
    TensorProduct,
    balancing_kernel,
    double_dual_eval,
    is_projective_left,
    left_dual,
    right_dual,
    tensor_many,
)
from .linalg import (
    DimensionError,
    Field,
    Quotient,
    Subspace,
    from_rows,
    from_sparse,
    identity,
    image,
    intersect_all,
    kernel,
    kron,
    kron_id,
    rank,
    select_cols,
    vstack,
)


class PreconditionError(ValueError):
    """A hypothesis required by an operation does not hold."""


def tensor_power_kernel(V: Bimodule, n: int) -> Subspace:
    """Balancing kernel of V^{(x)_k n} -> V^{(x)_R n}."""
    F = V.field
    if n < 2 or V.R.dim == 1:
        return Subspace.zero(F, V.dim ** n)
    return balancing_kernel([V] * n)


def word_action(V: Bimodule, n: int, side: str, i: int):
    """Matrix of the left (right) action of e_i on V^{(x)_k n}."""
    F = V.field
    if side == "left":
        return kron_id(F, 1, V.left[i], V.dim ** (n - 1))
    return kron_id(F, V.dim ** (n - 1), V.right[i], 1)


def positioned(F: Field, sub: Subspace, d: int, before: int, after: int) -> Subspace:
    """V^{before} (x) sub (x) V^{after} inside V^{(x) n} (k-tensor products)."""
    if sub.dim == 0:
        return Subspace.zero(F, d ** before * sub.ambient * d ** after)
    rows = kron_id(F, d ** before, sub.basis, d ** after)
    return Subspace.span(F, rows.ncols(), rows)


@dataclass
class QuadraticPresentation:
    """T_R(V)/(I) with the relations stored as their full preimage in V (x)_k V.

    ``side`` records which one-sided projectivity the presentation is used
    with: ``left`` for rings whose generators are left projective (dualized
    with left duals), ``right`` for the opposite convention.
    """
    R: BaseAlgebra
    V: Bimodule
    rel: Subspace
    side: str = "left"
    name: str = ""
    duality: object = None

    def __post_init__(self):
        d = self.V.dim
        if self.rel.ambient != d * d:
            raise DimensionError(f"relations live in dimension {self.rel.ambient}, expected {d * d}")
        K = tensor_power_kernel(self.V, 2)
        if not self.rel.contains(K):
            self.rel = self.rel + K
        for side in ("left", "right"):
            for i in range(self.R.dim):
                M = word_action(self.V, 2, side, i)
                if not self.rel.contains_vectors(self.rel.basis * M.transpose()):
                    raise AlgebraError(f"relation subspace is not closed under the {side} action of basis element {i}")

    @classmethod
    def from_relations(cls, R: BaseAlgebra, V: Bimodule, relations: Sequence, side: str = "left",
                       name: str = "") -> QuadraticPresentation:
        F = R.field
        d = V.dim
        rows = from_rows(F, relations, d * d) if len(relations) else F.mat(0, d * d)
        rel = Subspace.span(F, d * d, rows)
        return cls(R, V, rel, side, name)

    @property
    def field(self) -> Field:
        return self.R.field

    @property
    def balancing(self) -> Subspace:
        return tensor_power_kernel(self.V, 2)

    @property
    def relation_dim(self) -> int:
        """dim_k of I inside V (x)_R V."""
        return self.rel.dim - self.balancing.dim

    def relation_module(self) -> Bimodule:
        """I as a subbimodule of V (x)_R V."""
        tp = tensor_many([self.V, self.V])
        img = self.rel.image_under(tp.proj)
        return tp.module.submodule(img)

    def same_as(self, other: QuadraticPresentation) -> bool:
        return self.R == other.R and self.V.dim == other.V.dim and self.rel == other.rel

    def opposite_side(self) -> str:
        return "right" if self.side == "left" else "left"


class GradedAlgebraSlice:
    """Components A_0..A_N with multiplication tables.

    ``mult[(i, j)]`` is the ``dim A_{i+j} x (dim A_i * dim A_j)`` matrix of the
    product on the k-tensor product A_i (x)_k A_j.
    """

    def __init__(self, R: BaseAlgebra, comps: Sequence[Bimodule], mult: dict, name: str = "",
                 words: dict | None = None, generators: Bimodule | None = None):
        self.R = R
        self.field = R.field
        self.comps = list(comps)
        self.mult = dict(mult)
        self.name = name
        # quadratic slices remember A_n = V^{(x) n}/J_n
        self.words = words or {}
        self.generators = generators

    @property
    def N(self) -> int:
        return len(self.comps) - 1

    def dims(self) -> list[int]:
        return [A.dim for A in self.comps]

    def __getitem__(self, n: int) -> Bimodule:
        return self.comps[n]

    @classmethod
    def from_tables(cls, R: BaseAlgebra, comps: Sequence[Bimodule], mult: dict, name: str = ""):
        """Fill in the degree-0 products from the bimodule actions."""
        F = R.field
        full = dict(mult)
        for n, A in enumerate(comps):
            full[(0, n)] = action_table(F, R, A, "left")
            full[(n, 0)] = action_table(F, R, A, "right")
        return cls(R, comps, full, name)

    def product(self, i: int, x, j: int, y):
        """Product of column vectors x in A_i and y in A_j."""
        F = self.field
        if i + j > self.N:
            raise DimensionError(f"degree {i + j} beyond slice degree {self.N}")
        return self.mult[(i, j)] * kron(F, x, y)

    def right_mult(self, i: int, j: int, y):
        """Matrix of x -> x y from A_i to A_{i+j} for a column vector y in A_j."""
        F = self.field
        return self.mult[(i, j)] * kron(F, identity(F, self.comps[i].dim), y)

    def left_mult(self, i: int, j: int, x):
        """Matrix of y -> x y from A_j to A_{i+j} for a column vector x in A_i."""
        F = self.field
        return self.mult[(i, j)] * kron(F, x, identity(F, self.comps[j].dim))

    def validate(self):
        F = self.field
        N = self.N
        for i in range(N + 1):
            for j in range(N + 1 - i):
                for l in range(N + 1 - i - j):
                    Ai, Aj, Al = (self.comps[t].dim for t in (i, j, l))
                    if Ai * Aj * Al == 0:
                        continue
                    lhs = self.mult[(i + j, l)] * kron(F, self.mult[(i, j)], identity(F, Al))
                    rhs = self.mult[(i, j + l)] * kron(F, identity(F, Ai), self.mult[(j, l)])
                    if lhs != rhs:
                        raise AlgebraError(f"multiplication not associative in degrees ({i},{j},{l})")
        return True


def action_table(F: Field, R: BaseAlgebra, A: Bimodule, side: str):
    r, d = R.dim, A.dim
    M = F.mat(d, r * d)
    for l in range(r):
        act = A.left[l] if side == "left" else A.right[l]
        for a in range(d):
            for i in range(d):
                y = act[i, a]
                if y != 0:
                    if side == "left":
                        M[i, l * d + a] = y
                    else:
                        M[i, a * r + l] = y
    return M


class WordTower:
    """V^{(x) n} modulo an ideal generated by a degree-two subspace J_2, built one factor at a time.

    Step n is the quotient of T_{n-1} (x)_k V by the image of T_{n-2} (x) J_2, so every
    elimination happens in dimension dim T_{n-1} * dim V rather than (dim V)^n.  With
    J_2 the balancing kernel this is V^{(x)_R n}; with J_2 = I^ it is the quadratic ring.
    """

    def __init__(self, V: Bimodule, J2: Subspace, N: int):
        F = V.field
        d = V.dim
        self.field = F
        self.V = V
        self.J2 = J2
        self.steps: dict = {}  # n >= 2: Quotient of T_{n-1} (x)_k V
        self.dims = [1, d]
        self.mods = {1: V}
        for n in range(2, N + 1):
            self._extend(n)

    def _extend(self, n: int):
        F = self.field
        d = self.V.dim
        if n == 2:
            sub = self.J2
        else:
            prev = self.steps[n - 1]
            a = self.dims[n - 2]
            amb = self.dims[n - 1] * d
            if self.J2.dim and a:
                rows = kron_id(F, a, self.J2.basis, 1)  # T_{n-2} (x) J_2
                rows = rows * kron(F, prev.proj, identity(F, d)).transpose()
                sub = Subspace.span(F, amb, rows)
            else:
                sub = Subspace.zero(F, amb)
        q = Quotient(sub)
        self.steps[n] = q
        self.dims.append(q.dim)
        prev_mod = self.mods[n - 1]
        left = [q.proj * kron(F, M, identity(F, d)) * q.lift for M in prev_mod.left]
        right = [q.proj * kron(F, identity(F, prev_mod.dim), M) * q.lift for M in self.V.right]
        self.mods[n] = Bimodule(self.V.R, self.V.S, q.dim, left, right)

    def step_image(self, n: int, rows):
        """Rows of T_{n-1} (x)_k V pushed to T_n."""
        return rows * self.steps[n].proj.transpose() if n >= 2 else rows

    def global_maps(self, n: int):
        """(proj, lift) between V^{(x)_k n} and T_n."""
        F = self.field
        d = self.V.dim
        proj = identity(F, d) if n >= 1 else identity(F, 1)
        lift = proj
        for m in range(2, n + 1):
            q = self.steps[m]
            proj = q.proj * kron(F, proj, identity(F, d))
            lift = kron(F, lift, identity(F, d)) * q.lift
        return proj, lift

    def positioned(self, sub: Subspace, n: int) -> list:
        """Images in T_n of T_{t-1} (x) sub (x) V^{n-t-1} for t = 1..n-1 (sub inside V (x)_k V)."""
        F = self.field
        d = self.V.dim
        out = []
        for t in range(1, n):
            a = self.dims[t - 1]
            rows = kron_id(F, a, sub.basis, 1) if sub.dim else F.mat(0, a * d * d)
            if t >= 2:
                rows = rows * kron(F, self.steps[t].proj, identity(F, d)).transpose()
            rows = self.step_image(t + 1, rows)
            for m in range(t + 2, n + 1):
                rows = self.step_image(m, kron(F, rows, identity(F, d)))
            out.append(Subspace.span(F, self.dims[n], rows))
        return out


class WordQuotient:
    """A_n as a quotient of V^{(x)_k n}: ``proj`` and ``lift`` are explicit, the kernel is lazy."""

    def __init__(self, proj, lift):
        self.proj = proj
        self.lift = lift
        self._sub = None

    @property
    def dim(self) -> int:
        return self.proj.nrows()

    @property
    def sub(self) -> Subspace:
        if self._sub is None:
            self._sub = kernel(self.proj)
        return self._sub


def build_quadratic_slice(Q: QuadraticPresentation, N: int) -> GradedAlgebraSlice:
    """A_n = V^{(x)_R n} / (relations) for n <= N with the induced products."""
    if N < 0:
        raise ValueError("degree must be nonnegative")
    F = Q.field
    R, V = Q.R, Q.V
    tower = WordTower(V, Q.rel, N)
    comps = [Bimodule.regular(R)]
    words = {}
    for n in range(1, N + 1):
        A = tower.mods[n]
        A.name = f"A{n}"
        comps.append(A)
        words[n] = WordQuotient(*tower.global_maps(n))
    mult = {}
    for n in range(N + 1):
        mult[(0, n)] = action_table(F, R, comps[n], "left")
        mult[(n, 0)] = action_table(F, R, comps[n], "right")
    for i in range(1, N + 1):
        for j in range(1, N + 1 - i):
            mult[(i, j)] = words[i + j].proj * kron(F, words[i].lift, words[j].lift)
    return GradedAlgebraSlice(R, comps, mult, name=Q.name, words=words, generators=V)


def quadratic_part(S: GradedAlgebraSlice, side: str = "left") -> QuadraticPresentation:
    """(R, A_1, ker(A_1 (x) A_1 -> A_2))."""
    if S.N < 2:
        raise ValueError("slice must contain degree 2")
    V = S.comps[1]
    rel = kernel(S.mult[(1, 1)]) if S.comps[2].dim else Subspace.full(S.field, V.dim ** 2)
    return QuadraticPresentation(S.R, V, rel, side, name=f"q({S.name})")


# ---------------------------------------------------------------------------
# quadratic duality


@dataclass
class Duality:
    """The pairing between the generators of a left-projective ring A and its dual B."""
    A_gens: Bimodule
    B_gens: Bimodule
    pair: list  # pair[a][b] = <a, b> as an R-vector

    def pairing_matrix2(self):
        """G[(u*dA+v)*r + l, g*dB+f] = l-th coordinate of <u <v,g>, f>."""
        A, B = self.A_gens, self.B_gens
        F = A.field
        r = A.R.dim
        dA, dB = A.dim, B.dim
        G = F.mat(dA * dA * r, dB * dB)
        # precompute <u e_m, f>
        ue = [[self.pair_vec(col_of(A.right[m], u), f) for f in range(dB)] for m in range(r) for u in range(dA)]
        for u in range(dA):
            for v in range(dA):
                for g in range(dB):
                    pvg = self.pair[v][g]
                    for m, c in enumerate(pvg):
                        if c == 0:
                            continue
                        for f in range(dB):
                            val = ue[m * dA + u][f]
                            for l, x in enumerate(val):
                                if x != 0:
                                    G[(u * dA + v) * r + l, g * dB + f] += c * x
        return G

    def pair_vec(self, u_vec, f: int) -> list:
        F = self.A_gens.field
        r = self.A_gens.R.dim
        out = [F.zero] * r
        for a, x in enumerate(u_vec):
            if x == 0:
                continue
            for l, y in enumerate(self.pair[a][f]):
                if y != 0:
                    out[l] += x * y
        return out


def col_of(M, j: int) -> list:
    return [M[i, j] for i in range(M.nrows())]


def _pairing_from_dual(D: DualModule, gens_are_A: bool) -> list:
    """pair[a][b] for the source module of D and D itself."""
    src = D.source
    r = D.maps[0].nrows() if D.maps else (src.R.dim if D.side == "left" else src.S.dim)
    if gens_are_A:
        return [[[D.maps[k][l, a] for l in range(r)] for k in range(D.dim)] for a in range(src.dim)]
    return [[[D.maps[a][l, b] for l in range(r)] for b in range(src.dim)] for a in range(D.dim)]


def quadratic_dual(Q: QuadraticPresentation, check: bool = True) -> QuadraticPresentation:
    """Quadratic dual: left duals for left-projective input, right duals otherwise."""
    F = Q.field
    if Q.side == "left":
        if check:
            ensure_left_projective(Q)
        D = left_dual(Q.V)
        dual = Duality(Q.V, D, _pairing_from_dual(D, True))
        G = dual.pairing_matrix2()
        r = Q.R.dim
        dA, dB = Q.V.dim, D.dim
        # constraints: for x in I^, l: sum_uv x_uv G[(uv, l), :]
        X = Q.rel.basis
        rows = []
        if Q.rel.dim:
            for l in range(r):
                sel = select_rows_stride(F, G, r, l)  # (dA*dA) x dB^2
                rows.append(X * sel)
        eqs = vstack(F, rows, dB * dB) if rows else F.mat(0, dB * dB)
        rel = kernel(eqs)
        out = QuadraticPresentation(Q.R, D, rel, "right", name=f"{Q.name}^!")
    else:
        if check:
            ensure_right_projective(Q)
        D = right_dual(Q.V)
        dual = Duality(D, Q.V, _pairing_from_dual(D, False))
        G = dual.pairing_matrix2()
        r = Q.R.dim
        dA, dB = D.dim, Q.V.dim
        Y = Q.rel.basis
        rows = []
        if Q.rel.dim:
            for l in range(r):
                sel = select_rows_stride(F, G, r, l)  # (dA^2) x (dB^2)
                rows.append(Y * sel.transpose())
        eqs = vstack(F, rows, dA * dA) if rows else F.mat(0, dA * dA)
        rel = kernel(eqs)
        out = QuadraticPresentation(Q.R, D, rel, "left", name=f"{Q.name}^!")
    out.duality = dual
    return out


def select_rows_stride(F: Field, G, r: int, l: int):
    n = G.nrows() // r
    out = F.mat(n, G.ncols())
    tab = G.table()
    for i in range(n):
        row = tab[i * r + l]
        for j, x in enumerate(row):
            if x != 0:
                out[i, j] = x
    return out


def ensure_left_projective(Q: QuadraticPresentation):
    if not is_projective_left(Q.V):
        raise PreconditionError("generators are not a projective left module")
    S = build_quadratic_slice(Q, 2)
    if not is_projective_left(S.comps[2]):
        raise PreconditionError("degree-2 component is not a projective left module")


def ensure_right_projective(Q: QuadraticPresentation):
    opV = opposite_bimodule(Q.V)
    if not is_projective_left(opV):
        raise PreconditionError("generators are not a projective right module")
    S = build_quadratic_slice(Q, 2)
    if not is_projective_left(opposite_bimodule(S.comps[2])):
        raise PreconditionError("degree-2 component is not a projective right module")


def opposite_bimodule(V: Bimodule) -> Bimodule:
    """V viewed as an S^op-R^op-bimodule."""
    return Bimodule(V.S.opposite(), V.R.opposite(), V.dim, V.right, V.left)


@dataclass
class RoundTrip:
    equal: bool
    iso: object
    pulled_back: Subspace


def double_dual_roundtrip(Q: QuadraticPresentation) -> RoundTrip:
    """dual(dual(Q)) compared with Q through the double-dual evaluation."""
    F = Q.field
    if Q.side != "left":
        raise PreconditionError("round trip expects a left-projective presentation")
    QQ = quadratic_dual(quadratic_dual(Q))
    ev = double_dual_eval(Q.V)
    E = ev.matrix
    EE = kron(F, E, E)
    pulled = QQ.rel.preimage_under(EE)
    return RoundTrip(bool(ev.is_isomorphism) and pulled == Q.rel, ev, pulled)


# ---------------------------------------------------------------------------
# bar complex and Tor


def compositions(j: int, i: int):
    """Ordered compositions of j into i positive parts, lexicographic."""
    if i == 0:
        if j == 0:
            yield ()
        return
    if i == 1:
        if j >= 1:
            yield (j,)
        return
    for first in range(1, j - i + 2):
        for rest in compositions(j - first, i - 1):
            yield (first,) + rest


class BarComplex:
    """Reduced relative bar complex of a graded slice in one internal degree."""

    def __init__(self, S: GradedAlgebraSlice, j: int):
        if j > S.N:
            raise DimensionError(f"internal degree {j} beyond slice degree {S.N}")
        self.S = S
        self.j = j
        self.F = S.field
        self._tp = {}

    def tensor(self, comp: tuple) -> TensorProduct:
        """A_{c_1} (x)_R ... (x)_R A_{c_k}, built one factor at a time over a nontrivial base."""
        tp = self._tp.get(comp)
        if tp is None:
            if len(comp) == 1 or self.S.R.dim == 1:
                tp = tensor_many([self.S.comps[c] for c in comp])
            else:
                tp = tensor_many([self.tensor(comp[:-1]).module, self.S.comps[comp[-1]]])
            self._tp[comp] = tp
        return tp

    def merge_map(self, c: tuple, s: int):
        """Matrix of multiplying factors s and s + 1 of c, between the iterated tensor products."""
        F = self.F
        merged = c[:s] + (c[s] + c[s + 1],) + c[s + 2:]
        tp, tq = self.tensor(c), self.tensor(merged)
        last = self.S.comps[c[-1]].dim
        if s + 2 < len(c):
            inner = self.merge_map(c[:-1], s)
            return tq.proj * kron(F, inner, identity(F, last)) * tp.lift
        mult = self.S.mult[(c[s], c[s + 1])]
        if len(c) == 2:
            return mult * tp.lift
        head, base = self.tensor(c[:-1]), self.tensor(c[:-2])
        M = kron(F, identity(F, base.dim), mult) * kron(F, head.lift, identity(F, last))
        return tq.proj * M * tp.lift

    def component_dims(self, i: int) -> list:
        return [(c, self.tensor(c).dim) for c in compositions(self.j, i)]

    def dim(self, i: int) -> int:
        if self.j == 0:
            return self.S.comps[0].dim if i == 0 else 0
        return sum(d for _, d in self.component_dims(i))

    def differential(self, i: int):
        """d_i : Bar_i -> Bar_{i-1}."""
        F = self.F
        src = list(compositions(self.j, i))
        dst = list(compositions(self.j, i - 1))
        src_off, n_src = _offsets([self.tensor(c).dim for c in src])
        dst_off, n_dst = _offsets([self.tensor(c).dim for c in dst])
        if i <= 1 or n_src == 0 or n_dst == 0:
            return F.mat(n_dst, n_src)
        dst_idx = {c: k for k, c in enumerate(dst)}
        entries = {}
        for a, c in enumerate(src):
            tp = self.tensor(c)
            if tp.dim == 0:
                continue
            dims = [self.S.comps[x].dim for x in c]
            iterated = self.S.R.dim > 1
            for s in range(i - 1):
                merged = c[:s] + (c[s] + c[s + 1],) + c[s + 2:]
                b = dst_idx[merged]
                tq = self.tensor(merged)
                if tq.dim == 0:
                    continue
                left = prod(dims[:s])
                right = prod(dims[s + 2:])
                sign = -1 if s % 2 == 0 else 1
                mult = self.S.mult[(c[s], c[s + 1])]
                if iterated:
                    triples = nonzero_triples(self.merge_map(c, s))
                elif tp.trivial and tq.trivial:
                    triples = kron_id_triples(mult, left, right)
                else:
                    M = kron_id(F, left, mult, right)
                    block = tq.proj * select_cols(F, M, tp.quotient.free)
                    triples = nonzero_triples(block)
                r0, c0 = dst_off[b], src_off[a]
                for r, col, x in triples:
                    key = (r0 + r, c0 + col)
                    entries[key] = entries.get(key, F.zero) + sign * x
        return from_sparse(F, n_dst, n_src, entries)

    def homology_dims(self) -> dict:
        """{i: dim Tor_{i,j}} for 0 <= i <= j."""
        if self.j == 0:
            return {0: self.S.comps[0].dim}
        ranks = {0: 0}
        for i in range(1, self.j + 2):
            ranks[i] = rank(self.differential(i)) if 2 <= i <= self.j else 0
        return {i: self.dim(i) - ranks[i] - ranks[i + 1] for i in range(self.j + 1)}


def _offsets(sizes):
    off = []
    o = 0
    for s in sizes:
        off.append(o)
        o += s
    return off, o


def _add_block(D, block, r0: int, c0: int):
    for i, j, x in nonzero_triples(block):
        D[r0 + i, c0 + j] += x


def nonzero_triples(M) -> list:
    n = M.ncols()
    if n == 0:
        return []
    return [(k // n, k % n, x) for k, x in enumerate(M.entries()) if x != 0]


def kron_id_triples(A, left: int, right: int) -> list:
    """Nonzero entries of I_left (x) A (x) I_right."""
    m, n = A.nrows(), A.ncols()
    out = []
    for i, j, x in nonzero_triples(A):
        for a in range(left):
            r = (a * m + i) * right
            c = (a * n + j) * right
            for b in range(right):
                out.append((r + b, c + b, x))
    return out


def bar_tor(Q_or_slice, i: int, j: int, N: int | None = None) -> Bimodule:
    """Tor^A_{i,j}(R, R) as an R-R-bimodule."""
    S = _slice(Q_or_slice, max(j, N or 0))
    if i > j:
        return Bimodule.zero(S.R)
    bar = BarComplex(S, j)
    if j == 0:
        return S.comps[0]
    F = S.field
    n = bar.dim(i)
    d_out = bar.differential(i) if i >= 1 else F.mat(0, n)
    d_in = bar.differential(i + 1) if i + 1 <= j else F.mat(n, 0)
    Z = kernel(d_out) if d_out.nrows() else Subspace.full(F, n)
    B = image(d_in) if d_in.ncols() else Subspace.zero(F, n)
    # bimodule structure: outer actions on the bar component
    left, right = _bar_actions(bar, i)
    return _subquotient(S.R, Z, B, left, right)


def _bar_actions(bar: BarComplex, i: int):
    F = bar.F
    R = bar.S.R
    comps = list(compositions(bar.j, i))
    off, n = _offsets([bar.tensor(c).dim for c in comps])
    left = [F.mat(n, n) for _ in range(R.dim)]
    right = [F.mat(n, n) for _ in range(R.dim)]
    for a, c in enumerate(comps):
        tp = bar.tensor(c)
        for l in range(R.dim):
            _add_block(left[l], tp.module.left[l], off[a], off[a])
            _add_block(right[l], tp.module.right[l], off[a], off[a])
    return left, right


def _subquotient(R: BaseAlgebra, Z: Subspace, B: Subspace, left, right) -> Bimodule:
    F = R.field
    if Z.dim == 0:
        return Bimodule.zero(R)
    Bz = Subspace.span(F, Z.dim, Z.coordinates(B.basis)) if B.dim else Subspace.zero(F, Z.dim)
    q = Quotient(Bz)

    def act(M):
        return q.proj * Z.coordinates(Z.basis * M.transpose()).transpose() * q.lift

    return Bimodule(R, R, q.dim, [act(M) for M in left], [act(M) for M in right])


def _slice(Q_or_slice, N: int) -> GradedAlgebraSlice:
    if isinstance(Q_or_slice, GradedAlgebraSlice):
        if Q_or_slice.N < N:
            raise DimensionError(f"slice has degree {Q_or_slice.N}, need {N}")
        return Q_or_slice
    return build_quadratic_slice(Q_or_slice, N)


def tor_table(Q_or_slice, N: int) -> dict:
    """{(i, j): dim Tor_{i,j}} for 0 <= i <= j <= N."""
    S = _slice(Q_or_slice, N)
    out = {}
    for j in range(N + 1):
        for i, d in BarComplex(S, j).homology_dims().items():
            out[(i, j)] = d
    return out


@dataclass
class Verdict:
    ok: bool
    degree: int
    failure: tuple | None = None
    detail: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def check_generated_and_quadratic(Q_or_slice, N: int) -> dict:
    S = _slice(Q_or_slice, N)
    gen_fail = None
    quad_fail = None
    for j in range(2, N + 1):
        dims = BarComplex(S, j).homology_dims()
        if gen_fail is None and dims.get(1, 0) != 0:
            gen_fail = j
        if quad_fail is None and j >= 3 and dims.get(2, 0) != 0:
            quad_fail = j
    if gen_fail is not None and (quad_fail is None or gen_fail < quad_fail):
        quad_fail = gen_fail if quad_fail is None else min(gen_fail, quad_fail)
    return {
        "generated": Verdict(gen_fail is None, N, None if gen_fail is None else (1, gen_fail)),
        "quadratic": Verdict(gen_fail is None and quad_fail is None, N,
                             None if quad_fail is None else (2 if gen_fail is None or quad_fail != gen_fail else 1, quad_fail)),
    }


def check_koszul_tor(Q: QuadraticPresentation, N: int) -> Verdict:
    """Off-diagonal vanishing of Tor_{i,j} for i < j <= N."""
    S = build_quadratic_slice(Q, N)
    table = {}
    for j in range(1, N + 1):
        dims = BarComplex(S, j).homology_dims()
        for i, d in dims.items():
            table[(i, j)] = d
            if i != j and d != 0:
                return Verdict(False, N, (i, j), {"tor": table})
    return Verdict(True, N, None, {"tor": table})


def lattice_generators(Q: QuadraticPresentation, n: int, tower: WordTower | None = None) -> tuple[list, WordTower]:
    """X_t = V^{t-1} (x) I (x) V^{n-t-1} (t = 1..n-1) inside V^{(x)_R n}."""
    tower = tower or WordTower(Q.V, Q.balancing, n)
    return tower.positioned(Q.rel, n), tower


def _intersect_rows(F: Field, X, C, ambient: int):
    """Independent rows spanning rowspace(X) cap rowspace(C); X, C have independent rows."""
    if X.nrows() == 0 or C.nrows() == 0:
        return F.mat(0, ambient)
    ker = kernel(vstack(F, [X, C], ambient).transpose())
    if ker.dim == 0:
        return F.mat(0, ambient)
    coeff = select_cols(F, ker.basis, range(X.nrows()))
    return coeff * X


def check_koszul_distributive(Q: QuadraticPresentation, N: int, check: bool = True) -> Verdict:
    """Distributivity of the relation lattices in degrees 4..N via the triple criterion.

    The lattice lives in V^{(x)_R n}.  With A = X_1+...+X_{k-1}, B = X_k and
    C = X_{k+1} cap ... cap X_{n-1} one always has A cap C + B cap C inside
    (A+B) cap C, so equality is decided by dimensions, and B cap C is the next
    suffix intersection.
    """
    if check:
        if Q.side == "left":
            ensure_left_projective(Q)
        else:
            ensure_right_projective(Q)
    F = Q.field
    if N < 4:
        return Verdict(True, N)
    tower = WordTower(Q.V, Q.balancing, N)
    for n in range(4, N + 1):
        amb = tower.dims[n]
        X = [S.basis for S in tower.positioned(Q.rel, n)]
        # suffix[k] = X_{k+1} cap ... cap X_{n-1} (1-based k)
        suffix = {n - 2: X[n - 2]}
        for k in range(n - 3, 0, -1):
            suffix[k] = _intersect_rows(F, X[k], suffix[k + 1], amb)
        for k in range(2, n - 1):
            A = vstack(F, X[:k - 1], amb)
            B, C, BC = X[k - 1], suffix[k], suffix[k - 1]
            dimA = rank(A)
            lhs = rank(vstack(F, [A, B], amb)) + C.nrows() - rank(vstack(F, [A, B, C], amb))
            dim_ac = dimA + C.nrows() - rank(vstack(F, [A, C], amb))
            dim_abc = dimA + BC.nrows() - rank(vstack(F, [A, BC], amb))
            rhs = dim_ac + BC.nrows() - dim_abc
            if lhs != rhs:
                return Verdict(False, N, (n, k), {"dims": (lhs, rhs)})
    return Verdict(True, N)


def relation_intersections(Q: QuadraticPresentation, n: int) -> Bimodule:
    """I^{(n)} as a subbimodule of V^{(x)_R n}."""
    if n < 2:
        raise ValueError("n must be at least 2")
    X, tower = lattice_generators(Q, n)
    inter = intersect_all(Q.field, tower.dims[n], X)
    return tower.mods[n].submodule(inter)


@dataclass
class KoszulReport:
    distributive: Verdict
    tor: Verdict

    @property
    def agree(self) -> bool:
        return self.distributive.ok == self.tor.ok


def koszul_report(Q: QuadraticPresentation, N: int) -> KoszulReport:
    """Both Koszulity checkers up to degree N."""
    return KoszulReport(check_koszul_distributive(Q, N), check_koszul_tor(Q, N))
