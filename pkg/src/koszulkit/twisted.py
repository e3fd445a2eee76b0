"""Twisted Koszul modules linking a CDG slice (B, d, h) with its filtered dual ring.

Windows are rectangular: B-degrees up to N and filtration layers up to M.  Every
axiom instance that needs data outside the window is listed as undefined instead
of being dropped.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .bimodule import (
    BaseAlgebra,
    Bimodule,
    is_projective_left,
    left_dual,
    right_dual,
    tensor_many,
)
from .cdg import AxiomReport, CdgRingSlice, build_cdg_dual, cdg_connection_change
from .complexes import CochainComplex, ComplexError, WindowError
from .koszul import _right_hom_space, canonical_element
from .linalg import (
    Field,
    Subspace,
    _echelon,
    hstack,
    identity,
    image,
    is_zero,
    kernel,
    kron,
    rank,
    select_rows,
    solve,
    unit,
    vec,
    vstack,
)
from .nonhomog import NonhomogPresentation
from .pbw import PBWResult, generator_section, pbw_reconstruct
from .quadratic import (
    GradedAlgebraSlice,
    PreconditionError,
    QuadraticPresentation,
    opposite_bimodule,
    quadratic_dual,
)


def _kron3(F: Field, a, b, c):
    return kron(F, kron(F, a, b), c)


def _on_space(src: Subspace, tgt: Subspace, op):
    """Matrix (column convention) of ``op`` restricted to src -> tgt, or None if it leaves tgt."""
    F = src.field
    if src.dim == 0 or tgt.dim == 0:
        if src.dim and not is_zero(src.basis * op.transpose()):
            return None
        return F.mat(tgt.dim, src.dim)
    img = src.basis * op.transpose()
    if not tgt.contains_vectors(img):
        return None
    return tgt.coordinates(img).transpose()


def _hom_vec_left(F: Field, A, cols: int):
    """f -> A f on row-major vectors of matrices with ``cols`` columns."""
    return kron(F, A, identity(F, cols))


def _hom_vec_right(F: Field, B, rows: int):
    """f -> f B on row-major vectors of matrices with ``rows`` rows."""
    return kron(F, identity(F, rows), B.transpose())


# ---------------------------------------------------------------------------
# the filtered ring


class FilteredRingSlice:
    """F_0 <= F_1 <= ... <= F_M realized as the components of the Rees ring A^.

    F_j is A^_j and the inclusion F_j -> F_{j+1} is multiplication by the central t.
    ``section`` is the strict-generator splitting gr_1 -> F_1 as a matrix.
    """

    def __init__(self, res: PBWResult, section=None, name: str = ""):
        self.pbw = res
        self.slice = res.slice
        self.field = res.slice.field
        self.R = res.slice.R
        self.t = res.t
        self.section = generator_section(res) if section is None else section
        self.name = name
        self._incl: dict = {}

    @property
    def N(self) -> int:
        return self.slice.N

    def layer(self, j: int) -> Bimodule:
        return self.slice.comps[j]

    def dims(self) -> list:
        return [c.dim for c in self.slice.comps]

    def incl(self, j: int):
        """F_j -> F_{j+1}."""
        if j not in self._incl:
            self._incl[j] = self.slice.left_mult(1, j, self.t)
        return self._incl[j]

    def embed(self, j: int, k: int):
        """F_j -> F_k for j <= k."""
        M = identity(self.field, self.layer(j).dim)
        for i in range(j, k):
            M = self.incl(i) * M
        return M

    def one(self):
        """The unit as an element of F_0 = R."""
        return vec(self.field, self.R.unit)

    def gen(self, g: int):
        F = self.field
        out = F.mat(self.section.nrows(), 1)
        for i in range(self.section.nrows()):
            out[i, 0] = self.section[i, g]
        return out

    def lmul(self, i: int, x, j: int):
        """y -> x y from F_j to F_{i+j} for x in F_i."""
        return self.slice.left_mult(i, j, x)

    def rmul(self, j: int, y, i: int):
        """x -> x y from F_i to F_{i+j} for y in F_j."""
        return self.slice.right_mult(i, j, y)


# ---------------------------------------------------------------------------
# two-sided data


@dataclass
class TwoSidedData:
    """The CDG slice B, the filtered ring A~, C_n = Hom_{R^op}(B^n, R) and e' in B^1 (x)_R F_1.

    ``terms`` lists e' as pairs (b, c) with b in B^1 and c in F_1 (columns).
    """
    A: FilteredRingSlice
    B: CdgRingSlice
    C: list
    terms: list
    compat: AxiomReport
    opposite: TwoSidedData | None = None

    @property
    def field(self) -> Field:
        return self.B.field

    @property
    def R(self) -> BaseAlgebra:
        return self.B.R

    def e_prime(self):
        """e' as a vector of the balanced tensor product B^1 (x)_R F_1."""
        F = self.field
        tp = tensor_many([self.B.slice.comps[1], self.A.layer(1)])
        v = F.mat(tp.ambient, 1)
        for b, c in self.terms:
            v += kron(F, b, c)
        return tp.proj * v


def _compat_report(A: FilteredRingSlice, B: CdgRingSlice, terms: list) -> AxiomReport:
    """e' r = r e' + d(r) (x) 1 for every basis element r of R."""
    F = B.field
    R = B.R
    B1, A1 = B.slice.comps[1], A.layer(1)
    tp = tensor_many([B1, A1])
    e = F.mat(tp.ambient, 1)
    for b, c in terms:
        e += kron(F, b, c)
    one = A.incl(0) * A.one()
    rep = AxiomReport()
    for s in range(R.dim):
        lhs = kron(F, identity(F, B1.dim), A1.right[s]) * e
        dr = B.d[0] * unit(F, R.dim, s)
        rhs = kron(F, B1.left[s], identity(F, A1.dim)) * e + kron(F, dr, one)
        rep.record("e_prime_compat", is_zero(tp.proj * (lhs - rhs)), {"basis": s})
    rep.results.setdefault("e_prime_compat", True)
    return rep


def _terms_from_E(F: Field, A: FilteredRingSlice, dB: int, E) -> list:
    out = []
    for b in range(E.nrows()):
        for g in range(E.ncols()):
            c = E[b, g]
            if c != 0:
                out.append((unit(F, dB, b) * c, A.gen(g)))
    return out


def two_sided_data(C: CdgRingSlice, M: int, opposite: bool = False) -> TwoSidedData:
    """Reconstruct A~ through filtration M and assemble e'.

    With ``opposite`` the same is done for the opposite CDG ring, giving A~#.
    """
    res = pbw_reconstruct(C, M)
    if not res.ok:
        raise PreconditionError("the PBW comparison fails inside the window")
    F = C.field
    A = FilteredRingSlice(res, name=f"{C.name}~")
    gq = quadratic_dual(C.presentation)
    dB = C.slice.comps[1].dim
    E = canonical_element(gq.V, gq.duality.pair, dB)
    terms = _terms_from_E(F, A, dB, E)
    Cs = [right_dual(C.slice.comps[n]) for n in range(C.N + 1)]
    D = TwoSidedData(A, C, Cs, terms, _compat_report(A, C, terms))
    if opposite:
        D.opposite = two_sided_data(opposite_cdg(C), M)
    return D


def build_two_sided(P: NonhomogPresentation, N: int, M: int, opposite: bool = False) -> TwoSidedData:
    return two_sided_data(build_cdg_dual(P, max(N, 3)), M, opposite)


def change_twisting(D: TwoSidedData, a) -> TwoSidedData:
    """Data for (B, d + [a,-], h + d a + a^2) with e'' = e' + a (x) 1."""
    C2 = cdg_connection_change(D.B, a)
    one = D.A.incl(0) * D.A.one()
    terms = list(D.terms) + [(a, one)]
    return TwoSidedData(D.A, C2, D.C, terms, _compat_report(D.A, C2, terms), D.opposite)


# ---------------------------------------------------------------------------
# the opposite CDG ring


def opposite_cdg(C: CdgRingSlice) -> CdgRingSlice:
    """(B^op, d, -h) with b^op c^op = (-1)^{|b||c|} (c b)^op over R^op."""
    F = C.field
    S = C.slice
    Ro = C.R.opposite()
    comps = [opposite_bimodule(M) for M in S.comps]
    dims = [M.dim for M in S.comps]
    mult = {}
    for (i, j), Mji in ((k, S.mult[(k[1], k[0])]) for k in S.mult):
        di, dj = dims[i], dims[j]
        P = F.mat(di * dj, di * dj)
        for a in range(di):
            for b in range(dj):
                P[b * di + a, a * dj + b] = 1
        mult[(i, j)] = Mji * P * (-1 if (i * j) % 2 else 1)
    slice_o = GradedAlgebraSlice(Ro, comps, mult, name=f"{S.name}^op")
    pres = None
    if C.presentation is not None:
        Bq = C.presentation
        d = Bq.V.dim
        P = F.mat(d * d, d * d)
        for x in range(d):
            for y in range(d):
                P[y * d + x, x * d + y] = 1
        rel = Subspace.span(F, d * d, Bq.rel.basis * P.transpose()) if Bq.rel.dim \
            else Subspace.zero(F, d * d)
        pres = QuadraticPresentation(Ro, opposite_bimodule(Bq.V), rel, Bq.side, name=f"{Bq.name}^op")
    return CdgRingSlice(slice_o, list(C.d), C.h * -1, name=f"{C.name}^op", presentation=pres,
                        well_defined=C.well_defined)


# ---------------------------------------------------------------------------
# CDG-modules


class CdgModuleSlice:
    """Components M(n, j): cohomological degree n and filtration layer j.

    ``d[(n, j)]`` maps M(n, j) -> M(n + 1, j + 1); ``action(key, k, x)`` is the matrix
    of the B-action by x in B^k (x m on the left, m x on the right); ``incl(key)``
    maps M(n, j) -> M(n, j + 1).  ``unknown`` lists degrees outside the window that are
    not known to vanish.
    """

    def __init__(self, side: str, ring: CdgRingSlice, comps: dict, d: dict, action, incl,
                 name: str = "", unknown=()):
        self.side = side
        self.ring = ring
        self.field = ring.field
        self.comps = comps
        self.d = d
        self.action = action
        self.incl = incl
        self.name = name
        self.unknown = set(unknown)
        self.report = AxiomReport()
        self.undefined: list = []

    def dims(self) -> dict:
        return {k: M.dim for k, M in sorted(self.comps.items())}

    def positions(self) -> list:
        return sorted({n for n, _ in self.comps})

    def max_layer(self, n: int) -> int:
        return max(j for m, j in self.comps if m == n)

    def embed(self, n: int, j: int, k: int):
        M = identity(self.field, self.comps[(n, j)].dim)
        for i in range(j, k):
            M = self.incl((n, i)) * M
        return M

    def _vanishes(self, n: int) -> bool:
        return n not in self.positions() and n not in self.unknown

    def check(self) -> AxiomReport:
        """Odd derivation over d and the curvature axiom, basis-wise inside the window."""
        C = self.ring
        F = self.field
        rep = AxiomReport()
        undefined = []
        sign = 1 if self.side == "left" else -1
        for (n, j) in sorted(self.comps):
            if self.comps[(n, j)].dim == 0:
                continue
            # curvature: left d^2 m = h m, right d^2 m = -m h
            if not self._vanishes(n + 2):
                mid, end = (n + 1, j + 1), (n + 2, j + 2)
                if (n, j) in self.d and mid in self.d and end in self.comps:
                    lhs = self.d[mid] * self.d[(n, j)]
                    rhs = self.embed(n + 2, j, j + 2) * self.action((n, j), 2, C.h) * sign
                    rep.record("curvature", lhs == rhs, {"component": (n, j)})
                else:
                    undefined.append(("curvature", (n, j)))
            # Leibniz for x in B^0 and B^1
            for k in (0, 1):
                if k > C.N or self._vanishes(n + k + 1):
                    continue
                ok = ((n, j) in self.d and (n + k, j) in self.d and (n + k + 1, j + 1) in self.comps)
                if not ok:
                    undefined.append((f"leibniz_{k}", (n, j)))
                    continue
                Bk = C.slice.comps[k].dim
                for b in range(Bk):
                    x = unit(F, Bk, b)
                    lhs = self.d[(n + k, j)] * self.action((n, j), k, x)
                    t_dx = self.embed(n + k + 1, j, j + 1) * self.action((n, j), k + 1, C.d[k] * x)
                    t_dm = self.action((n + 1, j + 1), k, x) * self.d[(n, j)]
                    if self.side == "left":
                        # d(x m) = d(x) m + (-1)^{|x|} x d(m)
                        rhs = t_dx + t_dm * (-1 if k % 2 else 1)
                    else:
                        # d(m x) = d(m) x + (-1)^{|m|} m d(x)
                        rhs = t_dm + t_dx * (-1 if n % 2 else 1)
                    rep.record("leibniz", lhs == rhs, {"component": (n, j), "degree": k, "basis": b})
        for name in ("curvature", "leibniz"):
            rep.results.setdefault(name, True)
        self.report = rep
        self.undefined = undefined
        return rep


def _known_zero_from(C: CdgRingSlice, n: int) -> bool:
    """B^n = 0 is visible in the slice (B is generated in degree one)."""
    return any(C.slice.comps[t].dim == 0 for t in range(1, min(n, C.N) + 1))


def dual_nonhomog_koszul_module(D: TwoSidedData, N: int | None = None, M: int | None = None) -> CdgModuleSlice:
    """B (x)_R A~ with d(b (x) c) = d(b) (x) c + (-1)^{|b|} b e' c, a left CDG-module over B."""
    C, A = D.B, D.A
    F = D.field
    N = C.N if N is None else min(N, C.N)
    M = A.N if M is None else min(M, A.N)
    S = C.slice
    tps = {(i, j): tensor_many([S.comps[i], A.layer(j)]) for i in range(N + 1) for j in range(M + 1)}
    d = {}
    wd = AxiomReport()
    for i in range(N):
        for j in range(M):
            src, dst = tps[(i, j)], tps[(i + 1, j + 1)]
            T = kron(F, C.d[i], A.incl(j))
            for b, c in D.terms:
                term = kron(F, C.rmul(1, b, i), A.lmul(1, c, j))
                T = T + term * (-1 if i % 2 else 1)
            K = src.quotient.sub
            if K.dim:
                wd.record("well_defined", is_zero(dst.proj * T * K.basis.transpose()), {"component": (i, j)})
            d[(i, j)] = dst.proj * T * src.lift

    def action(key, k, x):
        i, j = key
        tp, tgt = tps[key], tps[(i + k, j)]
        return tgt.proj * kron(F, C.lmul(k, x, i), identity(F, A.layer(j).dim)) * tp.lift

    def incl(key):
        i, j = key
        return tps[(i, j + 1)].proj * kron(F, identity(F, S.comps[i].dim), A.incl(j)) * tps[key].lift

    comps = {k: tp.module for k, tp in tps.items()}
    unknown = () if _known_zero_from(C, N + 1) else (N + 1,)
    mod = CdgModuleSlice("left", C, comps, d, action, incl, name="K(B,A~)", unknown=unknown)
    rep = mod.check()
    rep.results["well_defined"] = wd.results.get("well_defined", True)
    if "well_defined" in wd.failures:
        rep.failures["well_defined"] = wd.failures["well_defined"]
    return mod


# ---------------------------------------------------------------------------
# right CDG-modules used as inputs of the twisted tensor product


def trivial_comodule(D: TwoSidedData, M: int | None = None) -> CdgModuleSlice:
    """R in degree zero with B^{>=1} acting by zero (constant filtration)."""
    C = D.B
    F = D.field
    M = D.A.N if M is None else M
    Rmod = Bimodule.regular(C.R)
    comps = {(0, j): Rmod for j in range(M + 1)}

    def action(key, k, x):
        if k == 0:
            return _r_right(C.R, x)
        return F.mat(0, Rmod.dim)

    def incl(key):
        return identity(F, Rmod.dim)

    mod = CdgModuleSlice("right", C, comps, {}, action, incl, name="R")
    mod.check()
    return mod


def _r_right(R: BaseAlgebra, x):
    """y -> y x on R for x in R (column)."""
    M = R.field.mat(R.dim, R.dim)
    for i in range(R.dim):
        if x[i, 0] != 0:
            M += R.Rm[i] * x[i, 0]
    return M


def regular_module(D: TwoSidedData, M: int | None = None) -> CdgModuleSlice:
    """B as a right CDG-module over itself; requires h = 0."""
    C = D.B
    F = D.field
    if not is_zero(C.h):
        raise PreconditionError("B is a right CDG-module over itself only when h = 0")
    M = D.A.N if M is None else M
    S = C.slice
    N = C.N
    comps = {(n, j): S.comps[n] for n in range(N + 1) for j in range(M + 1)}
    d = {(n, j): C.d[n] for n in range(N) for j in range(M)}

    def action(key, k, x):
        n, j = key
        return C.rmul(k, x, n)

    def incl(key):
        return identity(F, comps[key].dim)

    unknown = () if _known_zero_from(C, N + 1) else (N + 1,)
    mod = CdgModuleSlice("right", C, comps, d, action, incl, name="B", unknown=unknown)
    mod.check()
    return mod


def twisted_tensor_left(D: TwoSidedData, N: int | None = None, M: int | None = None) -> CdgModuleSlice:
    """A~ (x)^sigma' C = Hom_{R^op}(B, A~) as a right CDG-module over B.

    Component (-i, j) holds right R-linear maps B^i -> F_j (row-major vectors).
    (D f)(b) = -(-1)^{|f|} [f(d b) + (-1)^{|b|} sum f(b b_beta) s_gamma] and (f x)(b) = f(x b).
    """
    C, A = D.B, D.A
    F = D.field
    S = C.slice
    N = C.N if N is None else min(N, C.N)
    M = A.N if M is None else min(M, A.N)
    spaces = {}
    comps = {}
    for i in range(N + 1):
        Bi = S.comps[i]
        for j in range(M + 1):
            Fj = A.layer(j)
            H = _right_hom_space(F, Bi, Fj)
            spaces[(-i, j)] = H
            rows, cols = Fj.dim, Bi.dim
            left = [_on_space(H, H, _hom_vec_left(F, Fj.left[l], cols)) for l in range(C.R.dim)]
            right = [_on_space(H, H, _hom_vec_right(F, Bi.left[l], rows)) for l in range(C.R.dim)]
            comps[(-i, j)] = Bimodule(C.R, C.R, H.dim, left, right, name=f"Hom(B^{i},F_{j})")
    d = {}
    filtered = AxiomReport()
    for i in range(1, N + 1):
        for j in range(M):
            rows, cols = A.layer(j).dim, S.comps[i].dim
            op = kron(F, A.incl(j), C.d[i - 1].transpose())
            for b, c in D.terms:
                term = kron(F, A.rmul(1, c, j), C.rmul(1, b, i - 1).transpose())
                op = op + term * (-1 if (i - 1) % 2 else 1)
            op = op * (1 if i % 2 else -1)
            mat = _on_space(spaces[(-i, j)], spaces[(-i + 1, j + 1)], op)
            filtered.record("right_linear", mat is not None, {"component": (-i, j)})
            if mat is not None:
                d[(-i, j)] = mat

    def action(key, k, x):
        n, j = key
        i = -n
        if k > i:
            return F.mat(0, comps[key].dim)
        op = _hom_vec_right(F, C.lmul(k, x, i - k), A.layer(j).dim)
        mat = _on_space(spaces[key], spaces[(n + k, j)], op)
        if mat is None:
            raise ComplexError("the B-action does not preserve right R-linear maps")
        return mat

    def incl(key):
        n, j = key
        op = _hom_vec_left(F, A.incl(j), S.comps[-n].dim)
        return _on_space(spaces[key], spaces[(n, j + 1)], op)

    unknown = () if _known_zero_from(C, N + 1) else (-(N + 1),)
    mod = CdgModuleSlice("right", C, comps, d, action, incl, name="A~(x)C", unknown=unknown)
    mod.spaces = spaces
    rep = mod.check()
    rep.results["right_linear"] = filtered.results.get("right_linear", True)
    return mod


# ---------------------------------------------------------------------------
# filtered complexes assembled from generators


class _Layered:
    """Components spanned by generator rows inside ambient spaces, one per position."""

    def __init__(self, F: Field, name: str):
        self.F = F
        self.name = name
        self.gens: dict = {}
        self.images: dict = {}
        self.report = AxiomReport()

    def add(self, p: int, s: int, gens, images=None):
        old = self.gens.get((p, s))
        if old is None:
            self.gens[(p, s)] = gens
            self.images[(p, s)] = images
        else:
            self.gens[(p, s)] = vstack(self.F, [old, gens], gens.ncols())
            if images is not None:
                prev = self.images[(p, s)]
                self.images[(p, s)] = vstack(self.F, [prev, images], images.ncols())

    def spaces(self) -> dict:
        F = self.F
        out = {}
        for key, G in self.gens.items():
            out[key] = Subspace.span(F, G.ncols(), G) if G.nrows() else Subspace.zero(F, G.ncols())
        return out

    def build(self, truncated=()) -> tuple[CochainComplex, dict]:
        F = self.F
        sp = self.spaces()
        K = CochainComplex(F, self.name)
        for key in sorted(sp):
            K.add(key[0], key[1], sp[key].dim)
        for (p, s), imgs in sorted(self.images.items()):
            if imgs is None or (p + 1, s) not in sp:
                continue
            G = self.gens[(p, s)]
            if G.nrows() == 0:
                continue
            # linear relations among generators must persist among their images
            consistent = rank(hstack(F, [G, imgs], G.nrows())) == sp[(p, s)].dim
            self.report.record("well_defined", consistent, {"component": (p, s)})
            _, piv = _echelon(G.transpose())
            # images of the rref basis of the source span
            change = sp[(p, s)].coordinates(select_rows(F, G, piv))
            chosen = change.inv() * select_rows(F, imgs, piv)
            tgt = sp[(p + 1, s)]
            inside = tgt.contains_vectors(chosen) if chosen.nrows() else True
            self.report.record("filtered", inside, {"component": (p, s)})
            if not inside:
                continue
            mat = tgt.coordinates(chosen).transpose() if tgt.dim else F.mat(0, len(piv))
            K.set_differential(p, s, mat)
        K.truncated |= set(truncated)
        for name in ("well_defined", "filtered"):
            self.report.results.setdefault(name, True)
        return K, sp



@dataclass
class ExactnessWitness:
    complex: CochainComplex
    exact: bool
    nonzero: dict = field(default_factory=dict)
    window: dict = field(default_factory=dict)
    report: AxiomReport = field(default_factory=AxiomReport)

    def __bool__(self):
        return self.exact


def twisted_tensor_right(Nmod: CdgModuleSlice, D: TwoSidedData, M: int | None = None,
                         augment: bool = False) -> CochainComplex:
    """N (x)^tau' A~ = N (x)_B K(B, A~) on the filtered layers.

    Position n, layer L holds sum_{j+k = L+n} N(n, j) (x)_R F_k; the differential is
    d(y (x) c) = d_N(y) (x) c + (-1)^{|y|} sum y b_beta (x) s_gamma c.  With ``augment``
    the degree-zero part maps to A~ by f (x) c -> f(1) c (N = Hom(B, A~)).
    """
    if Nmod.side != "right":
        raise PreconditionError("the twisted tensor product on the right needs a right CDG-module")
    A, C = D.A, D.B
    F = D.field
    if Nmod.ring is not C and not Nmod.ring.same_as(C):
        raise PreconditionError("the module lives over a different CDG ring")
    M = A.N if M is None else M
    if M > A.N:
        raise WindowError(f"the filtered ring is only known through filtration {A.N}")
    positions = Nmod.positions()
    top = {}
    for n in positions:
        jmax = Nmod.max_layer(n)
        top[n] = min(M + n, A.N, jmax + A.N)
    lay = _Layered(F, f"{Nmod.name} (x) A~")
    bigs = {}
    for n in positions:
        T = top[n]
        if T < 0:
            continue
        J = min(T, Nmod.max_layer(n))
        bigs[n] = (tensor_many([Nmod.comps[(n, J)], A.layer(T)]), J, T)
    truncated = set()
    for n in positions:
        if n not in bigs:
            continue
        big, J, Tn = bigs[n]
        nxt = bigs.get(n + 1)
        for L in range(-n, M + 1):
            T = L + n
            if T < 0 or T > Tn:
                continue
            gen_blocks, img_blocks = [], []
            has_target = (augment and n == 0) or (nxt is not None and T + 1 <= nxt[2])
            for j in range(min(T, J) + 1):
                k = T - j
                Nj = Nmod.comps[(n, j)]
                small = tensor_many([Nj, A.layer(k)])
                if small.dim == 0:
                    continue
                emb = big.proj * kron(F, Nmod.embed(n, j, J), A.embed(k, Tn)) * small.lift
                gen_blocks.append(emb.transpose())
                if not has_target:
                    continue
                if augment and n == 0:
                    H = Nmod.spaces[(0, j)]
                    ev1 = kron(F, identity(F, A.layer(j).dim), A.one().transpose()) * H.basis.transpose()
                    prod = A.slice.mult[(j, k)] * kron(F, ev1, identity(F, A.layer(k).dim))
                    img_blocks.append((A.embed(j + k, M) * prod * small.lift).transpose())
                    continue
                if (n, j) not in Nmod.d:
                    has_target = False
                    continue
                nbig, nJ, nT = nxt
                tot = kron(F, Nmod.embed(n + 1, j + 1, nJ) * Nmod.d[(n, j)], A.embed(k, nT))
                for b, c in D.terms:
                    act = Nmod.embed(n + 1, j, nJ) * Nmod.action((n, j), 1, b)
                    term = kron(F, act, A.embed(k + 1, nT) * A.lmul(1, c, k))
                    tot = tot + term * (-1 if n % 2 else 1)
                img_blocks.append((nbig.proj * tot * small.lift).transpose())
            if not gen_blocks:
                continue
            G = vstack(F, gen_blocks, big.dim)
            I = None
            if has_target:
                width = img_blocks[0].ncols()
                I = vstack(F, img_blocks, width)
            lay.add(n, L, G, I)
            target_known = (n + 1) not in Nmod.unknown and ((n + 1) not in bigs or has_target)
            if not target_known and not (augment and n == 0):
                truncated.add((n, L))
    if augment:
        for L in range(M + 1):
            lay.add(1, L, A.embed(L, M).transpose(), None)
    for n in positions:
        if n - 1 in Nmod.unknown:
            for L in range(-n, M + 1):
                truncated.add((n, L))
    K, sp = lay.build(truncated)
    K.report = lay.report
    return K


def bimodule_resolution(D: TwoSidedData, M: int) -> ExactnessWitness:
    """A~ (x) C_. (x) A~ -> A~ on total filtration layers 0..M; exact iff every layer is."""
    if D.A.N < M:
        raise WindowError(f"the filtered ring is only known through filtration {D.A.N}")
    hom = twisted_tensor_left(D, M=M)
    K = twisted_tensor_right(hom, D, M, augment=True)
    K.name = "bimodule resolution"
    K.check_square_zero()
    nonzero = {k: v for k, v in K.homology_table().items() if v}
    window = {"layers": M, "B_degrees": D.B.N, "truncated": sorted(K.truncated)}
    exact = not nonzero and all(K.report.results.values()) and all(hom.report.results.values())
    return ExactnessWitness(K, exact, nonzero, window, K.report)


# ---------------------------------------------------------------------------
# augmented case


def augmentation(D: TwoSidedData, L: int):
    """The projection F_L -> R along F_{L-1} V' (an r x dim F_L matrix), or None."""
    A = D.A
    F = D.field
    r = D.R.dim
    n = A.layer(L).dim
    base = A.embed(0, L)
    if L == 0:
        U = Subspace.zero(F, n)
    else:
        U = image(hstack(F, [A.rmul(1, A.gen(g), L - 1) for g in range(A.section.ncols())], n))
    if rank(base) != r or U.dim + r != n:
        return None
    inv = solve(hstack(F, [base, U.basis.transpose()], n), identity(F, n))
    if inv is None:
        return None
    return select_rows(F, inv, range(r))


def nonhomog_koszul_complex(D: TwoSidedData, M: int) -> ExactnessWitness:
    """A~ (x)^sigma' C -> R, layer L holding Hom_{R^op}(B^i, F_{L-i}) in position -i."""
    C, A = D.B, D.A
    F = D.field
    if not is_zero(C.h):
        raise PreconditionError("the curvature does not vanish, so R is not a module over the complex")
    if A.N < M:
        raise WindowError(f"the filtered ring is only known through filtration {A.N}")
    hom = twisted_tensor_left(D, M=M)
    K = CochainComplex(F, "nonhomogeneous Koszul complex")
    r = D.R.dim
    for L in range(M + 1):
        eps = augmentation(D, L)
        if eps is None:
            raise PreconditionError(f"F_{L} does not split as R plus the augmentation ideal")
        for i in range(L + 1):
            if (-i, L - i) in hom.comps:
                K.add(-i, L, hom.comps[(-i, L - i)].dim)
                if (-i, L - i) in hom.d:
                    K.set_differential(-i, L, hom.d[(-i, L - i)])
                if i + 1 > C.N and not _known_zero_from(C, i + 1):
                    K.truncated.add((-i, L))
        K.add(1, L, r)
        H = hom.spaces[(0, L)]
        ev1 = kron(F, identity(F, A.layer(L).dim), A.one().transpose()) * H.basis.transpose() \
            if H.dim else F.mat(A.layer(L).dim, 0)
        K.set_differential(0, L, eps * ev1)
    K.check_square_zero()
    nonzero = {k: v for k, v in K.homology_table().items() if v}
    ok = not nonzero and all(hom.report.results.values())
    return ExactnessWitness(K, ok, nonzero, {"layers": M, "B_degrees": C.N}, hom.report)


def chevalley_eilenberg(C: CdgRingSlice) -> CochainComplex:
    """(B, d) as a cochain complex; for an enveloping algebra this is the CE complex."""
    if not is_zero(C.h):
        raise PreconditionError("a curved ring has no cohomology")
    F = C.field
    K = CochainComplex(F, "Chevalley-Eilenberg")
    for n in range(C.N + 1):
        K.add(n, 0, C.slice.comps[n].dim)
    for n in range(C.N):
        K.set_differential(n, 0, C.d[n])
    if not _known_zero_from(C, C.N + 1):
        K.truncated.add((C.N, 0))
    K.check_square_zero()
    return K


# ---------------------------------------------------------------------------
# relatively Frobenius rings


@dataclass
class FrobeniusReport:
    m: int
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def __bool__(self):
        return self.ok

    def first_failure(self):
        return next((k for k, v in self.checks.items() if not v), None)


def _left_hom_space(F: Field, src: Bimodule, tgt: Bimodule) -> Subspace:
    """Left R-linear maps src -> tgt as row-major vectors."""
    m, n = tgt.dim, src.dim
    if m * n == 0:
        return Subspace.zero(F, m * n)
    eqs = [_hom_vec_right(F, src.left[i], m) - _hom_vec_left(F, tgt.left[i], n) for i in range(src.R.dim)]
    return kernel(vstack(F, eqs, m * n))


def frobenius_check(B, m: int) -> FrobeniusReport:
    """T = B^m invertible and B^n (x) B^{m-n} -> B^m perfect for 0 <= n <= m."""
    S = B.slice if isinstance(B, CdgRingSlice) else B
    F = S.field
    R = S.R
    if S.N < m + 1 and not any(S.comps[t].dim == 0 for t in range(1, S.N + 1)):
        raise WindowError(f"degree {m + 1} is outside the slice")
    rep = FrobeniusReport(m)
    rep.checks["bounded"] = all(S.comps[n].dim == 0 for n in range(m + 1, S.N + 1))
    T = S.comps[m]
    rep.checks["top_projective"] = T.dim > 0 and is_projective_left(T)
    # R -> End_R(T) through the right action
    End = _left_hom_space(F, T, T)
    vecs = [_row_major(F, T.right[i]) for i in range(R.dim)]
    img = vstack(F, vecs, T.dim * T.dim) if vecs else F.mat(0, T.dim * T.dim)
    rep.checks["unit_iso"] = End.dim == R.dim and rank(img) == R.dim
    # T (x)_R Hom_R(T, R) -> R
    Td = left_dual(T)
    tp = tensor_many([T, Td])
    ev = F.mat(R.dim, T.dim * Td.dim)
    for a in range(T.dim):
        for k in range(Td.dim):
            for l in range(R.dim):
                x = Td.maps[k][l, a]
                if x != 0:
                    ev[l, a * Td.dim + k] = x
    counit = ev * tp.lift
    rep.checks["counit_iso"] = tp.dim == R.dim and rank(counit) == R.dim
    for n in range(m + 1):
        Bn, Bc = S.comps[n], S.comps[m - n]
        Hom = _left_hom_space(F, Bn, T)
        rows = []
        ok = True
        for y in range(Bc.dim):
            f = S.right_mult(n, m - n, unit(F, Bc.dim, y))
            v = _row_major(F, f)
            ok &= Hom.contains_vectors(v)
            rows.append(v)
        M = vstack(F, rows, T.dim * Bn.dim) if rows else F.mat(0, T.dim * Bn.dim)
        rep.checks[f"pairing_{n}"] = bool(ok and is_projective_left(Bn) and Hom.dim == Bc.dim
                                          and rank(M) == Bc.dim) if Bn.dim else Bc.dim == 0
    return rep


def _row_major(F: Field, M):
    out = F.mat(1, M.nrows() * M.ncols())
    n = M.ncols()
    for i in range(M.nrows()):
        for j in range(n):
            x = M[i, j]
            if x != 0:
                out[0, i * n + j] = x
    return out


# ---------------------------------------------------------------------------
# conversion bimodule


@dataclass
class ConversionReport:
    frobenius: FrobeniusReport
    complex: CochainComplex
    m: int
    M: int
    acyclic_below_top: bool = False
    left_iso: dict = field(default_factory=dict)
    right_iso: dict = field(default_factory=dict)
    coherent: bool = False
    opposite_iso: bool | None = None
    report: AxiomReport = field(default_factory=AxiomReport)

    @property
    def E_dims(self) -> dict:
        return {L: self.complex.homology_dim(self.m, L) for L in range(-self.m, self.M - self.m + 1)}

    @property
    def ok(self) -> bool:
        base = (bool(self.frobenius) and self.acyclic_below_top and all(self.left_iso.values())
                and all(self.right_iso.values()) and self.coherent and self.report.ok)
        return base and self.opposite_iso is not False

    def __bool__(self):
        return self.ok


def _graded_commutative_uncurved(C: CdgRingSlice) -> bool:
    if not is_zero(C.h) or not C.R.is_commutative():
        return False
    S = C.slice
    for (i, j), Mij in S.mult.items():
        if i > j:
            continue
        op = opposite_cdg_mult(S, i, j)
        if op != Mij:
            return False
    return True


def opposite_cdg_mult(S: GradedAlgebraSlice, i: int, j: int):
    F = S.field
    di, dj = S.comps[i].dim, S.comps[j].dim
    P = F.mat(di * dj, di * dj)
    for a in range(di):
        for b in range(dj):
            P[b * di + a, a * dj + b] = 1
    return S.mult[(j, i)] * P * (-1 if (i * j) % 2 else 1)


def conversion_bimodule(D: TwoSidedData, M: int, m: int | None = None) -> ConversionReport:
    """E = H^m of A~# (x)^rho' B (x)^tau' A~ on layers with top filtration <= M.

    Layer L of position n is sum_{j+k <= L+n} F_j A~# (x) B^n (x) F_k A~.  The report
    verifies vanishing below degree m and the maps F_{L+m}A~# (x) T -> E and
    T (x) F_{L+m}A~ -> E given by a (x) t -> [a (x) t (x) 1] and t (x) c -> [1 (x) t (x) c].
    """
    C, A = D.B, D.A
    F = D.field
    S = C.slice
    if m is None:
        m = max(n for n in range(S.N + 1) if S.comps[n].dim)
    frob = frobenius_check(C, m)
    if not frob:
        raise PreconditionError(f"B is not relatively Frobenius with top degree {m} "
                                f"({frob.first_failure()})")
    Do = D.opposite
    if Do is None:
        raise PreconditionError("two-sided data lacks the opposite-side ring")
    Ao = Do.A
    if A.N < M or Ao.N < M:
        raise WindowError(f"the filtered rings are only known through filtration {min(A.N, Ao.N)}")
    sharp = {j: opposite_bimodule(Ao.layer(j)) for j in range(M + 1)}
    lay = _Layered(F, "A~# (x) B (x) A~")
    bigs = {}
    for n in range(m + 1):
        Tn = M - m + n
        if Tn >= 0:
            bigs[n] = (tensor_many([sharp[Tn], S.comps[n], A.layer(Tn)]), Tn)

    def piece(n, j, k):
        return tensor_many([sharp[j], S.comps[n], A.layer(k)])

    for n in range(m + 1):
        if n not in bigs:
            continue
        big, Tn = bigs[n]
        Bn = S.comps[n].dim
        for L in range(-n, M - m + 1):
            T = L + n
            if T < 0:
                continue
            G_blocks, I_blocks = [], []
            for j in range(T + 1):
                k = T - j
                small = piece(n, j, k)
                if small.dim == 0:
                    continue
                G_blocks.append((big.proj * _kron3(F, Ao.embed(j, Tn), identity(F, Bn), A.embed(k, Tn))
                                 * small.lift).transpose())
                if n < m:
                    nbig, nT = bigs[n + 1]
                    tot = _kron3(F, Ao.embed(j, nT), C.d[n], A.embed(k, nT))
                    for b, c in Do.terms:
                        tot += _kron3(F, Ao.embed(j + 1, nT) * Ao.lmul(1, c, j), C.lmul(1, b, n),
                                      A.embed(k, nT))
                    for b, c in D.terms:
                        term = _kron3(F, Ao.embed(j, nT), C.rmul(1, b, n), A.embed(k + 1, nT) * A.lmul(1, c, k))
                        tot += term * (-1 if n % 2 else 1)
                    I_blocks.append((nbig.proj * tot * small.lift).transpose())
            if not G_blocks:
                continue
            G = vstack(F, G_blocks, big.dim)
            I = vstack(F, I_blocks, bigs[n + 1][0].dim) if n < m else None
            lay.add(n, L, G, I)
    K, sp = lay.build()
    K.check_square_zero()
    rep = ConversionReport(frob, K, m, M, report=lay.report)
    rep.acyclic_below_top = all(K.homology_dim(n, L) == 0 for (n, L) in K.dims if n < m)
    big, Tm = bigs[m]
    Tdim = S.comps[m].dim
    for L in range(-m, M - m + 1):
        top = sp.get((m, L))
        if top is None:
            continue
        incoming = K.differential(m - 1, L) if (m - 1, L) in K.dims else F.mat(top.dim, 0)
        im_rows = (top.basis.transpose() * incoming).transpose() if top.dim else F.mat(0, big.dim)
        # left: F_{L+m} A~# (x)_R T
        lt = tensor_many([sharp[L + m], S.comps[m]])
        emb = big.proj * _kron3(F, Ao.embed(L + m, Tm), identity(F, Tdim), A.embed(0, Tm) * A.one())
        lrows = (emb * lt.lift).transpose()
        rep.left_iso[L] = _is_iso(F, top, im_rows, lrows, lt.dim)
        rt = tensor_many([S.comps[m], A.layer(L + m)])
        emb = big.proj * _kron3(F, Ao.embed(0, Tm) * Ao.one(), identity(F, Tdim), A.embed(L + m, Tm))
        rrows = (emb * rt.lift).transpose()
        rep.right_iso[L] = _is_iso(F, top, im_rows, rrows, rt.dim)
    # 1 (x) t (x) 1 is reached from both sides by t (x) 1 and 1 (x) t
    L0 = M - m
    top = sp[(m, L0)]
    incoming = K.differential(m - 1, L0) if (m - 1, L0) in K.dims else F.mat(top.dim, 0)
    im_rows = (top.basis.transpose() * incoming).transpose()
    lt = tensor_many([sharp[M], S.comps[m]])
    rt = tensor_many([S.comps[m], A.layer(M)])
    left_map = big.proj * _kron3(F, Ao.embed(M, Tm), identity(F, Tdim), A.embed(0, Tm) * A.one()) * lt.lift
    right_map = big.proj * _kron3(F, Ao.embed(0, Tm) * Ao.one(), identity(F, Tdim), A.embed(M, Tm)) * rt.lift
    coherent = True
    for t in range(Tdim):
        x_left = lt.proj * kron(F, Ao.embed(0, M) * Ao.one(), unit(F, Tdim, t))
        x_right = rt.proj * kron(F, unit(F, Tdim, t), A.embed(0, M) * A.one())
        diff = left_map * x_left - right_map * x_right
        coherent &= _in_span(F, im_rows, diff.transpose())
    rep.coherent = bool(coherent)
    if _graded_commutative_uncurved(C):
        rep.opposite_iso = _same_ring(A, Ao)
    return rep


def _in_span(F: Field, rows, v) -> bool:
    if rows.nrows() == 0:
        return is_zero(v)
    return rank(vstack(F, [rows, v], rows.ncols())) == rank(rows)


def _is_iso(F: Field, top: Subspace, im_rows, rows, dom: int) -> bool:
    both = vstack(F, [im_rows, rows], top.ambient) if rows.nrows() else im_rows
    full = rank(both)
    return full == top.dim and full - rank(im_rows) == dom


def _same_ring(A: FilteredRingSlice, Ao: FilteredRingSlice) -> bool:
    """Equal Rees slices: the identity is an isomorphism A~# = A~^op."""
    if A.dims() != Ao.dims() or A.t != Ao.t:
        return False
    return all(A.slice.mult[k] == Ao.slice.mult[k] for k in A.slice.mult)
