"""Reconstructing the filtered ring from a CDG slice, and extracting nonhomogeneous data back."""
from __future__ import annotations

from dataclasses import dataclass, field

from .bimodule import double_dual_eval
from .cdg import CdgRingSlice, QuasiDiffSlice, build_cdg_dual, quasi_differential_ring
from .linalg import Field, hstack, identity, is_zero, kernel, kron, rank, solve
from .nonhomog import NonhomogPresentation, same_data
from .quadratic import (
    GradedAlgebraSlice,
    PreconditionError,
    QuadraticPresentation,
    Verdict,
    build_quadratic_slice,
    check_koszul_distributive,
    quadratic_dual,
    quadratic_part,
)


@dataclass
class PBWResult:
    """The homogenized ring A^ = (B^)^! with its central element t, sliced to degree N."""
    koszul: Verdict
    hat: QuadraticPresentation
    slice: GradedAlgebraSlice
    t: object
    gr: GradedAlgebraSlice
    rho: list
    qd: QuasiDiffSlice
    central: bool = False
    t_injective: dict = field(default_factory=dict)
    gr_iso: dict = field(default_factory=dict)
    filtration_dims: list = field(default_factory=list)

    @property
    def N(self) -> int:
        return self.slice.N

    @property
    def ok(self) -> bool:
        return (bool(self.koszul) and self.central and all(self.t_injective.values())
                and all(self.gr_iso.values()))

    def __bool__(self):
        return self.ok


def _kron_power(F: Field, M, n: int):
    out = identity(F, 1)
    for _ in range(n):
        out = kron(F, out, M)
    return out


def pbw_reconstruct(C: CdgRingSlice, N: int, force: bool = False) -> PBWResult:
    """A^ = quadratic dual of the quadratic part of B[delta], compared with gr = B^! degreewise."""
    if C.N < 2:
        raise ValueError("the CDG slice must reach degree 2")
    F = C.field
    Bq = C.presentation
    if Bq is None:
        raise PreconditionError("the CDG slice does not remember a quadratic presentation")
    verdict = check_koszul_distributive(Bq, N)
    if not verdict and not force:
        raise PreconditionError(f"the graded ring is not Koszul (degree {verdict.degree})")
    qd = quasi_differential_ring(C, 2)
    hat_q = quadratic_part(qd.slice, side="right")
    hat = quadratic_dual(hat_q)
    S = build_quadratic_slice(hat, N)
    b1, c1 = qd.split(1)
    r = C.R.dim
    # t(b + c delta) = -c
    M = F.mat(r, b1 + c1)
    for l in range(r):
        M[l, b1 + l] = -1
    t = F.mat(S.comps[1].dim, 1)
    for k, x in enumerate(hat.V.coordinates_of(M)):
        if x != 0:
            t[k, 0] = x
    res = PBWResult(verdict, hat, S, t, None, [], qd)
    # t is central
    central = True
    A1 = S.comps[1]
    for s in range(r):
        central &= (A1.left[s] * t) == (A1.right[s] * t)
    if N >= 2:
        central &= S.left_mult(1, 1, t) == S.right_mult(1, 1, t)
    res.central = bool(central)
    for n in range(1, N + 1):
        T = S.left_mult(1, n - 1, t)
        res.t_injective[n] = rank(T) == S.comps[n - 1].dim
    # gr A^ / t = quadratic dual of B through restriction to B^1
    gq = quadratic_dual(Bq)
    G = build_quadratic_slice(gq, N)
    res.gr = G
    rho1 = F.mat(G.comps[1].dim, A1.dim)
    for f in range(A1.dim):
        restricted = _restrict(F, hat.V.maps[f], b1)
        for k, x in enumerate(gq.V.coordinates_of(restricted)):
            if x != 0:
                rho1[k, f] = x
    res.rho = [identity(F, r), rho1]
    dims_gr = G.dims()
    total = 0
    for n in range(N + 1):
        total += dims_gr[n]
        res.filtration_dims.append(total)
    for n in range(1, N + 1):
        power = _kron_power(F, rho1, n) if n > 1 else rho1
        if n > 1:
            J = S.words[n].sub
            well = J.dim == 0 or is_zero(G.words[n].proj * power * J.basis.transpose())
            rho_n = G.words[n].proj * power * S.words[n].lift
            res.rho.append(rho_n)
        else:
            well = True
            rho_n = rho1
        T = S.left_mult(1, n - 1, t)
        surj = rank(rho_n) == dims_gr[n]
        kills_t = is_zero(rho_n * T)
        count = S.comps[n].dim == dims_gr[n] + S.comps[n - 1].dim
        res.gr_iso[n] = bool(well and surj and kills_t and count)
    return res


def _restrict(F: Field, M, b1: int):
    out = F.mat(M.nrows(), b1)
    for i in range(M.nrows()):
        for j in range(b1):
            x = M[i, j]
            if x != 0:
                out[i, j] = x
    return out


def evaluation_at_delta(res: PBWResult):
    """Matrix of f -> f(delta) from A^_1 to R."""
    F = res.slice.field
    A1 = res.slice.comps[1]
    r = res.slice.R.dim
    delta = res.qd.delta()
    ev = F.mat(r, A1.dim)
    for f in range(A1.dim):
        val = res.hat.V.maps[f] * delta
        for l in range(r):
            if val[l, 0] != 0:
                ev[l, f] = val[l, 0]
    return ev


def generator_section(res: PBWResult, target=None):
    """Section of rho_1 with image in V' = ker(f -> f(delta)).

    Columns are indexed by gr_1 = B^! _1 unless ``target`` (a map V -> gr_1) is given.
    """
    F = res.slice.field
    Vp = kernel(evaluation_at_delta(res))
    rho1 = res.rho[1]
    if target is None:
        target = identity(F, rho1.nrows())
    coords = solve(rho1 * Vp.basis.transpose(), target)
    if coords is None:
        raise PreconditionError("generators do not lift into the kernel of evaluation at delta")
    return Vp.basis.transpose() * coords


def extract_nonhomog(res: PBWResult, P: NonhomogPresentation) -> NonhomogPresentation:
    """Read (q, p, h) off A^ using the generators and lifts of P.

    V is identified with V' = {f in A^_1 : f(delta) = 0} through the double dual and the
    restriction to B^1; q(v, r) = -(v' r)(delta) and v'_1 v'_2 = t p(x)' - h(x) t^2 for a lift x.
    """
    F = P.field
    S = res.slice
    A1 = S.comps[1]
    r, d = P.R.dim, P.V.dim
    ev_delta = evaluation_at_delta(res)
    s = generator_section(res, double_dual_eval(P.V).matrix)  # A^_1 x d
    q = []
    for v in range(d):
        sv = _col_of(F, s, v)
        row = []
        for e in range(r):
            val = ev_delta * (A1.right[e] * sv)
            row.append([-val[l, 0] for l in range(r)])
        q.append(row)
    t = res.t
    T = S.left_mult(1, 1, t)
    t2 = S.product(1, t, 1, t)
    H = hstack(F, [S.comps[2].left[l] * t2 for l in range(r)], S.comps[2].dim) if r else F.mat(S.comps[2].dim, 0)
    system = hstack(F, [T * s, H * -1], S.comps[2].dim)
    ss = kron(F, s, s)
    p_vals, h_vals = [], []
    for x in P.lifts:
        xc = F.mat(d * d, 1)
        for k, c in enumerate(x):
            if c != 0:
                xc[k, 0] = c
        w = S.mult[(1, 1)] * (ss * xc)
        sol = solve(system, w)
        if sol is None:
            raise PreconditionError("a lifted relation does not reduce to filtration degree one")
        p_vals.append([sol[i, 0] for i in range(d)])
        h_vals.append([sol[d + l, 0] for l in range(r)])
    return NonhomogPresentation(P.quad, q, P.lifts, p_vals, h_vals, name=f"{P.name}~")


def _col_of(F: Field, M, j: int):
    out = F.mat(M.nrows(), 1)
    for i in range(M.nrows()):
        out[i, 0] = M[i, j]
    return out


@dataclass
class DualityRoundTrip:
    pbw: PBWResult
    recovered: NonhomogPresentation
    equal: bool

    def __bool__(self):
        return self.equal


def roundtrip_duality(P: NonhomogPresentation, N: int) -> DualityRoundTrip:
    """P -> (B, d, h) -> A^ -> P; equality of (q, p, h) on the original lifts."""
    C = build_cdg_dual(P, max(N, 3))
    res = pbw_reconstruct(C, N)
    back = extract_nonhomog(res, P)
    return DualityRoundTrip(res, back, same_data(P, back))
