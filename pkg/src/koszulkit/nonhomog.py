"""Nonhomogeneous quadratic presentations: (q, p, h) data and its self-consistency."""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

from .bimodule import AlgebraError, Bimodule
from .linalg import (
    DimensionError,
    Field,
    Subspace,
    _echelon,
    from_rows,
)
from .quadratic import PreconditionError, QuadraticPresentation, positioned


class ConsistencyError(PreconditionError):
    """The presentation fails one of the self-consistency equations."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


# small vector helpers on python lists of field elements

def vadd(x, y):
    return [a + b for a, b in zip(x, y)]


def vsub(x, y):
    return [a - b for a, b in zip(x, y)]


def vscale(c, x):
    return [c * a for a in x]


def vzero(F: Field, n: int) -> list:
    return [F.zero] * n


def is_zero_vec(x) -> bool:
    return all(a == 0 for a in x)


def mat_vec(M, x) -> list:
    m, n = M.nrows(), M.ncols()
    if m == 0:
        return []
    zero = M[0, 0] * 0 if n else None
    out = []
    for row in M.table():
        acc = zero
        for c, a in zip(row, x):
            if c != 0 and a != 0:
                acc = acc + c * a
        out.append(acc)
    return out


def act_left(V: Bimodule, r: Sequence, v: Sequence) -> list:
    """r v for r in R (coordinates) and v in V."""
    out = [v[0] * 0] * V.dim if v else []
    for l, c in enumerate(r):
        if c != 0:
            out = vadd(out, vscale(c, mat_vec(V.left[l], v)))
    return out


def act_right(V: Bimodule, v: Sequence, r: Sequence) -> list:
    out = [v[0] * 0] * V.dim if v else []
    for l, c in enumerate(r):
        if c != 0:
            out = vadd(out, vscale(c, mat_vec(V.right[l], v)))
    return out


def split_pairs(x: Sequence, d: int):
    """Nonzero (u, v, c) with x = sum c e_u (x) e_v."""
    return [(k // d, k % d, c) for k, c in enumerate(x) if c != 0]


class NonhomogPresentation:
    """A quadratic presentation with a strict-generator splitting and (q, p, h) data.

    ``q[v][s]`` is q(e_v, e_s) in R; ``lifts`` are rows in V (x)_k V lifting a
    basis of I; ``p_values`` (in V) and ``h_values`` (in R) are given on the lifts.
    """

    def __init__(self, quad: QuadraticPresentation, q: Sequence, lifts: Sequence,
                 p_values: Sequence, h_values: Sequence, name: str = ""):
        self.quad = quad
        self.R = quad.R
        self.V = quad.V
        self.field = quad.field
        self.name = name or quad.name
        F = self.field
        d, r = self.V.dim, self.R.dim
        self.q = [[[F(x) for x in q[v][s]] for s in range(r)] for v in range(d)]
        self.lifts = [[F(x) for x in row] for row in lifts]
        self.p_values = [[F(x) for x in row] for row in p_values]
        self.h_values = [[F(x) for x in row] for row in h_values]
        if len(self.q) != d or any(len(row) != r for row in self.q):
            raise DimensionError("q must be given as dim V x dim R values in R")
        if not (len(self.lifts) == len(self.p_values) == len(self.h_values)):
            raise DimensionError("lifts, p-values and h-values must have equal length")
        for row in self.lifts:
            if len(row) != d * d:
                raise DimensionError(f"lift of length {len(row)}, expected {d * d}")
        K = quad.balancing
        span = Subspace.span(F, d * d, self.lifts) if self.lifts else Subspace.zero(F, d * d)
        if not quad.rel.contains(span):
            raise AlgebraError("a lift does not lie in the relation subspace")
        if (span + K) != quad.rel or span.dim != len(self.lifts) or (span & K).dim:
            raise AlgebraError("lifts must project onto a basis of the relations")
        self._extend()

    @classmethod
    def homogeneous(cls, quad: QuadraticPresentation) -> NonhomogPresentation:
        """q = p = h = 0 on a complement of the balancing kernel."""
        d, r = quad.V.dim, quad.R.dim
        lifts = complement_lifts(quad)
        return cls(quad, [[[0] * r for _ in range(r)] for _ in range(d)], lifts,
                   [[0] * d for _ in lifts], [[0] * r for _ in lifts], name=quad.name)

    # -- the forced extension of (p, h) to all of I^

    def balancing_generators(self):
        """(row, p-value, h-value) for u (x) r v - u r (x) v with p = q(u, r) v, h = 0."""
        F = self.field
        V, R = self.V, self.R
        d, r = V.dim, R.dim
        out = []
        if r == 1:
            return out
        for u in range(d):
            eu = unit_list(F, d, u)
            for s in range(r):
                es = unit_list(F, r, s)
                ur = act_right(V, eu, es)
                for v in range(d):
                    ev = unit_list(F, d, v)
                    sv = act_left(V, es, ev)
                    row = vsub(tensor_vec(eu, sv), tensor_vec(ur, ev))
                    if is_zero_vec(row):
                        continue
                    out.append((row, act_left(V, self.q[u][s], ev), vzero(F, r)))
        return out

    def _extend(self):
        F = self.field
        d, r = self.V.dim, self.R.dim
        rows = [(row, pv, hv) for row, pv, hv in zip(self.lifts, self.p_values, self.h_values)]
        rows += self.balancing_generators()
        self.spanning = rows
        n = d * d + d + r
        if not rows:
            self.ext_basis = F.mat(0, d * d)
            self.ext_values = F.mat(0, d + r)
            self.ext_pivots = []
            self.consistent = True
            self.witness = None
            return
        aug = from_rows(F, [row + pv + hv for row, pv, hv in rows], n)
        E, piv = _echelon(aug)
        tab = E.table()
        bad = [i for i, p in enumerate(piv) if p >= d * d]
        self.consistent = not bad
        self.witness = None
        if bad:
            self.witness = tab[bad[0]][d * d:]
        good = [i for i, p in enumerate(piv) if p < d * d]
        self.ext_basis = from_rows(F, [tab[i][:d * d] for i in good], d * d)
        self.ext_values = from_rows(F, [tab[i][d * d:] for i in good], d + r) if good else F.mat(0, d + r)
        self.ext_pivots = [piv[i] for i in good]

    def extended(self, x: Sequence) -> tuple[list, list]:
        """(p(x), h(x)) for x in I^ (must lie in I^)."""
        F = self.field
        d, r = self.V.dim, self.R.dim
        rem = list(x)
        p = vzero(F, d)
        h = vzero(F, r)
        tab = self.ext_basis.table()
        vals = self.ext_values.table()
        for i, piv in enumerate(self.ext_pivots):
            c = rem[piv]
            if c != 0:
                rem = vsub(rem, vscale(c, tab[i]))
                p = vadd(p, vscale(c, vals[i][:d]))
                h = vadd(h, vscale(c, vals[i][d:]))
        if not is_zero_vec(rem):
            raise AlgebraError("vector is not in the relation subspace")
        return p, h

    def p_of(self, x):
        return self.extended(x)[0]

    def h_of(self, x):
        return self.extended(x)[1]

    def q_of(self, v: Sequence, s: Sequence) -> list:
        """q(v, s) for v in V and s in R (coordinates)."""
        F = self.field
        out = vzero(F, self.R.dim)
        for a, x in enumerate(v):
            if x == 0:
                continue
            for b, y in enumerate(s):
                if y != 0:
                    out = vadd(out, vscale(x * y, self.q[a][b]))
        return out

    def relation_basis(self) -> list:
        """A k-basis of I^ (rows)."""
        return self.quad.rel.basis.table()

    def is_homogeneous(self) -> bool:
        zq = all(is_zero_vec(self.q[v][s]) for v in range(self.V.dim) for s in range(self.R.dim))
        return zq and all(is_zero_vec(p) for p in self.p_values) and all(is_zero_vec(h) for h in self.h_values)


def unit_list(F: Field, n: int, i: int) -> list:
    out = [F.zero] * n
    out[i] = F.one
    return out


def tensor_vec(x: Sequence, y: Sequence) -> list:
    return [a * b for a in x for b in y]


def complement_lifts(quad: QuadraticPresentation) -> list:
    """Rows of rref(I^) that are not needed to span the balancing kernel."""
    F = quad.field
    K = quad.balancing
    d = quad.V.dim
    lifts = []
    acc = K
    for row in quad.rel.basis.table():
        test = acc + Subspace.span(F, d * d, [row])
        if test.dim > acc.dim:
            lifts.append(row)
            acc = test
    return lifts


# ---------------------------------------------------------------------------
# self-consistency


EQUATIONS = tuple("abcdefghijk")


@dataclass
class ConsistencyReport:
    results: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.results.values())

    def first_failure(self):
        for e in EQUATIONS:
            if not self.results.get(e, True):
                return e
        return None

    def __bool__(self):
        return self.ok


def triple_relations(P: NonhomogPresentation) -> list:
    """A basis of I^(3) = (I^ (x) V) cap (V (x) I^) inside V^{(x)_k 3}."""
    F = P.field
    d = P.V.dim
    X1 = positioned(F, P.quad.rel, d, 0, 1)
    X2 = positioned(F, P.quad.rel, d, 1, 0)
    return (X1 & X2).basis.table()


def _slice_last(x: Sequence, d: int) -> list:
    """x = sum_c y_c (x) e_c; returns [y_c]."""
    return [[x[k * d + c] for k in range(d * d)] for c in range(d)]


def _slice_first(x: Sequence, d: int) -> list:
    """x = sum_a e_a (x) z_a; returns [z_a]."""
    return [list(x[a * d * d:(a + 1) * d * d]) for a in range(d)]


def verify_self_consistency(P: NonhomogPresentation) -> ConsistencyReport:
    F = P.field
    V, R = P.V, P.R
    d, r = V.dim, R.dim
    rep = ConsistencyReport()

    def record(eq, ok, witness=None):
        if eq not in rep.results:
            rep.results[eq] = True
        if not ok and rep.results[eq]:
            rep.results[eq] = False
            rep.witnesses[eq] = witness

    E = [unit_list(F, r, s) for s in range(r)]
    Vb = [unit_list(F, d, v) for v in range(d)]
    # (a) q(rv, s) = r q(v, s); (b) q(v, rs) = q(vr, s) + q(v, r) s
    for a in range(r):
        for v in range(d):
            for s in range(r):
                lhs = P.q_of(act_left(V, E[a], Vb[v]), E[s])
                rhs = R.mul(E[a], P.q[v][s])
                record("a", lhs == rhs, {"r": a, "v": v, "s": s})
                lhs = P.q_of(Vb[v], R.mul(E[a], E[s]))
                rhs = vadd(P.q_of(act_right(V, Vb[v], E[a]), E[s]), R.mul(P.q[v][a], E[s]))
                record("b", lhs == rhs, {"v": v, "r": a, "s": s})
    # (e), (f): the forced values on the balancing kernel are consistent
    record("e", P.consistent, {"residual": P.witness})
    record("f", P.consistent, {"residual": P.witness})
    if not P.consistent:
        for e in "cdghijk":
            rep.results.setdefault(e, False)
            rep.witnesses.setdefault(e, {"reason": "extension of (p, h) is not well defined"})
        return rep
    basis = P.relation_basis()
    # (c), (d) left linearity; (g), (h) right twisted linearity
    for idx, x in enumerate(basis):
        p, h = P.extended(x)
        pairs = split_pairs(x, d)
        for a in range(r):
            rx = _apply_left(V, E[a], x)
            pr, hr = P.extended(rx)
            record("c", pr == act_left(V, E[a], p), {"relation": x, "r": a})
            record("d", hr == R.mul(E[a], h), {"relation": x, "r": a})
            xr = _apply_right(V, x, E[a])
            pg, hg = P.extended(xr)
            # p(i r) = p(i) r - i_1 q(i_2, r)
            corr = vzero(F, d)
            qq = vzero(F, r)
            for u, v, c in pairs:
                qv = P.q_of(Vb[v], E[a])
                corr = vadd(corr, vscale(c, act_right(V, Vb[u], qv)))
                qq = vadd(qq, vscale(c, P.q_of(Vb[u], qv)))
            record("g", pg == vsub(act_right(V, p, E[a]), corr), {"relation": x, "r": a})
            rhs = vadd(vsub(R.mul(h, E[a]), P.q_of(p, E[a])), qq)
            record("h", hg == rhs, {"relation": x, "r": a})
    # (i)-(k) on I^(3)
    for j in triple_relations(P):
        xvec, lhs_j, rhs_j, lhs_k, rhs_k = _triple_terms(P, j)
        in_rel = P.quad.rel.contains_vectors(from_rows(F, [xvec], d * d))
        record("i", in_rel, {"j": j, "x": xvec})
        if not in_rel:
            rep.results.setdefault("j", False)
            rep.results.setdefault("k", False)
            continue
        px, hx = P.extended(xvec)
        record("j", px == rhs_j, {"j": j, "lhs": px, "rhs": rhs_j})
        record("k", hx == rhs_k, {"j": j, "lhs": hx, "rhs": rhs_k})
    for e in EQUATIONS:
        rep.results.setdefault(e, True)
    return rep


def _triple_terms(P: NonhomogPresentation, j: Sequence):
    F = P.field
    V, R = P.V, P.R
    d, r = V.dim, R.dim
    Vb = [unit_list(F, d, v) for v in range(d)]
    ys = _slice_last(j, d)
    zs = _slice_first(j, d)
    x = vzero(F, d * d)
    h_left = vzero(F, d)   # h(j1 (x) j2) j3
    for c, y in enumerate(ys):
        if is_zero_vec(y):
            continue
        py, hy = P.extended(y)
        x = vadd(x, tensor_vec(py, Vb[c]))
        h_left = vadd(h_left, act_left(V, hy, Vb[c]))
    h_right = vzero(F, d)  # j1 h(j2 (x) j3)
    qk = vzero(F, r)
    for a, z in enumerate(zs):
        if is_zero_vec(z):
            continue
        pz, hz = P.extended(z)
        x = vsub(x, tensor_vec(Vb[a], pz))
        h_right = vadd(h_right, act_right(V, Vb[a], hz))
        qk = vadd(qk, P.q_of(Vb[a], hz))
    return x, None, vsub(h_left, h_right), None, qk


def _apply_left(V: Bimodule, r: Sequence, x: Sequence) -> list:
    d = V.dim
    out = [x[0] * 0] * (d * d)
    for u, v, c in split_pairs(x, d):
        ru = act_left(V, r, unit_list_like(x, d, u))
        out = vadd(out, vscale(c, tensor_vec(ru, unit_list_like(x, d, v))))
    return out


def _apply_right(V: Bimodule, x: Sequence, r: Sequence) -> list:
    d = V.dim
    out = [x[0] * 0] * (d * d)
    for u, v, c in split_pairs(x, d):
        vr = act_right(V, unit_list_like(x, d, v), r)
        out = vadd(out, vscale(c, tensor_vec(unit_list_like(x, d, u), vr)))
    return out


def unit_list_like(x: Sequence, n: int, i: int) -> list:
    z = x[0] * 0
    out = [z] * n
    out[i] = z + 1
    return out


# ---------------------------------------------------------------------------
# change of strict generators


def check_left_linear(P: NonhomogPresentation, a: Sequence) -> bool:
    """a[v] in R; a(r v) = r a(v)."""
    F = P.field
    V, R = P.V, P.R
    for s in range(R.dim):
        es = unit_list(F, R.dim, s)
        for v in range(V.dim):
            lhs = apply_functional(P, a, act_left(V, es, unit_list(F, V.dim, v)))
            if lhs != R.mul(es, a[v]):
                return False
    return True


def apply_functional(P: NonhomogPresentation, a: Sequence, v: Sequence) -> list:
    out = vzero(P.field, P.R.dim)
    for k, c in enumerate(v):
        if c != 0:
            out = vadd(out, vscale(c, a[k]))
    return out


def change_of_generators(P: NonhomogPresentation, a: Sequence) -> NonhomogPresentation:
    """Data for the strict generators v + a(v), a: V -> R left R-linear.

    q'' = q + a(v) r - a(vr), p'' = p + a(i_1) i_2 + i_1 a(i_2),
    h'' = h + a(p) - q(i_1, a(i_2)) + a(i_1 a(i_2)).
    """
    F = P.field
    V, R = P.V, P.R
    d, r = V.dim, R.dim
    a = [[F(x) for x in row] for row in a]
    if len(a) != d or any(len(row) != r for row in a):
        raise DimensionError("a must assign an element of R to each generator")
    if not check_left_linear(P, a):
        raise AlgebraError("a is not left R-linear")
    Vb = [unit_list(F, d, v) for v in range(d)]
    E = [unit_list(F, r, s) for s in range(r)]
    q2 = []
    for v in range(d):
        row = []
        for s in range(r):
            val = vadd(P.q[v][s], R.mul(a[v], E[s]))
            val = vsub(val, apply_functional(P, a, act_right(V, Vb[v], E[s])))
            row.append(val)
        q2.append(row)
    p2, h2 = [], []
    for x, p, h in zip(P.lifts, P.p_values, P.h_values):
        pp = list(p)
        hh = vadd(h, apply_functional(P, a, p))
        for u, v, c in split_pairs(x, d):
            pp = vadd(pp, vscale(c, act_left(V, a[u], Vb[v])))
            ua = act_right(V, Vb[u], a[v])
            pp = vadd(pp, vscale(c, ua))
            hh = vsub(hh, vscale(c, P.q_of(Vb[u], a[v])))
            hh = vadd(hh, vscale(c, apply_functional(P, a, ua)))
        p2.append(pp)
        h2.append(hh)
    return NonhomogPresentation(P.quad, q2, P.lifts, p2, h2, name=P.name)


def same_data(P1: NonhomogPresentation, P2: NonhomogPresentation) -> bool:
    """Equal (q, p, h) on all of I^ (independent of the chosen lifts)."""
    if P1.quad.rel != P2.quad.rel or P1.V.dim != P2.V.dim:
        return False
    if P1.q != P2.q:
        return False
    return all(P1.extended(x) == P2.extended(x) for x in P1.relation_basis())
