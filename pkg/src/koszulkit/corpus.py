"""Constructors for the example zoo: symmetric, exterior, Weyl, Clifford, enveloping, algebroid, quiver."""
from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from math import comb

from .bimodule import BaseAlgebra, Bimodule, direct_sum
from .linalg import Field, Subspace, from_rows, vstack
from .nonhomog import NonhomogPresentation, verify_self_consistency
from .quadratic import PreconditionError, QuadraticPresentation, word_action


@dataclass
class CorpusEntry:
    """A named presentation with expected verdicts.

    ``oracles`` names the independent derivation of each expected value; the
    engine re-derives every value in the test-suite.
    """
    name: str
    presentation: object
    expected: dict = field(default_factory=dict)
    oracles: dict = field(default_factory=dict)
    failing: bool = False

    @property
    def quadratic(self) -> QuadraticPresentation:
        P = self.presentation
        return P.quad if isinstance(P, NonhomogPresentation) else P

    @property
    def nonhomog(self) -> NonhomogPresentation | None:
        P = self.presentation
        return P if isinstance(P, NonhomogPresentation) else None


# ---------------------------------------------------------------------------
# helpers


def _closure(V: Bimodule, rows: list) -> Subspace:
    """Smallest sub-bimodule of V (x)_k V containing ``rows``."""
    F = V.field
    n = V.dim * V.dim
    S = Subspace.span(F, n, from_rows(F, rows, n)) if rows else Subspace.zero(F, n)
    acts = [word_action(V, 2, side, i) for side in ("left", "right") for i in range(V.R.dim)]
    while True:
        if S.dim == 0:
            return S
        imgs = [S.basis] + [S.basis * M.transpose() for M in acts]
        T = Subspace.span(F, n, vstack(F, imgs, n))
        if T == S:
            return S
        S = T


def _pair_row(d: int, terms: dict) -> list:
    row = [0] * (d * d)
    for (a, b), c in terms.items():
        row[a * d + b] += c
    return row


def commutator_rows(d: int) -> list:
    return [_pair_row(d, {(i, j): 1, (j, i): -1}) for i in range(d) for j in range(i + 1, d)]


def square_rows(d: int) -> list:
    """Rows spanning {v (x) v}: e_i (x) e_i and e_i (x) e_j + e_j (x) e_i."""
    rows = [_pair_row(d, {(i, i): 1}) for i in range(d)]
    rows += [_pair_row(d, {(i, j): 1, (j, i): 1}) for i in range(d) for j in range(i + 1, d)]
    return rows


def _check_central(R: BaseAlgebra, V: Bimodule):
    if not R.is_commutative():
        raise PreconditionError("symmetric and exterior constructions need a commutative base")
    if any(V.left[i] != V.right[i] for i in range(R.dim)):
        raise PreconditionError("left and right actions on the generators must agree")


def make_symmetric(R: BaseAlgebra, V: Bimodule, name: str = "") -> QuadraticPresentation:
    """Sym_R(V): relations v (x) w - w (x) v."""
    _check_central(R, V)
    rel = _closure(V, commutator_rows(V.dim))
    return QuadraticPresentation(R, V, rel, "left", name=name or f"Sym({V.dim})")


def make_exterior(R: BaseAlgebra, V: Bimodule, name: str = "") -> QuadraticPresentation:
    """Lambda_R(V): relations v (x) v (correct in characteristic 2 as well)."""
    _check_central(R, V)
    rel = _closure(V, square_rows(V.dim))
    return QuadraticPresentation(R, V, rel, "left", name=name or f"Lambda({V.dim})")


def symmetric(F: Field, d: int) -> QuadraticPresentation:
    return make_symmetric(BaseAlgebra.ground(F), Bimodule.over_ground(F, d), name=f"Sym({F},{d})")


def exterior(F: Field, d: int) -> QuadraticPresentation:
    return make_exterior(BaseAlgebra.ground(F), Bimodule.over_ground(F, d), name=f"Lambda({F},{d})")


def _zero_q(d: int, r: int) -> list:
    return [[[0] * r for _ in range(r)] for _ in range(d)]


# ---------------------------------------------------------------------------
# nonhomogeneous examples over the ground field


def make_heisenberg_weyl(F: Field, omega: Sequence[Sequence], name: str = "") -> NonhomogPresentation:
    """v*w - w*v = omega(v, w): p = 0, h(v (x) w - w (x) v) = -omega(v, w)."""
    d = len(omega)
    om = [[F(x) for x in row] for row in omega]
    if any(om[i][j] != -om[j][i] for i in range(d) for j in range(d)) or any(om[i][i] != 0 for i in range(d)):
        raise PreconditionError("omega must be alternating")
    R = BaseAlgebra.ground(F)
    V = Bimodule.over_ground(F, d)
    lifts = commutator_rows(d)
    Q = QuadraticPresentation.from_relations(R, V, lifts, name=name or "Weyl")
    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    return NonhomogPresentation(Q, _zero_q(d, 1), lifts, [[0] * d for _ in pairs],
                                [[-om[i][j]] for i, j in pairs], name=name or "Weyl")


def standard_symplectic(n: int) -> list:
    """Basis x_1..x_n, d_1..d_n with omega(d_i, x_i) = 1, so d_i * x_i - x_i * d_i = 1."""
    om = [[0] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        om[n + i][i] = 1
        om[i][n + i] = -1
    return om


def make_weyl(F: Field, n: int = 1) -> NonhomogPresentation:
    return make_heisenberg_weyl(F, standard_symplectic(n), name=f"Weyl{n}")


def make_clifford(F: Field, gram: Sequence[Sequence], name: str = "") -> NonhomogPresentation:
    """v*v = q0(v) for q0(v) = b(v, v) with b the symmetric Gram matrix; h = -q0 on v (x) v."""
    d = len(gram)
    b = [[F(x) for x in row] for row in gram]
    if any(b[i][j] != b[j][i] for i in range(d) for j in range(d)):
        raise PreconditionError("Gram matrix must be symmetric")
    R = BaseAlgebra.ground(F)
    V = Bimodule.over_ground(F, d)
    lifts = square_rows(d)
    Q = QuadraticPresentation.from_relations(R, V, lifts, name=name or "Clifford")
    hv = [[-b[i][i]] for i in range(d)]
    hv += [[-2 * b[i][j]] for i in range(d) for j in range(i + 1, d)]
    return NonhomogPresentation(Q, _zero_q(d, 1), lifts, [[0] * d for _ in lifts], hv,
                                name=name or "Clifford")


# ---------------------------------------------------------------------------
# Lie algebras and algebroids


def _bracket_table(R: BaseAlgebra, m: int, brackets: dict) -> list:
    """c[i][j] = [x_i, x_j] as m R-vectors, antisymmetric, from the given i < j entries."""
    F = R.field
    r = R.dim
    zero = [[F.zero] * r for _ in range(m)]
    c = [[[list(v) for v in zero] for _ in range(m)] for _ in range(m)]
    for (i, j), val in brackets.items():
        vec = [_as_R(R, x) for x in val]
        if len(vec) != m:
            raise PreconditionError(f"bracket ({i},{j}) must have {m} coefficients")
        c[i][j] = vec
        c[j][i] = [[-y for y in x] for x in vec]
    return c


def _as_R(R: BaseAlgebra, x) -> list:
    """A base-ring element given as a coordinate list or as a scalar multiple of the unit."""
    F = R.field
    if isinstance(x, (list, tuple)):
        if len(x) != R.dim:
            raise PreconditionError("base-ring coefficient has the wrong length")
        return [F(y) for y in x]
    return [F(x) * u for u in R.unit]


class Algebroid:
    """Free R-module g = R x_1 + ... + R x_m with bracket on the basis and anchor x_i(e_s)."""

    def __init__(self, R: BaseAlgebra, m: int, brackets: dict, anchor: Sequence | None = None):
        if not R.is_commutative():
            raise PreconditionError("algebroids need a commutative base")
        F = R.field
        self.R, self.m, self.field = R, m, F
        r = R.dim
        self.c = _bracket_table(R, m, brackets)
        if anchor is None:
            anchor = [[[0] * r for _ in range(r)] for _ in range(m)]
        self.anchor = [[[F(y) for y in anchor[i][s]] for s in range(r)] for i in range(m)]

    def act(self, i: int, a: list) -> list:
        """x_i(a) for a in R."""
        F = self.field
        out = [F.zero] * self.R.dim
        for s, x in enumerate(a):
            if x != 0:
                out = [o + x * y for o, y in zip(out, self.anchor[i][s])]
        return out

    def act_elem(self, v: list, a: list) -> list:
        """v(a) for v = sum v_i x_i (v_i in R)."""
        F = self.field
        out = [F.zero] * self.R.dim
        for i, vi in enumerate(v):
            out = [o + y for o, y in zip(out, self.R.mul(vi, self.act(i, a)))]
        return out

    def bracket(self, v: list, w: list) -> list:
        """[v, w] for v, w given as lists of m R-vectors (Leibniz in both slots)."""
        R = self.R
        F = self.field
        out = [[F.zero] * R.dim for _ in range(self.m)]
        for i, a in enumerate(v):
            for j, b in enumerate(w):
                ab = R.mul(a, b)
                for k in range(self.m):
                    out[k] = _radd(out[k], R.mul(ab, self.c[i][j][k]))
                # a x_i (b) x_j - b x_j (a) x_i
                out[j] = _radd(out[j], R.mul(a, self.act(i, b)))
                out[i] = _rsub(out[i], R.mul(b, self.act(j, a)))
        return out

    def validate(self):
        R, m = self.R, self.m
        F = self.field
        basis = [R.basis_vector(s) for s in range(R.dim)]
        for i in range(m):
            for a in basis:
                for b in basis:
                    lhs = self.act(i, R.mul(a, b))
                    rhs = _radd(R.mul(self.act(i, a), b), R.mul(a, self.act(i, b)))
                    if lhs != rhs:
                        raise PreconditionError(f"anchor of x_{i} is not a derivation")
        xs = [[R.unit if k == i else [F.zero] * R.dim for k in range(m)] for i in range(m)]
        for i in range(m):
            for j in range(m):
                bij = self.bracket(xs[i], xs[j])
                for a in basis:
                    lhs = self.act_elem(bij, a)
                    rhs = _rsub(self.act(i, self.act(j, a)), self.act(j, self.act(i, a)))
                    if lhs != rhs:
                        raise PreconditionError(f"anchor does not preserve the bracket [x_{i}, x_{j}]")
        for i in range(m):
            for j in range(m):
                for k in range(m):
                    t1 = self.bracket(xs[i], self.bracket(xs[j], xs[k]))
                    t2 = self.bracket(xs[j], self.bracket(xs[k], xs[i]))
                    t3 = self.bracket(xs[k], self.bracket(xs[i], xs[j]))
                    tot = [_radd(_radd(a, b), c) for a, b, c in zip(t1, t2, t3)]
                    if any(any(x != 0 for x in v) for v in tot):
                        raise PreconditionError(f"Jacobi identity fails on (x_{i}, x_{j}, x_{k})")
        return True


def _radd(x, y):
    return [a + b for a, b in zip(x, y)]


def _rsub(x, y):
    return [a - b for a, b in zip(x, y)]


def make_algebroid(R: BaseAlgebra, m: int, brackets: dict, anchor: Sequence | None = None,
                   twist: dict | None = None, name: str = "", check: bool = True) -> NonhomogPresentation:
    """x*a = a x + x(a), x*y - y*x = [x, y] (+ twist(x, y) in R).

    Generators: V = R^m with index c*dim R + s for e_s x_c. Lifts e_s x_i (x) x_j - e_s x_j (x) x_i.
    """
    F = R.field
    g = Algebroid(R, m, brackets, anchor)
    if check:
        g.validate()
    r = R.dim
    V = Bimodule.free_left(R, m)
    d = V.dim
    unit = R.unit
    # q(e_s x_c, e_t) = e_s x_c(e_t)
    q = [[R.mul(R.basis_vector(v % r), g.act(v // r, R.basis_vector(t))) for t in range(r)] for v in range(d)]

    def gen(c: int, coeff: list) -> list:
        out = [F.zero] * d
        for s, x in enumerate(coeff):
            out[c * r + s] = x
        return out

    lifts, pv, hv = [], [], []
    tw = twist or {}
    for i in range(m):
        for j in range(i + 1, m):
            for s in range(r):
                es = R.basis_vector(s)
                a = gen(i, es)
                b = gen(j, unit)
                a2 = gen(j, es)
                b2 = gen(i, unit)
                row = [F.zero] * (d * d)
                for u, x in enumerate(a):
                    for v, y in enumerate(b):
                        if x != 0 and y != 0:
                            row[u * d + v] += x * y
                for u, x in enumerate(a2):
                    for v, y in enumerate(b2):
                        if x != 0 and y != 0:
                            row[u * d + v] -= x * y
                lifts.append(row)
                br = g.c[i][j]
                p = [F.zero] * d
                for k in range(m):
                    coeff = R.mul(es, br[k])
                    for t in range(r):
                        p[k * r + t] += coeff[t]
                pv.append(p)
                t_ij = _as_R(R, tw.get((i, j), 0))
                hv.append([-x for x in R.mul(es, t_ij)])
    rel = _closure(V, lifts)
    Q = QuadraticPresentation(R, V, rel, "left", name=name or "U(g)")
    P = NonhomogPresentation(Q, q, lifts, pv, hv, name=name or "U(g)")
    if check:
        rep = verify_self_consistency(P)
        if not rep.ok:
            raise PreconditionError(f"self-consistency equation ({rep.first_failure()}) fails")
    return P


def make_enveloping(F: Field, m: int, brackets: dict, name: str = "", check: bool = True) -> NonhomogPresentation:
    """U(g) for a Lie algebra with basis x_0..x_{m-1}; brackets[(i, j)] = [x_i, x_j] for i < j."""
    return make_algebroid(BaseAlgebra.ground(F), m, brackets, name=name or "U(g)", check=check)


def make_twisted(F: Field, m: int, brackets: dict, twist: dict, name: str = "",
                 check: bool = True) -> NonhomogPresentation:
    """v*w - w*v = [v, w] + twist(v, w); consistent exactly when the twist is a closed 2-cochain."""
    return make_algebroid(BaseAlgebra.ground(F), m, brackets, twist=twist, name=name or "twisted",
                          check=check)


SL2 = {(0, 1): [0, 0, 1], (1, 2): [1, 0, 0], (0, 2): [0, -1, 0]}
# a bracket violating the Jacobi identity: [x,y] = z, [y,z] = x, [z,x] = x
FAKE_JACOBI = {(0, 1): [0, 0, 1], (1, 2): [1, 0, 0], (0, 2): [-1, 0, 0]}
NONABELIAN2 = {(0, 1): [0, 1]}
# [z, x] = x, [z, y] = y with x, y, z = x_0, x_1, x_2 (not unimodular)
BOREL_LIKE = {(0, 2): [-1, 0, 0], (1, 2): [0, -1, 0]}


def fat_point_algebroid(F: Field | None = None) -> NonhomogPresentation:
    """R = F_2[e]/e^2, g = R d with d(e) = 1."""
    F = F or Field.parse("fp:2")
    R = BaseAlgebra.truncated_polynomial(F, 2)
    anchor = [[[0, 0], [1, 0]]]
    return make_algebroid(R, 1, {}, anchor, name="fat-point algebroid")


# ---------------------------------------------------------------------------
# quivers and a matrix base ring


def make_quiver(F: Field, n: int, arrows: Sequence[tuple[int, int]], relations: Sequence[dict],
                name: str = "") -> QuadraticPresentation:
    """Path ring over R = k^n; arrow a: i -> j is e_i a e_j and a (x) b is the path a then b.

    ``relations`` are dicts {(a, b): coefficient} over composable arrow pairs.
    """
    R = BaseAlgebra.product(F, n)
    d = len(arrows)
    left, right = [], []
    for v in range(n):
        L = F.mat(d, d)
        Rm = F.mat(d, d)
        for a, (s, t) in enumerate(arrows):
            if s == v:
                L[a, a] = 1
            if t == v:
                Rm[a, a] = 1
        left.append(L)
        right.append(Rm)
    V = Bimodule(R, R, d, left, right, name="arrows")
    rows = []
    for rel in relations:
        ends = set()
        for (a, b) in rel:
            if arrows[a][1] != arrows[b][0]:
                raise PreconditionError(f"arrows {a} and {b} do not compose")
            ends.add((arrows[a][0], arrows[b][1]))
        if len(ends) > 1:
            raise PreconditionError("a relation mixes paths with different endpoints")
        rows.append(_pair_row(d, rel))
    return QuadraticPresentation.from_relations(R, V, rows, name=name or "quiver")


def make_matrix_weyl(F: Field, n: int = 2) -> NonhomogPresentation:
    """M_n(k) (x) A_1: generators M_n x + M_n d, d*x - x*d = 1."""
    R = BaseAlgebra.matrix_algebra(F, n)
    r = R.dim
    V = direct_sum([Bimodule.regular(R)] * 2)
    d = V.dim
    unit = R.unit
    lifts, hv = [], []
    for s in range(r):
        row = [F.zero] * (d * d)
        es = R.basis_vector(s)
        for u, x in enumerate(es):
            for v, y in enumerate(unit):
                if x != 0 and y != 0:
                    row[u * d + r + v] += x * y  # e_s x (x) 1 d
                    row[(r + u) * d + v] -= x * y  # e_s d (x) 1 x
        lifts.append(row)
        hv.append(list(es))
    rel = _closure(V, lifts)
    Q = QuadraticPresentation(R, V, rel, "left", name=f"M{n}(Weyl)")
    return NonhomogPresentation(Q, _zero_q(d, r), lifts, [[0] * d for _ in lifts], hv, name=f"M{n}(Weyl)")


# ---------------------------------------------------------------------------
# the corpus


def _cumulative(f: Callable[[int], int], N: int) -> list:
    out, tot = [], 0
    for n in range(N + 1):
        tot += f(n)
        out.append(tot)
    return out


def corpus() -> list[CorpusEntry]:
    """All entries in a fixed order."""
    Q = Field.parse("q")
    F2 = Field.parse("fp:2")
    out = []

    def add(name, pres, expected=None, oracles=None, failing=False):
        out.append(CorpusEntry(name, pres, expected or {}, oracles or {}, failing))

    add("sym_q2", symmetric(Q, 2), {"koszul": True, "dims": [n + 1 for n in range(7)],
                                    "dual_dims": [1, 2, 1, 0, 0, 0, 0]},
        {"dims": "monomials in 2 variables", "dual_dims": "binomial(2, n)"})
    add("sym_q3", symmetric(Q, 3), {"koszul": True, "dims": [comb(n + 2, 2) for n in range(7)],
                                    "dual_dims": [comb(3, n) for n in range(7)]},
        {"dims": "monomials in 3 variables", "dual_dims": "binomial(3, n)"})
    add("ext_q2", exterior(Q, 2), {"koszul": True, "dims": [1, 2, 1, 0, 0, 0],
                                   "dual_dims": [n + 1 for n in range(6)]},
        {"dims": "binomial(2, n)", "dual_dims": "monomials in 2 variables"})
    add("ext_f2_3", exterior(F2, 3), {"koszul": True, "dims": [comb(3, n) for n in range(5)],
                                      "dual_dims": [comb(n + 2, 2) for n in range(5)]},
        {"dims": "square-free monomials", "dual_dims": "monomials in 3 variables"})
    V2 = Bimodule.over_ground(Q, 2)
    add("non_koszul_xy", QuadraticPresentation.from_relations(
        BaseAlgebra.ground(Q), V2, [[0, 1, 0, 0], [1, 0, 0, 1]], name="k<x,y>/(xy, xx+yy)"),
        {"koszul": False}, {"koszul": "Hilbert series product differs from 1 in degree 4"})
    add("weyl1", make_weyl(Q, 1),
        {"pbw_dims": [(n + 1) * (n + 2) // 2 for n in range(7)], "augmented": False},
        {"pbw_dims": "monomials x^a d^b with a + b <= n"})
    add("weyl2", make_weyl(Q, 2), {"pbw_dims": [comb(n + 4, 4) for n in range(5)], "augmented": False},
        {"pbw_dims": "monomials in 4 variables of degree <= n"})
    add("clifford_11", make_clifford(Q, [[1, 0], [0, 1]]), {"pbw_dims": [1, 3, 4, 4, 4], "augmented": False},
        {"pbw_dims": "ordered square-free monomials in 2 generators"})
    add("clifford_1", make_clifford(Q, [[1]]), {"pbw_dims": [1, 2, 2, 2, 2], "augmented": False},
        {"pbw_dims": "1, v"})
    add("clifford_0", make_clifford(Q, [[0, 0], [0, 0]]), {"pbw_dims": [1, 3, 4, 4, 4], "augmented": True},
        {"pbw_dims": "exterior algebra dimensions"})
    add("sl2", make_enveloping(Q, 3, SL2, name="U(sl2)"),
        {"pbw_dims": [comb(n + 3, 3) for n in range(6)], "augmented": True},
        {"pbw_dims": "ordered monomials in 3 generators"})
    add("lie2", make_enveloping(Q, 2, NONABELIAN2, name="U(aff1)"),
        {"pbw_dims": [comb(n + 2, 2) for n in range(6)], "augmented": True},
        {"pbw_dims": "ordered monomials in 2 generators"})
    add("abelian2", make_enveloping(Q, 2, {}, name="U(k^2)"),
        {"pbw_dims": [comb(n + 2, 2) for n in range(6)], "augmented": True},
        {"pbw_dims": "monomials in 2 variables"})
    add("fat_point", fat_point_algebroid(F2), {"pbw_dims": [2 * (n + 1) for n in range(6)]},
        {"pbw_dims": "normal forms e^a d^b with a <= 1, b <= n"})
    add("fake_jacobi", make_enveloping(Q, 3, FAKE_JACOBI, name="fake Jacobi", check=False),
        {"consistent": False, "first_failure": "j"}, {"consistent": "Jacobi sum [x,[y,z]] + ... = z - ... != 0"},
        failing=True)
    add("twist_open", make_twisted(Q, 3, BOREL_LIKE, {(0, 1): 1}, name="non-closed twist", check=False),
        {"consistent": False}, {"consistent": "coboundary of the twist is nonzero on (x, y, z)"}, failing=True)
    add("quiver_2cycle", make_quiver(Q, 2, [(0, 1), (1, 0)], [{(0, 1): 1}], name="2-cycle, ab = 0"),
        {"koszul": True}, {"koszul": "monomial relations"})
    add("quiver_square", make_quiver(Q, 4, [(0, 1), (0, 2), (1, 3), (2, 3)], [{(0, 2): 1, (1, 3): -1}],
                                     name="commutative square"),
        {"koszul": True, "dims": [4, 4, 1, 0, 0]}, {"dims": "two length-two paths modulo one relation"})
    add("quiver_free", make_quiver(Q, 2, [(0, 1), (1, 0)], [], name="2-cycle path ring"),
        {"koszul": True, "dims": [2, 2, 2, 2, 2], "dual_dims": [2, 2, 0, 0, 0]},
        {"dims": "one path of each length from each vertex", "dual_dims": "all quadratic paths vanish"})
    add("matrix_weyl", make_matrix_weyl(Q, 2), {"pbw_dims": [4 * (n + 1) * (n + 2) // 2 for n in range(4)]},
        {"pbw_dims": "matrix units times monomials x^a d^b"})
    return out


def get(name: str) -> CorpusEntry:
    for e in corpus():
        if e.name == name:
            return e
    raise KeyError(name)


# ---------------------------------------------------------------------------
# random presentations


def random_presentation(F: Field, rng, max_dim: int = 3, base: str | None = None) -> QuadraticPresentation:
    """A random quadratic presentation over R = k or R = k x k.

    Over k x k the generators are arrows between two vertices and relations are
    drawn inside single endpoint sectors, so they form a sub-bimodule.
    """
    base = base or rng.choice(["k", "kxk"])
    p = F.characteristic or 7

    def coeff():
        return rng.randrange(p)

    if base == "k":
        d = rng.randint(1, max_dim)
        R = BaseAlgebra.ground(F)
        V = Bimodule.over_ground(F, d, name="V")
        count = rng.randint(0, d * d)
        rows = [[coeff() for _ in range(d * d)] for _ in range(count)]
        return QuadraticPresentation.from_relations(R, V, rows, name=f"random k, dim {d}")
    d = rng.randint(1, max_dim)
    arrows = [(rng.randrange(2), rng.randrange(2)) for _ in range(d)]
    sectors: dict = {}
    for a, (s, t) in enumerate(arrows):
        for b, (s2, t2) in enumerate(arrows):
            if t == s2:
                sectors.setdefault((s, t2), []).append((a, b))
    relations = []
    for key in sorted(sectors):
        pairs = sectors[key]
        for _ in range(rng.randint(0, len(pairs))):
            rel = {pair: coeff() for pair in pairs}
            rel = {k: c for k, c in rel.items() if c}
            if rel:
                relations.append(rel)
    return make_quiver(F, 2, arrows, relations, name=f"random quiver, {d} arrows")
