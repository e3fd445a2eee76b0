"""Independent oracles for the test-suite.

Nothing here imports koszulkit. The oracles are a naive noncommutative
rewriting system (normal words plus an overlap check), a sympy build of the
Chevalley-Eilenberg complex, and plain enumeration counts. FROZEN holds their
outputs once computed; ``test_oracles.py`` recomputes and compares.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product

import sympy

# ---------------------------------------------------------------------------
# counting


def monomials(nvars: int, n: int) -> int:
    """Commutative monomials of degree exactly n."""
    return sum(1 for _ in combinations_with_replacement(range(nvars), n))


def squarefree(nvars: int, n: int) -> int:
    return sum(1 for _ in combinations(range(nvars), n))


def cumulative(counts):
    out, tot = [], 0
    for c in counts:
        tot += c
        out.append(tot)
    return out


# ---------------------------------------------------------------------------
# rewriting


class Rewriting:
    """Words in ``ngens`` letters modulo rules ``lhs -> {word: coeff}`` (lhs of length 2).

    Coefficients live in Q (p = 0) or F_p. ``weights`` gives each letter a
    filtration weight; irreducible words of weight <= n span F_n when the
    system is confluent.
    """

    def __init__(self, ngens: int, rules: dict, p: int = 0, weights=None):
        self.n = ngens
        self.p = p
        self.rules = {tuple(k): {tuple(w): self._c(c) for w, c in v.items()} for k, v in rules.items()}
        self.weights = list(weights) if weights is not None else [1] * ngens

    def _c(self, c):
        return Fraction(c) % self.p if self.p else Fraction(c)

    def _clean(self, poly: dict) -> dict:
        return {w: c for w, c in poly.items() if (c % self.p if self.p else c) != 0}

    def _add(self, poly: dict, w: tuple, c) -> None:
        v = poly.get(w, 0) + c
        poly[w] = v % self.p if self.p else v

    def reduce(self, poly: dict) -> dict:
        poly = self._clean({tuple(w): self._c(c) for w, c in poly.items()})
        while True:
            hit = None
            for w in sorted(poly):
                for i in range(len(w) - 1):
                    if w[i:i + 2] in self.rules:
                        hit = (w, i)
                        break
                if hit:
                    break
            if hit is None:
                return poly
            w, i = hit
            c = poly.pop(w)
            for rhs, rc in self.rules[w[i:i + 2]].items():
                self._add(poly, w[:i] + rhs + w[i + 2:], c * rc)
            poly = self._clean(poly)

    def confluent(self) -> bool:
        """All overlaps abc with ab and bc reducible resolve to the same normal form."""
        for (a, b), (b2, c) in product(self.rules, self.rules):
            if b != b2:
                continue
            left = {}
            for rhs, k in self.rules[(a, b)].items():
                self._add(left, rhs + (c,), k)
            right = {}
            for rhs, k in self.rules[(b, c)].items():
                self._add(right, (a,) + rhs, k)
            if self.reduce(left) != self.reduce(right):
                return False
        return True

    def irreducible(self, w: tuple) -> bool:
        return all(w[i:i + 2] not in self.rules for i in range(len(w) - 1))

    def filtered_dims(self, N: int, max_len: int | None = None) -> list:
        """Number of irreducible words of weight <= n, for n = 0..N."""
        max_len = max_len if max_len is not None else 2 * N + 2
        counts = [0] * (N + 1)
        frontier = [()]
        for _ in range(max_len + 1):
            nxt = []
            for w in frontier:
                wt = sum(self.weights[x] for x in w)
                if wt <= N:
                    counts[wt] += 1
                for x in range(self.n):
                    v = w + (x,)
                    if self.irreducible(v) and sum(self.weights[y] for y in v) <= N:
                        nxt.append(v)
            frontier = nxt
        return cumulative(counts)


def enveloping_rewriting(m: int, brackets: dict) -> Rewriting:
    """x_j x_i -> x_i x_j - [x_i, x_j] for i < j."""
    rules = {}
    for i in range(m):
        for j in range(i + 1, m):
            rhs = {(i, j): 1}
            for k, c in enumerate(brackets.get((i, j), [0] * m)):
                if c:
                    rhs[(k,)] = -c
            rules[(j, i)] = rhs
    return Rewriting(m, rules)


def weyl_rewriting() -> Rewriting:
    # letters x = 0, d = 1 with d x = x d + 1
    return Rewriting(2, {(1, 0): {(0, 1): 1, (): 1}})


def fat_point_rewriting(p: int = 2) -> Rewriting:
    # letters e = 0 (weight 0) and d = 1 with e e = 0, d e = e d + 1
    return Rewriting(2, {(0, 0): {}, (1, 0): {(0, 1): 1, (): 1}}, p=p, weights=[0, 1])


def clifford_rewriting(gram) -> Rewriting:
    n = len(gram)
    rules = {}
    for i in range(n):
        rules[(i, i)] = {(): gram[i][i]} if gram[i][i] else {}
        for j in range(i + 1, n):
            rhs = {(i, j): -1}
            if gram[i][j] + gram[j][i]:
                rhs[()] = gram[i][j] + gram[j][i]
            rules[(j, i)] = rhs
    return Rewriting(n, rules)


# ---------------------------------------------------------------------------
# Chevalley-Eilenberg cohomology over Q with sympy


def ce_cohomology(m: int, brackets: dict) -> list:
    """dim H^k of Lambda^k g^* with the CE differential, k = 0..m."""
    c = [[[0] * m for _ in range(m)] for _ in range(m)]
    for (i, j), v in brackets.items():
        c[i][j] = list(v)
        c[j][i] = [-x for x in v]
    bases = [list(combinations(range(m), k)) for k in range(m + 2)]

    def wedge_index(k):
        return {s: i for i, s in enumerate(bases[k])}

    mats = []
    for k in range(m + 1):
        src, tgt = bases[k], bases[k + 1]
        M = sympy.zeros(len(tgt), len(src))
        idx = wedge_index(k)
        for row, T in enumerate(tgt):
            # (d w)(x_T0..x_Tk) = sum_{a<b} (-1)^(a+b) w([x_Ta, x_Tb], rest)
            for a, b in combinations(range(len(T)), 2):
                sign = (-1) ** (a + b)
                rest = [T[t] for t in range(len(T)) if t not in (a, b)]
                for z, coeff in enumerate(c[T[a]][T[b]]):
                    if not coeff:
                        continue
                    args = [z] + rest
                    if len(set(args)) < len(args):
                        continue
                    perm_sign = _sort_sign(args)
                    M[row, idx[tuple(sorted(args))]] += sign * coeff * perm_sign
        mats.append(M)
    ranks = [M.rank() for M in mats]
    dims = [len(bases[k]) for k in range(m + 1)]
    out = []
    for k in range(m + 1):
        incoming = ranks[k - 1] if k > 0 else 0
        out.append(dims[k] - ranks[k] - incoming)
    return out


def ce_square_zero(m: int, brackets: dict) -> bool:
    """d o d = 0 on Lambda^1 g^*, which is equivalent to the Jacobi identity."""
    c = [[[0] * m for _ in range(m)] for _ in range(m)]
    for (i, j), v in brackets.items():
        c[i][j] = list(v)
        c[j][i] = [-x for x in v]
    for i, j, k in combinations(range(m), 3):
        total = [0] * m
        for a, b, e in ((i, j, k), (j, k, i), (k, i, j)):
            inner = c[b][e]
            for z, coeff in enumerate(inner):
                for w in range(m):
                    total[w] += coeff * c[a][z][w]
        if any(total):
            return False
    return True


def _sort_sign(seq) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(len(seq) - 1 - i):
            if seq[j] > seq[j + 1]:
                seq[j], seq[j + 1] = seq[j + 1], seq[j]
                sign = -sign
    return sign


# ---------------------------------------------------------------------------
# frozen values

SL2 = {(0, 1): [0, 0, 1], (1, 2): [1, 0, 0], (0, 2): [0, -1, 0]}
FAKE_JACOBI = {(0, 1): [0, 0, 1], (1, 2): [1, 0, 0], (0, 2): [-1, 0, 0]}
NONABELIAN2 = {(0, 1): [0, 1]}

FROZEN = {
    "weyl1_dims": [1, 3, 6, 10, 15, 21, 28],
    "sl2_dims": [1, 4, 10, 20, 35, 56],
    "lie2_dims": [1, 3, 6, 10, 15, 21],
    "fat_point_dims": [2, 4, 6, 8, 10, 12],
    "clifford_11_dims": [1, 3, 4, 4, 4],
    "sym3_dual_dims": [1, 3, 3, 1, 0, 0, 0],
    "ext2_tor_diag": [1, 2, 3, 4, 5, 6],
    "ce_sl2": [1, 0, 0, 1],
    "ce_lie2": [1, 1, 0],
    "ce_abelian2": [1, 2, 1],
}


def compute_frozen() -> dict:
    return {
        "weyl1_dims": weyl_rewriting().filtered_dims(6),
        "sl2_dims": enveloping_rewriting(3, SL2).filtered_dims(5),
        "lie2_dims": enveloping_rewriting(2, NONABELIAN2).filtered_dims(5),
        "fat_point_dims": fat_point_rewriting(2).filtered_dims(5),
        "clifford_11_dims": clifford_rewriting([[1, 0], [0, 1]]).filtered_dims(4),
        "sym3_dual_dims": [squarefree(3, n) for n in range(7)],
        "ext2_tor_diag": [monomials(2, n) for n in range(6)],
        "ce_sl2": ce_cohomology(3, SL2),
        "ce_lie2": ce_cohomology(2, NONABELIAN2),
        "ce_abelian2": ce_cohomology(2, {}),
    }
