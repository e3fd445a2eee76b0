"""Curved DG slices: the dual CDG-ring, connection changes, morphisms and quasi-differential rings."""
from __future__ import annotations

from dataclasses import dataclass, field

from .bimodule import AlgebraError, Bimodule
from .linalg import (
    Field,
    from_rows,
    identity,
    is_zero,
    kernel,
    kron,
    kron_id,
    rank,
    solve,
    unit,
    vec,
)
from .nonhomog import (
    ConsistencyError,
    NonhomogPresentation,
    split_pairs,
    unit_list,
    verify_self_consistency,
    vsub,
)
from .quadratic import (
    GradedAlgebraSlice,
    QuadraticPresentation,
    build_quadratic_slice,
    quadratic_dual,
)


def _col(F: Field, values) -> object:
    return vec(F, list(values))


def _col_list(M) -> list:
    return [M[i, 0] for i in range(M.nrows())]


@dataclass
class AxiomReport:
    results: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)

    def record(self, name: str, ok: bool, where=None):
        if name not in self.results:
            self.results[name] = True
        if not ok and self.results[name]:
            self.results[name] = False
            self.failures[name] = where

    @property
    def ok(self) -> bool:
        return all(self.results.values())

    def __bool__(self):
        return self.ok


class CdgRingSlice:
    """B^0..B^N with d_n : B^n -> B^{n+1} (n < N) and curvature h in B^2."""

    def __init__(self, slice_: GradedAlgebraSlice, d: list, h, name: str = "",
                 presentation: QuadraticPresentation | None = None, well_defined: dict | None = None):
        self.slice = slice_
        self.field = slice_.field
        self.R = slice_.R
        self.d = list(d)
        self.h = h
        self.name = name
        self.presentation = presentation
        self.well_defined = dict(well_defined or {})

    @property
    def N(self) -> int:
        return self.slice.N

    def dims(self) -> list:
        return self.slice.dims()

    def apply_d(self, n: int, x):
        return self.d[n] * x

    def lmul(self, i: int, x, j: int):
        """Matrix of y -> x y from B^j to B^{i+j}."""
        return self.slice.left_mult(i, j, x)

    def rmul(self, j: int, x, i: int):
        """Matrix of y -> y x from B^i to B^{i+j}."""
        return self.slice.right_mult(i, j, x)

    def check_axioms(self) -> AxiomReport:
        F = self.field
        S = self.slice
        N = self.N
        rep = AxiomReport()
        for n, ok in sorted(self.well_defined.items()):
            rep.record("well_defined", ok, {"degree": n})
        rep.results.setdefault("well_defined", True)
        for i in range(N):
            for j in range(N - i):
                if S.comps[i].dim * S.comps[j].dim == 0:
                    continue
                lhs = self.d[i + j] * S.mult[(i, j)]
                t1 = S.mult[(i + 1, j)] * kron(F, self.d[i], identity(F, S.comps[j].dim))
                t2 = S.mult[(i, j + 1)] * kron(F, identity(F, S.comps[i].dim), self.d[j])
                rhs = t1 + t2 if i % 2 == 0 else t1 - t2
                rep.record("leibniz", lhs == rhs, {"degrees": (i, j), "residual": lhs - rhs})
        rep.results.setdefault("leibniz", True)
        for n in range(N - 1):
            if S.comps[n].dim == 0:
                continue
            lhs = self.d[n + 1] * self.d[n]
            rhs = self.lmul(2, self.h, n) - self.rmul(2, self.h, n)
            rep.record("d2_curvature", lhs == rhs, {"degree": n, "residual": lhs - rhs})
        rep.results.setdefault("d2_curvature", True)
        if N >= 3:
            rep.record("dh", is_zero(self.d[2] * self.h), {"residual": self.d[2] * self.h})
        else:
            rep.results["dh"] = True
        return rep

    def same_as(self, other: CdgRingSlice) -> bool:
        if self.dims() != other.dims():
            return False
        if any(self.slice.mult[k] != other.slice.mult[k] for k in self.slice.mult):
            return False
        return self.h == other.h and all(a == b for a, b in zip(self.d, other.d))


# ---------------------------------------------------------------------------
# the dual CDG-ring


class PairingSystem:
    """Evaluates <x, y> for x in I^ and y in B^1 (x)_k B^1 and solves for y."""

    def __init__(self, P: NonhomogPresentation, Bq: QuadraticPresentation):
        F = P.field
        self.P = P
        self.dual = Bq.duality
        G = self.dual.pairing_matrix2()
        r = P.R.dim
        dB = Bq.V.dim
        self.basis = P.relation_basis()
        rows = []
        Gt = G.table()
        for x in self.basis:
            for l in range(r):
                row = [F.zero] * (dB * dB)
                for k, c in enumerate(x):
                    if c == 0:
                        continue
                    gr = Gt[k * r + l]
                    row = [a + c * b for a, b in zip(row, gr)]
                rows.append(row)
        self.C = from_rows(F, rows, dB * dB) if rows else F.mat(0, dB * dB)
        self.r = r
        self.dB = dB

    def solve(self, targets: list):
        """Columns y with <x_k, y> = targets[:, (k, l)]; targets given per column as lists."""
        F = self.P.field
        m = self.C.nrows()
        n = len(targets)
        if m == 0:
            return F.mat(self.dB * self.dB, n)
        T = F.mat(m, n)
        for j, t in enumerate(targets):
            for i, x in enumerate(t):
                if x != 0:
                    T[i, j] = x
        return solve(self.C, T)


def build_cdg_dual(P: NonhomogPresentation, N: int, force: bool = False) -> CdgRingSlice:
    """(B, d, h) with B the quadratic dual, d_0 from q, d_1 from (p, q) and h from h."""
    if N < 2:
        raise ValueError("the dual CDG-ring needs degree at least 2")
    report = verify_self_consistency(P)
    if not report.ok and not force:
        raise ConsistencyError(f"self-consistency equation ({report.first_failure()}) fails", report)
    F = P.field
    R, V = P.R, P.V
    d, r = V.dim, R.dim
    Bq = quadratic_dual(P.quad)
    D = Bq.V
    dB = D.dim
    S = build_quadratic_slice(Bq, N)
    pair = Bq.duality.pair
    # d_0(e_s) = (v -> q(v, e_s))
    d0 = F.mat(dB, r)
    for s in range(r):
        M = F.mat(r, d)
        for v in range(d):
            for l, x in enumerate(P.q[v][s]):
                if x != 0:
                    M[l, v] = x
        coords = D.coordinates_of(M)
        for k, x in enumerate(coords):
            if x != 0:
                d0[k, s] = x
    system = PairingSystem(P, Bq)
    # d_1(b): <x, d_1 b> = <p(x), b> - q(x_1, <x_2, b>)
    targets = []
    for beta in range(dB):
        t = []
        for x in system.basis:
            p, _ = P.extended(x)
            val = pairing_value(F, pair, p, beta, r)
            for u, v, c in split_pairs(x, d):
                val = vsub(val, [c * y for y in P.q_of(unit_list(F, d, u), pair[v][beta])])
            t.extend(val)
        targets.append(t)
    h_target = []
    for x in system.basis:
        h_target.extend(P.extended(x)[1])
    sol = system.solve(targets + [h_target])
    if sol is None:
        raise ConsistencyError("the differential or curvature is not representable in B^2", report)
    Y = _cols(F, sol, range(dB))
    yh = _cols(F, sol, [dB])
    q2 = S.words[2]
    d_list = [d0, q2.proj * Y]
    h = q2.proj * yh
    well = {1: True}
    for n in range(2, N):
        dn, ok = _extend_derivation(F, Bq, S, Y, n)
        d_list.append(dn)
        well[n] = ok
    return CdgRingSlice(S, d_list, h, name=f"{P.name}^!", presentation=Bq, well_defined=well)


def _cols(F: Field, M, idx):
    idx = list(idx)
    out = F.mat(M.nrows(), len(idx))
    for j, c in enumerate(idx):
        for i in range(M.nrows()):
            x = M[i, c]
            if x != 0:
                out[i, j] = x
    return out


def pairing_value(F: Field, pair: list, v, beta: int, r: int) -> list:
    """<v, b_beta> in R for v in A_1 (coordinates)."""
    out = [F.zero] * r
    for a, x in enumerate(v):
        if x != 0:
            out = [o + x * y for o, y in zip(out, pair[a][beta])]
    return out


def _extend_derivation(F: Field, Bq: QuadraticPresentation, S: GradedAlgebraSlice, Y, n: int):
    """d_n from the lift Y of d_1 via the odd derivation of the k-tensor algebra."""
    dB = Bq.V.dim
    total = None
    for i in range(1, n + 1):
        term = kron_id(F, dB ** (i - 1), Y, dB ** (n - i))
        if i % 2 == 0:
            term = term * -1
        total = term if total is None else total + term
    src, dst = S.words[n], S.words[n + 1]
    J = src.sub
    ok = True
    if J.dim:
        img = dst.proj * (total * J.basis.transpose())
        ok = is_zero(img)
    return dst.proj * total * src.lift, ok


# ---------------------------------------------------------------------------
# change of connection and morphisms


def element_of_B1(C: CdgRingSlice, a) -> object:
    """Coordinates in B^1 of a left R-linear map a: V -> R (a[v] in R)."""
    F = C.field
    D = C.presentation.V
    r = C.R.dim
    M = F.mat(r, D.source.dim)
    for v, val in enumerate(a):
        for l, x in enumerate(val):
            if x != 0:
                M[l, v] = F(x)
    return _col(F, D.coordinates_of(M))


def supercommutator(C: CdgRingSlice, a, i: int, n: int):
    """Matrix of b -> a b - (-1)^{i n} b a from B^n to B^{n+i} for a in B^i."""
    L = C.lmul(i, a, n)
    Rm = C.rmul(i, a, n)
    return L - Rm if (i * n) % 2 == 0 else L + Rm


def cdg_connection_change(C: CdgRingSlice, a) -> CdgRingSlice:
    """d'' = d + [a, -], h'' = h + d(a) + a^2 for a in B^1."""
    N = C.N
    d2 = [C.d[n] + supercommutator(C, a, 1, n) for n in range(N)]
    h2 = C.h + C.d[1] * a + C.slice.product(1, a, 1, a)
    return CdgRingSlice(C.slice, d2, h2, name=C.name, presentation=C.presentation,
                        well_defined=C.well_defined)


def verify_cdg_morphism(src: CdgRingSlice, tgt: CdgRingSlice, f: list, a) -> AxiomReport:
    """(f, a): (B, d, h) -> (B', d', h'); f(d b) = d'(f b) + [a, f b], f(h) = h' + d'(a) + a^2."""
    F = src.field
    rep = AxiomReport()
    N = min(src.N, tgt.N)
    if len(f) < N + 1:
        raise ValueError("morphism components do not cover the slice")
    for n in range(N + 1):
        if f[n].nrows() != tgt.slice.comps[n].dim or f[n].ncols() != src.slice.comps[n].dim:
            raise ValueError(f"component {n} does not respect the grading")
    S, T = src.slice, tgt.slice
    for i in range(N + 1):
        for j in range(N + 1 - i):
            lhs = f[i + j] * S.mult[(i, j)]
            rhs = T.mult[(i, j)] * kron(F, f[i], f[j])
            rep.record("multiplicative", lhs == rhs, {"degrees": (i, j)})
    for n in range(N):
        lhs = f[n + 1] * src.d[n]
        rhs = tgt.d[n] * f[n] + supercommutator(tgt, a, 1, n) * f[n]
        rep.record("differential", lhs == rhs, {"degree": n})
    lhs = f[2] * src.h
    rhs = tgt.h + tgt.d[1] * a + T.product(1, a, 1, a)
    rep.record("curvature", lhs == rhs, {"lhs": lhs, "rhs": rhs})
    return rep


def verify_two_morphism(src: CdgRingSlice, tgt: CdgRingSlice, fa: tuple, gb: tuple, z) -> AxiomReport:
    """z in B'^0 invertible with g(c) = z f(c) z^{-1} and b = z a z^{-1} - d'(z) z^{-1}."""
    F = src.field
    R = tgt.R
    f, a = fa
    g, b = gb
    rep = AxiomReport()
    zl = _col_list(z)
    zinv = R.inverse(zl)
    if zinv is None:
        rep.record("invertible", False, {"z": zl})
        return rep
    rep.record("invertible", True)
    zi = _col(F, zinv)
    T = tgt.slice
    for n in range(min(src.N, tgt.N) + 1):
        conj = T.left_mult(0, n, z) * T.right_mult(n, 0, zi)
        rep.record("conjugation", g[n] == conj * f[n], {"degree": n})
    rhs = T.left_mult(0, 1, z) * T.right_mult(1, 0, zi) * a - T.right_mult(1, 0, zi) * (tgt.d[0] * z)
    rep.record("connection", b == rhs, {"b": b, "expected": rhs})
    return rep


def identity_morphism(C: CdgRingSlice) -> list:
    F = C.field
    return [identity(F, A.dim) for A in C.slice.comps]


# ---------------------------------------------------------------------------
# quasi-differential rings


class QuasiDiffSlice:
    """B^ = B[delta] with components B^n + B^{n-1} delta and del = d/d delta."""

    def __init__(self, C: CdgRingSlice, slice_: GradedAlgebraSlice, dels: list):
        self.cdg = C
        self.slice = slice_
        self.field = C.field
        self.dels = dels  # dels[n]: B^^n -> B^^{n-1}, n >= 1

    @property
    def N(self) -> int:
        return self.slice.N

    def split(self, n: int) -> tuple[int, int]:
        """(dim B^n, dim B^{n-1})."""
        B = self.cdg.slice
        return B.comps[n].dim, (B.comps[n - 1].dim if n >= 1 else 0)

    def delta(self):
        """delta = 1 * delta in B^^1."""
        F = self.field
        b1, b0 = self.split(1)
        v = F.mat(b1 + b0, 1)
        unit_vec = self.cdg.R.unit
        for l, x in enumerate(unit_vec):
            if x != 0:
                v[b1 + l, 0] = x
        return v

    def embed(self, n: int):
        """B^n -> B^^n."""
        F = self.field
        b, c = self.split(n)
        M = F.mat(b + c, b)
        for i in range(b):
            M[i, i] = 1
        return M

    def check(self) -> AxiomReport:
        F = self.field
        S = self.slice
        rep = AxiomReport()
        try:
            S.validate()
            rep.record("associative", True)
        except AlgebraError as exc:
            rep.record("associative", False, str(exc))
        N = self.N
        # del is an odd derivation of degree -1
        for i in range(N + 1):
            for j in range(N + 1 - i):
                if i + j == 0 or S.comps[i].dim * S.comps[j].dim == 0:
                    continue
                lhs = self.dels[i + j] * S.mult[(i, j)]
                rhs = None
                if i >= 1:
                    rhs = S.mult[(i - 1, j)] * kron(F, self.dels[i], identity(F, S.comps[j].dim))
                if j >= 1:
                    t2 = S.mult[(i, j - 1)] * kron(F, identity(F, S.comps[i].dim), self.dels[j])
                    t2 = t2 if i % 2 == 0 else t2 * -1
                    rhs = t2 if rhs is None else rhs + t2
                rep.record("odd_derivation", lhs == rhs, {"degrees": (i, j)})
        for n in range(2, N + 1):
            rep.record("del_squared", is_zero(self.dels[n - 1] * self.dels[n]), {"degree": n})
        # acyclicity: ker del_n = im del_{n+1}; 1 in im del_1
        for n in range(1, N):
            kdim = S.comps[n].dim - rank(self.dels[n])
            rep.record("acyclic", kdim == rank(self.dels[n + 1]), {"degree": n})
        one = _col(F, self.cdg.R.unit)
        rep.record("acyclic", (self.dels[1] * self.delta()) == one, {"degree": 0})
        # delta^2 = h and [delta, b] = d(b)
        dd = S.product(1, self.delta(), 1, self.delta())
        rep.record("delta_squared", dd == self.embed(2) * self.cdg.h, {"delta^2": dd})
        return rep

    def recover(self) -> CdgRingSlice:
        """(d, h) from d(b) = [delta, b] and h = delta^2, restricted to B = ker del."""
        F = self.field
        C = self.cdg
        S = self.slice
        dlt = self.delta()
        ds = []
        for n in range(min(C.N, S.N - 1)):
            L = S.left_mult(1, n, dlt) * self.embed(n)
            Rm = S.right_mult(n, 1, dlt) * self.embed(n)
            comm = L - Rm if n % 2 == 0 else L + Rm
            b, _ = self.split(n + 1)
            ds.append(_rows(F, comm, range(b)))
        h_full = S.product(1, dlt, 1, dlt)
        b2, _ = self.split(2)
        h = _rows(F, h_full, range(b2))
        B = C.slice
        return CdgRingSlice(B, ds, h, name=C.name, presentation=C.presentation)


def _rows(F: Field, M, idx):
    idx = list(idx)
    out = F.mat(len(idx), M.ncols())
    for i, r in enumerate(idx):
        for j in range(M.ncols()):
            x = M[r, j]
            if x != 0:
                out[i, j] = x
    return out


def _block(F: Field, m: int, n: int, blocks: list):
    """Sum of blocks (r0, c0, M) placed into an m x n zero matrix."""
    out = F.mat(m, n)
    for r0, c0, M in blocks:
        for i in range(M.nrows()):
            for j in range(M.ncols()):
                x = M[i, j]
                if x != 0:
                    out[r0 + i, c0 + j] += x
    return out


def quasi_differential_ring(C: CdgRingSlice, N: int | None = None) -> QuasiDiffSlice:
    """B^^n = B^n + B^{n-1} delta with [delta, b] = d(b), delta^2 = h."""
    F = C.field
    B = C.slice
    R = C.R
    N = C.N if N is None else min(N, C.N)
    dims = [(B.comps[n].dim, B.comps[n - 1].dim if n else 0) for n in range(N + 1)]
    comps = []
    for n in range(N + 1):
        b, c = dims[n]
        left = []
        right = []
        for s in range(R.dim):
            Lb = B.comps[n].left[s]
            Lc = B.comps[n - 1].left[s] if n else F.mat(0, 0)
            left.append(_block(F, b + c, b + c, [(0, 0, Lb), (b, b, Lc)]))
            Rb = B.comps[n].right[s]
            blocks = [(0, 0, Rb)]
            if n:
                blocks.append((b, b, B.comps[n - 1].right[s]))
                # c delta r = c r delta + c d(r)
                dr = C.d[0] * unit(F, R.dim, s)
                blocks.append((0, b, B.right_mult(n - 1, 1, dr)))
            right.append(_block(F, b + c, b + c, blocks))
        comps.append(Bimodule(R, R, b + c, left, right, name=f"B^{n}"))
    mult = {}
    for i in range(N + 1):
        for j in range(N + 1 - i):
            bi, ci = dims[i]
            bj, cj = dims[j]
            bt, ct = dims[i + j]
            blocks = []
            # b' b''
            blocks.append(("b", "b", "b", B.mult[(i, j)]))
            if i >= 1:
                # c' delta b'' = (-1)^j c' b'' delta + c' d(b'')
                blocks.append(("c", "b", "c", B.mult[(i - 1, j)] * (1 if j % 2 == 0 else -1)))
                if bt:
                    blocks.append(("c", "b", "b", B.mult[(i - 1, j + 1)] *
                                   kron(F, identity(F, B.comps[i - 1].dim), C.d[j])))
            if j >= 1:
                # b' c'' delta
                blocks.append(("b", "c", "c", B.mult[(i, j - 1)]))
            if i >= 1 and j >= 1:
                # c' delta c'' delta = (-1)^{j-1} c' c'' h + c' d(c'') delta
                cc = B.mult[(i - 1, j - 1)]
                hh = B.right_mult(i + j - 2, 2, C.h) * cc
                blocks.append(("c", "c", "b", hh * (1 if (j - 1) % 2 == 0 else -1)))
                blocks.append(("c", "c", "c", B.mult[(i - 1, j)] *
                               kron(F, identity(F, B.comps[i - 1].dim), C.d[j - 1])))
            M = F.mat(bt + ct, (bi + ci) * (bj + cj))
            for x, y, z, blk in blocks:
                xs = range(bi) if x == "b" else range(bi, bi + ci)
                ys = range(bj) if y == "b" else range(bj, bj + cj)
                z0 = 0 if z == "b" else bt
                nj = bj + cj
                ylist = list(ys)
                for a_idx, a in enumerate(xs):
                    for b_idx, bb in enumerate(ylist):
                        col_src = a_idx * len(ylist) + b_idx
                        col_dst = a * nj + bb
                        for row in range(blk.nrows()):
                            val = blk[row, col_src]
                            if val != 0:
                                M[z0 + row, col_dst] += val
            mult[(i, j)] = M
    hat = GradedAlgebraSlice(R, comps, mult, name=f"{C.name}[delta]")
    dels = [None]
    for n in range(1, N + 1):
        b, c = dims[n]
        bp, cp = dims[n - 1]
        M = F.mat(bp + cp, b + c)
        sign = 1 if (n - 1) % 2 == 0 else -1
        for k in range(c):
            M[k, b + k] = sign
        dels.append(M)
    return QuasiDiffSlice(C, hat, dels)


# ---------------------------------------------------------------------------
# the augmented case


@dataclass
class AugmentationResult:
    found: bool
    a: object = None
    dg: CdgRingSlice | None = None
    message: str = ""


def build_augmented_dg(C: CdgRingSlice) -> AugmentationResult:
    """Look for a in B^1 with h + d(a) + a^2 = 0 by solving d(a) = -h and testing a^2 = 0."""
    F = C.field
    if is_zero(C.h):
        return AugmentationResult(True, F.mat(C.slice.comps[1].dim, 1), C, "curvature already zero")
    a = solve(C.d[1], C.h * -1)
    if a is None:
        return AugmentationResult(False, message="no augmentation found under linear search")
    K = kernel(C.d[1])
    candidates = [a]
    for row in K.basis.table() if K.dim else []:
        candidates.append(a + from_rows(F, [row], K.ambient).transpose())
    for cand in candidates:
        if is_zero(C.slice.product(1, cand, 1, cand)):
            changed = cdg_connection_change(C, cand)
            return AugmentationResult(True, cand, changed, "curvature removed by a connection change")
    return AugmentationResult(False, message="no augmentation found under linear search")
