"""Exact dense linear algebra over Q and F_p.

Matrices are python-flint ``fmpq_mat`` / ``nmod_mat`` objects (dense, row-major).
Linear maps use the column convention: a map U -> W is a ``dim W x dim U``
matrix acting on column vectors.  Subspaces are stored by the rows of their
reduced echelon basis, so two subspaces are equal iff their bases are equal.
"""
from __future__ import annotations

from collections.abc import Iterable, Sequence
from fractions import Fraction

from flint import fmpq, fmpq_mat, fmpz, nmod, nmod_mat


class DimensionError(ValueError):
    pass


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


class Field:
    """The ground field: rationals or a prime field."""

    def __init__(self, kind: str = "q", p: int | None = None):
        if kind not in ("q", "fp"):
            raise ValueError(f"unknown field kind {kind!r}")
        if kind == "fp":
            if p is None or not _is_prime(int(p)):
                raise ValueError(f"characteristic {p!r} is not prime")
            p = int(p)
        else:
            p = None
        self.kind = kind
        self.p = p
        self.zero = self(0)
        self.one = self(1)

    @classmethod
    def parse(cls, spec: str) -> Field:
        """``q`` or ``fp:<p>``."""
        spec = spec.strip().lower()
        if spec in ("q", "qq", "rationals"):
            return cls("q")
        if spec.startswith("fp:"):
            return cls("fp", int(spec[3:]))
        raise ValueError(f"bad field spec {spec!r}")

    @property
    def characteristic(self) -> int:
        return 0 if self.p is None else self.p

    def __repr__(self):
        return "Field(q)" if self.p is None else f"Field(fp:{self.p})"

    def __str__(self):
        return "q" if self.p is None else f"fp:{self.p}"

    def __eq__(self, other):
        return isinstance(other, Field) and (self.kind, self.p) == (other.kind, other.p)

    def __hash__(self):
        return hash((self.kind, self.p))

    def __call__(self, x):
        if self.p is None:
            if isinstance(x, fmpq):
                return x
            if isinstance(x, Fraction):
                return fmpq(x.numerator, x.denominator)
            if isinstance(x, str):
                return self.parse_scalar(x)
            return fmpq(x)
        if isinstance(x, nmod):
            return x
        if isinstance(x, Fraction):
            return nmod(x.numerator, self.p) / nmod(x.denominator, self.p)
        if isinstance(x, fmpq):
            return nmod(int(x.p), self.p) / nmod(int(x.q), self.p)
        if isinstance(x, str):
            return self.parse_scalar(x)
        return nmod(int(x), self.p)

    def parse_scalar(self, s: str):
        s = s.strip()
        if "/" in s:
            num, den = s.split("/")
            num, den = int(num), int(den)
            if den == 0:
                raise ValueError(f"zero denominator in {s!r}")
        else:
            num, den = int(s), 1
        if self.p is None:
            return fmpq(num, den)
        if den % self.p == 0:
            raise ValueError(f"denominator of {s!r} vanishes mod {self.p}")
        return nmod(num, self.p) / nmod(den, self.p)

    def format_scalar(self, x):
        """Integers stay integers, other rationals become ``"num/den"``."""
        if self.p is None:
            x = fmpq(x)
            if x.q == 1:
                return int(x.p)
            return f"{int(x.p)}/{int(x.q)}"
        return int(x)

    # matrix constructors
    def mat(self, m: int, n: int, entries: Sequence | None = None):
        if self.p is None:
            if entries is None:
                return fmpq_mat(m, n)
            return fmpq_mat(m, n, [self(e) for e in entries])
        if entries is None:
            return nmod_mat(m, n, self.p)
        return nmod_mat(m, n, [int(self(e)) for e in entries], self.p)

    def raw(self, m: int, n: int, flat: list):
        """Matrix from a flat row-major list of field elements (no conversion)."""
        if self.p is None:
            return fmpq_mat(m, n, flat) if m and n else fmpq_mat(m, n)
        return nmod_mat(m, n, flat, self.p) if m and n else nmod_mat(m, n, self.p)


def field_of(M) -> Field:
    if isinstance(M, nmod_mat):
        return Field("fp", M.modulus())
    return Field("q")


def zeros(F: Field, m: int, n: int):
    return F.mat(m, n)


def identity(F: Field, n: int):
    M = F.mat(n, n)
    for i in range(n):
        M[i, i] = 1
    return M


def from_rows(F: Field, rows: Sequence[Sequence], ncols: int | None = None):
    rows = list(rows)
    if ncols is None:
        if not rows:
            raise DimensionError("cannot infer column count of an empty matrix")
        ncols = len(rows[0])
    M = F.mat(len(rows), ncols)
    for i, r in enumerate(rows):
        if len(r) != ncols:
            raise DimensionError(f"row {i} has length {len(r)}, expected {ncols}")
        for j, x in enumerate(r):
            if x != 0:
                M[i, j] = F(x)
    return M


def from_sparse(F: Field, m: int, n: int, entries: dict):
    M = F.mat(m, n)
    for (i, j), x in entries.items():
        if x != 0:
            M[i, j] = x
    return M


def rows_of(M) -> list[list]:
    return M.table()


def shape(M) -> tuple[int, int]:
    return M.nrows(), M.ncols()


def is_zero(M) -> bool:
    m, n = shape(M)
    if m == 0 or n == 0:
        return True
    return M == zeros(field_of(M), m, n)


def vstack(F: Field, mats: Iterable, ncols: int):
    mats = [A for A in mats if A.nrows() > 0]
    flat = []
    total = 0
    for A in mats:
        if A.ncols() != ncols:
            raise DimensionError("column mismatch in vstack")
        flat.extend(A.entries())
        total += A.nrows()
    return F.raw(total, ncols, flat) if total and ncols else F.mat(total, ncols)


def hstack(F: Field, mats: Iterable, nrows: int):
    mats = list(mats)
    return vstack(F, [A.transpose() for A in mats], nrows).transpose()


def select_rows(F: Field, M, idx: Sequence[int]):
    n = M.ncols()
    idx = list(idx)
    if not idx or n == 0:
        return F.mat(len(idx), n)
    e = M.entries()
    if idx == list(range(idx[0], idx[0] + len(idx))):
        return F.raw(len(idx), n, e[idx[0] * n:(idx[-1] + 1) * n])
    flat = []
    for r in idx:
        flat.extend(e[r * n:(r + 1) * n])
    return F.raw(len(idx), n, flat)


def select_cols(F: Field, M, idx: Sequence[int]):
    return select_rows(F, M.transpose(), idx).transpose()


def kron(F: Field, A, B):
    """Kronecker product; index (i, k) of the result is ``i * rows(B) + k``."""
    ma, na = shape(A)
    mb, nb = shape(B)
    out = F.mat(ma * mb, na * nb)
    ta = [(i, j, x) for i, row in enumerate(A.table()) for j, x in enumerate(row) if x != 0]
    tb = [(k, l, y) for k, row in enumerate(B.table()) for l, y in enumerate(row) if y != 0]
    for i, j, x in ta:
        for k, l, y in tb:
            out[i * mb + k, j * nb + l] = x * y
    return out


def kron_id(F: Field, left: int, A, right: int):
    """``I_left (x) A (x) I_right`` built sparsely."""
    m, n = shape(A)
    out = F.mat(left * m * right, left * n * right)
    nz = [(i, j, x) for i, row in enumerate(A.table()) for j, x in enumerate(row) if x != 0]
    for a in range(left):
        for i, j, x in nz:
            base_r = (a * m + i) * right
            base_c = (a * n + j) * right
            for b in range(right):
                out[base_r + b, base_c + b] = x
    return out


# ---------------------------------------------------------------------------
# echelon forms


def rref(M):
    """Reduced row echelon form, same shape as the input."""
    if M.nrows() == 0 or M.ncols() == 0:
        return M
    R, _ = M.rref()
    return R


def _echelon(M):
    """(nonzero rref rows as a matrix, pivot columns)."""
    F = field_of(M)
    m, n = shape(M)
    if m == 0 or n == 0:
        return F.mat(0, n), []
    R, rk = M.rref()
    e = R.entries()
    pivots = []
    j = 0
    for i in range(rk):
        base = i * n
        while e[base + j] == 0:
            j += 1
        pivots.append(j)
    if rk == m:
        return R, pivots
    return F.raw(rk, n, e[:rk * n]) if rk else F.mat(0, n), pivots


def rank(M) -> int:
    if M.nrows() == 0 or M.ncols() == 0:
        return 0
    if isinstance(M, fmpq_mat):
        # the integer rank routine is much faster than the rational one
        return M.numer_denom()[0].rank()
    return M.rank()


class Subspace:
    """A subspace of k^n given by its reduced echelon basis (rows)."""

    __slots__ = ("ambient", "basis", "field", "pivots")

    def __init__(self, field: Field, ambient: int, basis, pivots: list[int]):
        self.field = field
        self.ambient = ambient
        self.basis = basis
        self.pivots = pivots

    @classmethod
    def span(cls, F: Field, ambient: int, rows) -> Subspace:
        if isinstance(rows, (list, tuple)):
            rows = from_rows(F, rows, ambient) if rows else F.mat(0, ambient)
        if rows.ncols() != ambient:
            raise DimensionError(f"vectors of length {rows.ncols()} in ambient {ambient}")
        B, piv = _echelon(rows)
        return cls(F, ambient, B, piv)

    @classmethod
    def zero(cls, F: Field, ambient: int) -> Subspace:
        return cls(F, ambient, F.mat(0, ambient), [])

    @classmethod
    def full(cls, F: Field, ambient: int) -> Subspace:
        return cls(F, ambient, identity(F, ambient), list(range(ambient)))

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def __len__(self):
        return self.dim

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.ambient == other.ambient and self.pivots == other.pivots
                and (self.dim == 0 or self.basis == other.basis))

    def __hash__(self):
        return hash((self.ambient, tuple(self.pivots)))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient})"

    def _check(self, other: Subspace):
        if self.ambient != other.ambient:
            raise DimensionError(f"ambient mismatch: {self.ambient} vs {other.ambient}")

    def rows(self) -> list[list]:
        return self.basis.table()

    def nonpivots(self) -> list[int]:
        piv = set(self.pivots)
        return [j for j in range(self.ambient) if j not in piv]

    def annihilator(self):
        """Rows spanning {y : <x, y> = 0 for all x in self} (i.e. equations of self)."""
        F = self.field
        n = self.ambient
        if self.dim == 0:
            return identity(F, n)
        return _complement_rows(F, n, self.basis, self.pivots, 1)

    def contains(self, other: Subspace) -> bool:
        self._check(other)
        if other.dim == 0:
            return True
        if other.dim > self.dim:
            return False
        return is_zero(self.reduce_rows(other.basis))

    def contains_vectors(self, M) -> bool:
        if M.nrows() == 0:
            return True
        return is_zero(self.reduce_rows(M))

    def reduce_rows(self, M):
        """Reduce each row of M modulo the subspace (normal form)."""
        if self.dim == 0:
            return M
        F = self.field
        # subtract sum over pivots: row - sum_i row[p_i] * B_i
        P = select_cols(F, M, self.pivots)
        return M - P * self.basis

    def coordinates(self, M):
        """Coordinates (rows) of the rows of M with respect to the basis; M must lie inside."""
        return select_cols(self.field, M, self.pivots)

    def __add__(self, other: Subspace) -> Subspace:
        return self.sum(other)

    def sum(self, other: Subspace) -> Subspace:
        self._check(other)
        if other.dim == 0:
            return self
        if self.dim == 0:
            return other
        return Subspace.span(self.field, self.ambient,
                             vstack(self.field, [self.basis, other.basis], self.ambient))

    def intersect(self, other: Subspace) -> Subspace:
        self._check(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.field, self.ambient)
        if self.dim == self.ambient:
            return other
        if other.dim == other.ambient:
            return self
        eqs = vstack(self.field, [self.annihilator(), other.annihilator()], self.ambient)
        return kernel(eqs)

    def __and__(self, other):
        return self.intersect(other)

    def image_under(self, M) -> Subspace:
        """Image of the subspace under the column-convention map M."""
        F = self.field
        if self.dim == 0:
            return Subspace.zero(F, M.nrows())
        return Subspace.span(F, M.nrows(), self.basis * M.transpose())

    def preimage_under(self, M) -> Subspace:
        """{x : M x in self}."""
        ann = self.annihilator()
        if ann.nrows() == 0:
            return Subspace.full(self.field, M.ncols())
        return kernel(ann * M)


def sum_all(F: Field, ambient: int, spaces: Iterable[Subspace]) -> Subspace:
    mats = [S.basis for S in spaces if S.dim]
    if not mats:
        return Subspace.zero(F, ambient)
    return Subspace.span(F, ambient, vstack(F, mats, ambient))


def intersect_all(F: Field, ambient: int, spaces: Iterable[Subspace]) -> Subspace:
    spaces = list(spaces)
    if not spaces:
        return Subspace.full(F, ambient)
    eqs = [S.annihilator() for S in spaces]
    return kernel(vstack(F, eqs, ambient))


def _complement_rows(F: Field, n: int, R, piv: list, sign: int):
    """For each free column f the row e_f - sign * sum_i R[i][f] e_{p_i} (times -1 if sign=1)."""
    pivset = set(piv)
    free = [j for j in range(n) if j not in pivset]
    if not free:
        return F.mat(0, n)
    e = R.entries()
    zero, one = F.zero, F.one
    flat = []
    for f in free:
        row = [zero] * n
        if sign == 1:
            row[f] = -one
            for i, p in enumerate(piv):
                c = e[i * n + f]
                if c != 0:
                    row[p] = c
        else:
            row[f] = one
            for i, p in enumerate(piv):
                c = e[i * n + f]
                if c != 0:
                    row[p] = -c
        flat.extend(row)
    return F.raw(len(free), n, flat)


def kernel(M) -> Subspace:
    """Null space {x : M x = 0} as a subspace of k^cols."""
    F = field_of(M)
    m, n = shape(M)
    if m == 0:
        return Subspace.full(F, n)
    R, piv = _echelon(M)
    out = _complement_rows(F, n, R, piv, -1)
    # rows e_f - sum R[i][f] e_{p_i}: already independent; put in rref
    return Subspace.span(F, n, out)


def image(M) -> Subspace:
    """Column space of M, as a row-basis subspace of k^rows."""
    F = field_of(M)
    return Subspace.span(F, M.nrows(), M.transpose())


def is_triple_distributive(X: Subspace, Y: Subspace, Z: Subspace) -> bool:
    X._check(Y)
    X._check(Z)
    return (X + Y) & Z == (X & Z) + (Y & Z)


def solve(A, B):
    """A particular X with A X = B, or None when inconsistent."""
    F = field_of(A)
    m, n = shape(A)
    k = B.ncols()
    if B.nrows() != m:
        raise DimensionError("row mismatch in solve")
    if m == 0:
        return F.mat(n, k)
    aug = hstack(F, [A, B], m)
    R, piv = _echelon(aug)
    if any(p >= n for p in piv):
        return None
    X = F.mat(n, k)
    tab = R.table()
    for i, p in enumerate(piv):
        for j in range(k):
            x = tab[i][n + j]
            if x != 0:
                X[p, j] = x
    return X


class Quotient:
    """W / K with the non-pivot coordinates of rref(K) as basis."""

    __slots__ = ("ambient", "field", "free", "lift", "proj", "sub")

    def __init__(self, sub: Subspace):
        F = sub.field
        self.field = F
        self.ambient = sub.ambient
        self.sub = sub
        self.free = sub.nonpivots()
        q = len(self.free)
        n = sub.ambient
        lift = F.mat(n, q)
        for i, f in enumerate(self.free):
            lift[f, i] = 1
        zero, one = F.zero, F.one
        # proj^T has row f: e_f - sum_r B[r][f] e_{p_r}
        flat = []
        e = sub.basis.entries() if sub.dim else []
        for f in self.free:
            row = [zero] * n
            row[f] = one
            for r, p in enumerate(sub.pivots):
                c = e[r * n + f]
                if c != 0:
                    row[p] = -c
            flat.extend(row)
        proj = F.raw(q, n, flat) if q and n else F.mat(q, n)
        self.proj = proj
        self.lift = lift

    @property
    def dim(self) -> int:
        return len(self.free)


def vec(F: Field, values: Sequence):
    """Column vector."""
    M = F.mat(len(values), 1)
    for i, x in enumerate(values):
        if x != 0:
            M[i, 0] = F(x)
    return M


def unit(F: Field, n: int, i: int):
    M = F.mat(n, 1)
    M[i, 0] = 1
    return M


def col(M, j: int) -> list:
    return [row[j] for row in M.table()]


def to_int_or_frac(x):
    if isinstance(x, fmpq):
        return Fraction(int(x.p), int(x.q))
    if isinstance(x, fmpz):
        return int(x)
    return int(x)
