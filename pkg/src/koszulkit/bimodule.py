"""Finite-dimensional algebras, bimodules, tensor products over the base and one-sided duals."""
from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass

from .linalg import (
    DimensionError,
    Field,
    Quotient,
    Subspace,
    from_rows,
    hstack,
    identity,
    image,
    kernel,
    kron,
    kron_id,
    rank,
    solve,
    unit,
    vstack,
)


class AlgebraError(ValueError):
    pass


class BaseAlgebra:
    """A finite-dimensional unital associative algebra given by structure constants.

    ``structure[i][j]`` is the coordinate vector of ``e_i * e_j``.
    """

    def __init__(self, field: Field, structure: Sequence, unit: Sequence, name: str = "R",
                 check: bool = True):
        self.field = F = field
        self.dim = r = len(unit)
        self.structure = [[[F(x) for x in structure[i][j]] for j in range(r)] for i in range(r)]
        self.unit = [F(x) for x in unit]
        self.name = name
        for i in range(r):
            if len(self.structure[i]) != r or any(len(v) != r for v in self.structure[i]):
                raise DimensionError(f"structure tensor row {i} has wrong shape")
        # Lm[i]: x -> e_i x ; Rm[j]: x -> x e_j
        self.Lm = []
        self.Rm = []
        for i in range(r):
            L = F.mat(r, r)
            Rr = F.mat(r, r)
            for j in range(r):
                for l in range(r):
                    c = self.structure[i][j][l]
                    if c != 0:
                        L[l, j] = c
                    c2 = self.structure[j][i][l]
                    if c2 != 0:
                        Rr[l, j] = c2
            self.Lm.append(L)
            self.Rm.append(Rr)
        if check:
            self.validate()

    # constructors -----------------------------------------------------------
    @classmethod
    def ground(cls, F: Field) -> BaseAlgebra:
        return cls(F, [[[1]]], [1], name="k")

    @classmethod
    def product(cls, F: Field, n: int) -> BaseAlgebra:
        """k^n with orthogonal idempotents e_0..e_{n-1}."""
        st = [[[1 if (i == j == l) else 0 for l in range(n)] for j in range(n)] for i in range(n)]
        return cls(F, st, [1] * n, name=f"k^{n}")

    @classmethod
    def matrix_algebra(cls, F: Field, n: int) -> BaseAlgebra:
        """M_n(k) with matrix units E_{ab} at index a*n+b."""
        r = n * n
        st = [[[0] * r for _ in range(r)] for _ in range(r)]
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    st[a * n + b][b * n + c][a * n + c] = 1
        unit = [1 if a == b else 0 for a in range(n) for b in range(n)]
        return cls(F, st, unit, name=f"M{n}")

    @classmethod
    def truncated_polynomial(cls, F: Field, n: int) -> BaseAlgebra:
        """k[e]/e^n with basis 1, e, ..., e^{n-1}."""
        st = [[[1 if (i + j == l) else 0 for l in range(n)] for j in range(n)] for i in range(n)]
        return cls(F, st, [1] + [0] * (n - 1), name=f"k[e]/e^{n}")

    # basic operations -------------------------------------------------------
    def basis_vector(self, i: int) -> list:
        v = [self.field.zero] * self.dim
        v[i] = self.field.one
        return v

    def mul(self, x: Sequence, y: Sequence) -> list:
        F = self.field
        out = [F.zero] * self.dim
        for i, a in enumerate(x):
            if a == 0:
                continue
            for j, b in enumerate(y):
                if b == 0:
                    continue
                ab = a * b
                for l, c in enumerate(self.structure[i][j]):
                    if c != 0:
                        out[l] += ab * c
        return out

    def left_matrix(self, x: Sequence):
        M = self.field.mat(self.dim, self.dim)
        for i, a in enumerate(x):
            if a != 0:
                M += self.Lm[i] * a
        return M

    def right_matrix(self, x: Sequence):
        M = self.field.mat(self.dim, self.dim)
        for i, a in enumerate(x):
            if a != 0:
                M += self.Rm[i] * a
        return M

    def inverse(self, x: Sequence):
        """Two-sided inverse of x or None."""
        F = self.field
        u = from_rows(F, [[c] for c in self.unit], 1)
        y = solve(self.left_matrix(x), u)
        if y is None:
            return None
        y = [row[0] for row in y.table()]
        if self.mul(y, x) != self.unit:
            return None
        return y

    def is_commutative(self) -> bool:
        return all(self.structure[i][j] == self.structure[j][i]
                   for i in range(self.dim) for j in range(self.dim))

    def opposite(self) -> BaseAlgebra:
        r = self.dim
        st = [[self.structure[j][i] for j in range(r)] for i in range(r)]
        return BaseAlgebra(self.field, st, self.unit, name=self.name + "^op", check=False)

    def validate(self):
        r = self.dim
        for i in range(r):
            for j in range(r):
                for l in range(r):
                    a = self.mul(self.mul(self.basis_vector(i), self.basis_vector(j)), self.basis_vector(l))
                    b = self.mul(self.basis_vector(i), self.mul(self.basis_vector(j), self.basis_vector(l)))
                    if a != b:
                        raise AlgebraError(f"structure not associative at basis triple ({i},{j},{l})")
        for i in range(r):
            e = self.basis_vector(i)
            if self.mul(self.unit, e) != e or self.mul(e, self.unit) != e:
                raise AlgebraError(f"unit is not a two-sided unit on basis element {i}")

    def __eq__(self, other):
        return (isinstance(other, BaseAlgebra) and self.field == other.field
                and self.structure == other.structure and self.unit == other.unit)

    def __hash__(self):
        return hash((self.field, self.dim))

    def __repr__(self):
        return f"BaseAlgebra({self.name}, dim={self.dim}, {self.field})"


class Bimodule:
    """A finite-dimensional R-S-bimodule with explicit action matrices.

    ``left[i]`` is the matrix of v -> e_i v and ``right[j]`` of v -> v e_j.
    """

    def __init__(self, left_alg: BaseAlgebra, right_alg: BaseAlgebra, dim: int,
                 left: Sequence, right: Sequence, name: str = "", check: bool = False):
        self.R = left_alg
        self.S = right_alg
        self.field = left_alg.field
        self.dim = dim
        self.left = list(left)
        self.right = list(right)
        self.name = name
        if len(self.left) != left_alg.dim or len(self.right) != right_alg.dim:
            raise DimensionError("action tensor does not match algebra dimension")
        for M in self.left + self.right:
            if M.nrows() != dim or M.ncols() != dim:
                raise DimensionError(f"action matrix of shape {M.nrows()}x{M.ncols()} on dim {dim}")
        if check:
            self.validate()

    @classmethod
    def regular(cls, R: BaseAlgebra) -> Bimodule:
        return cls(R, R, R.dim, R.Lm, R.Rm, name=R.name)

    @classmethod
    def zero(cls, R: BaseAlgebra, S: BaseAlgebra | None = None) -> Bimodule:
        S = S or R
        F = R.field
        return cls(R, S, 0, [F.mat(0, 0)] * R.dim, [F.mat(0, 0)] * S.dim)

    @classmethod
    def free_left(cls, R: BaseAlgebra, n: int) -> Bimodule:
        """R^n as an R-R-bimodule (n copies of the regular bimodule)."""
        return direct_sum([cls.regular(R)] * n) if n else cls.zero(R)

    @classmethod
    def over_ground(cls, F: Field, dim: int, name: str = "") -> Bimodule:
        k = BaseAlgebra.ground(F)
        I = identity(F, dim)
        return cls(k, k, dim, [I], [I], name=name)

    def left_action(self, x: Sequence):
        M = self.field.mat(self.dim, self.dim)
        for i, a in enumerate(x):
            if a != 0:
                M += self.left[i] * a
        return M

    def right_action(self, x: Sequence):
        M = self.field.mat(self.dim, self.dim)
        for i, a in enumerate(x):
            if a != 0:
                M += self.right[i] * a
        return M

    def validate(self):
        R, S = self.R, self.S
        I = identity(self.field, self.dim)
        if self.left_action(R.unit) != I:
            raise AlgebraError("left unit does not act as identity")
        if self.right_action(S.unit) != I:
            raise AlgebraError("right unit does not act as identity")
        for i in range(R.dim):
            for j in range(R.dim):
                if self.left[i] * self.left[j] != self.left_action(R.mul(R.basis_vector(i), R.basis_vector(j))):
                    raise AlgebraError(f"left action not associative at ({i},{j})")
        for i in range(S.dim):
            for j in range(S.dim):
                if self.right[j] * self.right[i] != self.right_action(S.mul(S.basis_vector(i), S.basis_vector(j))):
                    raise AlgebraError(f"right action not associative at ({i},{j})")
        for i in range(R.dim):
            for j in range(S.dim):
                if self.left[i] * self.right[j] != self.right[j] * self.left[i]:
                    raise AlgebraError(f"left and right actions do not commute at ({i},{j})")

    def is_submodule(self, sub: Subspace) -> bool:
        return all(sub.contains_vectors(sub.basis * M.transpose()) for M in self.left + self.right)

    def submodule_closure(self, sub: Subspace) -> Subspace:
        """Smallest subbimodule containing sub."""
        cur = sub
        while True:
            mats = [cur.basis] + [cur.basis * M.transpose() for M in self.left + self.right]
            nxt = Subspace.span(self.field, self.dim, vstack(self.field, mats, self.dim))
            if nxt.dim == cur.dim:
                return cur
            cur = nxt

    def submodule(self, sub: Subspace) -> Bimodule:
        """The bimodule structure on an invariant subspace (basis = rref rows)."""
        B = sub.basis
        left = [sub.coordinates(B * M.transpose()).transpose() for M in self.left]
        right = [sub.coordinates(B * M.transpose()).transpose() for M in self.right]
        return Bimodule(self.R, self.S, sub.dim, left, right)

    def quotient(self, sub: Subspace) -> tuple[Bimodule, Quotient]:
        q = Quotient(sub)
        left = [q.proj * M * q.lift for M in self.left]
        right = [q.proj * M * q.lift for M in self.right]
        return Bimodule(self.R, self.S, q.dim, left, right), q

    def __repr__(self):
        return f"Bimodule({self.name or '?'}, dim={self.dim}, {self.R.name}-{self.S.name})"


def direct_sum(mods: Sequence[Bimodule]) -> Bimodule:
    R, S = mods[0].R, mods[0].S
    F = R.field
    n = sum(M.dim for M in mods)

    def blockdiag(mats):
        out = F.mat(n, n)
        o = 0
        for A in mats:
            d = A.nrows()
            for i, row in enumerate(A.table()):
                for j, x in enumerate(row):
                    if x != 0:
                        out[o + i, o + j] = x
            o += d
        return out

    left = [blockdiag([M.left[i] for M in mods]) for i in range(R.dim)]
    right = [blockdiag([M.right[j] for M in mods]) for j in range(S.dim)]
    return Bimodule(R, S, n, left, right)


@dataclass
class BimoduleMap:
    source: Bimodule
    target: Bimodule
    matrix: object
    is_isomorphism: bool | None = None

    def check(self) -> bool:
        f = self.matrix
        return (all(f * a == b * f for a, b in zip(self.source.left, self.target.left))
                and all(f * a == b * f for a, b in zip(self.source.right, self.target.right)))

    @property
    def rank(self) -> int:
        return rank(self.matrix)


# ---------------------------------------------------------------------------
# tensor products over the base


@dataclass
class TensorProduct:
    """Iterated tensor product over the intermediate algebras.

    ``factors`` multiply out to the k-tensor product with ``dims``; ``quotient``
    is the projection onto the balanced tensor product.
    """
    factors: list
    module: Bimodule
    quotient: Quotient
    trivial: bool = False

    @property
    def proj(self):
        return self.quotient.proj

    @property
    def lift(self):
        return self.quotient.lift

    @property
    def dim(self) -> int:
        return self.module.dim

    @property
    def ambient(self) -> int:
        return self.quotient.ambient


def balancing_kernel(mods: Sequence[Bimodule]) -> Subspace:
    """span{ ... u s (x) v ... - ... u (x) s v ... } in the k-tensor product."""
    F = mods[0].field
    dims = [M.dim for M in mods]
    total = 1
    for d in dims:
        total *= d
    gens = []
    for t in range(len(mods) - 1):
        S = mods[t].S
        if S.dim == 1:
            continue  # the ground field balances for free
        left = 1
        for d in dims[:t]:
            left *= d
        right = 1
        for d in dims[t + 2:]:
            right *= d
        for s in range(S.dim):
            A = kron(F, mods[t].right[s], identity(F, dims[t + 1]))
            B = kron(F, identity(F, dims[t]), mods[t + 1].left[s])
            gens.append(kron_id(F, left, A - B, right))
    if not gens or total == 0:
        return Subspace.zero(F, total)
    return image(hstack(F, gens, total))


class ComposedQuotient:
    """A quotient map given by explicit ``proj`` and ``lift``; the kernel is computed on demand."""

    def __init__(self, proj, lift):
        self.proj = proj
        self.lift = lift
        self._sub = None

    @property
    def dim(self) -> int:
        return self.proj.nrows()

    @property
    def ambient(self) -> int:
        return self.proj.ncols()

    @property
    def sub(self) -> Subspace:
        if self._sub is None:
            self._sub = kernel(self.proj)
        return self._sub


def tensor_many(mods: Sequence[Bimodule]) -> TensorProduct:
    """Balanced tensor product; three or more factors over a nontrivial base are taken one at a time."""
    mods = list(mods)
    for a, b in itertools.pairwise(mods):
        if a.S != b.R:
            raise AlgebraError("middle algebras do not match")
    F = mods[0].field
    if len(mods) >= 3 and any(M.S.dim > 1 for M in mods[:-1]):
        head = tensor_many(mods[:-1])
        step = tensor_many([head.module, mods[-1]])
        last = identity(F, mods[-1].dim)
        proj = step.proj * kron(F, head.proj, last)
        lift = kron(F, head.lift, last) * step.lift
        return TensorProduct(mods, step.module, ComposedQuotient(proj, lift), False)
    dims = [M.dim for M in mods]
    total = 1
    for d in dims:
        total *= d
    K = balancing_kernel(mods)
    q = Quotient(K)
    trivial = K.dim == 0
    right_pad = total // dims[0] if dims[0] else 0
    left_pad = total // dims[-1] if dims[-1] else 0
    if trivial:
        left = [kron_id(F, 1, M, right_pad) for M in mods[0].left]
        right = [kron_id(F, left_pad, M, 1) for M in mods[-1].right]
    else:
        left = [q.proj * kron_id(F, 1, M, right_pad) * q.lift for M in mods[0].left]
        right = [q.proj * kron_id(F, left_pad, M, 1) * q.lift for M in mods[-1].right]
    if total == 0:
        left = [F.mat(0, 0)] * mods[0].R.dim
        right = [F.mat(0, 0)] * mods[-1].S.dim
    module = Bimodule(mods[0].R, mods[-1].S, q.dim, left, right)
    return TensorProduct(mods, module, q, trivial)


def tensor_over_R(U: Bimodule, V: Bimodule) -> TensorProduct:
    """U (x)_S V for an R-S-bimodule U and an S-T-bimodule V."""
    return tensor_many([U, V])


def tensor_maps(F: Field, tp_src: TensorProduct, tp_dst: TensorProduct, maps: Sequence):
    """Matrix of f_1 (x) ... (x) f_n between balanced tensor products."""
    M = maps[0]
    for f in maps[1:]:
        M = kron(F, M, f)
    return tp_dst.proj * M * tp_src.lift


# ---------------------------------------------------------------------------
# duals


class DualModule(Bimodule):
    """Hom_R(U, R) (side='left') or Hom_{R^op}(U, R) (side='right').

    ``maps[k]`` is the ``dim R x dim U`` matrix of the k-th basis functional.
    """

    def __init__(self, source: Bimodule, side: str, space: Subspace, maps: list,
                 left, right, R, S):
        super().__init__(R, S, space.dim, left, right)
        self.source = source
        self.side = side
        self.space = space
        self.maps = maps

    def evaluate(self, u, f):
        """<u, f> = f(u) as an R-vector; u, f are coordinate lists."""
        F = self.field
        out = [F.zero] * self.source.R.dim if self.side == "left" else [F.zero] * self.source.S.dim
        for k, c in enumerate(f):
            if c == 0:
                continue
            col = self.maps[k]
            for a, x in enumerate(u):
                if x == 0:
                    continue
                for l in range(len(out)):
                    y = col[l, a]
                    if y != 0:
                        out[l] += c * x * y
        return out

    def functional_matrix(self, f):
        """dim R x dim U matrix of the functional with coordinates f."""
        F = self.field
        r = self.source.R.dim if self.side == "left" else self.source.S.dim
        M = F.mat(r, self.source.dim)
        for k, c in enumerate(f):
            if c != 0:
                M += self.maps[k] * c
        return M

    def coordinates_of(self, M) -> list:
        """Coordinates of a functional given as a matrix (must be in the dual)."""
        F = self.field
        r, d = M.nrows(), M.ncols()
        row = F.mat(1, r * d)
        for i in range(r):
            for j in range(d):
                x = M[i, j]
                if x != 0:
                    row[0, i * d + j] = x
        if not self.space.contains_vectors(row):
            raise AlgebraError("functional does not have the required linearity")
        return self.space.coordinates(row).table()[0]


def _vec_left(F: Field, A, n: int):
    """Matrix of X -> A X on row-major vec(X) for X with n columns."""
    return kron(F, A, identity(F, n))


def _vec_right(F: Field, B, m: int):
    """Matrix of X -> X B on row-major vec(X) for X with m rows."""
    return kron(F, identity(F, m), B.transpose())


def _dual(U: Bimodule, side: str) -> DualModule:
    F = U.field
    if side == "left":
        base = U.R
        acts = U.left
        mult = base.Lm
    else:
        base = U.S
        acts = U.right
        mult = base.Rm
    r, d = base.dim, U.dim
    n = r * d
    if d == 0:
        space = Subspace.zero(F, 0)
    else:
        eqs = [_vec_right(F, acts[i], r) - _vec_left(F, mult[i], d) for i in range(r)]
        space = kernel(vstack(F, eqs, n)) if r > 1 else Subspace.full(F, n)

    def act(op):
        # op acts on vec(F); return matrix in the dual basis (column convention)
        if space.dim == 0:
            return F.mat(0, 0)
        img = space.basis * op.transpose()
        return space.coordinates(img).transpose()

    if side == "left":
        # Hom_R(U,R) is an S-R-bimodule: (s f)(u) = f(u s), (f r)(u) = f(u) r
        left = [act(_vec_right(F, U.right[s], r)) for s in range(U.S.dim)]
        right = [act(_vec_left(F, base.Rm[j], d)) for j in range(r)]
    else:
        # Hom_{R^op}(M,R) is an R-S-bimodule: (r f)(m) = r f(m), (f s)(m) = f(s m)
        left = [act(_vec_left(F, base.Lm[j], d)) for j in range(r)]
        right = [act(_vec_right(F, U.left[s], r)) for s in range(U.R.dim)]
    maps = []
    for row in space.basis.table() if space.dim else []:
        M = F.mat(r, d)
        for idx, x in enumerate(row):
            if x != 0:
                M[idx // d, idx % d] = x
        maps.append(M)
    return DualModule(U, side, space, maps, left, right, U.S, U.R)


def left_dual(U: Bimodule) -> DualModule:
    """Hom_R(U, R) for an R-S-bimodule U; an S-R-bimodule."""
    return _dual(U, "left")


def right_dual(M: Bimodule) -> DualModule:
    """Hom_{R^op}(M, R) for an S-R-bimodule M; an R-S-bimodule."""
    return _dual(M, "right")


def eval_pairing(dual: DualModule, u: Sequence, f: Sequence) -> list:
    if len(u) != dual.source.dim or len(f) != dual.dim:
        raise DimensionError("pairing arguments have wrong lengths")
    return dual.evaluate(u, f)


def tensor_dual_iso(U: Bimodule, V: Bimodule) -> BimoduleMap:
    """Hom_S(V,S) (x)_S Hom_R(U,R) -> Hom_R(U (x)_S V, R), g (x) f -> (u (x) v -> f(u g(v)))."""
    F = U.field
    DU, DV = left_dual(U), left_dual(V)
    src = tensor_over_R(DV, DU)
    UV = tensor_over_R(U, V)
    tgt = left_dual(UV.module)
    r = U.R.dim
    s_dim = U.S.dim
    rows = []
    for g in range(DV.dim):
        G = DV.maps[g]  # s x dimV
        for f in range(DU.dim):
            Fm = DU.maps[f]  # r x dimU
            # functional on U (x)_k V: (a, b) -> sum_l G[l, b] * Fm (rho_U(e_l) u_a)
            M = F.mat(r, U.dim * V.dim)
            for l in range(s_dim):
                FR = Fm * U.right[l]
                for b in range(V.dim):
                    c = G[l, b]
                    if c == 0:
                        continue
                    for a in range(U.dim):
                        for i in range(r):
                            y = FR[i, a]
                            if y != 0:
                                M[i, a * V.dim + b] += c * y
            Mq = M * UV.lift
            rows.append(tgt.coordinates_of(Mq))
    if rows:
        mat = from_rows(F, rows, tgt.dim).transpose() * src.lift
    else:
        mat = F.mat(tgt.dim, src.dim)
    iso = (mat.nrows() == mat.ncols() and rank(mat) == mat.nrows() and is_projective_left(V))
    return BimoduleMap(src.module, tgt, mat, iso)


def double_dual_eval(U: Bimodule) -> BimoduleMap:
    """U -> Hom_{R^op}(Hom_R(U,R), R), u -> (f -> f(u))."""
    F = U.field
    D = left_dual(U)
    DD = right_dual(D)
    r = U.R.dim
    cols = []
    for a in range(U.dim):
        M = F.mat(r, D.dim)
        for k in range(D.dim):
            for i in range(r):
                y = D.maps[k][i, a]
                if y != 0:
                    M[i, k] = y
        cols.append(DD.coordinates_of(M))
    if cols:
        mat = from_rows(F, cols, DD.dim).transpose()
    else:
        mat = F.mat(DD.dim, 0)
    iso = mat.nrows() == mat.ncols() and rank(mat) == mat.nrows()
    return BimoduleMap(U, DD, mat, iso)


def left_generators(U: Bimodule) -> list:
    """Basis indices whose R-span generates U as a left module, chosen greedily."""
    F = U.field
    gens = []
    S = Subspace.zero(F, U.dim)
    for a in range(U.dim):
        if S.dim == U.dim:
            break
        e = unit(F, U.dim, a)
        if S.contains_vectors(e.transpose()):
            continue
        gens.append(a)
        imgs = vstack(F, [(L * e).transpose() for L in U.left], U.dim)
        S = S + Subspace.span(F, U.dim, imgs)
    return gens


def is_projective_left(U: Bimodule) -> bool:
    """Whether pi: R (x)_k W -> U splits as a map of left R-modules (W spans generators of U).

    A left-linear section is fixed by its values S_j on the generators u_j; it exists iff
    pi S_j = u_j and sum_{l,j} k_{lj} e_l S_j = 0 for every k in ker pi.
    """
    R = U.R
    if R.dim == 1 or U.dim == 0:
        return True
    F = U.field
    r, d = R.dim, U.dim
    gens = left_generators(U)
    g = len(gens)
    n = r * g
    pi = F.mat(d, n)
    for l in range(r):
        for j, a in enumerate(gens):
            for i in range(d):
                y = U.left[l][i, a]
                if y != 0:
                    pi[i, l * g + j] = y
    lam = [kron(F, R.Lm[l], identity(F, g)) for l in range(r)]
    K = kernel(pi)
    rows = []
    for k in K.rows():
        blocks = []
        for j in range(g):
            B = F.mat(n, n)
            for l in range(r):
                c = k[l * g + j]
                if c != 0:
                    B += lam[l] * c
            blocks.append(B)
        rows.append(hstack(F, blocks, n))
    rows.append(kron(F, identity(F, g), pi))
    A = vstack(F, rows, g * n)
    b = F.mat(A.nrows(), 1)
    off = A.nrows() - g * d
    for j, a in enumerate(gens):
        b[off + j * d + a, 0] = 1
    return solve(A, b) is not None
