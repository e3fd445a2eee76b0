"""Bigraded cochain complexes with exact homology."""
from __future__ import annotations

from dataclasses import dataclass, field

from .linalg import Field, Quotient, Subspace, image, is_zero, kernel, rank


class ComplexError(ValueError):
    """The differential does not square to zero or shapes disagree."""


class WindowError(ValueError):
    """A homology group or axiom instance lies outside the computed window."""


class CochainComplex:
    """Components C(p, s) with differentials C(p, s) -> C(p + 1, s).

    ``p`` is the cohomological degree and ``s`` an internal (or filtration)
    index preserved by the differential. Positions listed in ``truncated``
    have a neighbour outside the window and carry no homology verdict.
    """

    def __init__(self, field: Field, name: str = ""):
        self.field = field
        self.name = name
        self.dims: dict = {}
        self.d: dict = {}
        self.modules: dict = {}
        self.truncated: set = set()

    def add(self, p: int, s: int, dim: int, module=None):
        self.dims[(p, s)] = dim
        if module is not None:
            self.modules[(p, s)] = module

    def set_differential(self, p: int, s: int, M):
        src = self.dims.get((p, s))
        dst = self.dims.get((p + 1, s))
        if src is None or dst is None:
            raise ComplexError(f"differential at ({p},{s}) between undeclared components")
        if M.nrows() != dst or M.ncols() != src:
            raise ComplexError(f"differential at ({p},{s}) has shape {M.nrows()}x{M.ncols()}, "
                               f"expected {dst}x{src}")
        self.d[(p, s)] = M

    def differential(self, p: int, s: int):
        M = self.d.get((p, s))
        if M is not None:
            return M
        return self.field.mat(self.dims.get((p + 1, s), 0), self.dims.get((p, s), 0))

    def internal_degrees(self) -> list:
        return sorted({s for _, s in self.dims})

    def positions(self, s: int) -> list:
        return sorted(p for p, t in self.dims if t == s)

    def square_zero_failures(self) -> list:
        bad = []
        for (p, s) in sorted(self.d):
            if (p + 1, s) in self.d and not is_zero(self.d[(p + 1, s)] * self.d[(p, s)]):
                bad.append((p, s))
        return bad

    def check_square_zero(self):
        bad = self.square_zero_failures()
        if bad:
            raise ComplexError(f"d^2 != 0 at {bad[0]}")
        return True

    def homology_dim(self, p: int, s: int) -> int:
        if (p, s) in self.truncated:
            raise WindowError(f"position ({p},{s}) is at the edge of the window")
        n = self.dims.get((p, s), 0)
        if n == 0:
            return 0
        out_rank = rank(self.differential(p, s)) if (p + 1, s) in self.dims else 0
        in_rank = rank(self.differential(p - 1, s)) if (p - 1, s) in self.dims else 0
        return n - out_rank - in_rank

    def homology_basis(self, p: int, s: int):
        """Representatives (rows) of a basis of H^p in internal degree s."""
        if (p, s) in self.truncated:
            raise WindowError(f"position ({p},{s}) is at the edge of the window")
        F = self.field
        n = self.dims.get((p, s), 0)
        Z = kernel(self.differential(p, s)) if (p + 1, s) in self.dims else Subspace.full(F, n)
        B = image(self.differential(p - 1, s)) if (p - 1, s) in self.dims else Subspace.zero(F, n)
        if Z.dim == 0:
            return F.mat(0, n)
        Bz = Subspace.span(F, Z.dim, Z.coordinates(B.basis)) if B.dim else Subspace.zero(F, Z.dim)
        q = Quotient(Bz)
        return q.lift.transpose() * Z.basis

    def homology_table(self) -> dict:
        """{(p, s): dim H} over all non-truncated positions."""
        out = {}
        for key in sorted(self.dims, key=lambda t: (t[1], t[0])):
            if key not in self.truncated:
                out[key] = self.homology_dim(*key)
        return out

    def nonzero_homology(self, ignore=()) -> dict:
        return {k: v for k, v in self.homology_table().items() if v and k not in set(ignore)}

    def is_exact(self, s: int | None = None, ignore=()) -> bool:
        table = self.homology_table()
        skip = set(ignore)
        return all(v == 0 for k, v in table.items() if (s is None or k[1] == s) and k not in skip)


@dataclass
class ExactnessReport:
    exact: bool
    nonzero: dict = field(default_factory=dict)
    square_zero: bool = True
    window: dict = field(default_factory=dict)

    def __bool__(self):
        return self.exact
