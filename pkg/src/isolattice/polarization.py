"""Polarization calculus at the lattice level.

A polarization is described by its type vector (d_1 | ... | d_g) together
with the integral antisymmetric Gram matrix of the induced pairing in the
chosen basis.  The lattice of the polarization isogeny is the inverse of
the Gram matrix; duals transpose, pullbacks conjugate by the isogeny
matrix, and pushforwards divide out the minimal multiple whose kernel
absorbs the isogeny kernel.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import (
    DimensionMismatchError,
    InvalidTypeVectorError,
    NoPushforwardError,
    NotAPolarizationLatticeError,
    UnsupportedPolarizationTypeError,
)
from .lattices import LatticeMatrix, contains, kernel_structure
from .linalg import Matrix, ResidueInt, rat_inverse, snf


def gram_from_type(type_vector: Sequence[int]) -> Matrix:
    """Standard-basis Gram matrix [[0, D], [-D, 0]] for a type vector."""
    tv = _validated_type(type_vector)
    g = len(tv)
    n = 2 * g
    rows = [[0] * n for _ in range(n)]
    for i, d in enumerate(tv):
        rows[i][g + i] = d
        rows[g + i][i] = -d
    return Matrix(rows)


def _validated_type(type_vector: Sequence[int]) -> tuple:
    tv = tuple(int(d) for d in type_vector)
    if not tv or any(d < 1 for d in tv):
        raise InvalidTypeVectorError("type entries must be positive integers")
    for a, b in zip(tv, tv[1:]):
        if b % a != 0:
            raise InvalidTypeVectorError(
                f"divisibility chain violated: {a} does not divide {b}")
    return tv


@dataclass(frozen=True)
class PolarizationDesc:
    """Type vector plus the Gram matrix of the pairing in the working basis.

    ``from_type`` uses the standard basis ordering (first the d_i-rows, then
    their pairing partners); ``principal_product`` interleaves a symplectic
    plane per factor, which is the natural basis for a product of elliptic
    curves.
    """

    g: int
    type_vector: tuple
    gram: Matrix

    def __post_init__(self):
        tv = _validated_type(self.type_vector)
        object.__setattr__(self, "type_vector", tv)
        if len(tv) != self.g:
            raise InvalidTypeVectorError("type length must equal g")
        if self.gram.nrows != 2 * self.g or self.gram.ncols != 2 * self.g:
            raise DimensionMismatchError("Gram matrix must be 2g x 2g")
        if not self.gram.is_integral:
            raise ValueError("Gram matrix must be integral")
        if self.gram + self.gram.transpose() != Matrix(
                [[0] * 2 * self.g for _ in range(2 * self.g)]):
            raise ValueError("Gram matrix must be antisymmetric")
        expected = Fraction(1)
        for d in tv:
            expected *= d * d
        if abs(self.gram.det()) != expected:
            raise ValueError("Gram determinant does not match the type")

    @classmethod
    def from_type(cls, type_vector: Sequence[int]) -> "PolarizationDesc":
        tv = _validated_type(type_vector)
        return cls(len(tv), tv, gram_from_type(tv))

    @classmethod
    def principal(cls, g: int) -> "PolarizationDesc":
        return cls.from_type((1,) * g)

    @classmethod
    def principal_product(cls, g: int) -> "PolarizationDesc":
        """Principal polarization of a g-fold product, one interleaved
        symplectic plane (0 1 / -1 0) per factor."""
        n = 2 * g
        rows = [[0] * n for _ in range(n)]
        for i in range(g):
            rows[2 * i][2 * i + 1] = 1
            rows[2 * i + 1][2 * i] = -1
        return cls(g, (1,) * g, Matrix(rows))

    @classmethod
    def from_gram(cls, gram: Matrix) -> "PolarizationDesc":
        """Recover the type from an arbitrary integral antisymmetric Gram."""
        tv = _paired_invariants(gram)
        return cls(len(tv), tv, gram)

    @property
    def is_principal(self) -> bool:
        return all(d == 1 for d in self.type_vector)


def _paired_invariants(form: Matrix) -> tuple:
    """Invariant factors of an antisymmetric integral form, paired off.

    Raises ``NotAPolarizationLatticeError`` unless the matrix is square of
    even size, antisymmetric, nonsingular, and its Smith invariants come in
    equal pairs (d_1, d_1, d_2, d_2, ...).
    """
    if not form.is_square or form.nrows % 2 != 0:
        raise NotAPolarizationLatticeError("form must be square of even size")
    if not form.is_integral:
        raise NotAPolarizationLatticeError("form must be integral")
    n = form.nrows
    if form + form.transpose() != Matrix([[0] * n for _ in range(n)]):
        raise NotAPolarizationLatticeError("form must be antisymmetric")
    if form.det() == 0:
        raise NotAPolarizationLatticeError("form must be nonsingular")
    d, _, _ = snf(form)
    diag = [int(d[i, i]) for i in range(n)]
    pairs = []
    for i in range(0, n, 2):
        if diag[i] != diag[i + 1]:
            raise NotAPolarizationLatticeError(
                f"invariants do not pair: {tuple(diag)}")
        pairs.append(diag[i])
    return tuple(pairs)


def lattice_of_polarization(pol: PolarizationDesc) -> LatticeMatrix:
    """Lattice of the polarization isogeny: the inverse Gram matrix."""
    return LatticeMatrix(rat_inverse(pol.gram))


def dual_isogeny(lattice: LatticeMatrix) -> LatticeMatrix:
    """Lattice matrix of the dual isogeny: the transpose."""
    return LatticeMatrix(lattice.matrix.transpose())


def pullback(isogeny: LatticeMatrix, pol: PolarizationDesc) -> LatticeMatrix:
    """Lattice of the pulled-back polarization: M_f * Gram^-1 * M_f^T."""
    if isogeny.n != 2 * pol.g:
        raise DimensionMismatchError(
            f"isogeny dimension {isogeny.n} does not match 2g = {2 * pol.g}")
    inner = lattice_of_polarization(pol).matrix
    return LatticeMatrix(isogeny.matrix * inner * isogeny.matrix.transpose())


@dataclass(frozen=True)
class PushforwardResult:
    d: int
    lattice: LatticeMatrix


def pushforward(isogeny: LatticeMatrix, pol: PolarizationDesc) -> PushforwardResult:
    """Push a polarization forward along an isogeny over the base.

    ``d`` is the least positive integer whose multiple of the polarization
    kills the isogeny kernel; the resulting lattice is
    M^-1 * (1/d) Gram^-1 * (M^T)^-1.  Existence holds when the kernel is
    cyclic; otherwise, for a principal polarization, exactly when the kernel
    is isotropic for the induced pairing mod d.  Non-principal with
    non-cyclic kernel raises ``NoPushforwardError("undecided")``.
    """
    if isogeny.n != 2 * pol.g:
        raise DimensionMismatchError(
            f"isogeny dimension {isogeny.n} does not match 2g = {2 * pol.g}")
    kernel = kernel_structure(isogeny)  # raises NotOverBaseError if needed
    d = (pol.gram * isogeny.matrix).denominator
    if not kernel.is_cyclic:
        if not pol.is_principal:
            raise NoPushforwardError("undecided")
        if not is_isotropic(kernel.generators, d, pol):
            raise NoPushforwardError("not-isotropic")
    inv = isogeny.inverse_matrix
    middle = lattice_of_polarization(pol).matrix.scale(Fraction(1, d))
    return PushforwardResult(d, LatticeMatrix(inv * middle * inv.transpose()))


def weil_pairing(u: Sequence[int], v: Sequence[int],
                 pol: PolarizationDesc, modulus: int) -> ResidueInt:
    """Pairing value u^T * Gram * v mod ``modulus`` (additive convention)."""
    n = 2 * pol.g
    if len(u) != n or len(v) != n:
        raise DimensionMismatchError(f"vectors must have length {n}")
    total = 0
    for i in range(n):
        if u[i] == 0:
            continue
        row = pol.gram.row(i)
        total += u[i] * sum(int(row[j]) * v[j] for j in range(n))
    return ResidueInt(total, modulus)


def is_isotropic(generators: Sequence[Sequence[int]], modulus: int,
                 pol: PolarizationDesc) -> bool:
    """Whether the subgroup the generators span pairs to zero with itself.

    Checking generator pairs suffices because the pairing is bilinear and
    the Gram matrix has zero diagonal.  Only principal polarizations are
    supported for kernels needing two or more generators.
    """
    gens = list(generators)
    if len(gens) <= 1:
        return True
    if not pol.is_principal:
        raise UnsupportedPolarizationTypeError(
            "isotropy testing for non-cyclic kernels needs a principal form")
    for i, x in enumerate(gens):
        for y in gens[i + 1:]:
            if int(weil_pairing(x, y, pol, modulus)) != 0:
                return False
    return True


def polarization_type(lattice: LatticeMatrix) -> tuple:
    """Type vector of a polarization lattice over a principally framed base.

    The inverse of the lattice matrix must be an integral antisymmetric
    form; its paired Smith invariants give the type.
    """
    inv = lattice.inverse_matrix
    if not inv.is_integral:
        raise NotAPolarizationLatticeError("inverse basis matrix is not integral")
    return _paired_invariants(inv)
