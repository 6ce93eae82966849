"""Transport of Galois-type matrix actions across lattices.

An element acts through an n x n matrix known modulo a prime power.  Moving
the action to another lattice conjugates by the change-of-basis matrix; the
computation lifts to exact rationals, so a failure of stability (a prime
left in a denominator) is detected exactly rather than papered over by
modular division.

Matrix families describe parametrized subgroups (constant entries, free
entries, entries that must be multiples of the prime, and named parameters
shared between entries, with optional polynomial side conditions).  They
support deterministic seeded sampling and exhaustive enumeration, which is
how image-shape containments are verified.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from typing import Iterator, Optional, Sequence

from .errors import (
    DimensionMismatchError,
    InsufficientPrecisionError,
    NotStableError,
    UnsatisfiableFamilyError,
)
from .lattices import LatticeMatrix
from .linalg import Matrix, ResidueInt

#: Largest parameter space that exhaustive enumeration will attempt.
EXHAUSTIVE_LIMIT = 10**7

_SAMPLE_RETRY_LIMIT = 1000


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def _det_int(rows: Sequence[Sequence[int]]) -> int:
    """Fraction-free (Bareiss) determinant of an integer matrix."""
    n = len(rows)
    a = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _mat_mul_int(a, b):
    n, mid, m = len(a), len(b), len(b[0])
    bt = list(zip(*b))
    return [[sum(a[i][t] * bt[j][t] for t in range(mid)) for j in range(m)]
            for i in range(n)]


@dataclass(frozen=True)
class GaloisElement:
    """An invertible matrix over Z/(prime**precision)Z."""

    n: int
    prime: int
    precision: int
    entries: tuple

    def __init__(self, n: int, prime: int, precision: int,
                 entries: Sequence[Sequence[int]]):
        if not _is_prime(prime):
            raise ValueError(f"{prime} is not prime")
        if precision < 1:
            raise ValueError("precision exponent must be at least 1")
        q = prime ** precision
        rows = tuple(tuple(int(e) % q for e in row) for row in entries)
        if len(rows) != n or any(len(r) != n for r in rows):
            raise DimensionMismatchError(f"entries must form an {n}x{n} matrix")
        if _det_int(rows) % prime == 0:
            raise ValueError("matrix is not invertible modulo the prime")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "prime", prime)
        object.__setattr__(self, "precision", precision)
        object.__setattr__(self, "entries", rows)

    @classmethod
    def identity(cls, n: int, prime: int, precision: int) -> "GaloisElement":
        return cls(n, prime, precision,
                   [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def modulus(self) -> int:
        return self.prime ** self.precision

    def reduce(self, precision: int) -> "GaloisElement":
        if precision > self.precision:
            raise InsufficientPrecisionError(
                f"cannot raise precision from {self.precision} to {precision}")
        if precision == self.precision:
            return self
        return GaloisElement(self.n, self.prime, precision, self.entries)

    def __mul__(self, other: "GaloisElement") -> "GaloisElement":
        if (self.n, self.prime, self.precision) != (
                other.n, other.prime, other.precision):
            raise DimensionMismatchError("elements live in different groups")
        return GaloisElement(self.n, self.prime, self.precision,
                             _mat_mul_int(self.entries, other.entries))


def _valuation(value: int, prime: int) -> int:
    v = 0
    while value % prime == 0:
        value //= prime
        v += 1
    return v


def required_precision(lattice: LatticeMatrix, out_precision: int,
                       prime: int) -> int:
    """Input precision exponent sufficient for ``conjugate`` to be exact.

    The output is determined modulo prime**out_precision once the input is
    known modulo prime**(out + v(denominator of M) + v(denominator of M^-1)).
    """
    if out_precision < 1:
        raise ValueError("output precision must be at least 1")
    return (out_precision
            + _valuation(lattice.denominator_bound, prime)
            + _valuation(lattice.inverse_matrix.denominator, prime))


@lru_cache(maxsize=128)
def _conjugation_tables(lattice: LatticeMatrix):
    c_fwd = lattice.denominator_bound
    c_inv = lattice.inverse_matrix.denominator
    fwd = lattice.matrix.scale(c_fwd).int_rows()
    inv = lattice.inverse_matrix.scale(c_inv).int_rows()
    return inv, fwd, c_fwd * c_inv


def conjugate(sigma: GaloisElement, lattice: LatticeMatrix,
              out_precision: int) -> GaloisElement:
    """Matrix of ``sigma`` in the basis of ``lattice``, mod prime**out_precision.

    Lifts the entries to integers, forms M^-1 * sigma * M over the exact
    rationals, verifies that no entry keeps the prime in its denominator,
    and reduces.  Raises ``NotStableError`` when the lattice is not
    preserved and ``InsufficientPrecisionError`` when the input is too
    coarse to determine the output.
    """
    if sigma.n != lattice.n:
        raise DimensionMismatchError(
            f"element dimension {sigma.n} differs from lattice dimension {lattice.n}")
    prime = sigma.prime
    if sigma.precision < required_precision(lattice, out_precision, prime):
        raise InsufficientPrecisionError(
            f"need the element mod {prime}^{required_precision(lattice, out_precision, prime)}"
            f" but it is given mod {prime}^{sigma.precision}")
    inv, fwd, denom = _conjugation_tables(lattice)
    product = _mat_mul_int(_mat_mul_int(inv, list(sigma.entries)), fwd)
    q = prime ** out_precision
    out = []
    for i, row in enumerate(product):
        out_row = []
        for j, numerator in enumerate(row):
            g = gcd(numerator, denom)
            reduced_den = denom // g
            if reduced_den % prime == 0:
                raise NotStableError(
                    f"entry ({i}, {j}) has {prime}-adic valuation "
                    f"-{_valuation(reduced_den, prime)}")
            out_row.append((numerator // g) * pow(reduced_den, -1, q) % q)
        out.append(out_row)
    return GaloisElement(sigma.n, prime, out_precision, out)


def is_stable(sigma: GaloisElement, lattice: LatticeMatrix) -> bool:
    """Whether ``sigma`` preserves the lattice (conjugation stays integral)."""
    try:
        conjugate(sigma, lattice, 1)
    except NotStableError:
        return False
    return True


def cyclotomic_character(sigma: GaloisElement) -> ResidueInt:
    """Determinant of a 2 x 2 torsion action, as a residue at full precision."""
    if sigma.n != 2:
        raise DimensionMismatchError("determinant character needs a 2x2 element")
    return ResidueInt(_det_int(sigma.entries), sigma.modulus)


# --- matrix families -------------------------------------------------------

_CONSTRAINTS = ("free", "unit", "one-mod-prime", "multiple-of-prime")


@dataclass(frozen=True)
class EntryRule:
    """Constraint for one matrix entry.

    ``kind`` is ``"const"``, ``"free"`` (anonymous, possibly constrained) or
    ``"param"`` (named, shared between entries carrying the same name).
    """

    kind: str
    value: int = 0
    name: Optional[str] = None
    constraint: str = "free"

    def __post_init__(self):
        if self.kind not in ("const", "free", "param"):
            raise ValueError(f"unknown entry kind {self.kind!r}")
        if self.constraint not in _CONSTRAINTS:
            raise ValueError(f"unknown constraint {self.constraint!r}")
        if self.kind == "param" and not self.name:
            raise ValueError("param entries need a name")


def const(value: int) -> EntryRule:
    return EntryRule("const", value=value)


def free(constraint: str = "free") -> EntryRule:
    return EntryRule("free", constraint=constraint)


def multiple_of_prime() -> EntryRule:
    return EntryRule("free", constraint="multiple-of-prime")


def param(name: str, constraint: str = "free") -> EntryRule:
    return EntryRule("param", name=name, constraint=constraint)


@dataclass(frozen=True)
class SideCondition:
    """Polynomial identity among named parameters, solved for one of them.

    ``poly`` is a sum of monomials ``(coeff, ((name, power), ...))`` required
    to vanish modulo the family modulus; ``solve_for`` names a parameter
    appearing linearly whose value is derived from the others.
    """

    poly: tuple
    solve_for: str

    def __post_init__(self):
        normalized = tuple(
            (int(coeff), tuple(sorted((str(name), int(power))
                                      for name, power in vars_)))
            for coeff, vars_ in self.poly)
        object.__setattr__(self, "poly", normalized)
        if not isinstance(self.solve_for, str) or not self.solve_for:
            raise ValueError("solve_for must be a parameter name")

    def variables(self) -> set:
        names = set()
        for _, vars_ in self.poly:
            names.update(name for name, _ in vars_)
        return names

    def evaluate(self, values: dict, modulus: int) -> int:
        total = 0
        for coeff, vars_ in self.poly:
            term = coeff
            for name, power in vars_:
                term *= pow(values[name], power, modulus)
            total += term
        return total % modulus

    def solve(self, values: dict, prime: int, modulus: int) -> Optional[int]:
        """Value for ``solve_for`` making the polynomial vanish, or None
        when its coefficient is not invertible for this assignment."""
        linear = 0
        constant = 0
        for coeff, vars_ in self.poly:
            names = dict(vars_)
            if self.solve_for in names:
                if names[self.solve_for] != 1:
                    raise ValueError(
                        f"{self.solve_for} must appear linearly")
                term = coeff
                for name, power in vars_:
                    if name != self.solve_for:
                        term *= pow(values[name], power, modulus)
                linear += term
            else:
                term = coeff
                for name, power in vars_:
                    term *= pow(values[name], power, modulus)
                constant += term
        if linear % prime == 0:
            return None
        return (-constant) * pow(linear, -1, modulus) % modulus


_DOMAIN_SIZES = {
    "free": lambda prime, q: q,
    "unit": lambda prime, q: q - q // prime,
    "one-mod-prime": lambda prime, q: q // prime,
    "multiple-of-prime": lambda prime, q: q // prime,
}


def _domain(constraint: str, prime: int, q: int) -> range:
    if constraint == "free":
        return range(q)
    if constraint == "one-mod-prime":
        return range(1, q, prime)
    if constraint == "multiple-of-prime":
        return range(0, q, prime)
    return [v for v in range(q) if v % prime != 0]  # unit


def _satisfies(value: int, constraint: str, prime: int) -> bool:
    if constraint == "unit":
        return value % prime != 0
    if constraint == "one-mod-prime":
        return value % prime == 1
    if constraint == "multiple-of-prime":
        return value % prime == 0
    return True


@dataclass(frozen=True)
class MatrixFamily:
    """Parametrized set of invertible matrices mod prime**precision."""

    n: int
    prime: int
    precision: int
    pattern: tuple
    side_conditions: tuple = field(default=())

    def __init__(self, n: int, prime: int, precision: int,
                 pattern: Sequence[Sequence[EntryRule]],
                 side_conditions: Sequence[SideCondition] = ()):
        if not _is_prime(prime):
            raise ValueError(f"{prime} is not prime")
        if precision < 1:
            raise ValueError("precision exponent must be at least 1")
        grid = tuple(tuple(row) for row in pattern)
        if len(grid) != n or any(len(r) != n for r in grid):
            raise DimensionMismatchError(f"pattern must be {n}x{n}")
        q = prime ** precision
        grid = tuple(
            tuple(EntryRule("const", value=rule.value % q)
                  if rule.kind == "const" else rule
                  for rule in row)
            for row in grid)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "prime", prime)
        object.__setattr__(self, "precision", precision)
        object.__setattr__(self, "pattern", grid)
        object.__setattr__(self, "side_conditions", tuple(side_conditions))
        self._validate()

    def _validate(self) -> None:
        constraints = {}
        for row in self.pattern:
            for rule in row:
                if rule.kind != "param":
                    continue
                seen = constraints.get(rule.name)
                if seen is not None and seen != rule.constraint:
                    raise ValueError(
                        f"parameter {rule.name!r} reused with a different constraint")
                constraints[rule.name] = rule.constraint
        solved = [c.solve_for for c in self.side_conditions]
        if len(set(solved)) != len(solved):
            raise ValueError("each side condition needs a distinct solved parameter")
        known = set(constraints) - set(solved)
        for cond in self.side_conditions:
            if cond.solve_for not in constraints:
                raise ValueError(
                    f"solved parameter {cond.solve_for!r} does not appear in the pattern")
            others = cond.variables() - {cond.solve_for}
            if not others <= known:
                raise ValueError(
                    f"side condition uses parameters not yet determined: "
                    f"{sorted(others - known)}")
            known.add(cond.solve_for)

    @property
    def modulus(self) -> int:
        return self.prime ** self.precision

    def _param_constraints(self) -> dict:
        out = {}
        for row in self.pattern:
            for rule in row:
                if rule.kind == "param" and rule.name not in out:
                    out[rule.name] = rule.constraint
        return out

    def _sampled_params(self) -> list:
        solved = {c.solve_for for c in self.side_conditions}
        return [(name, constraint)
                for name, constraint in self._param_constraints().items()
                if name not in solved]

    def _anonymous_slots(self) -> list:
        return [(i, j, rule.constraint)
                for i, row in enumerate(self.pattern)
                for j, rule in enumerate(row) if rule.kind == "free"]

    def space_size(self) -> int:
        """Number of raw parameter tuples (before singular instances drop)."""
        q = self.modulus
        size = 1
        for _, constraint in self._sampled_params():
            size *= _DOMAIN_SIZES[constraint](self.prime, q)
        for _, _, constraint in self._anonymous_slots():
            size *= _DOMAIN_SIZES[constraint](self.prime, q)
        return size

    def _build(self, values: dict, anon: dict) -> Optional[GaloisElement]:
        """Instantiate from parameter values; None when the instance leaves
        the family (a solved value breaking its constraint, or a singular
        matrix)."""
        q = self.modulus
        solved = dict(values)
        for cond in self.side_conditions:
            value = cond.solve(solved, self.prime, q)
            if value is None:
                return None
            if not _satisfies(value, self._param_constraints()[cond.solve_for],
                              self.prime):
                return None
            solved[cond.solve_for] = value
        entries = []
        for i, row in enumerate(self.pattern):
            out_row = []
            for j, rule in enumerate(row):
                if rule.kind == "const":
                    out_row.append(rule.value)
                elif rule.kind == "param":
                    out_row.append(solved[rule.name])
                else:
                    out_row.append(anon[(i, j)])
            entries.append(out_row)
        if _det_int(entries) % self.prime == 0:
            return None
        return GaloisElement(self.n, self.prime, self.precision, entries)

    def sample(self, rng: random.Random) -> GaloisElement:
        q = self.modulus
        for _ in range(_SAMPLE_RETRY_LIMIT):
            values = {name: self._draw(rng, constraint, q)
                      for name, constraint in self._sampled_params()}
            anon = {(i, j): self._draw(rng, constraint, q)
                    for i, j, constraint in self._anonymous_slots()}
            element = self._build(values, anon)
            if element is not None:
                return element
        raise UnsatisfiableFamilyError(
            "no family member found; the constraints admit no solution")

    def _draw(self, rng: random.Random, constraint: str, q: int) -> int:
        prime = self.prime
        if constraint == "free":
            return rng.randrange(q)
        if constraint == "one-mod-prime":
            return 1 + prime * rng.randrange(q // prime)
        if constraint == "multiple-of-prime":
            return prime * rng.randrange(q // prime)
        while True:  # unit
            v = rng.randrange(q)
            if v % prime != 0:
                return v

    def enumerate_all(self) -> Iterator[GaloisElement]:
        """All family members in a fixed deterministic order."""
        from itertools import product as iproduct

        if self.space_size() > EXHAUSTIVE_LIMIT:
            raise ValueError(
                f"parameter space of size {self.space_size()} exceeds the "
                f"exhaustive enumeration limit {EXHAUSTIVE_LIMIT}")
        q = self.modulus
        named = self._sampled_params()
        anon = self._anonymous_slots()
        domains = ([_domain(c, self.prime, q) for _, c in named]
                   + [_domain(c, self.prime, q) for _, _, c in anon])
        for combo in iproduct(*domains):
            values = {name: combo[i] for i, (name, _) in enumerate(named)}
            anon_values = {(i, j): combo[len(named) + k]
                           for k, (i, j, _) in enumerate(anon)}
            element = self._build(values, anon_values)
            if element is not None:
                yield element

    def membership(self, element: GaloisElement) -> tuple:
        """(True, None) when the element matches the pattern and all side
        conditions; otherwise (False, reason)."""
        if element.n != self.n or element.prime != self.prime:
            return False, "shape or prime mismatch"
        if element.precision < self.precision:
            raise InsufficientPrecisionError(
                "element precision below the family precision")
        reduced = element.reduce(self.precision)
        q = self.modulus
        bound = {}
        for i, row in enumerate(self.pattern):
            for j, rule in enumerate(row):
                value = reduced.entries[i][j]
                if rule.kind == "const":
                    if value != rule.value:
                        return False, f"entry ({i}, {j}) is {value}, expected {rule.value}"
                    continue
                if not _satisfies(value, rule.constraint, self.prime):
                    return False, (f"entry ({i}, {j}) = {value} violates "
                                   f"{rule.constraint}")
                if rule.kind == "param":
                    if rule.name in bound and bound[rule.name] != value:
                        return False, (f"parameter {rule.name!r} takes both "
                                       f"{bound[rule.name]} and {value}")
                    bound[rule.name] = value
        for cond in self.side_conditions:
            if cond.evaluate(bound, q) != 0:
                return False, f"side condition solved for {cond.solve_for!r} fails"
        return True, None


def sample_family(family: MatrixFamily, seed: int, count: int) -> list:
    """Deterministic list of ``count`` family members for the given seed."""
    rng = random.Random(seed)
    return [family.sample(rng) for _ in range(count)]


def enumerate_family(family: MatrixFamily) -> list:
    members = list(family.enumerate_all())
    if not members:
        raise UnsatisfiableFamilyError("family has no members")
    return members


def iterate_family(family: MatrixFamily, seed: int,
                   count: Optional[int]) -> tuple:
    """(iterator, mode): exhaustive when ``count`` is None, else sampled."""
    if count is None:
        return family.enumerate_all(), "exhaustive"
    rng = random.Random(seed)
    return (family.sample(rng) for _ in range(count)), "sampled"


@dataclass(frozen=True)
class Counterexample:
    index: int
    element: GaloisElement
    conjugated: Optional[GaloisElement]
    reason: str


@dataclass(frozen=True)
class ConjugationReport:
    """Outcome of checking a family's conjugates against a target family."""

    family: MatrixFamily
    lattice: LatticeMatrix
    results: tuple
    first_counterexample: Optional[Counterexample]
    mode: str
    seed: int

    @property
    def total(self) -> int:
        return len(self.results)

    @property
    def failures(self) -> int:
        return sum(1 for ok in self.results if not ok)

    @property
    def passed(self) -> bool:
        return self.first_counterexample is None


def verify_image_shape(family: MatrixFamily, lattice: LatticeMatrix,
                       target: MatrixFamily, seed: int = 0,
                       count: Optional[int] = None) -> ConjugationReport:
    """Conjugate family members by the lattice and test target membership.

    Instability is reported as a counterexample, not an exception.  With
    ``count=None`` the family is enumerated exhaustively (parameter space
    permitting); otherwise ``count`` seeded samples are drawn.
    """
    if family.prime != target.prime:
        raise ValueError("family and target use different primes")
    if family.n != lattice.n or target.n != lattice.n:
        raise DimensionMismatchError("family, lattice, and target dimensions differ")
    needed = required_precision(lattice, target.precision, family.prime)
    if family.precision < needed:
        raise InsufficientPrecisionError(
            f"family precision {family.precision} is below the required {needed}")
    iterator, mode = iterate_family(family, seed, count)
    results = []
    first = None
    for index, sigma in enumerate(iterator):
        try:
            conjugated = conjugate(sigma, lattice, target.precision)
        except NotStableError as exc:
            ok, reason, conjugated = False, f"lattice not stable: {exc}", None
        else:
            ok, reason = target.membership(conjugated)
        results.append(ok)
        if not ok and first is None:
            first = Counterexample(index, sigma, conjugated, reason)
    if not results:
        raise UnsatisfiableFamilyError("family has no members")
    return ConjugationReport(family, lattice, tuple(results), first, mode, seed)


def fixed_subspace(elements: Sequence[GaloisElement]) -> tuple:
    """Basis of the common fixed vectors of mod-prime elements.

    All elements must share the dimension and prime and have precision 1.
    Returns a tuple of row-reduced basis vectors over the prime field; the
    empty tuple means only the zero vector is fixed.
    """
    elements = list(elements)
    if not elements:
        raise ValueError("need at least one element")
    n, prime = elements[0].n, elements[0].prime
    for e in elements:
        if e.precision != 1:
            raise ValueError("fixed subspaces are computed at precision 1")
        if (e.n, e.prime) != (n, prime):
            raise DimensionMismatchError("elements live in different groups")
    # Basis columns of the current candidate space; shrink per element.
    basis = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for e in elements:
        dim = len(basis[0])
        if dim == 0:
            break
        # (sigma - 1) applied to each basis column.
        image = [[sum(e.entries[i][k] * basis[k][j] for k in range(n))
                  - basis[i][j] for j in range(dim)] for i in range(n)]
        coeffs = _nullspace_mod_prime(image, dim, prime)
        basis = [[sum(basis[i][k] * c[k] for k in range(dim)) % prime
                  for c in coeffs] for i in range(n)]
    dim = len(basis[0])
    if dim == 0:
        return ()
    vectors = [[basis[i][j] for i in range(n)] for j in range(dim)]
    return tuple(tuple(v) for v in _rref_mod_prime(vectors, prime))


def _nullspace_mod_prime(rows, ncols, prime):
    """Column vectors spanning the nullspace of a matrix over F_prime."""
    reduced = _rref_mod_prime([list(r) for r in rows], prime)
    pivots = []
    for row in reduced:
        pivots.append(next(j for j in range(ncols) if row[j] != 0))
    free_cols = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free_cols:
        vec = [0] * ncols
        vec[f] = 1
        for row, p in zip(reduced, pivots):
            vec[p] = (-row[f]) % prime
        basis.append(vec)
    return basis


def _rref_mod_prime(rows, prime):
    """Reduced row echelon form over F_prime; zero rows dropped."""
    work = [[x % prime for x in row] for row in rows]
    ncols = len(work[0]) if work else 0
    rank = 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(work)) if work[r][col]), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        inv = pow(work[rank][col], -1, prime)
        work[rank] = [(x * inv) % prime for x in work[rank]]
        for r in range(len(work)):
            if r != rank and work[r][col]:
                factor = work[r][col]
                work[r] = [(a - factor * b) % prime
                           for a, b in zip(work[r], work[rank])]
        rank += 1
        if rank == len(work):
            break
    return [row for row in work[:rank]]
