"""Toric divisors on fibration fans: support functions, log discrepancies,
minimal log discrepancy search, fiber multiplicities, pullbacks along star
subdivisions, and relative linear equivalence over the affine base.

Sign convention, fixed once: the support function of a divisor D takes the
value -coeff_D(u) at every ray u, and the divisor of the character with
exponent m has coefficient <m, u> at u.  Consequently two divisors are
Q-linearly equivalent over the base exactly when their difference plus
some character divisor vanishes, and that character exponent is the
witness returned here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .exactmath import (
    InvariantViolation,
    LatticeVector,
    Rat,
    RationalVector,
    dot,
    ensure_rational,
    is_primitive,
    lattice_vector,
    parallelepiped_points,
    rational_vector,
    solve_linear_system,
)
from .fan import Cone, Fan, smallest_containing_cone, star_subdivide


@dataclass(frozen=True)
class ToricDivisor:
    """A formal Q-combination of the rays of a fan.

    Only nonzero coefficients are stored; rays absent from the table have
    coefficient zero.
    """

    fan: Fan
    entries: tuple[tuple[LatticeVector, Rat], ...]

    def __post_init__(self) -> None:
        rays = set(self.fan.rays)
        seen = set()
        normalized = []
        for ray, coeff in self.entries:
            ray = lattice_vector(ray)
            coeff = ensure_rational(coeff)
            if ray not in rays:
                raise ValueError(f"{ray} is not a ray of the fan")
            if ray in seen:
                raise ValueError(f"duplicate coefficient for ray {ray}")
            seen.add(ray)
            if coeff != 0:
                normalized.append((ray, coeff))
        normalized.sort()
        object.__setattr__(self, "entries", tuple(normalized))

    @classmethod
    def make(cls, fan: Fan, coefficients: Mapping[LatticeVector, int | Rat]) -> "ToricDivisor":
        return cls(fan, tuple(coefficients.items()))

    def coefficient(self, ray: Sequence[int]) -> Rat:
        ray = lattice_vector(ray)
        if ray not in set(self.fan.rays):
            raise ValueError(f"{ray} is not a ray of the fan")
        for r, c in self.entries:
            if r == ray:
                return c
        return Fraction(0)

    def as_dict(self) -> dict[LatticeVector, Rat]:
        return dict(self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def _combine(self, other: "ToricDivisor", sign: int) -> "ToricDivisor":
        if self.fan != other.fan:
            raise ValueError("divisors live on different fans")
        table = self.as_dict()
        for ray, coeff in other.entries:
            table[ray] = table.get(ray, Fraction(0)) + sign * coeff
        return ToricDivisor.make(self.fan, table)

    def __add__(self, other: "ToricDivisor") -> "ToricDivisor":
        return self._combine(other, 1)

    def __sub__(self, other: "ToricDivisor") -> "ToricDivisor":
        return self._combine(other, -1)

    def __neg__(self) -> "ToricDivisor":
        return ToricDivisor.make(self.fan, {r: -c for r, c in self.entries})

    def __rmul__(self, scalar: int | Rat) -> "ToricDivisor":
        s = ensure_rational(scalar)
        return ToricDivisor.make(self.fan, {r: s * c for r, c in self.entries})

    __mul__ = __rmul__


def zero_divisor(fan: Fan) -> ToricDivisor:
    return ToricDivisor(fan, ())


def ray_divisor(fan: Fan, ray: Sequence[int]) -> ToricDivisor:
    return ToricDivisor.make(fan, {lattice_vector(ray): Fraction(1)})


def canonical_divisor(fan: Fan) -> ToricDivisor:
    """Minus the sum of all prime toric divisors."""
    return ToricDivisor.make(fan, {r: Fraction(-1) for r in fan.rays})


def horizontal_sum(fan: Fan) -> ToricDivisor:
    """The sum of the prime toric divisors that dominate the base, i.e. the
    rays with vanishing first coordinate."""
    return ToricDivisor.make(fan, {r: Fraction(1) for r in fan.rays if r[0] == 0})


def fiber_divisor(fan: Fan) -> ToricDivisor:
    """Pullback of the origin of the base: coefficient u_1 at every ray u."""
    return ToricDivisor.make(fan, {r: Fraction(r[0]) for r in fan.rays})


def character_divisor(fan: Fan, exponent: Sequence[int | Rat]) -> ToricDivisor:
    """The divisor of the character with the given exponent vector:
    coefficient <m, u> at every ray u."""
    m = rational_vector(exponent)
    return ToricDivisor.make(fan, {r: dot(m, r) for r in fan.rays})


@dataclass(frozen=True)
class SupportFunction:
    """Piecewise-linear witness of a Q-Cartier divisor: one linear
    functional per maximal cone, taking the value -coeff(u) at each ray u."""

    fan: Fan
    witnesses: tuple[tuple[Cone, RationalVector], ...]

    def witness_on(self, cone: Cone) -> RationalVector:
        for c, m in self.witnesses:
            if c == cone:
                return m
        raise ValueError("cone is not a maximal cone of the fan")

    def value(self, point: Sequence[int | Rat]) -> Rat:
        for cone, m in self.witnesses:
            if cone.contains(point):
                return dot(m, rational_vector(point))
        raise ValueError("vector not in fan support")


def support_function(divisor: ToricDivisor) -> SupportFunction:
    """The support function of a divisor on a simplicial fan.

    On simplicial cones the defining linear systems are always solvable, so
    every divisor here is Q-Cartier; pieces agreeing at shared rays agree on
    shared faces automatically, and that agreement is re-asserted.
    """
    fan = divisor.fan
    witnesses = []
    for cone in fan.maximal_cones:
        rows = [rational_vector(r) for r in cone.rays]
        rhs = [-divisor.coefficient(r) for r in cone.rays]
        m = solve_linear_system(rows, rhs)
        if m is None:
            raise InvariantViolation("simplicial cone admitted no support witness")
        witnesses.append((cone, m))
    for cone, m in witnesses:
        for other, m2 in witnesses:
            for ray in set(cone.rays) & set(other.rays):
                if dot(m, ray) != dot(m2, ray):
                    raise InvariantViolation("support function pieces disagree on a face")
    return SupportFunction(fan, tuple(witnesses))


def log_discrepancy(
    fan: Fan, boundary: ToricDivisor, l: Sequence[int]
) -> Rat:
    """Log discrepancy of the toric valuation of the primitive vector l with
    respect to the pair (fan, boundary): sum of c_i * (1 - b_i) over the
    decomposition of l on its smallest containing cone."""
    vec = lattice_vector(l)
    if not is_primitive(vec):
        raise ValueError("log discrepancies are attached to primitive vectors")
    _check_boundary(fan, boundary)
    cone, coeffs = smallest_containing_cone(fan, vec)
    return sum(
        (c * (1 - boundary.coefficient(r)) for r, c in zip(cone.rays, coeffs)),
        Fraction(0),
    )


def _check_boundary(fan: Fan, boundary: ToricDivisor) -> None:
    if boundary.fan != fan:
        raise ValueError("boundary lives on a different fan")
    if any(c > 1 for _, c in boundary.entries):
        raise ValueError("boundary coefficients must be <= 1")


@lru_cache(maxsize=None)
def toric_mld(fan: Fan, boundary: ToricDivisor) -> tuple[Rat, LatticeVector]:
    """Minimal log discrepancy over all primitive vectors in the support,
    with the lexicographically smallest minimizer.

    The search space per maximal cone is its rays plus the nonzero lattice
    points of the half-open ray box: the discrepancy function is additive
    under adding a ray generator, so box points dominate everything else.
    Non-primitive box points are skipped because their primitive
    representatives are box points of the same cone with smaller value.
    """
    _check_boundary(fan, boundary)
    candidates: list[tuple[Rat, LatticeVector]] = []
    for ray in fan.rays:
        candidates.append((1 - boundary.coefficient(ray), ray))
    for cone in fan.maximal_cones:
        weights = [1 - boundary.coefficient(r) for r in cone.rays]
        for point, coeffs in parallelepiped_points(cone.rays):
            if all(x == 0 for x in point) or not is_primitive(point):
                continue
            value = sum((c * w for c, w in zip(coeffs, weights)), Fraction(0))
            candidates.append((value, point))
    return min(candidates)


def is_epsilon_lc(fan: Fan, boundary: ToricDivisor, eps: int | Rat) -> bool:
    eps = ensure_rational(eps)
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    value, _ = toric_mld(fan, boundary)
    return value >= eps


def fiber_multiplicity(fan: Fan, t: Sequence[int]) -> int:
    """Multiplicity of the prime divisor of the ray t in the fiber over the
    origin of the base: the first coordinate of t."""
    vec = lattice_vector(t)
    if vec not in set(fan.rays):
        raise ValueError(f"{vec} is not a ray of the fan")
    if vec[0] <= 0:
        raise ValueError("not a fiber component")
    return vec[0]


@dataclass(frozen=True)
class Subdivision:
    """A star subdivision, recorded with both fans so pullbacks can be
    validated against it."""

    coarse: Fan
    fine: Fan
    new_ray: LatticeVector

    def __post_init__(self) -> None:
        object.__setattr__(self, "new_ray", lattice_vector(self.new_ray))
        if star_subdivide(self.coarse, self.new_ray) != self.fine:
            raise ValueError("fans not related by the recorded subdivision")

    @classmethod
    def at(cls, fan: Fan, l: Sequence[int]) -> "Subdivision":
        vec = lattice_vector(l)
        return cls(fan, star_subdivide(fan, vec), vec)


def pullback(subdivision: Subdivision, divisor: ToricDivisor) -> ToricDivisor:
    """Pull a divisor back along a star subdivision: old coefficients are
    kept and the new ray receives minus the support-function value there."""
    if divisor.fan != subdivision.coarse:
        raise ValueError("divisor does not live on the coarse fan")
    table = divisor.as_dict()
    table[subdivision.new_ray] = -support_function(divisor).value(subdivision.new_ray)
    return ToricDivisor.make(subdivision.fine, table)


def rel_lin_equiv(
    fan: Fan, first: ToricDivisor, second: ToricDivisor
) -> RationalVector | None:
    """Witness of Q-linear equivalence over the affine base.

    Returns the character exponent m with <m, u> = -(first - second)(u) at
    every ray u when it exists, i.e. first - second + div(chi^m) = 0; such
    divisors are exactly those trivial over the base.  Returns None when
    the divisors are not equivalent.
    """
    if first.fan != fan or second.fan != fan:
        raise ValueError("divisors live on a different fan")
    diff = first - second
    rows = [rational_vector(r) for r in fan.rays]
    rhs = [-diff.coefficient(r) for r in fan.rays]
    return solve_linear_system(rows, rhs)
