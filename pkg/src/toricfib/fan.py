"""Simplicial rational cones and fans of toric fibrations over the line.

Cones are generated by primitive, linearly independent rays.  The fans
built here all live in the half-space x_1 >= 0 and fiber over the affine
line through the first coordinate; their maximal cones are full
dimensional, which is what the exact face-compatibility check relies on.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Sequence

from .exactmath import (
    LatticeVector,
    RationalVector,
    adjugate,
    det,
    is_primitive,
    lattice_vector,
    primitive,
    rank,
    rational_vector,
    solve_in_basis,
    sublattice_index,
)

# Pairwise face-compatibility is checked eagerly up to this many maximal
# cones; the only larger fans this artifact builds are long blowup chains
# that are compatible by construction.
FACE_CHECK_LIMIT = 64


@dataclass(frozen=True)
class Cone:
    """A simplicial cone spanned by primitive, independent ray generators.

    Rays are stored sorted, so equality and hashing are order-free.
    """

    rays: tuple[LatticeVector, ...]
    ambient_dim: int = 0

    def __post_init__(self) -> None:
        rays = tuple(lattice_vector(r) for r in self.rays)
        if not rays:
            raise ValueError("a cone needs at least one ray")
        dim = self.ambient_dim or len(rays[0])
        for r in rays:
            if len(r) != dim:
                raise ValueError("ray dimension mismatch")
            if not is_primitive(r):
                raise ValueError(f"ray {r} is not primitive")
        if len(set(rays)) != len(rays):
            raise ValueError("duplicate rays")
        if rank(rays) != len(rays):
            raise ValueError("cone rays must be linearly independent")
        object.__setattr__(self, "rays", tuple(sorted(rays)))
        object.__setattr__(self, "ambient_dim", dim)

    @property
    def dim(self) -> int:
        return len(self.rays)

    def coefficients(self, v: Sequence[int | Fraction]) -> RationalVector | None:
        """Coordinates of v on the rays, or None when v is outside their span."""
        return solve_in_basis(self.rays, rational_vector(v))

    def contains(self, v: Sequence[int | Fraction]) -> bool:
        coeffs = self.coefficients(v)
        return coeffs is not None and all(c >= 0 for c in coeffs)


def multiplicity(cone: Cone) -> int:
    """Index of the ray-generated sublattice in the saturation of its span;
    1 exactly when the cone is smooth."""
    return sublattice_index(cone.rays)


def _clear_denominators(vec: Sequence[Fraction]) -> LatticeVector:
    scale = math.lcm(*(c.denominator for c in vec))
    return primitive(tuple(int(c * scale) for c in vec))


def _idot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(u, v))


@lru_cache(maxsize=65536)
def _facet_normals(cone: Cone) -> tuple[LatticeVector, ...]:
    # Inward facet normals of a full-dimensional simplicial cone: the rows
    # of the inverse ray matrix, i.e. of the adjugate up to the sign of the
    # determinant, cleared to primitive integer vectors.
    d = cone.ambient_dim
    matrix = [[ray[i] for i in range(d)] for ray in cone.rays]
    base = det(matrix)
    if base == 0:
        raise ValueError("cone is not full dimensional")
    adj = adjugate(matrix)
    sign = 1 if base > 0 else -1
    return tuple(primitive(tuple(sign * adj[j][i] for j in range(d))) for i in range(d))


def _kernel_direction(rows: list[LatticeVector], dim: int) -> LatticeVector | None:
    # One-dimensional kernel of a (dim-1)-row integer system: the vector of
    # signed maximal minors (the generalized cross product); all minors zero
    # means the rows are dependent.
    minors = []
    for j in range(dim):
        sub = [[row[c] for c in range(dim) if c != j] for row in rows]
        minors.append((-1) ** j * det(sub))
    if not any(minors):
        return None
    return primitive(tuple(minors))


def _meet_in_common_face(c1: Cone, c2: Cone) -> bool:
    """Exact test that two full-dimensional simplicial cones intersect in
    the cone spanned by their shared rays.

    Every extreme ray of the intersection is the kernel of d-1 independent
    facet hyperplanes drawn from the two cones, so enumerating those
    candidates and checking membership in the shared-ray cone is complete.
    """
    d = c1.ambient_dim
    common = tuple(sorted(set(c1.rays) & set(c2.rays)))
    halfspaces = _facet_normals(c1) + _facet_normals(c2)
    for subset in itertools.combinations(range(len(halfspaces)), d - 1):
        direction = _kernel_direction([halfspaces[i] for i in subset], d)
        if direction is None:
            continue
        for v in (direction, tuple(-x for x in direction)):
            if all(_idot(h, v) >= 0 for h in halfspaces):
                if not common:
                    return False
                coeffs = solve_in_basis(common, v)
                if coeffs is None or any(c < 0 for c in coeffs):
                    return False
                break
    return True


@dataclass(frozen=True)
class Fan:
    """A finite collection of simplicial maximal cones meeting along faces."""

    ambient_dim: int
    maximal_cones: tuple[Cone, ...]

    def __post_init__(self) -> None:
        cones = tuple(self.maximal_cones)
        if not cones:
            raise ValueError("a fan needs at least one maximal cone")
        for c in cones:
            if not isinstance(c, Cone):
                raise TypeError("maximal_cones must be Cone instances")
            if c.ambient_dim != self.ambient_dim:
                raise ValueError("cone ambient dimension mismatch")
        if len(set(cones)) != len(cones):
            raise ValueError("duplicate maximal cones")
        cones = tuple(sorted(cones, key=lambda c: c.rays))
        object.__setattr__(self, "maximal_cones", cones)
        if len(cones) <= FACE_CHECK_LIMIT and self.ambient_dim >= 2:
            self._validate_pairs()

    def _validate_pairs(self) -> None:
        cones = self.maximal_cones
        for c1, c2 in itertools.combinations(cones, 2):
            r1, r2 = set(c1.rays), set(c2.rays)
            if r1 <= r2 or r2 <= r1:
                raise ValueError("a maximal cone contains another")
            if c1.dim == c1.ambient_dim and c2.dim == c2.ambient_dim:
                if not _meet_in_common_face(c1, c2):
                    raise ValueError(
                        f"cones {c1.rays} and {c2.rays} do not meet in a common face"
                    )

    @cached_property
    def rays(self) -> tuple[LatticeVector, ...]:
        return tuple(sorted({r for c in self.maximal_cones for r in c.rays}))

    def containing_cone(
        self, v: Sequence[int | Fraction]
    ) -> tuple[Cone, RationalVector] | None:
        for cone in self.maximal_cones:
            coeffs = cone.coefficients(v)
            if coeffs is not None and all(c >= 0 for c in coeffs):
                return cone, coeffs
        return None

    def support_contains(self, v: Sequence[int | Fraction]) -> bool:
        return self.containing_cone(v) is not None


def standard_fibration_fan(d: int) -> Fan:
    """The fan of the projective-space bundle of rank d-1 over the line.

    Rays are e_1, ..., e_d and c = -(e_2 + ... + e_d); the maximal cones are
    spanned by e_1 together with each (d-1)-subset of {e_2, ..., e_d, c}.
    The support is the half-space x_1 >= 0.
    """
    if d < 2:
        raise ValueError("fibration fans need ambient dimension >= 2")
    basis = [tuple(int(i == j) for i in range(d)) for j in range(d)]
    horizontal = basis[1:] + [tuple([0] + [-1] * (d - 1))]
    cones = [
        Cone((basis[0],) + subset, d)
        for subset in itertools.combinations(horizontal, d - 1)
    ]
    return Fan(d, tuple(cones))


def smallest_containing_cone(
    fan: Fan, l: Sequence[int]
) -> tuple[Cone, RationalVector]:
    """The unique smallest cone of the fan containing l, with the strictly
    positive coordinates of l on that cone's rays."""
    vec = lattice_vector(l)
    if all(e == 0 for e in vec):
        raise ValueError("zero vector has no containing cone")
    located = fan.containing_cone(vec)
    if located is None:
        raise ValueError("vector not in fan support")
    cone, coeffs = located
    positive = [(ray, c) for ray, c in zip(cone.rays, coeffs) if c > 0]
    sub = Cone(tuple(ray for ray, _ in positive), fan.ambient_dim)
    by_ray = dict(positive)
    return sub, tuple(by_ray[ray] for ray in sub.rays)


def star_subdivide(fan: Fan, l: Sequence[int]) -> Fan:
    """Refine the fan by inserting the ray l through every cone containing it.

    Each maximal cone over l is replaced by the cones spanned by l together
    with its facets that miss the relative interior of l's smallest cone.
    """
    vec = lattice_vector(l)
    if not is_primitive(vec):
        raise ValueError("subdivision ray must be primitive")
    if vec in fan.rays:
        raise ValueError("already extracted")
    tau, _ = smallest_containing_cone(fan, vec)
    tau_rays = set(tau.rays)
    new_cones: list[Cone] = []
    for cone in fan.maximal_cones:
        if tau_rays <= set(cone.rays):
            for dropped in tau.rays:
                kept = tuple(r for r in cone.rays if r != dropped)
                new_cones.append(Cone(kept + (vec,), fan.ambient_dim))
        else:
            new_cones.append(cone)
    return Fan(fan.ambient_dim, tuple(new_cones))
