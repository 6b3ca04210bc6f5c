"""Fans of strongly convex rational cones and their star fans.

Cones are stored combinatorially: a fan keeps primitive ray generators and
the ray-index sets of its maximal cones; every other cone is a face of one
of those.  All geometric predicates (membership, face tests, minimal
containing cone) reduce to exact rational feasibility problems, so there is
no floating point anywhere in the decision path.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Optional, Sequence

from coxmap.abelian import (
    IntMatrix,
    feasible_lexmin,
    saturated_kernel,
    smith_normal_form,
    solve_rational,
)


class ConeNotInFan(ValueError):
    pass


class ValidationFailure(ValueError):
    pass


PAIRWISE_CHECK_LIMIT = 64


@dataclass(frozen=True)
class Fan:
    """A fan given by primitive rays and maximal cones as ray-index sets."""

    dim: int
    rays: tuple[tuple[int, ...], ...]
    max_cones: tuple[frozenset[int], ...]

    @classmethod
    def make(cls, dim: int, rays: Iterable[Sequence[int]], max_cones: Iterable[Iterable[int]]) -> "Fan":
        return cls(
            int(dim),
            tuple(tuple(int(x) for x in ray) for ray in rays),
            tuple(frozenset(int(i) for i in cone) for cone in max_cones),
        )

    @property
    def nrays(self) -> int:
        return len(self.rays)

    def cone(self, indices: Iterable[int]) -> "Cone":
        idx = frozenset(indices)
        if not self.is_face(idx):
            raise ConeNotInFan("ray set %s does not span a cone of the fan" % sorted(idx))
        return Cone(self, idx)

    def is_face(self, indices: frozenset[int]) -> bool:
        """Whether the given rays span a cone of the fan.

        True exactly when some maximal cone admits a supporting functional
        vanishing on these rays and strictly positive on its other rays.
        """
        return _is_face_cached(self, frozenset(indices))


@dataclass(frozen=True)
class Cone:
    fan: Fan
    indices: frozenset[int]

    @property
    def rays(self) -> tuple[tuple[int, ...], ...]:
        return tuple(self.fan.rays[i] for i in sorted(self.indices))

    @property
    def is_zero(self) -> bool:
        return not self.indices


@lru_cache(maxsize=None)
def _is_face_cached(fan: Fan, indices: frozenset[int]) -> bool:
    if any(i < 0 or i >= fan.nrays for i in indices):
        return False
    for cone in fan.max_cones:
        if indices <= cone and _face_witness(fan, indices, cone) is not None:
            return True
    return False


def _face_witness(fan: Fan, indices: frozenset[int], cone: frozenset[int]):
    """Functional vanishing on ``indices`` and >= 1 on the cone's other rays."""
    ineqs = []
    for i in sorted(indices):
        ray = fan.rays[i]
        ineqs.append(([Fraction(x) for x in ray], Fraction(0)))
        ineqs.append(([Fraction(-x) for x in ray], Fraction(0)))
    for j in sorted(cone - indices):
        ray = fan.rays[j]
        ineqs.append(([Fraction(-x) for x in ray], Fraction(-1)))
    return feasible_lexmin(ineqs, fan.dim)


def _gens_contain(gens: Sequence[Sequence[int]], v: Sequence, dim: int) -> bool:
    """Exact membership of v in the cone spanned by integer generators."""
    cols = IntMatrix.from_rows(
        [[gen[d] for gen in gens] for d in range(dim)], cols=len(gens)
    )
    return solve_rational(cols, list(v), nonneg=True) is not None


def cone_contains(cone: Cone, v: Sequence) -> bool:
    """Exact test for v in the cone (rational coordinates allowed)."""
    if len(v) != cone.fan.dim:
        raise ValueError("point dimension mismatch")
    return _gens_contain(cone.rays, [Fraction(x) for x in v], cone.fan.dim)


def _minimal_face_of_gens(gens: dict[int, tuple], v: Sequence, dim: int) -> frozenset[int]:
    """Indices of generators spanning the minimal face containing v.

    Preconditions: v lies in the cone spanned by the generators.  Generator i
    stays outside the minimal face exactly when some functional is
    nonnegative on all generators, zero on v, and >= 1 on generator i.
    """
    face = set()
    for i, gen in gens.items():
        ineqs = []
        for other in gens.values():
            ineqs.append(([Fraction(-x) for x in other], Fraction(0)))
        ineqs.append(([Fraction(x) for x in v], Fraction(0)))
        ineqs.append(([Fraction(-x) for x in v], Fraction(0)))
        ineqs.append(([Fraction(-x) for x in gen], Fraction(-1)))
        if feasible_lexmin(ineqs, dim) is None:
            face.add(i)
    return frozenset(face)


def minimal_cone_containing(fan: Fan, v: Sequence) -> Optional[Cone]:
    """The unique smallest cone of the fan containing v, or None outside."""
    vv = [Fraction(x) for x in v]
    for cone in fan.max_cones:
        gens = {i: fan.rays[i] for i in sorted(cone)}
        if _gens_contain(list(gens.values()), vv, fan.dim):
            face = _minimal_face_of_gens(gens, vv, fan.dim)
            return Cone(fan, face)
    return None


def validate_fan(fan: Fan) -> list[str]:
    """Check fan invariants; returns a list of human-readable violations.

    Ray primitivity and distinctness, cone index bounds, maximality of the
    listed cones, strong convexity, and (for fans with at most 64 maximal
    cones) the pairwise requirement that two cones intersect in a common
    face.
    """
    problems = []
    seen = {}
    for i, ray in enumerate(fan.rays):
        if len(ray) != fan.dim:
            problems.append("ray %d has length %d, expected %d" % (i, len(ray), fan.dim))
            continue
        if not any(ray):
            problems.append("ray %d is zero" % i)
        elif gcd(*(abs(x) for x in ray)) != 1:
            problems.append("ray %d = %s is not primitive" % (i, list(ray)))
        if ray in seen:
            problems.append("rays %d and %d coincide" % (seen[ray], i))
        else:
            seen[ray] = i
    if problems:
        return problems
    for c, cone in enumerate(fan.max_cones):
        if any(i < 0 or i >= fan.nrays for i in cone):
            problems.append("cone %d uses an out-of-range ray index" % c)
    if problems:
        return problems
    for c1, cone1 in enumerate(fan.max_cones):
        for c2, cone2 in enumerate(fan.max_cones):
            if c1 < c2 and (cone1 <= cone2 or cone2 <= cone1):
                problems.append("cones %d and %d are nested, so one is not maximal" % (c1, c2))
    for c, cone in enumerate(fan.max_cones):
        if _face_witness(fan, frozenset(), cone) is None:
            problems.append("cone %d is not strongly convex" % c)
    if problems:
        return problems
    if len(fan.max_cones) <= PAIRWISE_CHECK_LIMIT:
        for c1, cone1 in enumerate(fan.max_cones):
            for c2, cone2 in enumerate(fan.max_cones):
                if c1 >= c2:
                    continue
                problems.extend(_intersection_problems(fan, c1, cone1, c2, cone2))
    return problems


def _intersection_problems(fan, c1, cone1, c2, cone2) -> list[str]:
    common = cone1 & cone2
    m1 = _face_witness(fan, common, cone1)
    if m1 is None:
        return ["shared rays of cones %d and %d do not span a face of cone %d" % (c1, c2, c1)]
    if _face_witness(fan, common, cone2) is None:
        return ["shared rays of cones %d and %d do not span a face of cone %d" % (c1, c2, c2)]
    # Any point of cone1 & cone2 where m1 is positive escapes the common face.
    g1 = sorted(cone1)
    g2 = sorted(cone2)
    n = len(g1) + len(g2)
    ineqs = []
    for k in range(n):
        row = [Fraction(0)] * n
        row[k] = Fraction(-1)
        ineqs.append((row, Fraction(0)))
    for d in range(fan.dim):
        row = [Fraction(fan.rays[i][d]) for i in g1] + [Fraction(-fan.rays[j][d]) for j in g2]
        ineqs.append((row, Fraction(0)))
        ineqs.append(([-x for x in row], Fraction(0)))
    m1row = [
        -sum(Fraction(m1[d]) * fan.rays[i][d] for d in range(fan.dim)) for i in g1
    ] + [Fraction(0)] * len(g2)
    ineqs.append((m1row, Fraction(-1)))
    if feasible_lexmin(ineqs, n) is not None:
        return ["cones %d and %d intersect outside their common face" % (c1, c2)]
    return []


@dataclass(frozen=True)
class QuotientLattice:
    """Surjection N -> N(sigma) killing exactly the saturated span of a cone."""

    ambient_dim: int
    rank: int
    projection: IntMatrix  # rank x ambient_dim

    def project(self, v: Sequence) -> tuple:
        return self.projection.apply(v)


def quotient_by_span(dim: int, gens: Sequence[Sequence[int]]) -> QuotientLattice:
    span = IntMatrix.from_rows(
        [[gen[d] for gen in gens] for d in range(dim)], cols=len(gens)
    )
    snf = smith_normal_form(span)
    rank = sum(1 for d in snf.diagonal if d != 0)
    proj_rows = [snf.u.row(i) for i in range(rank, dim)]
    return QuotientLattice(dim, dim - rank, IntMatrix.from_rows(proj_rows, cols=dim))


@dataclass(frozen=True)
class StarFan:
    """Cones of a fan containing a fixed cone, with their images downstairs.

    ``entries`` pairs each maximal cone containing sigma with the projected
    generators of its image cone; image generators are the projections of
    the original rays, kept without re-primitivization so that membership
    tests can reuse them directly.
    """

    base: Cone
    lattice: QuotientLattice
    entries: tuple[tuple[frozenset[int], tuple[tuple[int, ...], ...]], ...]

    @property
    def fan(self) -> Fan:
        return self.base.fan

    def image_gens(self, indices: Iterable[int]) -> tuple[tuple[int, ...], ...]:
        return tuple(self.lattice.project(self.fan.rays[i]) for i in sorted(indices))

    def support_contains(self, v: Sequence) -> bool:
        vv = [Fraction(x) for x in v]
        return any(
            _gens_contain(gens, vv, self.lattice.rank) for _, gens in self.entries
        )

    def minimal_image_cone(self, v: Sequence) -> Optional[frozenset[int]]:
        """Ray indices upstairs spanning the cone over the minimal image
        cone containing v; None when v is outside the support."""
        vv = [Fraction(x) for x in v]
        for indices, _ in self.entries:
            order = sorted(indices)
            gens = dict(zip(order, self.image_gens(order)))
            if _gens_contain(list(gens.values()), vv, self.lattice.rank):
                return _minimal_face_of_gens(gens, vv, self.lattice.rank)
        return None

    def cones_with_image(self, tau_gens: Sequence[Sequence[int]]) -> list[frozenset[int]]:
        """All cones containing the base whose image equals the given cone."""
        q = self.lattice.rank
        tau_list = [tuple(g) for g in tau_gens]
        found = []
        for indices, gens in self.entries:
            order = sorted(indices)
            images = dict(zip(order, self.image_gens(order)))
            if not all(_gens_contain(gens, list(map(Fraction, t)), q) for t in tau_list):
                continue
            candidate = frozenset(
                i for i in order if _gens_contain(tau_list, list(map(Fraction, images[i])), q)
            )
            if candidate not in found:
                found.append(candidate)
        return found


def star_fan(fan: Fan, sigma: Cone) -> StarFan:
    """Star of a cone: every maximal cone containing it, projected to N(sigma)."""
    if sigma.fan != fan:
        raise ConeNotInFan("cone belongs to a different fan")
    lattice = quotient_by_span(fan.dim, [fan.rays[i] for i in sorted(sigma.indices)])
    entries = []
    for cone in fan.max_cones:
        if sigma.indices <= cone:
            gens = tuple(lattice.project(fan.rays[i]) for i in sorted(cone))
            entries.append((cone, gens))
    if not entries:
        raise ConeNotInFan("no maximal cone contains the given cone")
    return StarFan(sigma, lattice, tuple(entries))


def ray_projection_map(star: StarFan) -> IntMatrix:
    """Matrix whose i-th column is the projection of ray i; columns for rays
    of the base cone are zero."""
    fan = star.fan
    cols = [star.lattice.project(ray) for ray in fan.rays]
    return IntMatrix.from_rows(
        [[col[r] for col in cols] for r in range(star.lattice.rank)], cols=fan.nrays
    )


def orthogonal_character_basis(fan: Fan, sigma: Cone) -> tuple[tuple[int, ...], ...]:
    """Hermite basis of the characters vanishing on a cone of the fan."""
    rows = [fan.rays[i] for i in sorted(sigma.indices)]
    kernel = saturated_kernel(IntMatrix.from_rows(rows, cols=fan.dim))
    return kernel.entries


def irrelevant_monomials(fan: Fan) -> tuple[tuple[int, ...], ...]:
    """One square-free exponent vector per maximal cone: exponent one on each
    ray outside the cone."""
    return tuple(
        tuple(0 if i in cone else 1 for i in range(fan.nrays)) for cone in fan.max_cones
    )
