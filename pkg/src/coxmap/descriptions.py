"""Descriptions of rational maps between toric varieties in Cox coordinates.

A description assigns to every variable of the target Cox ring either zero
or a multi-valued section over the source.  The conditions checked here are
exactly the ones that make such an assignment describe an honest rational
map: every character of the target supported off the zero set must pull
back to a single-valued, degree-zero rational function (homogeneity), the
zero set must span a cone of the target fan (so some irrelevant monomial
survives), and along each irreducible divisor of the source the description
must reproduce the vanishing orders of the map, which is what the
completion pass enforces divisor by divisor.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

from coxmap.abelian import IntMatrix, hermite_normal_form, solve_rational
from coxmap.coxring import (
    MPoly,
    ToricCoxRing,
    homogeneous_degree,
)
from coxmap.fan import (
    Cone,
    ConeNotInFan,
    StarFan,
    orthogonal_character_basis,
    ray_projection_map,
    star_fan,
)
from coxmap.sections import (
    FactoredSection,
    InhomogeneousFactor,
    PulledBackSection,
    RadicalScalar,
    fractional_part,
    rational_quotient,
    root_order,
    section_degree,
    section_mul,
    section_pow,
)


class ZeroConeNotInFan(ValueError):
    """The zero set of the images does not span a cone of the target fan."""


class InhomogeneousImage(ValueError):
    """An image carries a factor that is not homogeneous over the source."""


class DescriptionNotHomogeneous(ValueError):
    def __init__(self, failure: "HomogeneityFailure"):
        super().__init__(
            "character %s pulls back with %s" % (list(failure.character), failure.reason)
        )
        self.failure = failure


class FractionalPartMismatch(ValueError):
    """Monomials of one homogeneous polynomial pulled back with different
    radical parts; the description cannot be homogeneous."""


class InconsistentCharacterData(ValueError):
    pass


class NotInKernel(ValueError):
    """A twist vector whose weighted ray projection is nonzero."""


class NonIntegralL(ValueError):
    """Vanishing orders whose ray projection is not a lattice point."""


class NonTermination(RuntimeError):
    pass


class IncompleteDescription(ValueError):
    pass


class CoxDescription:
    """Images of the target Cox variables as sections over the source."""

    def __init__(
        self,
        source: ToricCoxRing,
        target: ToricCoxRing,
        images: Sequence[FactoredSection],
    ):
        images = tuple(images)
        if len(images) != target.nvars:
            raise ValueError(
                "expected %d images, got %d" % (target.nvars, len(images))
            )
        for img in images:
            if img.nvars != source.nvars:
                raise ValueError("image over the wrong number of source variables")
        self.source = source
        self.target = target
        self.images = images

    @cached_property
    def zero_set(self) -> frozenset[int]:
        return frozenset(i for i, img in enumerate(self.images) if img.is_zero)

    @cached_property
    def sigma(self) -> Cone:
        try:
            return self.target.fan.cone(self.zero_set)
        except ConeNotInFan:
            raise ZeroConeNotInFan(
                "zero images at %s do not span a cone of the target fan"
                % sorted(self.zero_set)
            ) from None

    @cached_property
    def star(self) -> StarFan:
        return star_fan(self.target.fan, self.sigma)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CoxDescription)
            and self.source == other.source
            and self.target == other.target
            and self.images == other.images
        )

    def __repr__(self) -> str:
        return "CoxDescription(%s)" % ", ".join(
            img.to_str(self.source.names) for img in self.images
        )


@dataclass(frozen=True)
class CharacterMap:
    """Values of a basis of the characters vanishing on a cone."""

    sigma_indices: frozenset[int]
    basis: tuple[tuple[int, ...], ...]
    values: tuple[FactoredSection, ...]


@dataclass(frozen=True)
class HomogeneityFailure:
    character: tuple[int, ...]
    value: FactoredSection
    reason: str  # "fractional_exponent" or "nonzero_degree"
    degree_free: Optional[tuple[Fraction, ...]] = None
    degree_torsion: Optional[tuple[int, ...]] = None


def validate_description(d: CoxDescription) -> tuple[frozenset[int], Cone]:
    """Check that the zero set of the images spans a cone of the target fan.

    Returns the zero set and its cone.  Failure means every irrelevant
    monomial of the target pulls back to zero, so the description cannot
    reach the relevant locus.
    """
    return d.zero_set, d.sigma


def check_homogeneity(d: CoxDescription):
    """Pull back a basis of the characters vanishing on the zero cone.

    Every stored factor must be homogeneous, and every such character must
    land on a single-valued section of degree exactly zero.  Returns the
    CharacterMap on success, else a HomogeneityFailure naming the offending
    character and whether it picked up a fractional exponent or a nonzero
    degree.  An inhomogeneous factor raises InhomogeneousImage instead,
    since then no image even has a well-defined degree.
    """
    validate_description(d)
    for i, img in enumerate(d.images):
        if img.is_zero:
            continue
        for p in img.factor_polys():
            witness = homogeneous_degree(d.source, p)
            if not witness.is_homogeneous:
                raise InhomogeneousImage(
                    "image %d carries inhomogeneous factor %s"
                    % (i, d.source.poly_str(p))
                )
    fan = d.target.fan
    basis = orthogonal_character_basis(fan, d.sigma)
    values = []
    for m in basis:
        value = FactoredSection.one(d.source.nvars)
        for i, img in enumerate(d.images):
            if i in d.zero_set:
                continue
            e = sum(a * b for a, b in zip(m, fan.rays[i]))
            if e:
                value = section_mul(value, section_pow(img, Fraction(e)))
        if root_order(value) != 1:
            return HomogeneityFailure(m, value, "fractional_exponent")
        free, exact = section_degree(d.source, value)
        assert exact is not None
        if not exact.is_zero:
            return HomogeneityFailure(
                m, value, "nonzero_degree", tuple(free), exact.torsion
            )
        values.append(value)
    return CharacterMap(d.zero_set, basis, tuple(values))


def check_relevance(d: CoxDescription) -> tuple[bool, Optional[int]]:
    """Some maximal cone must contain the zero set; returns the first
    witness cone index."""
    validate_description(d)
    for c, cone in enumerate(d.target.fan.max_cones):
        if d.zero_set <= cone:
            return True, c
    return False, None


def induced_character_map(d: CoxDescription) -> CharacterMap:
    result = check_homogeneity(d)
    if isinstance(result, HomogeneityFailure):
        raise DescriptionNotHomogeneous(result)
    return result


def pullback_polynomial(d: CoxDescription, g: MPoly) -> PulledBackSection:
    """Pull a polynomial over the target back through the description.

    Monomials meeting a zero image drop; the survivors must share one
    radical part, and the result is that radical part times their sum over
    a common denominator.  Returns zero when all terms drop or cancel.
    """
    if g.nvars != d.target.nvars:
        raise ValueError("polynomial over the wrong number of target variables")
    nv = d.source.nvars
    terms = []
    for exps, coeff in g.sorted_terms():
        if any(exps[i] and i in d.zero_set for i in range(len(exps))):
            continue
        section = FactoredSection.one(nv)
        for i, e in enumerate(exps):
            if e:
                section = section_mul(section, section_pow(d.images[i], Fraction(e)))
        section = section_mul(
            section,
            FactoredSection(nv, RadicalScalar.from_rational(coeff), ()),
        )
        terms.append(section)
    if not terms:
        return PulledBackSection.zero(nv)
    gamma = fractional_part(terms[0])
    rationals = []
    for section in terms:
        try:
            rationals.append(rational_quotient(section, gamma))
        except ValueError:
            raise FractionalPartMismatch(
                "monomials of %s pull back with different radical parts"
                % d.target.poly_str(g)
            ) from None
    depth: dict[MPoly, int] = {}
    for _, factors in rationals:
        for p, k in factors:
            if k < 0:
                depth[p] = max(depth.get(p, 0), -k)
    den = MPoly.constant(nv, 1)
    for p, k in sorted(depth.items(), key=lambda t: t[0].sort_key()):
        den = den * p ** k
    num = MPoly.zero(nv)
    for scalar, factors in rationals:
        term = MPoly.constant(nv, scalar)
        exps = dict(factors)
        for p in depth:
            exps[p] = exps.get(p, 0) + depth[p]
        for p, k in exps.items():
            if k:
                term = term * p ** k
        num = num + term
    if num.is_zero:
        return PulledBackSection.zero(nv)
    return PulledBackSection(nv, gamma, num, den)


def verify_ideal_vanishing(
    d: CoxDescription, generators: Sequence[MPoly]
) -> tuple[bool, Optional[tuple[MPoly, PulledBackSection]]]:
    """Whether every generator pulls back to zero; on failure returns the
    first generator together with its nonzero pullback as a witness."""
    for g in generators:
        pb = pullback_polynomial(d, g)
        if not pb.is_zero:
            return False, (g, pb)
    return True, None


# ---------------------------------------------------------------------------
# Construction from character data


def _solve_mod2(rows: list[list[int]], rhs: list[int], n: int) -> Optional[list[int]]:
    m = [[rows[i][j] & 1 for j in range(n)] + [rhs[i] & 1] for i in range(len(rows))]
    pivots = []
    r = 0
    for c in range(n):
        pivot = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        for i in range(len(m)):
            if i != r and m[i][c]:
                m[i] = [(x + y) & 1 for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    for row in m[r:]:
        if row[n]:
            return None
    x = [0] * n
    for i, c in enumerate(pivots):
        x[c] = m[i][n]
    return x


def construct_description(
    source: ToricCoxRing, target: ToricCoxRing, charmap: CharacterMap
) -> CoxDescription:
    """Build a description realizing the given character values.

    The values must be single-valued degree-zero sections over the source,
    one per basis character vanishing on the chosen cone.  Each stored
    factor and each scalar prime yields an independent linear system for
    the image exponents; free variables are set to zero and signs are
    matched modulo squares.  Raises InconsistentCharacterData when no exact
    solution exists.
    """
    fan = target.fan
    try:
        sigma = fan.cone(charmap.sigma_indices)
    except ConeNotInFan:
        raise ZeroConeNotInFan(
            "chosen zero set does not span a cone of the target fan"
        ) from None
    reference = orthogonal_character_basis(fan, sigma)
    given = IntMatrix.from_rows(charmap.basis, cols=fan.dim)
    if (
        len(charmap.basis) != len(reference)
        or hermite_normal_form(given).entries != reference
    ):
        raise InconsistentCharacterData(
            "characters do not form a basis of the lattice vanishing on the cone"
        )
    if len(charmap.values) != len(charmap.basis):
        raise InconsistentCharacterData("one value per basis character required")
    for value in charmap.values:
        if value.is_zero:
            raise InconsistentCharacterData("character values must be nonzero")
        if root_order(value) != 1:
            raise InconsistentCharacterData("character values must be single-valued")
        try:
            _, exact = section_degree(source, value)
        except InhomogeneousFactor:
            raise InconsistentCharacterData(
                "character values must have homogeneous factors"
            ) from None
        if exact is None or not exact.is_zero:
            raise InconsistentCharacterData("character values must have degree zero")

    free_indices = [i for i in range(target.nvars) if i not in charmap.sigma_indices]
    system = IntMatrix.from_rows(
        [
            [sum(a * b for a, b in zip(m, fan.rays[i])) for i in free_indices]
            for m in charmap.basis
        ],
        cols=len(free_indices),
    )

    pool: list[MPoly] = []
    for value in charmap.values:
        for p in value.factor_polys():
            if p not in pool:
                pool.append(p)
    pool.sort(key=lambda p: p.sort_key())
    primes = sorted({p for value in charmap.values for p, _ in value.unit.powers})

    factor_exps: dict[MPoly, tuple] = {}
    for p in pool:
        rhs = [value.exponent_of(p) for value in charmap.values]
        sol = solve_rational(system, rhs)
        if sol is None:
            raise InconsistentCharacterData(
                "no exponent assignment matches factor %s" % source.poly_str(p)
            )
        factor_exps[p] = sol[0]
    prime_exps: dict[int, tuple] = {}
    for prime in primes:
        rhs = [dict(value.unit.powers).get(prime, Fraction(0)) for value in charmap.values]
        sol = solve_rational(system, rhs)
        if sol is None:
            raise InconsistentCharacterData(
                "no exponent assignment matches the scalar prime %d" % prime
            )
        prime_exps[prime] = sol[0]
    signs = [0] * len(free_indices)
    if any(value.unit.sign < 0 for value in charmap.values):
        bits = _solve_mod2(
            [list(row) for row in system.entries],
            [0 if value.unit.sign > 0 else 1 for value in charmap.values],
            len(free_indices),
        )
        if bits is None:
            raise InconsistentCharacterData(
                "character value signs cannot be matched by real scalars"
            )
        signs = bits

    images: list[FactoredSection] = []
    for i in range(target.nvars):
        if i in charmap.sigma_indices:
            images.append(FactoredSection.zero(source.nvars))
            continue
        k = free_indices.index(i)
        unit = RadicalScalar.make(
            -1 if signs[k] else 1,
            [(prime, prime_exps[prime][k]) for prime in primes],
        )
        images.append(
            FactoredSection.from_factors(
                source.nvars,
                [(p, factor_exps[p][k]) for p in pool],
                unit=unit,
            )
        )
    return CoxDescription(source, target, images)


# ---------------------------------------------------------------------------
# Twisting and completion


def twist_description(
    d: CoxDescription, f: MPoly, delta: Sequence
) -> CoxDescription:
    """Multiply image i by f^delta_i; requires the weighted ray projections
    of delta to cancel, which keeps all character pullbacks unchanged."""
    delta = [Fraction(x) for x in delta]
    if len(delta) != d.target.nvars:
        raise ValueError("one twist exponent per target variable required")
    L = ray_projection_map(d.star)
    image = [
        sum((delta[i] * L[r, i] for i in range(L.cols)), Fraction(0))
        for r in range(L.rows)
    ]
    if any(image):
        raise NotInKernel("twist vector projects to %s" % (image,))
    images = []
    for i, img in enumerate(d.images):
        if img.is_zero or delta[i] == 0:
            images.append(img)
        else:
            images.append(
                section_mul(
                    img,
                    FactoredSection.from_factors(d.source.nvars, [(f, delta[i])]),
                )
            )
    return CoxDescription(d.source, d.target, images)


def candidate_divisors(d: CoxDescription) -> list[MPoly]:
    """Stored factors across all images, deduplicated, in canonical order."""
    seen = []
    for img in d.images:
        if img.is_zero:
            continue
        for p in img.factor_polys():
            if p not in seen:
                seen.append(p)
    seen.sort(key=lambda p: p.sort_key())
    return seen


class DivisorStatus(enum.Enum):
    AGREES = "agrees"
    NON_REGULAR_MAP_LOCUS = "non_regular_map_locus"
    NEEDS_MODIFICATION = "needs_modification"


@dataclass(frozen=True)
class DivisorDiagnosis:
    """Comparison of a description with the underlying map along one
    irreducible divisor of the source."""

    f: MPoly
    mu: tuple[Fraction, ...]
    L_mu: tuple[int, ...]
    status: DivisorStatus
    tau_indices: Optional[frozenset[int]] = None
    tau_y: Optional[frozenset[int]] = None
    mu_prime: Optional[tuple[Fraction, ...]] = None


def divisor_status(d: CoxDescription, f: MPoly) -> DivisorDiagnosis:
    """Diagnose the description along the divisor of an irreducible f.

    The vanishing orders of the images push forward along the ray
    projection; the map is undefined on the divisor when that projection
    leaves the star fan's support, the description already matches the map
    when the orders are nonnegative and supported inside one maximal cone,
    and otherwise a twist supported on a cone over the projection repairs
    it.
    """
    validate_description(d)
    _, prim = f.content_and_primitive()
    if prim.is_constant:
        raise ValueError("divisors come from non-constant polynomials")
    n = d.target.nvars
    mu = tuple(
        Fraction(0) if i in d.zero_set else d.images[i].exponent_of(prim)
        for i in range(n)
    )
    star = d.star
    L = ray_projection_map(star)
    l_mu = [
        sum((mu[i] * L[r, i] for i in range(n)), Fraction(0)) for r in range(L.rows)
    ]
    if any(x.denominator != 1 for x in l_mu):
        raise NonIntegralL(
            "orders %s project to the non-lattice point %s" % (mu, l_mu)
        )
    l_mu = tuple(int(x) for x in l_mu)
    if not star.support_contains(l_mu):
        return DivisorDiagnosis(prim, mu, l_mu, DivisorStatus.NON_REGULAR_MAP_LOCUS)
    vanishing = d.zero_set | {i for i in range(n) if mu[i] > 0}
    if all(x >= 0 for x in mu) and any(
        vanishing <= cone for cone in d.target.fan.max_cones
    ):
        return DivisorDiagnosis(prim, mu, l_mu, DivisorStatus.AGREES)
    tau_indices = star.minimal_image_cone(l_mu)
    assert tau_indices is not None
    tau_gens = star.image_gens(tau_indices)
    candidates = star.cones_with_image(tau_gens)
    assert candidates
    candidates.sort(key=lambda c: (-len(c), tuple(sorted(c))))
    tau_y = candidates[0]
    support = sorted(tau_y)
    columns = IntMatrix.from_rows(
        [[L[r, i] for i in support] for r in range(L.rows)], cols=len(support)
    )
    sol = solve_rational(columns, list(l_mu), nonneg=True)
    assert sol is not None
    mu_prime = [Fraction(0)] * n
    for k, i in enumerate(support):
        mu_prime[i] = sol[0][k]
    return DivisorDiagnosis(
        prim,
        mu,
        l_mu,
        DivisorStatus.NEEDS_MODIFICATION,
        tau_indices,
        tau_y,
        tuple(mu_prime),
    )


def complete_along(d: CoxDescription, diagnosis: DivisorDiagnosis) -> CoxDescription:
    """Apply the repairing twist for one divisor diagnosed as modifiable."""
    if diagnosis.status != DivisorStatus.NEEDS_MODIFICATION:
        raise ValueError("only a needs-modification diagnosis can be applied")
    delta = tuple(a - b for a, b in zip(diagnosis.mu_prime, diagnosis.mu))
    return twist_description(d, diagnosis.f, delta)


@dataclass(frozen=True)
class CompletionEntry:
    f: MPoly
    status: DivisorStatus
    modified: bool
    diagnosis: DivisorDiagnosis


def complete(d: CoxDescription) -> tuple[CoxDescription, tuple[CompletionEntry, ...]]:
    """Repair the description along every stored divisor.

    Iterates over the initial candidate divisors, twisting wherever the
    diagnosis asks for it, until each divisor either agrees or witnesses a
    locus where the map is undefined.  A twist only changes orders along
    its own divisor, so one pass per candidate plus a verification pass is
    a strict bound; exceeding it raises NonTermination.
    """
    candidates = candidate_divisors(d)
    current = d
    triggers: dict[MPoly, DivisorDiagnosis] = {}
    for _ in range(len(candidates) + 1):
        changed = False
        for f in candidates:
            diag = divisor_status(current, f)
            if diag.status == DivisorStatus.NEEDS_MODIFICATION:
                triggers[f] = diag
                current = complete_along(current, diag)
                changed = True
        if not changed:
            break
    else:
        raise NonTermination("completion did not settle within the pass bound")
    entries = []
    for f in candidates:
        diag = divisor_status(current, f)
        assert diag.status != DivisorStatus.NEEDS_MODIFICATION
        entries.append(
            CompletionEntry(f, diag.status, f in triggers, triggers.get(f, diag))
        )
    return current, tuple(entries)


# ---------------------------------------------------------------------------
# Regularity


@dataclass(frozen=True)
class RegularityReport:
    """Where the map described by a complete description fails to be regular.

    ``poles`` lists divisors on which the map is undefined;
    ``non_regular_patterns`` lists the vanishing patterns (sets of stored
    factors) cutting out the loci that land in the target's irrelevant
    locus without being irrelevant upstairs.
    """

    agrees: tuple[MPoly, ...]
    poles: tuple[MPoly, ...]
    patterns_inside_irrelevant: tuple[tuple[MPoly, ...], ...]
    non_regular_patterns: tuple[tuple[MPoly, ...], ...]
    images_polynomial: bool
    is_regular: bool


def regularity_report(d: CoxDescription) -> RegularityReport:
    """Classify candidate divisors and the preimage of the irrelevant locus.

    Requires a complete description.  The preimage analysis works on the
    monomial level: the zero locus of each pulled-back irrelevant monomial
    is the union of its positively occurring factors, and a resulting
    vanishing pattern is harmless exactly when its variable part is
    contained in no maximal cone of the source fan.
    """
    agrees = []
    poles = []
    for f in candidate_divisors(d):
        diag = divisor_status(d, f)
        if diag.status == DivisorStatus.NEEDS_MODIFICATION:
            raise IncompleteDescription(
                "description still disagrees along %s" % d.source.poly_str(f)
            )
        if diag.status == DivisorStatus.AGREES:
            agrees.append(f)
        else:
            poles.append(f)
    images_polynomial = all(
        img.is_zero or all(e > 0 for _, e in img.factors) for img in d.images
    )

    # zero loci of the pulled-back irrelevant monomials, as factor sets
    factor_sets = []
    empty_intersection = False
    for cone in d.target.fan.max_cones:
        outside = [i for i in range(d.target.nvars) if i not in cone]
        if any(i in d.zero_set for i in outside):
            continue  # this monomial pulls back to zero: no constraint
        total: dict[MPoly, Fraction] = {}
        for i in outside:
            for p, e in d.images[i].factors:
                total[p] = total.get(p, Fraction(0)) + e
        positive = [p for p, e in total.items() if e > 0]
        if not positive:
            empty_intersection = True
            break
        factor_sets.append(positive)

    patterns: list[frozenset[MPoly]] = []
    if not empty_intersection:
        for choice in itertools.product(*factor_sets):
            pattern = frozenset(choice)
            if pattern not in patterns:
                patterns.append(pattern)
        patterns = [
            p for p in patterns if not any(q < p for q in patterns)
        ]

    variable_index = {
        MPoly.variable(d.source.nvars, i): i for i in range(d.source.nvars)
    }
    inside = []
    outside_patterns = []
    for pattern in patterns:
        var_part = {variable_index[p] for p in pattern if p in variable_index}
        harmless = not any(
            var_part <= cone for cone in d.source.fan.max_cones
        )
        ordered = tuple(sorted(pattern, key=lambda p: p.sort_key()))
        (inside if harmless else outside_patterns).append(ordered)
    outside_patterns.sort(key=lambda pat: [p.sort_key() for p in pat])
    inside.sort(key=lambda pat: [p.sort_key() for p in pat])
    return RegularityReport(
        tuple(agrees),
        tuple(poles),
        tuple(inside),
        tuple(outside_patterns),
        images_polynomial,
        not poles and images_polynomial and not outside_patterns,
    )
