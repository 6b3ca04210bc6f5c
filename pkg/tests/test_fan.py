from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from coxmap.fan import (
    Cone,
    ConeNotInFan,
    Fan,
    cone_contains,
    irrelevant_monomials,
    minimal_cone_containing,
    orthogonal_character_basis,
    ray_projection_map,
    star_fan,
    validate_fan,
)
from varieties import (
    affine_line,
    product_of_lines,
    projective_line,
    projective_plane,
    quarter_plane_quotient,
)


def test_validate_standard_fans():
    for fan in (projective_line(), projective_plane(), product_of_lines(),
                affine_line(), quarter_plane_quotient()):
        assert validate_fan(fan) == []


def test_validate_rejects_imprimitive_ray():
    fan = Fan.make(2, [(2, 0), (0, 1)], [{0, 1}])
    problems = validate_fan(fan)
    assert any("not primitive" in p for p in problems)


def test_validate_rejects_zero_and_duplicate_rays():
    assert any("zero" in p for p in validate_fan(Fan.make(2, [(0, 0)], [{0}])))
    dup = Fan.make(1, [(1,), (1,)], [{0}, {1}])
    assert any("coincide" in p for p in validate_fan(dup))


def test_validate_rejects_non_convex_cone():
    fan = Fan.make(1, [(1,), (-1,)], [{0, 1}])
    assert any("strongly convex" in p for p in validate_fan(fan))


def test_validate_rejects_overlapping_cones():
    # two 2-cones overlapping in a 2-dimensional region share no common face
    fan = Fan.make(2, [(1, 0), (0, 1), (1, 1), (-1, 1)], [{0, 1}, {2, 3}])
    problems = validate_fan(fan)
    assert any("outside their common face" in p for p in problems)


def test_validate_rejects_nested_cones():
    fan = Fan.make(2, [(1, 0), (0, 1)], [{0, 1}, {0}])
    assert any("nested" in p for p in validate_fan(fan))


def test_cone_membership():
    fan = projective_plane()
    cone01 = fan.cone({0, 1})
    assert cone_contains(cone01, (2, 3))
    assert cone_contains(cone01, (0, 0))
    assert not cone_contains(cone01, (-1, 0))
    ray2 = fan.cone({2})
    assert cone_contains(ray2, (-2, -2))
    assert not cone_contains(ray2, (-2, -1))
    assert cone_contains(cone01, (Fraction(1, 2), Fraction(1, 3)))


def test_cone_requires_face():
    fan = projective_plane()
    with pytest.raises(ConeNotInFan):
        fan.cone({0, 1, 2})


def test_minimal_cone_containing():
    fan = projective_plane()
    assert minimal_cone_containing(fan, (1, 1)).indices == {0, 1}
    assert minimal_cone_containing(fan, (3, 0)).indices == {0}
    assert minimal_cone_containing(fan, (0, 0)).indices == frozenset()
    affine = quarter_plane_quotient()
    assert minimal_cone_containing(affine, (-1, 0)) is None
    assert minimal_cone_containing(affine, (2, 1)).indices == {0, 1}
    assert minimal_cone_containing(affine, (1, 2)).indices == {1}


def test_minimal_cone_is_common_face():
    # brute force: the minimal cone's rays lie in every maximal cone containing v
    rng = random.Random(23)
    fans = [projective_plane(), product_of_lines(), quarter_plane_quotient()]
    for _ in range(100):
        fan = rng.choice(fans)
        v = (rng.randint(-4, 4), rng.randint(-4, 4))
        cone = minimal_cone_containing(fan, v)
        containing = [c for c in fan.max_cones
                      if cone_contains(Cone(fan, c), v)]
        if cone is None:
            assert not containing
        else:
            assert containing
            for c in containing:
                assert cone.indices <= c


def test_face_subsets_of_simplicial_cones():
    fan = projective_plane()
    for cone in fan.max_cones:
        for r in range(len(cone) + 1):
            for sub in itertools.combinations(sorted(cone), r):
                assert fan.is_face(frozenset(sub))
    assert not fan.is_face(frozenset({0, 1, 2}))


def test_star_fan_of_ray_in_projective_plane():
    fan = projective_plane()
    sigma = fan.cone({2})
    star = star_fan(fan, sigma)
    assert star.lattice.rank == 1
    p0 = star.lattice.project(fan.rays[0])
    p1 = star.lattice.project(fan.rays[1])
    p2 = star.lattice.project(fan.rays[2])
    assert p2 == (0,)
    assert abs(p0[0]) == 1 and p1[0] == -p0[0]
    # entries: the two maximal cones containing ray 2, images are opposite rays
    assert sorted(sorted(ix) for ix, _ in star.entries) == [[0, 2], [1, 2]]
    assert star.support_contains((5,)) and star.support_contains((-5,))


def test_star_fan_zero_cone_is_identity():
    fan = projective_line()
    star = star_fan(fan, fan.cone(set()))
    assert star.lattice.projection.entries == ((1,),)
    L = ray_projection_map(star)
    assert L.entries == ((1, -1),)


def test_star_fan_full_cone_gives_point():
    fan = quarter_plane_quotient()
    star = star_fan(fan, fan.cone({0, 1}))
    assert star.lattice.rank == 0
    assert star.support_contains(())
    assert star.minimal_image_cone(()) == frozenset({0, 1})


def test_star_fan_minimal_image_cone():
    fan = projective_plane()
    star = star_fan(fan, fan.cone(set()))
    assert star.minimal_image_cone((0, 0)) == frozenset()
    assert star.minimal_image_cone((-1, 0)) == {1, 2}
    assert star.minimal_image_cone((0, 1)) == {1}


def test_star_fan_cones_with_image():
    fan = projective_line()
    star = star_fan(fan, fan.cone(set()))
    assert star.cones_with_image([]) == [frozenset()]
    assert star.cones_with_image([(-1,)]) == [frozenset({1})]


def test_ray_projection_map_for_ray_star():
    fan = projective_plane()
    star = star_fan(fan, fan.cone({2}))
    L = ray_projection_map(star)
    assert L.rows == 1 and L.cols == 3
    assert L[0, 2] == 0 and abs(L[0, 0]) == 1 and L[0, 1] == -L[0, 0]


def test_orthogonal_character_basis():
    fan = projective_plane()
    assert orthogonal_character_basis(fan, fan.cone({2})) == ((1, -1),)
    assert orthogonal_character_basis(fan, fan.cone(set())) == ((1, 0), (0, 1))
    assert orthogonal_character_basis(fan, fan.cone({0, 1})) == ()


def test_irrelevant_monomials():
    fan = projective_plane()
    mono = irrelevant_monomials(fan)
    assert sorted(mono) == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]
    assert irrelevant_monomials(affine_line()) == ((0,),)
    assert sorted(irrelevant_monomials(product_of_lines())) == [
        (0, 1, 0, 1), (0, 1, 1, 0), (1, 0, 0, 1), (1, 0, 1, 0)]


def test_irrelevant_monomials_match_vanishing_patterns():
    # a 0/1 point kills every irrelevant monomial exactly when its zero set
    # is contained in no maximal cone
    rng = random.Random(29)
    fans = [projective_plane(), product_of_lines(), projective_line()]
    for _ in range(100):
        fan = rng.choice(fans)
        point = [rng.randint(0, 1) for _ in range(fan.nrays)]
        zeros = {i for i, x in enumerate(point) if x == 0}
        monos = irrelevant_monomials(fan)
        all_die = all(
            any(e and point[i] == 0 for i, e in enumerate(mono)) for mono in monos
        )
        assert all_die == (not any(zeros <= c for c in fan.max_cones))
