import math
import random
from fractions import Fraction
from itertools import combinations, permutations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gsspace import banach_gss as bg
from gsspace import closure_core as cc
from gsspace.cases import random_torus_pair
from gsspace.numeric import IndeterminateError

F = Fraction


def mixed_dual_norm(f):
    a, b, c = (abs(x) for x in f)
    return math.hypot(a + b, c)


def midpoint_extreme(f, rng, eps=1e-3):
    """Independent certificate: no direction keeps both f ± eps·h inside the dual ball."""
    f = np.asarray(f, dtype=float) / mixed_dual_norm(f)
    dirs = [np.eye(3)[i] for i in range(3)]
    dirs += [np.array([s, t, 0.0]) for s in (1, -1) for t in (1, -1)]
    dirs += [np.array([rng.gauss(0, 1) for _ in range(3)]) for _ in range(60)]
    for h in dirs:
        h = h / np.linalg.norm(h)
        worst = max(mixed_dual_norm(f + eps * h), mixed_dual_norm(f - eps * h))
        if worst <= 1 + 1e-12:
            return False
    return True


def torus_tie_by_circles(u, v):
    """Independent float oracle for complex ℓ₁: look for α, β ≠ 0 with |α + β rₖ| = 1 for all ratios.

    With |β| = t fixed, α must lie on every unit circle centred at -β rₖ.
    """
    r = np.asarray(v.to_complex()) / np.asarray(u.to_complex())
    distinct = []
    for z in r:
        if all(abs(z - w) > 1e-9 for w in distinct):
            distinct.append(z)
    if len(distinct) == 1:
        return True
    beta = 0.5
    c1, c2 = -beta * distinct[0], -beta * distinct[1]
    d = abs(c2 - c1)
    mid = (c1 + c2) / 2
    h = math.sqrt(max(1 - (d / 2) ** 2, 0.0))
    normal = 1j * (c2 - c1) / d
    for alpha in (mid + h * normal, mid - h * normal):
        if all(abs(abs(alpha + beta * z) - 1) < 1e-9 for z in distinct):
            return True
    return False


# points and models -------------------------------------------------------------

def test_canonical_point():
    p = bg.make_point([-2, 4, 0])
    assert p.functional == (1, -2, 0)
    assert bg.make_point([3, -6, 0]) == p
    with pytest.raises(bg.NormModelError):
        bg.make_point([0, 0])


@given(st.lists(st.integers(-5, 5), min_size=2, max_size=4), st.integers(-4, 4).filter(bool))
def test_canonical_point_idempotent_and_scale_free(coords, k):
    if not any(coords):
        return
    p = bg.make_point(coords)
    assert bg.make_point(p.functional) == p
    assert bg.make_point([k * c for c in coords]) == p


def test_model_validation():
    with pytest.raises(bg.NormModelError):
        bg.polyhedral([[1, 0], [0, 1]])
    with pytest.raises(bg.NormModelError):
        bg.ell1(1)


@pytest.mark.parametrize("model,count", [
    (bg.ell1_polyhedral(2), 2),
    (bg.ell1_polyhedral(3), 4),
    (bg.ell1_polyhedral(4), 8),
    (bg.ellinf_polyhedral(2), 2),
])
def test_polyhedral_point_counts(model, count):
    assert len(bg.build_gss_polyhedral(model)) == count


def test_emitted_points_have_unit_dual_norm():
    model = bg.ell1(4)
    for p in bg.sign_vector_points(4):
        assert model.is_extreme(p)
        assert model.dual_norm(model.unit(p)) == pytest.approx(1.0)
    mixed = bg.mixed3d()
    for name in bg.MIXED3D_FUNCTIONALS:
        p = bg.mixed3d_point(name)
        assert mixed.is_extreme(p)
        assert mixed.dual_norm(mixed.unit(p)) == pytest.approx(1.0)


# closure membership --------------------------------------------------------------

def test_membership_contains_members():
    pts = bg.sign_vector_points(3)
    assert bg.closure_membership_b(bg.ell1(3), pts[:2], pts[0])


def test_membership_ell1_three():
    s = [bg.make_point([1, 1, 1]), bg.make_point([1, 1, -1])]
    assert not bg.closure_membership_b(bg.ell1(3), s, bg.make_point([1, -1, 1]))


def test_membership_mixed3d_witness():
    s = [bg.mixed3d_point("f1"), bg.mixed3d_point("e")]
    assert bg.closure_membership_b(bg.mixed3d(), s, bg.mixed3d_point("f3"))


def test_float_membership_carries_margin():
    model = bg.mixed3d()
    s = [bg.make_point([1.0, 0.0, 0.0]), bg.make_point([0.0, 0.0, 1.0])]
    verdict = bg.closure_membership_decision(model, s, bg.make_point([1.0, 0.0, 1.0]))
    assert verdict.value and verdict.margin > 1e-6
    with pytest.raises(IndeterminateError):
        bg.closure_membership_decision(model, s, bg.make_point([1.0, 1e-8, 1.0]))


@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 6))
def test_membership_is_a_closure_operator(seed, k):
    rng = random.Random(seed)
    pts = rng.sample(bg.sign_vector_points(4), k)
    space = bg.induced_space(bg.ell1(4), pts)
    table = [space.closure_mask(m) for m in range(1 << space.size)]
    assert cc.check_operator_axioms(table) == []


# pair oracles --------------------------------------------------------------------

@pytest.mark.parametrize("n", [2, 3, 4])
def test_real_ell1_pairs_closed(n):
    model = bg.ell1(n)
    pts = bg.sign_vector_points(n)
    assert all(bg.pair_closed_bruteforce(model, p, q) for p, q in combinations(pts, 2))
    _, classes = cc.equivalence_structure(bg.induced_space(model, pts))
    assert all(len(c) == 1 for c in classes)


def test_mixed3d_pairs():
    model = bg.mixed3d()
    f1, f2, e = (bg.mixed3d_point(k) for k in ("f1", "f2", "e"))
    verdict = bg.pair_closed_verdict(model, f1, e)
    assert not verdict.closed
    assert verdict.witness == bg.mixed3d_point("f3")
    assert bg.pair_closed_bruteforce(model, f1, f2)


def test_mixed3d_extremality_certified_by_midpoints():
    rng = random.Random(7)
    model = bg.mixed3d()
    for _ in range(300):
        f = [rng.choice([0, 0, rng.randint(-4, 4)]) for _ in range(2)] + [rng.randint(-4, 4)]
        if not any(f):
            continue
        assert bool(model.is_extreme(bg.make_point(f))) == midpoint_extreme(f, rng)


def test_not_transitive_case_study():
    study = bg.not_transitive_case_study()
    assert study.passed
    assert study.tie("f1", "e") and study.tie("e", "f2")
    assert study.pair_closed("f1", "f2")
    assert study.sim("f1", "f2")


def test_dual_face_singleton_margin():
    verdict = bg.mixed3d_dual_face_singleton((1, 0, 1))
    assert verdict.value and verdict.margin > 1e-6


# complex ℓ₁ ----------------------------------------------------------------------

def test_ratio_two_values_example():
    u = bg.TorusPoint.exact([0, 0, 0])
    v = bg.TorusPoint.exact([0, 0, F(1, 2)])
    res = bg.ell1_complex_tie(u, v)
    assert res.tie and res.ratio_count == 2
    assert np.allclose(res.witness.to_complex(), [1, 1, -1j])
    assert bg.torus_in_span([u, v], res.witness)


def test_ratio_three_values_example():
    u = bg.TorusPoint.exact([0, 0, 0])
    v = bg.TorusPoint.exact([0, F(1, 4), F(1, 2)])
    assert not bg.ell1_complex_tie(u, v).tie
    assert bg.pair_closed_bruteforce(bg.ell1(3, "complex"), u, v)


def test_equal_points_tied():
    u = bg.TorusPoint.exact([0, F(1, 3)])
    assert bg.ell1_complex_tie(u, u).tie


@given(st.integers(0, 2 ** 32 - 1))
def test_ratio_criterion_matches_circle_oracle(seed):
    rng = random.Random(seed)
    u, v = random_torus_pair(rng, rng.choice([2, 3, 4]))
    assert bg.ell1_complex_tie(u, v).tie == torus_tie_by_circles(u, v)


@pytest.mark.parametrize("seed", range(12))
def test_ratio_criterion_matches_span_oracle(seed):
    rng = random.Random(seed)
    u, v = random_torus_pair(rng, rng.choice([2, 3]))
    tie = bg.ell1_complex_tie(u, v).tie
    assert tie == (not bg.pair_closed_bruteforce(bg.ell1(len(u), "complex"), u, v))
    fu, fv = bg.TorusPoint.floats(u.to_complex()), bg.TorusPoint.floats(v.to_complex())
    assert bg.ell1_complex_tie(fu, fv).tie == tie


# isometries -------------------------------------------------------------------------

def test_identity_isometry():
    model = bg.ell1(2)
    table = bg.induced_map_from_isometry([[1, 0], [0, 1]], model, model)
    assert all(k == v for k, v in table.items())


def test_sign_flip_swaps_points():
    model = bg.ell1(2)
    table = bg.induced_map_from_isometry([[1, 0], [0, -1]], model, model)
    a, b = bg.make_point([1, 1]), bg.make_point([1, -1])
    assert table[a] == b and table[b] == a


def test_permutation_permutes_points():
    model = bg.ell1(3)
    t = [[0, 1, 0], [0, 0, 1], [1, 0, 0]]
    table = bg.induced_map_from_isometry(t, model, model)
    assert sorted(map(str, table.values())) == sorted(map(str, bg.sign_vector_points(3)))


def test_non_isometry_rejected():
    model = bg.ell1(2)
    with pytest.raises(bg.NormModelError):
        bg.induced_map_from_isometry([[2, 0], [0, 1]], model, model)


@pytest.mark.parametrize("perm", list(permutations(range(3))))
def test_isometry_gives_homeomorphism(perm):
    model = bg.ell1(3)
    pts = bg.sign_vector_points(3)
    space = bg.induced_space(model, pts)
    t = [[-1 if (i == 0 and perm[i] == j) else (1 if perm[i] == j else 0) for j in range(3)] for i in range(3)]
    table = bg.induced_map_from_isometry(t, model, model)
    fmap = cc.SpaceMap(space, space, table)
    assert cc.find_homeomorphism(space, space, check=fmap) is not None
    for k in (1, 2):
        for s in combinations(pts, k):
            for p in pts:
                assert bg.closure_membership_b(model, s, p) == bg.closure_membership_b(
                    model, [table[q] for q in s], table[p])
