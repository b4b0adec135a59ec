import random
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gsspace import closure_core as cc
from gsspace import cstar_gss as cs
from gsspace.cases import vanishing_sum
from gsspace.numeric import gq, gq_is_zero, gq_to_complex

M2 = cs.FdAlgebra((2,))
M3 = cs.FdAlgebra((3,))
M2M3 = cs.FdAlgebra((2, 3))
E1, E2 = (1, 0), (0, 1)

seeds = st.integers(0, 2 ** 32 - 1)


def pt(alg, x, y, block=0):
    return cs.canonicalize_point(alg, block, x, y)


def trace_norm(m):
    return float(np.linalg.svd(m, compute_uv=False).sum())


# points and literals -------------------------------------------------------------

def test_scalar_multiples_collapse():
    assert pt(M2, E1, E2) == pt(M2, (2, 0), (0, gq(0, 1)))
    assert pt(M2, E1, E1) != pt(M2, E1, E2)


def test_float_canonical_form_is_unit():
    p = pt(M2, (3.0, 4.0j), (0.0, -2.0))
    assert np.linalg.norm(p.x.array()) == pytest.approx(1.0)
    assert p.x.coords[0].real > 0 and p.x.coords[0].imag == 0
    assert p.y.coords == (0j, 1 + 0j)


def test_zero_vector_rejected():
    with pytest.raises(cs.CStarError):
        pt(M2, (0, 0), E1)


def test_literals():
    alg = cs.FdAlgebra.parse("2+3")
    assert alg.blocks == (2, 3)
    p = cs.parse_point(alg, "(1; 1, 1/2-i, 0; 0, 2i, 1)")
    assert p.block == 1 and p.x.coords[1] == gq("1/2", -1)
    assert p.y.coords == (gq(0), gq(1), gq(0, "-1/2"))
    with pytest.raises(cs.CStarError):
        cs.FdAlgebra.parse("2+x")
    with pytest.raises(cs.CStarError):
        cs.parse_point(alg, "(2; 1; 1)")


# functionals ------------------------------------------------------------------------

def test_functional_matrix_diagonal():
    assert cs.functional_matrix(M2, pt(M2, E1, E1)).array().tolist() == [[1, 0], [0, 0]]


def test_functional_matrix_position_from_evaluation_identity():
    p = pt(M2, E1, E2)
    assert cs.functional_matrix(M2, p).array().tolist() == [[0, 1], [0, 0]]
    # ⟨A e₁, e₂⟩ picks the (2, 1) entry of A
    for i in range(2):
        for j in range(2):
            unit = np.zeros((2, 2))
            unit[i, j] = 1
            assert cs.evaluate(M2, p, [unit]) == (1 if (i, j) == (1, 0) else 0)


@given(seeds)
def test_evaluation_identity(seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=3) + 1j * rng.normal(size=3)
    y = rng.normal(size=3) + 1j * rng.normal(size=3)
    p = pt(M2M3, tuple(x), tuple(y), block=1)
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    xu, yu = p.x.unit(), p.y.unit()
    assert cs.evaluate(M2M3, p, [np.zeros((2, 2)), a]) == pytest.approx(np.vdot(yu, a @ xu))
    assert trace_norm(cs.functional_matrix(M2M3, p).array()) == pytest.approx(1.0)


@given(seeds)
def test_rank_one_functionals_are_extreme(seed):
    """Midpoint test on the trace-norm ball of M₂."""
    rng = np.random.default_rng(seed)
    x, y = rng.normal(size=2) + 1j * rng.normal(size=2), rng.normal(size=2) + 1j * rng.normal(size=2)
    m = cs.functional_matrix(M2, pt(M2, tuple(x), tuple(y))).array()
    for _ in range(30):
        h = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        h /= np.linalg.norm(h)
        assert max(trace_norm(m + 1e-3 * h), trace_norm(m - 1e-3 * h)) > 1 + 1e-9
    # a rank-two element of the sphere is a midpoint
    mid = np.diag([0.5, 0.5])
    assert trace_norm(mid + np.diag([0.5, -0.5])) == pytest.approx(1.0)
    assert trace_norm(mid - np.diag([0.5, -0.5])) == pytest.approx(1.0)


# closure ------------------------------------------------------------------------------

def test_membership_two_points():
    s = [pt(M2, E1, E1), pt(M2, E1, E2)]
    assert cs.closure_membership_c(M2, s, pt(M2, E1, (1, 1)))


def test_membership_off_diagonal_defect():
    s = [pt(M2, E1, E1), pt(M2, E2, E2)]
    assert not cs.closure_membership_c(M2, s, pt(M2, (1, 1), (1, 1)))
    sf = [pt(M2, (1.0, 0.0), (1.0, 0.0)), pt(M2, (0.0, 1.0), (0.0, 1.0))]
    verdict = cs.closure_membership_decision(M2, sf, pt(M2, (1.0, 1.0), (1.0, 1.0)))
    assert not verdict.value and verdict.margin > 1e-6


def test_membership_contains_members():
    p = pt(M3, (1, 2, 0), (0, 1, gq(0, 1)))
    assert cs.closure_membership_c(M3, [p], p)


@given(seeds, st.integers(1, 5))
def test_membership_is_a_closure_operator(seed, k):
    rng = random.Random(seed)
    alg = rng.choice([M2, M3, cs.FdAlgebra((2, 2))])
    pool = {n: [cs.random_gaussian_vector(rng, n) for _ in range(2)] for n in (2, 3)}
    pts = []
    while len(pts) < k:
        p = cs.random_point(rng, alg, pool=pool)
        if p not in pts:
            pts.append(p)
    space = cs.induced_space(alg, pts)
    assert cc.check_operator_axioms([space.closure_mask(m) for m in range(1 << space.size)]) == []


# tie relation -------------------------------------------------------------------------

def test_tie_examples():
    assert cs.tie_relation_c(M2, pt(M2, E1, E1), pt(M2, E1, E2), "fast")
    assert cs.tie_relation_c(M2, pt(M2, E1, E1), pt(M2, E1, E2), "bruteforce")
    assert not cs.tie_relation_c(M2, pt(M2, E1, E1), pt(M2, E2, E2), "fast")
    assert not cs.tie_relation_c(M2, pt(M2, E1, E1), pt(M2, E2, E2), "bruteforce")
    p, q = pt(M2M3, E1, E2, 0), pt(M2M3, (1, 0, 0), (0, 0, 1), 1)
    assert not cs.tie_relation_c(M2M3, p, q, "fast")
    assert not cs.tie_relation_c(M2M3, p, q, "bruteforce")


@pytest.mark.parametrize("n", [2, 3, 4])
@given(seed=seeds)
def test_tie_modes_agree(n, seed):
    rng = random.Random(seed)
    alg = cs.FdAlgebra((n,))
    pool = {n: [cs.random_gaussian_vector(rng, n) for _ in range(2)]}
    p, q = cs.random_point(rng, alg, pool=pool), cs.random_point(rng, alg, pool=pool)
    assert cs.tie_fast(p, q) == cs.tie_bruteforce(alg, p, q)


@given(seeds)
def test_tie_modes_agree_in_float(seed):
    rng = random.Random(seed)
    pool = {3: [cs.random_gaussian_vector(rng, 3) for _ in range(2)]}
    p, q = cs.random_point(rng, M3, pool=pool), cs.random_point(rng, M3, pool=pool)
    fp = pt(M3, p.x.array(), p.y.array())
    fq = pt(M3, q.x.array(), q.y.array())
    assert cs.tie_bruteforce(M3, fp, fq) == cs.tie_fast(p, q)


def test_classes_examples():
    sample = [pt(cs.FdAlgebra((2, 2)), E1, E1, 0), pt(cs.FdAlgebra((2, 2)), E1, E2, 0),
              pt(cs.FdAlgebra((2, 2)), E1, E1, 1), pt(cs.FdAlgebra((2, 2)), E2, E1, 1)]
    assert cs.equivalence_classes_c(cs.FdAlgebra((2, 2)), sample) == [[0, 1], [2, 3]]
    assert cs.equivalence_classes_c(M2, [pt(M2, E1, E1)]) == [[0]]


@given(seeds)
def test_single_block_one_class(seed):
    rng = random.Random(seed)
    pts = [cs.random_point(rng, M3) for _ in range(10)]
    assert cs.equivalence_classes_c(M3, pts) == [list(range(10))]


@pytest.mark.parametrize("blocks", [(2,), (1, 1), (2, 2), (1, 3), (2, 3), (3, 3, 1)])
def test_classes_equal_tie_components(blocks):
    alg = cs.FdAlgebra(blocks)
    sample = cs.spanning_sample(alg)
    assert cs.tie_components(sample, cs.tie_fast) == cs.equivalence_classes_c(alg, sample)
    hist = cs.chain_lengths(sample)
    assert not hist or min(hist) == 1


# spectra ---------------------------------------------------------------------------------

def test_spectra_single_block():
    s = cs.spectra(M3)
    assert s.gs.size == 1 and s.ps.size == 1 and s.kernels == ((),)


def test_spectra_two_blocks():
    s = cs.spectra(M2M3)
    assert s.gs.size == 2 and s.kernels == ((1,), (0,))
    assert len(s.gs.closed_masks) == 4 and len(s.ps.closed_masks) == 4
    assert s.quotient_identity and s.discrete


def test_spectra_abelian():
    s = cs.spectra(cs.FdAlgebra((1, 1)))
    assert s.gs.size == 2 and s.discrete
    assert cc.is_topologizable(s.ps) and cc.is_topologizable(s.gs)


# lemma checks -------------------------------------------------------------------------

def test_like_tensor_example():
    xs, ys = [E1, E1], [E2, (0, -1)]
    assert cs.like_tensor(2, xs, ys, "check")
    c = cs.like_tensor(2, xs, ys, "decompose")
    assert [[gq_to_complex(v) for v in row] for row in c] == [[1, 0], [-1, 0]]
    assert cs.like_tensor_residuals(xs, ys, c) == (0, 0)


def test_like_tensor_zero_ys():
    c = cs.like_tensor(2, [E1, E2], [(0, 0), (0, 0)], "decompose")
    assert all(gq_is_zero(v) for row in c for v in row)


def test_like_tensor_rejects_nonvanishing():
    rng = random.Random(3)
    xs = [cs.random_gaussian_vector(rng, 3) for _ in range(3)]
    ys = [cs.random_gaussian_vector(rng, 3) for _ in range(3)]
    assert not cs.like_tensor(3, xs, ys, "check")
    with pytest.raises(cs.CStarError):
        cs.like_tensor(3, xs, ys, "decompose")


@given(seeds, st.booleans())
def test_like_tensor_round_trip(seed, exact):
    n, xs, ys = vanishing_sum(random.Random(seed), exact)
    c = cs.like_tensor(n, xs, ys, "decompose")
    r1, r2 = cs.like_tensor_residuals(xs, ys, c)
    assert (r1, r2) == (0, 0) if exact else max(r1, r2) <= 1e-10


def test_sublemma_identity_and_zero():
    basis = cs.sublemma_solve([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert len(basis) == 1
    assert cs.proportionality_residual(np.array([[gq_to_complex(v) for v in r] for r in basis[0]]), np.eye(3)) == 0
    assert cs.sublemma_solve([[0, 0, 0], [0, 0, 0], [0, 0, 0]]) == []


@given(seeds, st.sampled_from([2, 3, 4]))
def test_sublemma_one_dimensional(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    if seed % 2:
        a = np.outer(a[0], a[1])  # rank one
    basis = cs.sublemma_solve(a)
    assert basis.shape == (1, n, n)
    assert cs.proportionality_residual(basis[0], a) <= 1e-8


def test_involutions():
    p = pt(M2, E1, E2)
    assert cs.involutions(p, "adjoint") == pt(M2, E2, E1)
    assert cs.involutions(cs.involutions(p, "adjoint"), "adjoint") == p
    assert cs.involutions(p, "polar") == pt(M2, E1, E1)


@given(seeds)
def test_adjoint_preserves_closure(seed):
    rng = random.Random(seed)
    s = [cs.random_point(rng, M3) for _ in range(rng.randint(1, 3))]
    p = cs.random_point(rng, M3)
    adj = [cs.involutions(q, "adjoint") for q in s]
    assert cs.closure_membership_c(M3, s, p) == cs.closure_membership_c(M3, adj, cs.involutions(p, "adjoint"))
    assert cs.involutions(cs.involutions(p, "adjoint"), "adjoint") == p


# semilinear maps ------------------------------------------------------------------------

def test_phi_identity_and_scaling():
    ident = cs.SemilinearMap([[1, 0], [0, 1]])
    phi = cs.phi_from_pair(ident, ident, M2, M2)
    assert phi(pt(M2, E1, (1, 1))) == pt(M2, E1, (1, 1))
    d = cs.SemilinearMap([[1, 0], [0, 2]])
    assert cs.phi_from_pair(d, d, M2, M2)(pt(M2, E1, E2)) == pt(M2, E1, E2)


def test_phi_conjugation():
    ident = cs.SemilinearMap([[1, 0], [0, 1]], "conjugation")
    phi = cs.phi_from_pair(ident, ident, M2, M2)
    p, q = pt(M2, (1, gq(0, 1)), E1), pt(M2, (1, gq(0, 1)), E2)
    assert phi(p) == pt(M2, (1, gq(0, -1)), E1)
    assert cs.tie_fast(phi(p), phi(q))


def test_phi_rejects_mismatch():
    with pytest.raises(cs.CStarError):
        cs.phi_from_pair(cs.SemilinearMap([[1, 0], [0, 1]]), cs.SemilinearMap([[1, 0], [0, 1]], "conjugation"),
                         M2, M2)
    with pytest.raises(cs.CStarError):
        cs.SemilinearMap([[1, 1], [1, 1]])


@given(seeds, st.sampled_from(["identity", "conjugation"]))
def test_phi_preserves_tie_and_closure(seed, sigma):
    rng = random.Random(seed)
    u = cs.SemilinearMap(cs.random_invertible(rng, 3), sigma)
    v = cs.SemilinearMap(cs.random_invertible(rng, 3), sigma)
    phi = cs.phi_from_pair(u, v, M3, M3)
    pool = {3: [cs.random_gaussian_vector(rng, 3) for _ in range(2)]}
    pts = [cs.random_point(rng, M3, pool=pool) for _ in range(5)]
    for p, q in combinations(pts, 2):
        assert cs.tie_fast(p, q) == cs.tie_fast(phi(p), phi(q))
    s, p = pts[:2], pts[2]
    assert cs.closure_membership_c(M3, s, p) == cs.closure_membership_c(M3, [phi(q) for q in s], phi(p))


# R-sets ------------------------------------------------------------------------------------

def test_r_set_examples():
    sample = [pt(M2, E1, E1), pt(M2, E1, E2), pt(M2, E1, (1, 1))]
    res = cs.maximal_r_sets(M2, sample)
    assert [(r.kind, r.members) for r in res.sets] == [("x", (0, 1, 2))]
    sample.append(pt(M2, E2, E1))
    res = cs.maximal_r_sets(M2, sample)
    kinds = {r.members: r.kind for r in res.sets}
    assert kinds[(0, 1, 2)] == "x" and kinds[(0, 3)] == "y"
    assert res.all_typed
    assert any(o == 3 and sample[m] == pt(M2, E1, E2) for _, o, m in res.witnesses)
    single = cs.maximal_r_sets(M2, [pt(M2, E1, E1)])
    assert single.sets[0].kind == "both"


@given(seeds)
def test_r_sets_always_typed(seed):
    rng = random.Random(seed)
    pool = {3: [cs.random_gaussian_vector(rng, 3) for _ in range(3)]}
    sample = list({cs.random_point(rng, M3, pool=pool) for _ in range(10)})
    assert cs.maximal_r_sets(M3, sample).all_typed


# reconstruction ------------------------------------------------------------------------------

def _diag(vals):
    return [[v if i == j else 0 for j in range(len(vals))] for i, v in enumerate(vals)]


def test_reconstruct_identity():
    ident = cs.SemilinearMap(_diag([1, 1, 1]))
    rec = cs.reconstruct_pair(cs.phi_from_pair(ident, ident, M3, M3), 3)
    assert not rec.flipped and rec.sigma == "identity"
    assert cs.exactly_proportional(rec.u, ident) and cs.exactly_proportional(rec.v, ident)


def test_reconstruct_conjugation_diag():
    u = cs.SemilinearMap(_diag([1, 2, 3]), "conjugation")
    v = cs.SemilinearMap(_diag([1, 1, 1]), "conjugation")
    rec = cs.reconstruct_pair(cs.phi_from_pair(u, v, M3, M3), 3)
    assert rec.sigma == "conjugation" and rec.probes_checked >= 50
    assert cs.exactly_proportional(rec.u, u) and cs.exactly_proportional(rec.v, v)


def test_reconstruct_flip():
    u = cs.SemilinearMap(_diag([1, 2, 3]))
    v = cs.SemilinearMap([[1, 1, 0], [0, 1, 0], [0, 0, 1]])
    phi = cs.adjoint_after(cs.phi_from_pair(u, v, M3, M3))
    rec = cs.reconstruct_pair(phi, 3)
    assert rec.flipped
    assert cs.exactly_proportional(rec.u, u) and cs.exactly_proportional(rec.v, v)


def test_reconstruct_rejects_non_preserver():
    def scramble(p):
        return pt(M3, p.x.coords, p.x.coords)

    with pytest.raises(cs.ReconstructionError):
        cs.reconstruct_pair(scramble, 3)


@given(seeds, st.booleans())
def test_reconstruct_float_round_trip(seed, flip):
    rng = random.Random(seed)
    sigma = rng.choice(["identity", "conjugation"])
    u = cs.SemilinearMap(cs.random_invertible(rng, 4, exact=False), sigma)
    v = cs.SemilinearMap(cs.random_invertible(rng, 4, exact=False), sigma)
    phi = cs.phi_from_pair(u, v, cs.FdAlgebra((4,)), cs.FdAlgebra((4,)))
    if flip:
        phi = cs.adjoint_after(phi)
    rec = cs.reconstruct_pair(phi, 4, exact=False, seed=seed)
    assert rec.flipped == flip and rec.sigma == sigma
    assert max(cs.scalar_residual(rec.u, u), cs.scalar_residual(rec.v, v)) <= 1e-6


# classification -------------------------------------------------------------------------------

@pytest.mark.parametrize("blocks,block,dim", [((3,), 0, 3), ((1,), 0, 1), ((2, 5), 1, 5)])
def test_dimension_of_class(blocks, block, dim):
    assert cs.dimension_of_class(cs.FdAlgebra(blocks), block) == dim


@pytest.mark.parametrize("a,b,iso", [((2, 3), (3, 2), True), ((2, 2), (4,), False), ((1, 1, 1), (1, 2), False)])
def test_classify(a, b, iso):
    res = cs.classify_algebra(cs.FdAlgebra(a), cs.FdAlgebra(b))
    assert res.isomorphic == iso
    assert res.ccr and res.discrete_primitive_spectrum
