"""Case studies and the property suite behind the command-line harness."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations, permutations

import numpy as np

from . import banach_gss as bg
from . import closure_core as cc
from . import cstar_gss as cs
from .numeric import exact_nullspace, gq, gq_is_zero, gq_to_complex
from .report import Report, RunConfig

CASE_STUDIES = (
    "not-transitive", "ell1-real", "ell1-complex", "fdim-spectra",
    "reconstruction", "sublemma", "like-tensor", "classification",
)


class UnknownCaseError(KeyError):
    pass


def _rng(config: RunConfig, salt: str) -> random.Random:
    return random.Random(f"{config.seed}:{salt}")


def run_case_study(name: str, config: RunConfig) -> Report:
    runners = {
        "not-transitive": _case_not_transitive,
        "ell1-real": _case_ell1_real,
        "ell1-complex": _case_ell1_complex,
        "fdim-spectra": _case_fdim_spectra,
        "reconstruction": _case_reconstruction,
        "sublemma": _case_sublemma,
        "like-tensor": _case_like_tensor,
        "classification": _case_classification,
    }
    if name not in runners:
        raise UnknownCaseError(name)
    report = Report(f"case {name}", config)
    runners[name](report, config)
    return report


# Banach examples ----------------------------------------------------------------

def _case_not_transitive(report: Report, config: RunConfig):
    study = {}

    def build():
        study["s"] = bg.not_transitive_case_study()
        return True

    report.check("mixed3d.build", "three-dimensional counterexample", build)
    if "s" not in study:
        return
    for claim_id, anchor, passed, margin in study["s"].claims:
        report.check(f"mixed3d.{claim_id}", anchor, lambda p=passed, m=margin: (p, m))


def _case_ell1_real(report: Report, config: RunConfig):
    for n in (2, 3, 4):
        model = bg.ell1(n)
        pts = bg.sign_vector_points(n)
        report.check(f"ell1-real.n{n}.count", "one point per sign class",
                     lambda: (len(pts) == 2 ** (n - 1), float("inf"), f"points={len(pts)}"))
        report.check(f"ell1-real.n{n}.pairs-closed", "every distinct pair closed",
                     lambda: all(bg.pair_closed_bruteforce(model, p, q) for p, q in combinations(pts, 2)))
        poly = bg.ell1_polyhedral(n)
        report.check(f"ell1-real.n{n}.vertex-oracle", "vertex enumeration agrees with ratio system",
                     lambda: all(bg.pair_closed_bruteforce(poly, p, q) == bg.pair_closed_bruteforce(model, p, q)
                                 for p, q in combinations(pts, 2)))

        def singleton_classes():
            space = bg.induced_space(model, pts)
            _, classes = cc.equivalence_structure(space)
            return all(len(c) == 1 for c in classes)

        report.check(f"ell1-real.n{n}.singleton-classes", "equivalence is equality", singleton_classes)

        def isometries_homeomorphic():
            space = bg.induced_space(model, pts)
            for perm in permutations(range(n)):
                for signs in ((1,) * n, (-1,) + (1,) * (n - 1)):
                    t = [[signs[i] if perm[i] == j else 0 for j in range(n)] for i in range(n)]
                    table = bg.induced_map_from_isometry(t, model, model)
                    fmap = cc.SpaceMap(space, space, table)
                    if cc.find_homeomorphism(space, space, check=fmap) is None:
                        return False
            return True

        report.check(f"ell1-real.n{n}.isometries", "isometries induce homeomorphisms", isometries_homeomorphic)


def random_torus_pair(rng: random.Random, n: int):
    """Random pair of distinct unimodular vectors; about half have at most two ratio values."""
    dens = (2, 3, 4, 6, 8)
    while True:
        u = [Fraction(rng.randrange(d), d) for d in (rng.choice(dens) for _ in range(n))]
        if rng.random() < 0.5:
            a, b = (Fraction(rng.randrange(d), d) for d in (rng.choice(dens), rng.choice(dens)))
            v = [t - (a if rng.random() < 0.5 else b) for t in u]
        else:
            v = [Fraction(rng.randrange(d), d) for d in (rng.choice(dens) for _ in range(n))]
        up, vp = bg.TorusPoint.exact(u), bg.TorusPoint.exact(v)
        if not bg.torus_same_point(up, vp):
            return up, vp


def _case_ell1_complex(report: Report, config: RunConfig):
    model3 = bg.ell1(3, "complex")
    u, v = bg.TorusPoint.exact([0, 0, 0]), bg.TorusPoint.exact([0, 0, Fraction(1, 2)])
    report.check("ell1-complex.example.two-ratios", "two ratio values give a tie with a rotated witness",
                 lambda: (lambda r: r.tie and r.witness == bg.TorusPoint.exact([0, 0, Fraction(3, 4)]))(
                     bg.ell1_complex_tie(u, v)))
    w = bg.TorusPoint.exact([0, Fraction(1, 4), Fraction(1, 2)])
    report.check("ell1-complex.example.three-ratios", "three ratio values give a closed pair",
                 lambda: not bg.ell1_complex_tie(u, w).tie and bg.pair_closed_bruteforce(model3, u, w))
    rng = _rng(config, "ell1-complex")
    pairs = []
    for _ in range(config.complex_pairs):
        n = rng.choice((2, 3, 4))
        pairs.append(random_torus_pair(rng, n))
    if config.mode == "float":
        pairs = [(bg.TorusPoint.floats(p.to_complex()), bg.TorusPoint.floats(q.to_complex())) for p, q in pairs]
    stats = {"ties": 0, "witnesses": 0}

    def agreement():
        bad = 0
        for p, q in pairs:
            model = bg.ell1(len(p), "complex")
            crit = bg.ell1_complex_tie(p, q).tie
            brute = not bg.pair_closed_bruteforce(model, p, q)
            stats["ties"] += crit
            bad += crit != brute
        return bad == 0, float("inf"), f"pairs={len(pairs)} ties={stats['ties']} disagreements={bad}"

    report.check("ell1-complex.criterion-vs-oracle", "ratio criterion agrees with span search", agreement)

    def witnesses():
        bad = 0
        for p, q in pairs:
            res = bg.ell1_complex_tie(p, q)
            if res.ratio_count != 2:
                continue
            stats["witnesses"] += 1
            wpt = res.witness
            inside = bg.torus_in_span([p, q], wpt)
            distinct = not bg.torus_same_point(wpt, p) and not bg.torus_same_point(wpt, q)
            bad += not (inside and distinct)
        return bad == 0, float("inf"), f"witnesses={stats['witnesses']} failures={bad}"

    report.check("ell1-complex.witness", "rotated witness lies in the closure and is new", witnesses)


# C*-algebra studies ---------------------------------------------------------------

def _case_fdim_spectra(report: Report, config: RunConfig):
    alg = cs.FdAlgebra.parse(config.algebra)
    k = len(alg.blocks)
    holder = {}

    def build():
        holder["s"] = cs.spectra(alg)
        return True

    report.check("spectra.build", "class space and primitive-ideal space", build)
    if "s" not in holder:
        return
    s = holder["s"]
    report.check("spectra.gs-size", "one class per block", lambda: s.gs.size == k)
    report.check("spectra.ps-size", "one kernel ideal per block", lambda: s.ps.size == k)
    report.check("spectra.gs-discrete", "class space discrete", lambda: len(s.gs.closed_masks) == 2 ** k)
    report.check("spectra.ps-discrete", "ideal space discrete", lambda: len(s.ps.closed_masks) == 2 ** k)
    report.check("spectra.gamma-bijective", "classes correspond to kernel ideals",
                 lambda: len(set(s.gamma.values())) == k)
    report.check("spectra.quotient-identity", "class closure is the pullback of the ideal closure",
                 lambda: s.quotient_identity)
    report.check("spectra.topologizable", "both spaces topologizable",
                 lambda: cc.is_topologizable(s.gs) and cc.is_topologizable(s.ps))
    report.check("spectra.kernels", "kernel of block k is the sum of the other blocks",
                 lambda: all(set(kern) == set(range(k)) - set(sup) for kern, sup in zip(s.kernels, s.classes)))


def _case_reconstruction(report: Report, config: RunConfig):
    rng = _rng(config, "reconstruction")
    exact = config.mode == "exact"
    stats = {"flip": 0, "sigma": 0, "scale": 0, "worst": 0.0}
    cases = []
    for i in range(config.reconstruction_cases):
        m = 3 if i % 2 == 0 else 4
        sigma = rng.choice(("identity", "conjugation"))
        flip = rng.random() < 0.5
        u = cs.SemilinearMap(cs.random_invertible(rng, m, exact), sigma)
        v = cs.SemilinearMap(cs.random_invertible(rng, m, exact), sigma)
        cases.append((m, sigma, flip, u, v, rng.randrange(2 ** 32)))

    def run():
        for m, sigma, flip, u, v, probe_seed in cases:
            alg = cs.FdAlgebra((m,))
            phi = cs.phi_from_pair(u, v, alg, alg)
            if flip:
                phi = cs.adjoint_after(phi)
            rec = cs.reconstruct_pair(phi, m, exact=exact, seed=probe_seed)
            stats["flip"] += rec.flipped == flip
            stats["sigma"] += rec.sigma == sigma
            res = max(cs.scalar_residual(rec.u, u), cs.scalar_residual(rec.v, v))
            stats["worst"] = max(stats["worst"], res)
            if exact:
                stats["scale"] += cs.exactly_proportional(rec.u, u) and cs.exactly_proportional(rec.v, v)
            else:
                stats["scale"] += res <= 1e-6
        return True

    n = len(cases)
    if not report.check("reconstruction.run", "reconstruction completes on every case", run):
        return
    report.check("reconstruction.flip", "flip recovered", lambda: stats["flip"] == n)
    report.check("reconstruction.sigma", "field automorphism recovered", lambda: stats["sigma"] == n)
    report.check("reconstruction.scalar", "matrices recovered up to scalar",
                 lambda: (stats["scale"] == n, float("inf") if exact else max(1e-6 - stats["worst"], 0.0),
                          f"cases={n}"))


def _case_sublemma(report: Report, config: RunConfig):
    rng = _rng(config, "sublemma")
    exact = config.mode == "exact"
    mats = []
    for _ in range(config.sublemma_cases):
        if exact:
            while True:
                a = [[gq(rng.randint(-2, 2), rng.randint(-2, 2)) for _ in range(3)] for _ in range(3)]
                if any(not gq_is_zero(t) for r in a for t in r):
                    break
        else:
            a = np.array([[complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(3)] for _ in range(3)])
        mats.append(a)
    worst = {"res": 0.0, "dim_bad": 0}

    def run():
        for a in mats:
            basis = cs.sublemma_solve(a, tol=config.tol)
            if len(basis) != 1:
                worst["dim_bad"] += 1
                continue
            arr_a = np.array([[gq_to_complex(t) for t in r] for r in a]) if exact else a
            arr_b = np.array([[gq_to_complex(t) for t in r] for r in basis[0]]) if exact else basis[0]
            worst["res"] = max(worst["res"], cs.proportionality_residual(arr_b, arr_a))
        ok = worst["dim_bad"] == 0 and worst["res"] <= 1e-8
        return ok, 1e-8 - worst["res"] if ok else worst["res"], f"cases={len(mats)} worst={worst['res']:.2e}"

    report.check("sublemma.one-dimensional", "solution space is the span of A", run)
    report.check("sublemma.zero", "zero matrix forces B = 0", lambda: cs.sublemma_solve([[0, 0], [0, 0]]) == [])
    report.check("sublemma.identity", "identity gives scalar matrices",
                 lambda: len(cs.sublemma_solve([[1, 0, 0], [0, 1, 0], [0, 0, 1]])) == 1)


def vanishing_sum(rng: random.Random, exact: bool):
    """Random ``(n, xs, ys)`` with ``Σ xⱼ yⱼ* = 0`` built from the null space of ``[y₁ … y_m]``."""
    n = rng.randint(2, 4)
    m = rng.randint(2, 5)
    r = rng.randint(1, min(n, m - 1))

    def g():
        return gq(rng.randint(-2, 2), rng.randint(-2, 2))

    left = [[g() for _ in range(r)] for _ in range(n)]
    right = [[g() for _ in range(m)] for _ in range(r)]
    ymat = [[sum((left[i][l] * right[l][j] for l in range(r)), gq()) for j in range(m)] for i in range(n)]
    if all(gq_is_zero(t) for row in ymat for t in row):
        ymat[0][0] = gq(1)
    null = exact_nullspace(ymat, m)
    rows = []
    for _ in range(n):
        coeffs = [g() for _ in null]
        z = [sum((c * vec[j] for c, vec in zip(coeffs, null)), gq()) for j in range(m)]
        rows.append([gq(t.x, -t.y) for t in z])  # x rows are conjugates of null vectors
    xs = [tuple(rows[i][j] for i in range(n)) for j in range(m)]
    ys = [tuple(ymat[i][j] for i in range(n)) for j in range(m)]
    if not exact:
        xs = [tuple(gq_to_complex(t) for t in x) for x in xs]
        ys = [tuple(gq_to_complex(t) for t in y) for y in ys]
    return n, xs, ys


def _case_like_tensor(report: Report, config: RunConfig):
    rng = _rng(config, "like-tensor")
    exact = config.mode == "exact"
    cases = [vanishing_sum(rng, exact) for _ in range(config.like_tensor_cases)]
    worst = {"res": 0.0}

    def run():
        bad = 0
        for n, xs, ys in cases:
            if not cs.like_tensor(n, xs, ys, "check"):
                bad += 1
                continue
            c = cs.like_tensor(n, xs, ys, "decompose")
            r1, r2 = cs.like_tensor_residuals(xs, ys, c)
            worst["res"] = max(worst["res"], r1, r2)
        limit = 0.0 if exact else 1e-10
        ok = bad == 0 and worst["res"] <= limit
        return ok, float("inf") if exact else 1e-10 - worst["res"], f"cases={len(cases)} worst={worst['res']:.2e}"

    report.check("like-tensor.round-trip", "decomposition satisfies both identities", run)

    def example():
        xs, ys = [(1, 0), (1, 0)], [(0, 1), (0, -1)]
        c = cs.like_tensor(2, xs, ys, "decompose")
        return cs.like_tensor_residuals(xs, ys, c) == (0, 0)

    report.check("like-tensor.example", "two opposite functionals", example)
    report.check("like-tensor.nonvanishing", "a single functional does not vanish",
                 lambda: not cs.like_tensor(2, [(1, 0)], [(1, 1)], "check"))


def block_multisets(limit: int = 25) -> list:
    """All non-increasing block lists whose matrix dimensions sum to at most ``limit``."""
    out = []

    def grow(prefix, largest, budget):
        if prefix:
            out.append(tuple(prefix))
        for n in range(min(largest, int(budget ** 0.5)), 0, -1):
            grow(prefix + [n], n, budget - n * n)

    grow([], int(limit ** 0.5), limit)
    return sorted(out, key=lambda b: (sum(n * n for n in b), b))


def _case_classification(report: Report, config: RunConfig):
    rng = _rng(config, "classification")
    report.check("classification.2+2-vs-4", "equal total dimension, different fingerprints",
                 lambda: not cs.classify_algebra(cs.FdAlgebra((2, 2)), cs.FdAlgebra((4,))).isomorphic)
    report.check("classification.1+1+1-vs-1+2", "abelian versus non-abelian",
                 lambda: not cs.classify_algebra(cs.FdAlgebra((1, 1, 1)), cs.FdAlgebra((1, 2))).isomorphic)
    report.check("classification.2+3-vs-3+2", "block order is irrelevant",
                 lambda: cs.classify_algebra(cs.FdAlgebra((2, 3)), cs.FdAlgebra((3, 2))).isomorphic)
    multisets = block_multisets(25)
    prints = {}

    def permuted():
        for b in multisets:
            shuffled = list(b)
            rng.shuffle(shuffled)
            fa = cs.fingerprint(cs.FdAlgebra(b))
            fb = cs.fingerprint(cs.FdAlgebra(tuple(shuffled)))
            if fa != fb or fa != tuple(sorted(b)):
                return False
            prints[b] = fa
        return True, float("inf"), f"algebras={len(multisets)}"

    report.check("classification.permutations", "fingerprints ignore block order", permuted)

    def separated():
        if len(prints) != len(multisets):
            return False
        return len(set(prints.values())) == len(multisets)

    report.check("classification.separation", "distinct block multisets have distinct fingerprints", separated)
    report.check("classification.ccr-discrete", "every algebra CCR with discrete primitive spectrum",
                 lambda: all(cs.classify_algebra(cs.FdAlgebra(b), cs.FdAlgebra(b)).discrete_primitive_spectrum
                             for b in multisets if len(b) <= 6))


# property suite ------------------------------------------------------------------

def _fault_tie(p, q):
    """Deliberately wrong fast tie that ignores the second line."""
    if p == q:
        return True
    return p.block == q.block and p.x == q.x


def _closure_table(space: cc.FiniteClosureSpace) -> list:
    return [space.closure_mask(m) for m in range(1 << space.size)]


def _topologizable_by_additivity(space: cc.FiniteClosureSpace) -> bool:
    table = _closure_table(space)
    full = 1 << space.size
    return all(table[a | b] == table[a] | table[b] for a in range(full) for b in range(full))


def transform_identity_holds(space: cc.FiniteClosureSpace) -> bool:
    t = cc.transforms(space)
    _, _, p_op, g_op = cc.class_operators(space)
    g = t.g_space
    for mask in range(1 << g.size):
        chosen = g.labels(mask)
        lhs = g.closure(chosen)
        rhs = t.delta_preimage(t.p_space.closure(t.delta_image(chosen)))
        if lhs != rhs or lhs != g_op(chosen):
            return False
    for mask in range(1 << t.p_space.size):
        chosen = t.p_space.labels(mask)
        if t.p_space.closure(chosen) != p_op(chosen):
            return False
    return True


def transform_separation_holds(space: cc.FiniteClosureSpace) -> bool:
    t = cc.transforms(space)
    if not cc.separation_flags(t.p_space)[0]:
        return False
    g_t0 = cc.separation_flags(t.g_space)[0]
    injective = len(set(t.delta.values())) == len(t.delta)
    homeo = cc.find_homeomorphism(t.g_space, t.p_space,
                                  check=cc.SpaceMap(t.g_space, t.p_space, dict(t.delta))
                                  if injective else None) is not None if injective else \
        cc.find_homeomorphism(t.g_space, t.p_space) is not None
    return g_t0 == injective == homeo


def random_homeomorphic_pair(rng: random.Random, n: int = 5):
    space = cc.random_closure_space(rng, n, density=rng.choice((0.1, 0.2, 0.35)))
    labels = [f"v{i}" for i in range(n)]
    rng.shuffle(labels)
    table = dict(zip(space.ground, labels))
    order = sorted(labels)
    return space, cc.relabel(space, table, order)


def lift_square_commutes(src: cc.FiniteClosureSpace, dst: cc.FiniteClosureSpace) -> bool:
    fmap = cc.find_homeomorphism(src, dst)
    if fmap is None:
        return False
    f_g, f_p = cc.lift_homeomorphism(fmap)
    st, dt = cc.transforms(src), cc.transforms(dst)
    return all(dt.delta[f_g(c)] == f_p(st.delta[c]) for c in st.g_space.ground)


def _tie_preserved(fmap: cc.SpaceMap) -> bool:
    src, dst = fmap.source, fmap.target
    return all(cc.tie(src, a, b) == cc.tie(dst, fmap(a), fmap(b)) for a, b in combinations(src.ground, 2))


def run_property_suite(config: RunConfig) -> Report:
    report = Report("suite", config)
    _suite_closure(report, config)
    _suite_banach(report, config)
    _suite_cstar(report, config)
    return report


def _suite_closure(report: Report, config: RunConfig):
    spaces = [s for n in range(5) for s in cc.all_closure_spaces(n)]

    def axioms():
        for s in spaces:
            table = _closure_table(s)
            if cc.check_operator_axioms(table):
                return False
            if {m for m, c in enumerate(table) if c == m} != set(s.closed_masks):
                return False
        return True, float("inf"), f"spaces={len(spaces)}"

    report.check("closure.axioms.exhaustive", "closure axioms on every space with at most 4 points", axioms)
    rng = _rng(config, "closure5")
    sampled = [cc.random_closure_space(rng, 5, density=rng.choice((0.1, 0.25, 0.4))) for _ in range(60)]
    report.check("closure.axioms.sampled-5", "closure axioms on sampled 5-point spaces",
                 lambda: all(not cc.check_operator_axioms(_closure_table(s)) for s in sampled))
    report.check("closure.topologizable", "union-closed iff closure is additive",
                 lambda: all(cc.is_topologizable(s) == _topologizable_by_additivity(s) for s in spaces + sampled))
    report.check("closure.transforms.identity", "class closure is the pullback of closure-of-class closure",
                 lambda: all(transform_identity_holds(s) for s in spaces))
    report.check("closure.transforms.separation", "closure-of-class space T0; class space T0 iff delta injective",
                 lambda: all(transform_separation_holds(s) for s in spaces))
    pair_rng = _rng(config, "lifts")
    pairs = [random_homeomorphic_pair(pair_rng) for _ in range(config.lift_pairs)]
    report.check("closure.lifts", "lifted maps are homeomorphisms and the square commutes",
                 lambda: (all(lift_square_commutes(a, b) for a, b in pairs), float("inf"), f"pairs={len(pairs)}"))
    report.check("closure.homeomorphism-preserves-tie", "homeomorphisms preserve the tie relation",
                 lambda: all(_tie_preserved(cc.find_homeomorphism(a, b)) for a, b in pairs))

    def subspace_rule():
        for s in spaces:
            for amask in range(1 << s.size):
                sub = cc.subspace(s, s.labels(amask))
                for m in range(1 << sub.size):
                    part = sub.labels(m)
                    if sub.closure(part) != s.closure(part) & s.labels(amask):
                        return False
        return True

    report.check("closure.subspace", "relative closure is the trace of the closure", subspace_rule)


def _suite_banach(report: Report, config: RunConfig):
    rng = _rng(config, "banach")
    model4 = bg.ell1(4)
    pts4 = bg.sign_vector_points(4)
    mixed = bg.mixed3d()
    mixed_pts = [bg.mixed3d_point(k) for k in bg.MIXED3D_FUNCTIONALS] + [bg.make_point((1, 0, 2))]

    def axioms_on(model, pts):
        space = bg.induced_space(model, pts)
        return not cc.check_operator_axioms(_closure_table(space))

    report.check("banach.closure-axioms.ell1", "span closure is a closure operator on sign vectors",
                 lambda: axioms_on(model4, rng.sample(pts4, 6)))
    report.check("banach.closure-axioms.mixed3d", "span closure is a closure operator on mixed3d samples",
                 lambda: axioms_on(mixed, mixed_pts))
    torus = [random_torus_pair(rng, 3)[0] for _ in range(5)]
    report.check("banach.closure-axioms.torus", "span closure is a closure operator on torus samples",
                 lambda: axioms_on(bg.ell1(3, "complex"), torus))
    report.check("banach.extreme-points", "emitted points pass the extremality oracle",
                 lambda: all(model4.is_extreme(p) for p in pts4) and all(mixed.is_extreme(p) for p in mixed_pts))


def _suite_cstar(report: Report, config: RunConfig):
    rng = _rng(config, "cstar")
    fast = _fault_tie if config.inject_fault == "tie-ignores-y" else cs.tie_fast
    exact = config.mode == "exact"
    for n in (2, 3, 4):
        alg = cs.FdAlgebra((n,))
        pool = {n: [cs.random_gaussian_vector(rng, n) for _ in range(3)]}
        pairs = [(cs.random_point(rng, alg, pool=pool), cs.random_point(rng, alg, pool=pool))
                 for _ in range(config.tie_pairs)]
        if not exact:
            pairs = [(_floatify(alg, p), _floatify(alg, q)) for p, q in pairs]

        def agree(pairs=pairs, alg=alg):
            brute = [cs.tie_bruteforce(alg, p, q, tol=config.tol) for p, q in pairs]
            bad = sum(fast(p, q) != b for (p, q), b in zip(pairs, brute))
            ties = sum(brute)
            return bad == 0, float("inf"), f"pairs={len(pairs)} ties={ties} disagreements={bad}"

        report.check(f"cstar.tie-agreement.M{n}", "line-dependence criterion agrees with pencil search", agree)
    mixed = cs.FdAlgebra((2, 3))
    cross = [(cs.random_point(rng, mixed, 0), cs.random_point(rng, mixed, 1)) for _ in range(50)]
    report.check("cstar.tie-agreement.cross-block", "points in different blocks are never tied",
                 lambda: all(not fast(p, q) and not cs.tie_bruteforce(mixed, p, q) for p, q in cross))

    def closure_axioms():
        for _ in range(6):
            alg = cs.FdAlgebra((2, 2)) if rng.random() < 0.5 else cs.FdAlgebra((3,))
            pts = []
            while len(pts) < config.sample_points:
                p = cs.random_point(rng, alg)
                if p not in pts:
                    pts.append(p)
            if cc.check_operator_axioms(_closure_table(cs.induced_space(alg, pts))):
                return False
        return True

    report.check("cstar.closure-axioms", "span closure is a closure operator on samples", closure_axioms)

    def classes_match():
        notes = []
        for blocks in ((2,), (2, 2), (1, 3), (2, 3), (3, 3)):
            alg = cs.FdAlgebra(blocks)
            sample = cs.spanning_sample(alg)
            comps = cs.tie_components(sample, fast)
            if comps != cs.equivalence_classes_c(alg, sample):
                return False
            notes.append(f"{alg}:{cs.chain_lengths(sample, fast)}")
        return True, float("inf"), "chain lengths " + " ".join(notes).replace(" ", "")

    report.check("cstar.classes", "block partition equals the transitive closure of the tie", classes_match)

    def adjoint_homeo():
        alg = cs.FdAlgebra((3,))
        for _ in range(20):
            s = [cs.random_point(rng, alg) for _ in range(rng.randint(1, 3))]
            p = cs.random_point(rng, alg)
            lhs = cs.closure_membership_c(alg, s, p)
            rhs = cs.closure_membership_c(alg, [cs.involutions(q, "adjoint") for q in s],
                                          cs.involutions(p, "adjoint"))
            if lhs != rhs:
                return False
        return True

    report.check("cstar.adjoint", "adjoint preserves the closure in both directions", adjoint_homeo)

    def phi_preserves():
        for m in (2, 3):
            alg = cs.FdAlgebra((m,))
            for sigma in ("identity", "conjugation"):
                u = cs.SemilinearMap(cs.random_invertible(rng, m), sigma)
                v = cs.SemilinearMap(cs.random_invertible(rng, m), sigma)
                phi = cs.phi_from_pair(u, v, alg, alg)
                pool = {m: [cs.random_gaussian_vector(rng, m) for _ in range(2)]}
                pts = [cs.random_point(rng, alg, pool=pool) for _ in range(8)]
                for p, q in combinations(pts, 2):
                    if cs.tie_fast(p, q) != cs.tie_fast(phi(p), phi(q)):
                        return False
                for _ in range(10):
                    s = rng.sample(pts, 2)
                    p = rng.choice(pts)
                    if cs.closure_membership_c(alg, s, p) != cs.closure_membership_c(alg, [phi(q) for q in s], phi(p)):
                        return False
        return True

    report.check("cstar.phi-preserves", "semilinear pairs preserve tie and closure", phi_preserves)


def _floatify(alg: cs.FdAlgebra, p: cs.GssPointC) -> cs.GssPointC:
    return cs.canonicalize_point(alg, p.block, list(p.x.array()), list(p.y.array()))
