"""Geometric structure spaces of finite-dimensional normed spaces.

Points are kernels of extreme norm-one dual functionals, stored as
functionals modulo nonzero scalars.  For the norms handled here every
relevant maximal face is exposed by a single functional, so the closure
``S ↦ S⁼`` reduces to linear-span membership of functionals.

Three families of norms are modelled:

* polyhedral norms given by the vertices of their dual ball (real ℓ₁ⁿ, ℓ∞ⁿ ...),
* ℓ₁ⁿ, real or complex, whose dual-ball extreme points are the unimodular
  vectors (:class:`TorusPoint` for the complex case),
* ``mixed3d``: the norm ``‖(a,b,c)‖ = sqrt(max(a²,b²) + c²)`` on ℝ³, with
  dual norm ``sqrt((|a|+|b|)² + c²)``.

Exact arithmetic uses Fractions (real models) and cyclotomic fields (complex
ℓ₁ⁿ).  Float inputs are accepted for ``mixed3d`` and carry margins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import lcm
from typing import Sequence

import numpy as np
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from . import closure_core as cc
from .numeric import (
    RANK_TOL, MARGIN_FLOOR, Decision, IndeterminateError, cyclotomic_field,
    exact_in_span, exact_nullspace, float_in_span, root_of_unity,
)


class NormModelError(ValueError):
    pass


# points --------------------------------------------------------------------

def _is_exact(values) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in values)


@dataclass(frozen=True)
class GssPointB:
    """A real dual functional up to nonzero scalar.

    The stored representative has first nonzero coordinate equal to 1, so two
    points are equal iff their stored tuples are equal (exact mode) or agree
    within tolerance (float mode, see :func:`same_point`).  The norm-one
    representative is :meth:`NormModel.unit`.
    """

    functional: tuple

    @property
    def exact(self) -> bool:
        return _is_exact(self.functional)

    def array(self) -> np.ndarray:
        return np.array([float(v) for v in self.functional])

    def __str__(self):
        return "(" + ", ".join(str(v) for v in self.functional) + ")"


def make_point(coords: Sequence) -> GssPointB:
    """Canonical point from any nonzero real coordinate vector."""
    coords = list(coords)
    if _is_exact(coords):
        coords = [Fraction(c) for c in coords]
        lead = next((c for c in coords if c != 0), None)
        if lead is None:
            raise NormModelError("zero functional")
        return GssPointB(tuple(c / lead for c in coords))
    arr = np.asarray(coords, dtype=float)
    scale = np.max(np.abs(arr)) if arr.size else 0.0
    if scale == 0:
        raise NormModelError("zero functional")
    k = int(np.argmax(np.abs(arr) > RANK_TOL * scale))
    return GssPointB(tuple(float(v) for v in arr / arr[k]))


def same_point(p: GssPointB, q: GssPointB, tol: float = RANK_TOL) -> bool:
    if p.exact and q.exact:
        return p == q
    return bool(np.max(np.abs(p.array() - q.array())) <= tol * 10)


@dataclass(frozen=True)
class TorusPoint:
    """Unimodular vector, exact (angles as fractions of a full turn) or float.

    In exact mode ``turns[k] = t`` stands for the entry ``exp(2πi t)``.
    Canonical form shifts all turns so the first entry is 1.
    """

    turns: tuple | None = None
    values: tuple | None = None

    @staticmethod
    def exact(turns: Sequence) -> "TorusPoint":
        ts = [Fraction(t) % 1 for t in turns]
        return TorusPoint(turns=tuple(ts))

    @staticmethod
    def floats(values: Sequence) -> "TorusPoint":
        vals = np.asarray(values, dtype=complex)
        if np.max(np.abs(np.abs(vals) - 1)) > 1e-9:
            raise NormModelError("entries must have modulus 1")
        return TorusPoint(values=tuple(complex(v) for v in vals))

    @property
    def is_exact(self) -> bool:
        return self.turns is not None

    def __len__(self):
        return len(self.turns if self.is_exact else self.values)

    def canonical(self) -> "TorusPoint":
        if self.is_exact:
            return TorusPoint.exact([t - self.turns[0] for t in self.turns])
        v = np.asarray(self.values)
        return TorusPoint.floats(v / v[0])

    def order(self) -> int:
        return lcm(*(t.denominator for t in self.turns)) if self.turns else 1

    def to_complex(self) -> np.ndarray:
        if self.is_exact:
            return np.exp(2j * np.pi * np.array([float(t) for t in self.turns]))
        return np.asarray(self.values, dtype=complex)

    def field_vector(self, order: int):
        return [root_of_unity(t, order) for t in self.turns]

    def __str__(self):
        if self.is_exact:
            return "exp(2πi·(" + ", ".join(str(t) for t in self.turns) + "))"
        return "(" + ", ".join(f"{v:.6g}" for v in self.values) + ")"


def torus_same_point(u: TorusPoint, v: TorusPoint, tol: float = 1e-9) -> bool:
    if u.is_exact and v.is_exact:
        return u.canonical() == v.canonical()
    return bool(np.max(np.abs(u.canonical().to_complex() - v.canonical().to_complex())) <= tol)


# models --------------------------------------------------------------------

@dataclass(frozen=True)
class NormModel:
    """A norm described through its dual ball.

    ``kind`` is ``"polyhedral"``, ``"ell1"`` or ``"mixed3d"``.
    """

    kind: str
    field: str
    dimension: int
    dual_vertices: tuple = ()

    def __post_init__(self):
        if self.kind not in ("polyhedral", "ell1", "mixed3d"):
            raise NormModelError(f"unknown norm kind {self.kind!r}")
        if self.field not in ("real", "complex"):
            raise NormModelError(f"unknown field {self.field!r}")
        if self.dimension < 2:
            raise NormModelError("dimension must be at least 2")
        if self.kind == "polyhedral":
            if self.field != "real":
                raise NormModelError("polyhedral models are real")
            verts = {tuple(v) for v in self.dual_vertices}
            if any(len(v) != self.dimension for v in verts):
                raise NormModelError("dual vertex of wrong length")
            if any(tuple(-x for x in v) not in verts for v in verts):
                raise NormModelError("dual vertex list is not symmetric")
        if self.kind == "mixed3d" and (self.dimension != 3 or self.field != "real"):
            raise NormModelError("mixed3d is the real three-dimensional model")

    # extremality ------------------------------------------------------------

    def is_extreme(self, point) -> Decision:
        """Whether the point's functional direction is an extreme point of the dual ball."""
        if self.kind == "ell1" and self.field == "complex":
            return Decision(isinstance(point, TorusPoint) and len(point) == self.dimension)
        f = point.functional
        if len(f) != self.dimension:
            return Decision(False)
        if self.kind == "ell1":
            mags = {abs(x) for x in f}
            if point.exact:
                return Decision(len(mags) == 1 and 0 not in mags)
            spread = max(mags) - min(mags)
            return _float_flag(spread <= RANK_TOL, spread)
        if self.kind == "polyhedral":
            return Decision(any(make_point(v) == point for v in self.dual_vertices))
        # mixed3d: extreme iff one of the first two coordinates vanishes
        a, b = f[0], f[1]
        if point.exact:
            return Decision(a * b == 0)
        scale = max(abs(x) for x in f)
        small = min(abs(a), abs(b)) / scale
        return _float_flag(small <= RANK_TOL, small)

    def dual_norm(self, vec) -> float:
        v = np.asarray([complex(x) if not isinstance(x, Fraction) else float(x) for x in vec])
        if self.kind == "ell1":
            return float(np.max(np.abs(v)))
        if self.kind == "mixed3d":
            a, b, c = (abs(x) for x in v)
            return float(math.sqrt((a + b) ** 2 + c ** 2))
        raise NormModelError("dual norm only available for ell1 and mixed3d models")

    def unit(self, point: GssPointB) -> np.ndarray:
        """Norm-one float representative of the point's functional."""
        if self.kind == "polyhedral":
            for v in self.dual_vertices:
                if make_point(v) == point:
                    return np.array([float(x) for x in v])
            raise NormModelError("point is not a dual vertex")
        arr = point.array()
        return arr / self.dual_norm(arr)


def _float_flag(value: bool, distance: float) -> Decision:
    if not value and distance < MARGIN_FLOOR:
        raise IndeterminateError("extremality test inside ambiguity band", distance)
    return Decision(value, float("inf") if value else distance)


def polyhedral(dual_vertices: Sequence[Sequence]) -> NormModel:
    verts = tuple(tuple(Fraction(x) for x in v) for v in dual_vertices)
    if not verts:
        raise NormModelError("no dual vertices")
    return NormModel("polyhedral", "real", len(verts[0]), verts)


def ell1(n: int, field: str = "real") -> NormModel:
    if field == "real":
        verts = tuple(tuple(Fraction(s) for s in signs) for signs in product((1, -1), repeat=n))
        return NormModel("ell1", "real", n, verts)
    return NormModel("ell1", "complex", n)


def ell1_polyhedral(n: int) -> NormModel:
    """Real ℓ₁ⁿ presented through its dual vertices (the sign vectors)."""
    return polyhedral(list(product((1, -1), repeat=n)))


def ellinf_polyhedral(n: int) -> NormModel:
    """Real ℓ∞ⁿ: dual ball is the ℓ₁ ball with vertices ±eₖ."""
    verts = []
    for k in range(n):
        for s in (1, -1):
            verts.append([s if j == k else 0 for j in range(n)])
    return polyhedral(verts)


def mixed3d() -> NormModel:
    return NormModel("mixed3d", "real", 3)


MIXED3D_FUNCTIONALS = {
    "f1": (1, 0, 0),
    "f2": (0, 1, 0),
    "f3": (1, 0, 1),
    "f4": (0, 1, 1),
    "e": (0, 0, 1),
}


# the geometric structure space --------------------------------------------

def build_gss_polyhedral(model: NormModel) -> list:
    """One point per ± orbit of dual vertices, in first-seen order."""
    if model.kind == "ell1" and model.field == "complex":
        raise NormModelError("complex ℓ₁ⁿ has infinitely many points")
    if model.kind == "mixed3d":
        raise NormModelError("mixed3d has infinitely many points")
    points = []
    for v in model.dual_vertices:
        p = make_point(v)
        if p not in points:
            points.append(p)
    return points


def _torus_rows(points: Sequence[TorusPoint]):
    order = 4 * lcm(*(p.order() for p in points))
    field_, _ = cyclotomic_field(order)
    return [p.field_vector(order) for p in points], field_


def closure_membership_b(model: NormModel, s: Sequence, p) -> bool:
    """Whether ``p`` lies in ``S⁼``: its functional is in the span of those of ``s``."""
    return bool(closure_membership_decision(model, s, p))


def closure_membership_decision(model: NormModel, s: Sequence, p) -> Decision:
    s = list(s)
    if model.kind == "ell1" and model.field == "complex":
        pts = s + [p]
        if all(q.is_exact for q in pts):
            rows, field_ = _torus_rows(pts)
            if not s:
                return Decision(False)
            return Decision(exact_in_span(rows[:-1], rows[-1], field_))
        return float_in_span([q.to_complex() for q in s], p.to_complex())
    if not s:
        return Decision(False)
    if p.exact and all(q.exact for q in s):
        return Decision(exact_in_span([q.functional for q in s], p.functional))
    return float_in_span([q.array() for q in s], p.array())


def induced_space(model: NormModel, points: Sequence) -> cc.FiniteClosureSpace:
    """Finite closure space on ``points`` with the relative ``S⁼`` closure."""
    points = list(points)
    return cc.from_operator(points, lambda sub: [q for q in points
                                                 if q in sub or closure_membership_b(model, list(sub), q)])


# pair closedness oracles --------------------------------------------------------

@dataclass(frozen=True)
class PairVerdict:
    closed: bool
    witness: object = None
    margin: float = float("inf")
    detail: str = ""

    def __bool__(self):
        return self.closed


def pair_closed_bruteforce(model: NormModel, p, q) -> bool:
    return pair_closed_verdict(model, p, q).closed


def pair_closed_verdict(model: NormModel, p, q) -> PairVerdict:
    """Decide whether ``{p, q}`` is closed by searching span{p, q} for other extreme functionals."""
    if model.kind == "ell1":
        return _ell1_pair(model, p, q)
    if model.kind == "mixed3d":
        return _mixed3d_pair(p, q)
    return _polyhedral_pair(model, p, q)


def _polyhedral_pair(model, p, q) -> PairVerdict:
    if p == q:
        raise NormModelError("pair test needs distinct points")
    for r in build_gss_polyhedral(model):
        if r != p and r != q and exact_in_span([p.functional, q.functional], r.functional):
            return PairVerdict(False, r)
    return PairVerdict(True)


def _ratio_data(p, q, field_):
    """Ratios ``u_k conj(v_k)`` as field elements (complex) or rationals (real)."""
    if field_ == "complex":
        order = 4 * lcm(p.order(), q.order())
        return [root_of_unity(a - b, order) for a, b in zip(p.turns, q.turns)], order
    return [Fraction(a) * Fraction(b) for a, b in zip(p.functional, q.functional)], None


def _ell1_pair(model, p, q) -> PairVerdict:
    """Exact search for unimodular ``αu + βv`` with ``αβ ≠ 0``.

    ``|α r + β| = 1`` for every ratio ``r`` is linear in the real unknowns
    ``A = |α|²+|β|²`` and ``c = α·conj(β)``: ``A + 2 Re(c r) = 1``.  The pair
    is closed iff every solution has ``c = 0``.
    """
    if model.field == "complex":
        if not (p.is_exact and q.is_exact):
            return _ell1_pair_float(p, q)
        if torus_same_point(p, q):
            raise NormModelError("pair test needs distinct points")
        ratios, order = _ratio_data(p, q, "complex")
        field_, _ = cyclotomic_field(order)
        imag = root_of_unity(Fraction(1, 4), order)
        rows = []
        for r in ratios:
            rbar = r ** (order - 1)
            # unknowns (A, Re c, Im c): A + (r + r̄) Re c + i (r - r̄) Im c = 1
            rows.append([field_.one, r + rbar, imag * (r - rbar)])
        kernel = exact_nullspace(rows, 3, field_)
    else:
        if not (p.exact and q.exact):
            raise NormModelError("real ℓ₁ oracle needs exact sign vectors")
        if p == q:
            raise NormModelError("pair test needs distinct points")
        ratios, _ = _ratio_data(p, q, "real")
        rows = [[1, 2 * r] for r in ratios]
        kernel = exact_nullspace(rows, 2)
    if not kernel:
        return PairVerdict(True, detail="only solution has c = 0")
    # A real kernel direction with c ≠ 0 gives solutions A = 1 + t·kA, c = t·kc
    # with A ≥ 2|c| for small t, so a third unimodular vector exists.
    return PairVerdict(False, witness=("kernel", kernel[0]), detail="one-parameter family of unimodular combinations")


def _ell1_pair_float(p: TorusPoint, q: TorusPoint) -> PairVerdict:
    r = p.to_complex() * np.conj(q.to_complex())
    rows = np.array([[1.0, 2 * x.real, -2 * x.imag] for x in r])
    s = np.linalg.svd(rows, compute_uv=False)
    smallest = float(s[-1] / s[0]) if len(s) == 3 else 0.0
    if len(s) < 3 or smallest <= RANK_TOL:
        return PairVerdict(False, margin=1.0 - smallest)
    if smallest < MARGIN_FLOOR:
        raise IndeterminateError("ratio system rank inside ambiguity band", smallest)
    return PairVerdict(True, margin=smallest)


def _mixed3d_pair(p: GssPointB, q: GssPointB) -> PairVerdict:
    """Extreme directions of the dual ball are those with a·b = 0.

    The plane span{p, q} meets {a = 0} and {b = 0} in a line each, unless it
    lies inside one of them, in which case every direction of the plane is
    extreme.
    """
    if p.exact and q.exact:
        if p == q:
            raise NormModelError("pair test needs distinct points")
        for axis in (0, 1):
            if p.functional[axis] == 0 and q.functional[axis] == 0:
                witness = make_point([x + y for x, y in zip(p.functional, q.functional)])
                return PairVerdict(False, witness, detail=f"plane inside coordinate plane {axis}")
            line = [q.functional[axis] * x - p.functional[axis] * y
                    for x, y in zip(p.functional, q.functional)]
            cand = make_point(line)
            if cand != p and cand != q:
                return PairVerdict(False, cand, detail=f"extreme direction on coordinate plane {axis}")
        return PairVerdict(True)
    pa, qa = p.array(), q.array()
    pa, qa = pa / np.linalg.norm(pa), qa / np.linalg.norm(qa)
    margin = float("inf")
    for axis in (0, 1):
        size = max(abs(pa[axis]), abs(qa[axis]))
        if size <= RANK_TOL:
            return PairVerdict(False, make_point(pa + qa), margin=1.0)
        if size < MARGIN_FLOOR:
            raise IndeterminateError("plane nearly inside a coordinate plane", size)
        margin = min(margin, size)
        line = qa[axis] * pa - pa[axis] * qa
        cand = make_point(line)
        dist = min(np.max(np.abs(cand.array() - make_point(pa).array())),
                   np.max(np.abs(cand.array() - make_point(qa).array())))
        if dist > RANK_TOL * 10:
            if dist < MARGIN_FLOOR:
                raise IndeterminateError("candidate direction nearly coincides with an endpoint", dist)
            return PairVerdict(False, cand, margin=float(dist))
    return PairVerdict(True, margin=margin)


# complex ℓ₁ⁿ ratio criterion --------------------------------------------------

@dataclass(frozen=True)
class TieResult:
    tie: bool
    witness: TorusPoint | None
    ratio_count: int


def ell1_complex_tie(u: TorusPoint, v: TorusPoint, tol: float = 1e-9) -> TieResult:
    """Tie test for complex ℓ₁ⁿ through the set of ratios ``u_k·conj(v_k)``.

    Tied iff there are at most two distinct ratios.  With exactly two, the
    witness keeps ``u`` where the ratio equals the first one and rotates ``v``
    by half the angle between the ratios elsewhere.
    """
    if len(u) != len(v):
        raise NormModelError("length mismatch")
    if u.is_exact and v.is_exact:
        ratio = [(a - b) % 1 for a, b in zip(u.turns, v.turns)]
        distinct = sorted(set(ratio), key=ratio.index)
        if len(distinct) == 1:
            return TieResult(True, None, 1)
        if len(distinct) > 2:
            return TieResult(False, None, len(distinct))
        first, second = distinct
        half = ((second - first) % 1) / 2
        # rotate u so its entries agree with v on the first ratio class
        turns = []
        for a, b, r in zip(u.turns, v.turns, ratio):
            turns.append(a - first if r == first else b + half)
        return TieResult(True, TorusPoint.exact(turns), 2)
    uu, vv = u.to_complex(), v.to_complex()
    ratio = uu * np.conj(vv)
    clusters: list = []
    labels = []
    for r in ratio:
        for k, c in enumerate(clusters):
            if abs(r - c) <= 1e3 * tol:
                labels.append(k)
                break
        else:
            clusters.append(r)
            labels.append(len(clusters) - 1)
    if len(clusters) > 2:
        return TieResult(False, None, len(clusters))
    if len(clusters) == 1:
        return TieResult(True, None, 1)
    theta = np.angle(clusters[1] / clusters[0]) % (2 * np.pi)
    rot = np.exp(0.5j * theta)
    w = [uu[k] / clusters[0] if labels[k] == 0 else rot * vv[k] for k in range(len(uu))]
    return TieResult(True, TorusPoint.floats(w), 2)


def torus_in_span(s: Sequence[TorusPoint], p: TorusPoint) -> bool:
    return closure_membership_b(NormModel("ell1", "complex", len(p)), s, p)


# isometries ----------------------------------------------------------------

def _exact_inverse(t: Sequence[Sequence]):
    rows = [[Fraction(x) for x in r] for r in t]
    n = len(rows)
    dm = DomainMatrix([[QQ(x.numerator, x.denominator) for x in r] for r in rows], (n, n), QQ)
    if dm.rank() != n:
        raise NormModelError("matrix is singular")
    inv = dm.inv().to_list()
    return [[Fraction(int(x.numerator), int(x.denominator)) for x in r] for r in inv]


def induced_map_from_isometry(t: Sequence[Sequence], src: NormModel, dst: NormModel) -> dict:
    """Point map ``f ↦ f∘T⁻¹`` induced by an isometry ``T: src → dst``.

    ``T`` must carry the src dual-vertex set onto the dst one (which is how
    the unit balls are compared for polyhedral models).
    """
    if src.kind not in ("polyhedral", "ell1") or src.field != "real" or dst.kind not in ("polyhedral", "ell1"):
        raise NormModelError("isometry check implemented for real polyhedral models")
    tinv = _exact_inverse(t)
    n = len(tinv)

    def pull(f):
        return tuple(sum(Fraction(f[i]) * tinv[i][j] for i in range(n)) for j in range(n))

    moved = {pull(v) for v in src.dual_vertices}
    if moved != {tuple(v) for v in dst.dual_vertices}:
        raise NormModelError("matrix is not an isometry between the given norms")
    return {p: make_point(pull(p.functional)) for p in build_gss_polyhedral(src)}


# the three-dimensional counterexample -------------------------------------------

def mixed3d_point(name: str) -> GssPointB:
    return make_point(MIXED3D_FUNCTIONALS[name])


def mixed3d_exposed_face(f) -> list:
    """Vertices of the face of the primal unit ball exposed by ``f`` (float)."""
    fa, fb, fc = (float(x) for x in f)
    lin = abs(fa) + abs(fb)
    norm = math.hypot(lin, fc)
    r, c = lin / norm, fc / norm
    a_vals = [r * math.copysign(1, fa)] if fa != 0 else [-r, r]
    b_vals = [r * math.copysign(1, fb)] if fb != 0 else [-r, r]
    verts = []
    for a in a_vals:
        for b in b_vals:
            if [a, b, c] not in verts:
                verts.append([a, b, c])
    return verts


def mixed3d_dual_face_singleton(f, step: float = 1e-2, directions: int = 360) -> Decision:
    """Whether exactly one norm-one functional is 1 on the whole face exposed by ``f``.

    Such functionals form a convex subset of an affine space through the
    norm-one multiple of ``f``; we move off it in sampled directions and
    require the dual norm to exceed 1.
    """
    model = mixed3d()
    unit = np.array([float(x) for x in f])
    unit = unit / model.dual_norm(unit)
    verts = np.array(mixed3d_exposed_face(unit))
    _, s, vh = np.linalg.svd(verts)
    rank = int(np.sum(s > RANK_TOL * s[0]))
    free = vh[rank:]
    if free.shape[0] == 0:
        return Decision(True)
    if free.shape[0] == 1:
        dirs = [free[0], -free[0]]
    else:
        angles = np.linspace(0, 2 * np.pi, directions, endpoint=False)
        dirs = [np.cos(t) * free[0] + np.sin(t) * free[1] for t in angles]
    excess = min(model.dual_norm(unit + step * d) - 1 for d in dirs)
    if excess <= RANK_TOL:
        return Decision(False, abs(excess))
    if excess < MARGIN_FLOOR:
        raise IndeterminateError("dual face test inside ambiguity band", excess)
    return Decision(True, excess)


@dataclass
class CaseStudy:
    """Outcome of a case study: named claims with verdicts and margins."""

    claims: list = field(default_factory=list)
    values: dict = field(default_factory=dict)

    def add(self, claim_id: str, anchor: str, passed: bool, margin: float = float("inf")):
        self.claims.append((claim_id, anchor, bool(passed), margin))

    @property
    def passed(self) -> bool:
        return all(c[2] for c in self.claims)

    def tie(self, a: str, b: str) -> bool:
        return self.values[("tie", a, b)]

    def pair_closed(self, a: str, b: str) -> bool:
        return self.values[("pair_closed", a, b)]

    def sim(self, a: str, b: str) -> bool:
        return self.values[("sim", a, b)]


def not_transitive_case_study() -> CaseStudy:
    """Machine-checks the mixed3d example where the tie relation is not transitive."""
    model = mixed3d()
    pts = {name: mixed3d_point(name) for name in MIXED3D_FUNCTIONALS}
    study = CaseStudy()
    for name, p in pts.items():
        study.add(f"extreme.{name}", "dual-ball extreme point", model.is_extreme(p))
        single = mixed3d_dual_face_singleton(p.functional)
        study.add(f"dual-face-singleton.{name}", "exposed face has one supporting functional",
                  single.value, single.margin)

    def record_pair(a, b):
        verdict = pair_closed_verdict(model, pts[a], pts[b])
        study.values[("pair_closed", a, b)] = verdict.closed
        study.values[("tie", a, b)] = not verdict.closed
        return verdict

    v1 = record_pair("f1", "e")
    study.add("tie.f1-e", "pair of kernels not closed", not v1.closed)
    study.add("witness.f3-in-closure.f1-e", "third kernel in closure of the pair",
              closure_membership_b(model, [pts["f1"], pts["e"]], pts["f3"]))
    v2 = record_pair("e", "f2")
    study.add("tie.e-f2", "pair of kernels not closed", not v2.closed)
    study.add("witness.f4-in-closure.e-f2", "third kernel in closure of the pair",
              closure_membership_b(model, [pts["e"], pts["f2"]], pts["f4"]))
    v3 = record_pair("f1", "f2")
    study.add("closed.f1-f2", "pair of kernels closed", v3.closed)
    study.values[("sim", "f1", "f2")] = (not v1.closed) and (not v2.closed)
    study.add("sim.f1-f2", "equivalent through a chain via e", study.values[("sim", "f1", "f2")])
    study.add("not-transitive", "tie relation fails transitivity",
              (not v1.closed) and (not v2.closed) and v3.closed)
    # the same facts inside the finite sample with the relative closure
    space = induced_space(model, list(pts.values()))
    _, classes = cc.equivalence_structure(space)
    study.add("sample.one-class", "sampled kernels form one equivalence class", len(classes) == 1)
    study.add("sample.f1-f2-closed", "pair closed in the sampled subspace",
              space.is_closed([pts["f1"], pts["f2"]]))
    return study


def sign_vector_points(n: int) -> list:
    return build_gss_polyhedral(ell1(n, "real"))


def all_pairs(points: Sequence):
    return combinations(points, 2)
