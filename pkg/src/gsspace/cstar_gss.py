"""Geometric structure spaces of finite-dimensional C*-algebras ⊕ₖ M_{nₖ}(ℂ).

A point is the kernel of a vector functional ``ω_{x,y}(A) = ⟨Aₖx, y⟩`` on a
single block ``k``, determined by the lines through ``x`` and ``y``.  Its
functional matrix is ``x y*`` so that ``ω_{x,y}(A) = tr(Aₖ · x y*)``.

Two backends are supported.  Coordinates given as ints, Fractions, strings or
Gaussian rationals are handled exactly over ``QQ_I``; Python/numpy complex
numbers select the float backend, where rank decisions carry margins.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Sequence

import networkx as nx
import numpy as np
from sympy.polys.domains import QQ_I

from . import closure_core as cc
from .numeric import (
    RANK_TOL, MARGIN_FLOOR, Decision, IndeterminateError, conj, exact_in_span, exact_nullspace,
    exact_rank, exact_solve_combination, float_in_span, float_nullspace, float_rank,
    format_gaussian, gq, gq_is_zero, gq_to_complex, parse_gaussian, to_gq,
)

ZERO = QQ_I(0, 0)
ONE = QQ_I(1, 0)
I_UNIT = QQ_I(0, 1)


class CStarError(ValueError):
    pass


class ReconstructionError(CStarError):
    """The oracle does not behave like a tie-preserving bijection."""


# vectors -------------------------------------------------------------------

def _is_float_scalar(v) -> bool:
    return isinstance(v, (float, complex, np.floating, np.complexfloating))


def as_vector(values: Sequence):
    """Exact tuple of Gaussian rationals, or a float complex tuple if any entry is a float."""
    values = list(values)
    if any(_is_float_scalar(v) for v in values):
        return tuple(complex(v) if not type(v).__name__ == "GaussianRational" else gq_to_complex(v)
                     for v in values)
    return tuple(to_gq(v) for v in values)


def is_exact_vector(vec) -> bool:
    return not vec or type(vec[0]).__name__ == "GaussianRational"


def to_complex_vector(vec) -> np.ndarray:
    if is_exact_vector(vec):
        return np.array([gq_to_complex(v) for v in vec], dtype=complex)
    return np.asarray(vec, dtype=complex)


def basis_vector(n: int, i: int, exact: bool = True):
    return tuple((ONE if j == i else ZERO) if exact else (1.0 + 0j if j == i else 0j) for j in range(n))


# projective points ---------------------------------------------------------------

class ProjPoint:
    """Line through a nonzero vector.

    Exact canonical form: first nonzero coordinate equal to 1.  Float
    canonical form: unit norm with first nonzero coordinate positive real.
    """

    __slots__ = ("coords", "exact")

    def __init__(self, coords: Sequence):
        vec = as_vector(coords)
        self.exact = is_exact_vector(vec)
        if self.exact:
            lead = next((v for v in vec if not gq_is_zero(v)), None)
            if lead is None:
                raise CStarError("zero vector")
            self.coords = tuple(v / lead for v in vec)
        else:
            arr = np.asarray(vec, dtype=complex)
            norm = np.linalg.norm(arr)
            if norm == 0:
                raise CStarError("zero vector")
            arr = arr / norm
            k = int(np.argmax(np.abs(arr) > 1e-7))
            arr = arr * (abs(arr[k]) / arr[k])
            self.coords = tuple(complex(v) for v in arr)

    def __len__(self):
        return len(self.coords)

    def vector(self):
        return self.coords

    def array(self) -> np.ndarray:
        return to_complex_vector(self.coords)

    def unit(self) -> np.ndarray:
        arr = self.array()
        return arr / np.linalg.norm(arr)

    def __eq__(self, other):
        if not isinstance(other, ProjPoint):
            return NotImplemented
        if len(self) != len(other):
            return False
        if self.exact and other.exact:
            return self.coords == other.coords
        a, b = self.unit(), other.unit()
        # proportional unit vectors: |<a, b>| = 1
        return abs(abs(np.vdot(b, a)) - 1) <= 1e-9

    def __hash__(self):
        if self.exact:
            return hash(self.coords)
        return hash(len(self.coords))

    def __repr__(self):
        return f"ProjPoint({format_vector(self.coords)})"


def format_vector(vec) -> str:
    if is_exact_vector(vec):
        return ", ".join(format_gaussian(v) for v in vec)
    return ", ".join(f"{v.real:.6g}{v.imag:+.6g}i" for v in vec)


def dependent(x: Sequence, y: Sequence) -> bool:
    """Whether two nonzero vectors are proportional."""
    return ProjPoint(x) == ProjPoint(y)


# algebras and points --------------------------------------------------------------

@dataclass(frozen=True)
class FdAlgebra:
    """``M_{n₁} ⊕ … ⊕ M_{n_K}``; blocks are indexed from 0."""

    blocks: tuple

    def __post_init__(self):
        if not self.blocks:
            raise CStarError("an algebra needs at least one block")
        if any(int(n) != n or n < 1 for n in self.blocks):
            raise CStarError("block sizes must be positive integers")
        object.__setattr__(self, "blocks", tuple(int(n) for n in self.blocks))

    @staticmethod
    def parse(text: str) -> "FdAlgebra":
        try:
            return FdAlgebra(tuple(int(part) for part in text.split("+")))
        except ValueError:
            raise CStarError(f"bad algebra literal {text!r}; expected e.g. '2+3'") from None

    def __str__(self):
        return "+".join(str(n) for n in self.blocks)

    @property
    def offsets(self) -> list:
        out, acc = [], 0
        for n in self.blocks:
            out.append(acc)
            acc += n * n
        return out

    @property
    def functional_dim(self) -> int:
        return sum(n * n for n in self.blocks)


@dataclass(frozen=True)
class GssPointC:
    """Kernel of ``ω_{x,y}`` on block ``block``."""

    block: int
    x: ProjPoint
    y: ProjPoint

    @property
    def exact(self) -> bool:
        return self.x.exact and self.y.exact

    def __str__(self):
        return f"({self.block}; {format_vector(self.x.coords)}; {format_vector(self.y.coords)})"


def canonicalize_point(algebra: FdAlgebra, block: int, x: Sequence, y: Sequence) -> GssPointC:
    if not 0 <= block < len(algebra.blocks):
        raise CStarError(f"block {block} out of range")
    n = algebra.blocks[block]
    if len(x) != n or len(y) != n:
        raise CStarError(f"vectors must have length {n} for block {block}")
    return GssPointC(block, ProjPoint(x), ProjPoint(y))


_POINT_RE = re.compile(r"^\s*\(\s*(\d+)\s*;([^;]*);([^;]*)\)\s*$")


def parse_point(algebra: FdAlgebra, text: str) -> GssPointC:
    """Parse ``"(k; x1, x2, ...; y1, y2, ...)"`` with Gaussian-rational entries."""
    m = _POINT_RE.match(text)
    if not m:
        raise CStarError(f"bad point literal {text!r}")
    xs = [parse_gaussian(t) for t in m.group(2).split(",")]
    ys = [parse_gaussian(t) for t in m.group(3).split(",")]
    return canonicalize_point(algebra, int(m.group(1)), xs, ys)


# functionals ------------------------------------------------------------------

@dataclass(frozen=True)
class FunctionalMatrix:
    block: int
    matrix: tuple  # rows

    def array(self) -> np.ndarray:
        return np.array([[gq_to_complex(v) if type(v).__name__ == "GaussianRational" else complex(v)
                          for v in row] for row in self.matrix], dtype=complex)


def outer(x: Sequence, y: Sequence):
    """``x y*`` as a tuple of rows."""
    return tuple(tuple(a * conj(b) for b in y) for a in x)


def functional_matrix(algebra: FdAlgebra, p: GssPointC) -> FunctionalMatrix:
    if p.exact:
        return FunctionalMatrix(p.block, outer(p.x.coords, p.y.coords))
    x, y = p.x.unit(), p.y.unit()
    return FunctionalMatrix(p.block, tuple(tuple(complex(v) for v in row) for row in np.outer(x, y.conj())))


def evaluate(algebra: FdAlgebra, p: GssPointC, blocks: Sequence) -> complex:
    """``tr(A_k · x y*)`` for a block-diagonal element given as a list of block matrices."""
    a = np.asarray(blocks[p.block], dtype=complex)
    return complex(np.trace(a @ functional_matrix(algebra, p).array()))


def embedded(algebra: FdAlgebra, p: GssPointC) -> list:
    """Functional matrix flattened into the coordinates of ``⊕ M_{nₖ}``."""
    mat = functional_matrix(algebra, p).matrix
    zero = ZERO if p.exact else 0j
    out = [zero] * algebra.functional_dim
    off = algebra.offsets[p.block]
    n = algebra.blocks[p.block]
    for i in range(n):
        for j in range(n):
            out[off + i * n + j] = mat[i][j]
    return out


def _all_exact(points) -> bool:
    return all(p.exact for p in points)


def closure_membership_decision(algebra: FdAlgebra, s: Sequence[GssPointC], p: GssPointC,
                                tol: float = RANK_TOL) -> Decision:
    s = list(s)
    if not s:
        return Decision(False)
    if _all_exact(s + [p]):
        return Decision(exact_in_span([embedded(algebra, q) for q in s], embedded(algebra, p)))
    return float_in_span([np.asarray(embedded(algebra, q), dtype=complex) for q in s],
                         np.asarray(embedded(algebra, p), dtype=complex), tol)


def closure_membership_c(algebra: FdAlgebra, s: Sequence[GssPointC], p: GssPointC,
                         tol: float = RANK_TOL) -> bool:
    """Whether ``p ∈ S⁼``: its functional lies in the span of those of ``s``."""
    return closure_membership_decision(algebra, s, p, tol).value


def induced_space(algebra: FdAlgebra, points: Sequence[GssPointC]) -> cc.FiniteClosureSpace:
    points = list(points)
    return cc.from_operator(points, lambda sub: [q for q in points
                                                 if q in sub or closure_membership_c(algebra, list(sub), q)])


# the tie relation -----------------------------------------------------------------

def tie_fast(p: GssPointC, q: GssPointC) -> bool:
    if p == q:
        return True
    return p.block == q.block and (p.x == q.x or p.y == q.y)


def _poly_trim(c):
    c = list(c)
    while c and gq_is_zero(c[-1]):
        c.pop()
    return c


def _poly_mod(a, b):
    a = list(a)
    while len(a) >= len(b):
        if gq_is_zero(a[-1]):
            a.pop()
            continue
        factor = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, coef in enumerate(b):
            a[shift + i] = a[shift + i] - factor * coef
        a.pop()
    return _poly_trim(a)


def _poly_gcd(a, b):
    a, b = _poly_trim(a), _poly_trim(b)
    while b:
        a, b = b, _poly_mod(a, b)
    return a


def _pencil_forms(pm, qm, rows, cols):
    """Coefficients (of α², αβ, β²) of every 2×2 minor of ``α P + β Q``."""
    forms = []
    for i, j in combinations(rows, 2):
        for k, l in combinations(cols, 2):
            a = pm[i][k] * pm[j][l] - pm[i][l] * pm[j][k]
            b = pm[i][k] * qm[j][l] + qm[i][k] * pm[j][l] - pm[i][l] * qm[j][k] - qm[i][l] * pm[j][k]
            c = qm[i][k] * qm[j][l] - qm[i][l] * qm[j][k]
            forms.append((a, b, c))
    return forms


def _block_diagonal(algebra: FdAlgebra, p: GssPointC, exact: bool):
    size = sum(algebra.blocks)
    zero = ZERO if exact else 0j
    full = [[zero] * size for _ in range(size)]
    start = sum(algebra.blocks[:p.block])
    if exact:
        mat = functional_matrix(algebra, p).matrix
    else:
        mat = np.outer(p.x.unit(), p.y.unit().conj())
    n = algebra.blocks[p.block]
    for i in range(n):
        for j in range(n):
            full[start + i][start + j] = mat[i][j]
    return full


def tie_bruteforce(algebra: FdAlgebra, p: GssPointC, q: GssPointC, tol: float = RANK_TOL) -> bool:
    """Decide the tie by searching the pencil ``αP + βQ`` for other rank-one members.

    A rank-one matrix of the pencil is a (block-supported) extreme functional;
    the pair is tied iff one exists with ``αβ ≠ 0``.  Every 2×2 minor is a
    binary quadratic in ``(α, β)``; with ``t = β/α`` they must share a root
    ``t ≠ 0``.
    """
    if p == q:
        return True
    exact = p.exact and q.exact
    pm = _block_diagonal(algebra, p, exact)
    qm = _block_diagonal(algebra, q, exact)
    size = len(pm)
    if exact:
        rows = [i for i in range(size) if any(not gq_is_zero(pm[i][j]) or not gq_is_zero(qm[i][j])
                                              for j in range(size))]
        cols = [j for j in range(size) if any(not gq_is_zero(pm[i][j]) or not gq_is_zero(qm[i][j])
                                              for i in range(size))]
        polys = [_poly_trim(f) for f in _pencil_forms(pm, qm, rows, cols)]
        polys = [f for f in polys if f]
        if not polys:
            return True
        g = polys[0]
        for f in polys[1:]:
            g = _poly_gcd(g, f)
            if len(g) == 1:
                break
        # strip the root t = 0
        while len(g) > 1 and gq_is_zero(g[0]):
            g = g[1:]
        return len(g) > 1
    pa, qa = np.asarray(pm), np.asarray(qm)
    rows = [i for i in range(size) if np.any(np.abs(pa[i]) > 1e-12) or np.any(np.abs(qa[i]) > 1e-12)]
    cols = [j for j in range(size) if np.any(np.abs(pa[:, j]) > 1e-12) or np.any(np.abs(qa[:, j]) > 1e-12)]
    forms = np.array(_pencil_forms(pa, qa, rows, cols), dtype=complex).reshape(-1, 3)
    if forms.size == 0 or np.max(np.abs(forms)) <= tol:
        return True
    big = np.max(np.abs(forms))
    if big < MARGIN_FLOOR:
        raise IndeterminateError("pencil minors inside ambiguity band", big)
    lead = forms[int(np.argmax(np.linalg.norm(forms, axis=1)))]
    roots = np.roots(lead[::-1]) if np.any(np.abs(lead[1:]) > tol) else []
    for t in roots:
        # roots at 0 or infinity are P and Q themselves
        near_end = min(abs(t), 1 / abs(t)) if t != 0 else 0.0
        if near_end <= tol:
            continue
        if near_end < MARGIN_FLOOR:
            raise IndeterminateError("pencil root near an endpoint", near_end)
        resid = np.max(np.abs(forms[:, 0] + forms[:, 1] * t + forms[:, 2] * t * t)) / (1 + abs(t) ** 2)
        if resid <= tol * 10:
            return True
        if resid < MARGIN_FLOOR:
            raise IndeterminateError("pencil root residual inside ambiguity band", resid)
    return False


def tie_relation_c(algebra: FdAlgebra, p: GssPointC, q: GssPointC, mode: str = "fast") -> bool:
    if mode == "fast":
        return tie_fast(p, q)
    if mode == "bruteforce":
        return tie_bruteforce(algebra, p, q)
    raise CStarError(f"unknown tie mode {mode!r}")


def tie_components(points: Sequence[GssPointC], tie: Callable) -> list:
    """Connected components (lists of indices) of the tie graph."""
    g = nx.Graph()
    g.add_nodes_from(range(len(points)))
    for i, j in combinations(range(len(points)), 2):
        if tie(points[i], points[j]):
            g.add_edge(i, j)
    comps = [sorted(c) for c in nx.connected_components(g)]
    return sorted(comps)


def chain_lengths(points: Sequence[GssPointC], tie: Callable = tie_fast) -> dict:
    """Histogram of shortest tie-chain lengths between points of the same component."""
    g = nx.Graph()
    g.add_nodes_from(range(len(points)))
    for i, j in combinations(range(len(points)), 2):
        if tie(points[i], points[j]):
            g.add_edge(i, j)
    hist: dict = {}
    for src, dists in nx.all_pairs_shortest_path_length(g):
        for dst, d in dists.items():
            if dst > src:
                hist[d] = hist.get(d, 0) + 1
    return dict(sorted(hist.items()))


def equivalence_classes_c(algebra: FdAlgebra, points: Sequence[GssPointC]) -> list:
    """Partition of ``points`` (as index lists) by block."""
    groups: dict = {}
    for i, p in enumerate(points):
        groups.setdefault(p.block, []).append(i)
    return sorted(groups.values())


# spectra ---------------------------------------------------------------------

def matrix_unit_points(algebra: FdAlgebra, block: int) -> list:
    n = algebra.blocks[block]
    return [canonicalize_point(algebra, block, basis_vector(n, i), basis_vector(n, j))
            for i in range(n) for j in range(n)]


def spanning_sample(algebra: FdAlgebra) -> list:
    return [p for k in range(len(algebra.blocks)) for p in matrix_unit_points(algebra, k)]


def _support_blocks(algebra: FdAlgebra, members: Sequence[GssPointC]) -> tuple:
    """Blocks on which the span of the members' functionals is full; error if partial."""
    full = []
    for k, n in enumerate(algebra.blocks):
        rows = [functional_matrix(algebra, p).matrix for p in members if p.block == k]
        flat = [[v for row in m for v in row] for m in rows]
        r = exact_rank(flat) if flat else 0
        if r == n * n:
            full.append(k)
        elif r:
            raise CStarError(f"class spans a proper subspace of block {k}")
    return tuple(full)


@dataclass(frozen=True)
class Spectra:
    gs: cc.FiniteClosureSpace | None
    ps: cc.FiniteClosureSpace | None
    kernels: tuple          # per class: blocks of the kernel ideal
    classes: tuple          # per class: block index whose functionals it contains
    gamma: dict             # class label -> kernel label
    quotient_identity: bool
    discrete: bool


def block_classes(algebra: FdAlgebra, tie: Callable = tie_fast):
    """Classes of the spanning sample under the transitive closure of the tie relation.

    Returns a list of ``(members, kernel_blocks, support_blocks)``.
    """
    sample = spanning_sample(algebra)
    out = []
    everything = tuple(range(len(algebra.blocks)))
    for comp in tie_components(sample, tie):
        members = [sample[i] for i in comp]
        support = _support_blocks(algebra, members)
        kernel = tuple(k for k in everything if k not in support)
        out.append((members, kernel, support))
    return out


def _kernel_closure(kernels: dict, chosen: Sequence, all_blocks: tuple) -> frozenset:
    """Ideal-intersection closure: kernels containing the intersection of the chosen ones."""
    inter = set(all_blocks)
    for lbl in chosen:
        inter &= set(lbl)
    return frozenset(lbl for lbl in kernels.values() if inter <= set(lbl))


def spectra(algebra: FdAlgebra, build_spaces: bool = True) -> Spectra:
    """Class space from the functional closure and primitive-ideal space from kernel intersections."""
    classes = block_classes(algebra)
    labels = [f"C{c[2][0]}" if len(c[2]) == 1 else "C" + "-".join(map(str, c[2])) for c in classes]
    gamma = {lbl: c[1] for lbl, c in zip(labels, classes)}
    all_blocks = tuple(range(len(algebra.blocks)))
    member_of = dict(zip(labels, (c[0] for c in classes)))

    rows_of = {lbl: [embedded(algebra, p) for p in member_of[lbl]] for lbl in labels}

    def class_closure(chosen):
        # a class is in the closure iff all its functionals lie in the pool's span
        pool = [r for lbl in chosen for r in rows_of[lbl]]
        if not pool:
            return []
        base = exact_rank(pool)
        return [lbl for lbl in labels if lbl in chosen or exact_rank(pool + rows_of[lbl]) == base]

    bijective = len(set(gamma.values())) == len(gamma)
    # discrete iff every complement of one kernel is closed
    discrete = all(
        lbl not in _kernel_closure(gamma, [o for o in gamma.values() if o != lbl], all_blocks)
        for lbl in gamma.values())
    gs = ps = None
    identity = True
    if build_spaces:
        gs = cc.from_operator(labels, class_closure)
        ps_ground = [gamma[lbl] for lbl in labels]
        ps = cc.from_operator(ps_ground, lambda t: _kernel_closure(gamma, t, all_blocks))
        for mask in range(1 << len(labels)):
            chosen = [labels[i] for i in range(len(labels)) if mask >> i & 1]
            lhs = gs.closure(chosen)
            image = ps.closure({gamma[c] for c in chosen})
            rhs = frozenset(c for c in labels if gamma[c] in image)
            if lhs != rhs:
                identity = False
        discrete = discrete and len(gs.closed_masks) == 1 << len(labels) \
            and len(ps.closed_masks) == 1 << len(labels)
    return Spectra(gs, ps, tuple(gamma[lbl] for lbl in labels), tuple(c[2] for c in classes),
                   gamma, identity and bijective, discrete)


# the lemmas as executable checks ---------------------------------------------------

def _inner(a, b):
    return sum((u * conj(v) for u, v in zip(a, b)), ZERO)


def _tensor_sum(xs, ys, n, exact):
    zero = ZERO if exact else 0j
    total = [[zero] * n for _ in range(n)]
    for x, y in zip(xs, ys):
        for i in range(n):
            for j in range(n):
                total[i][j] = total[i][j] + x[i] * conj(y[j])
    return total


def like_tensor(n: int, xs: Sequence, ys: Sequence, mode: str = "check", tol: float = 1e-10):
    """Check ``Σⱼ ω_{xⱼ,yⱼ} = 0`` or build the matrix ``C`` with

    ``Σⱼ conj(c_jk) xⱼ = 0`` for every ``k`` and ``Σₖ c_jk yₖ = yⱼ`` for every ``j``.

    Exact inputs use an orthogonal (unnormalised) basis of span{yⱼ}, which
    keeps everything over the Gaussian rationals; float inputs use an
    orthonormal one.
    """
    if len(xs) != len(ys):
        raise CStarError("xs and ys must have equal length")
    m = len(xs)
    xs = [as_vector(x) for x in xs]
    ys = [as_vector(y) for y in ys]
    if any(len(v) != n for v in xs + ys):
        raise CStarError(f"vectors must have length {n}")
    exact = all(is_exact_vector(v) for v in xs + ys)
    if not exact:
        xs = [to_complex_vector(v) for v in xs]
        ys = [to_complex_vector(v) for v in ys]
    total = _tensor_sum(xs, ys, n, exact)
    if exact:
        vanishes = all(gq_is_zero(v) for row in total for v in row)
    else:
        scale = max([1.0] + [np.linalg.norm(x) * np.linalg.norm(y) for x, y in zip(xs, ys)])
        vanishes = float(np.max(np.abs(np.asarray(total)))) <= tol * scale
    if mode == "check":
        return vanishes
    if mode != "decompose":
        raise CStarError(f"unknown mode {mode!r}")
    if not vanishes:
        raise CStarError("the functionals do not sum to zero")
    zero = ZERO if exact else 0j
    if exact:
        basis = []
        for y in ys:
            e = list(y)
            for b in basis:
                coef = _inner(e, b) / _inner(b, b)
                e = [u - coef * v for u, v in zip(e, b)]
            if any(not gq_is_zero(v) for v in e):
                basis.append(tuple(e))
        if not basis:
            return [[zero] * m for _ in range(m)]
        a = [[_inner(y, b) / _inner(b, b) for b in basis] for y in ys]
        bmat = []
        for b in basis:
            coeffs = exact_solve_combination(ys, b)
            if coeffs is None:
                raise AssertionError("basis vector outside span of ys")
            bmat.append(coeffs)
        c = [[sum((a[j][l] * bmat[l][k] for l in range(len(basis))), ZERO) for k in range(m)]
             for j in range(m)]
    else:
        ymat = np.array(ys).T  # n × m
        if np.max(np.abs(ymat)) == 0:
            return np.zeros((m, m), dtype=complex)
        u, s, _ = np.linalg.svd(ymat, full_matrices=False)
        r = int(np.sum(s > RANK_TOL * s[0]))
        onb = u[:, :r]                      # columns e_l
        a = ymat.T @ onb.conj()             # y_j = Σ a_jl e_l
        bmat = np.linalg.pinv(ymat) @ onb   # e_l = Σ b_lk y_k, columns indexed by l
        c = a @ bmat.T
    return c


def like_tensor_residuals(xs, ys, c) -> tuple:
    """Max-norm residuals of the two identities for a candidate ``C``."""
    exact = all(is_exact_vector(as_vector(v)) for v in list(xs) + list(ys)) and not isinstance(c, np.ndarray)
    m = len(xs)
    if exact:
        xs = [as_vector(x) for x in xs]
        ys = [as_vector(y) for y in ys]
        r1 = r2 = 0
        for k in range(m):
            acc = [ZERO] * len(xs[0])
            for j in range(m):
                acc = [a + conj(c[j][k]) * v for a, v in zip(acc, xs[j])]
            r1 = max(r1, max(abs(gq_to_complex(v)) for v in acc))
        for j in range(m):
            acc = [ZERO] * len(ys[0])
            for k in range(m):
                acc = [a + c[j][k] * v for a, v in zip(acc, ys[k])]
            r2 = max(r2, max(abs(gq_to_complex(a - b)) for a, b in zip(acc, ys[j])))
        return r1, r2
    xa = np.array([to_complex_vector(as_vector(x)) for x in xs])
    ya = np.array([to_complex_vector(as_vector(y)) for y in ys])
    ca = np.array([[gq_to_complex(v) if type(v).__name__ == "GaussianRational" else v for v in row]
                   for row in c], dtype=complex)
    r1 = float(np.max(np.abs(ca.conj().T @ xa))) if m else 0.0
    r2 = float(np.max(np.abs(ca @ ya - ya))) if m else 0.0
    return r1, r2


def _probe_vectors(n: int, exact: bool, extra: int = 0, seed: int = 0) -> list:
    vecs = [basis_vector(n, i, exact) for i in range(n)]
    for i, j in combinations(range(n), 2):
        for c in ((1, 0), (0, 1)):
            v = [0] * n
            v[i], v[j] = 1, complex(*c) if not exact else gq(*c)
            vecs.append(as_vector(v) if exact else tuple(complex(t) for t in v))
    rng = random.Random(seed)
    for _ in range(extra):
        v = [gq(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(n)]
        if all(gq_is_zero(t) for t in v):
            v[0] = ONE
        vecs.append(tuple(v) if exact else tuple(gq_to_complex(t) for t in v))
    return vecs


def sublemma_solve(a, tol: float = RANK_TOL):
    """Basis of ``{B : tr(B x y*) = 0 whenever tr(A x y*) = 0}``.

    The constraint space is spanned by ``x y*`` for ``x`` in a spanning
    family and ``y`` ranging over a basis of ``(Ax)^⊥``.  Returns a list of
    matrices (exact input) or an array of shape ``(d, n, n)`` (float input).
    """
    exact = not isinstance(a, np.ndarray) and all(
        not _is_float_scalar(v) for row in a for v in row)
    if exact:
        amat = [[to_gq(v) for v in row] for row in a]
    else:
        amat = np.asarray(a, dtype=complex)
    n = len(amat)
    constraints = []
    # generic probes never hit ker A, whose vectors force Bx = 0
    if exact:
        kernel = [tuple(v) for v in exact_nullspace(amat, n, QQ_I)]
    else:
        kernel = list(float_nullspace(amat, tol)[0]) if np.any(amat) else []
    for x in _probe_vectors(n, exact, extra=2 * n, seed=n) + kernel:
        if exact:
            ax = [sum((amat[i][j] * x[j] for j in range(n)), ZERO) for i in range(n)]
            if all(gq_is_zero(v) for v in ax):
                ys = [basis_vector(n, i) for i in range(n)]
            else:
                # y ⊥ Ax  ⇔  Σ y_i conj((Ax)_i) = 0
                ys = exact_nullspace([[conj(v) for v in ax]], n)
            for y in ys:
                constraints.append([x[j] * conj(y[i]) for i in range(n) for j in range(n)])
        else:
            xv = np.asarray(x, dtype=complex)
            ax = amat @ xv
            if np.linalg.norm(ax) <= tol * max(1.0, np.linalg.norm(amat)):
                ys = np.eye(n, dtype=complex)
            else:
                ys, _ = float_nullspace(ax.conj()[None, :], tol)
            for y in ys:
                constraints.append(np.outer(y.conj(), xv).reshape(-1))
    if exact:
        sols = exact_nullspace(constraints, n * n, QQ_I)
        return [[[s[i * n + j] for j in range(n)] for i in range(n)] for s in sols]
    sols, _ = float_nullspace(np.array(constraints), tol)
    return sols.reshape(-1, n, n)


def proportionality_residual(b, a) -> float:
    """``min_c ‖B − cA‖_F / ‖A‖_F``."""
    b = np.asarray(b, dtype=complex)
    a = np.asarray(a, dtype=complex)
    c = np.vdot(a, b) / np.vdot(a, a)
    return float(np.linalg.norm(b - c * a) / np.linalg.norm(a))


def involutions(p: GssPointC, kind: str) -> GssPointC:
    if kind == "adjoint":
        return GssPointC(p.block, p.y, p.x)
    if kind == "polar":
        return GssPointC(p.block, p.x, p.x)
    raise CStarError(f"unknown involution {kind!r}")


# semilinear maps ------------------------------------------------------------------

@dataclass(frozen=True)
class SemilinearMap:
    """``v ↦ M σ(v)`` with ``σ`` the identity or entrywise conjugation."""

    matrix: tuple
    sigma: str = "identity"

    def __post_init__(self):
        if self.sigma not in ("identity", "conjugation"):
            raise CStarError(f"unknown sigma {self.sigma!r}")
        rows = self.matrix
        if isinstance(rows, np.ndarray) or any(_is_float_scalar(v) for r in rows for v in r):
            arr = np.asarray([[gq_to_complex(v) if type(v).__name__ == "GaussianRational" else v
                               for v in r] for r in rows], dtype=complex)
            object.__setattr__(self, "matrix", tuple(tuple(complex(v) for v in r) for r in arr))
            r, _ = float_rank(arr)
            if r != len(arr):
                raise CStarError("matrix is singular")
        else:
            mat = tuple(tuple(to_gq(v) for v in r) for r in rows)
            object.__setattr__(self, "matrix", mat)
            if exact_rank(mat) != len(mat):
                raise CStarError("matrix is singular")

    @property
    def exact(self) -> bool:
        return type(self.matrix[0][0]).__name__ == "GaussianRational"

    def array(self) -> np.ndarray:
        return np.array([[gq_to_complex(v) if self.exact else v for v in r] for r in self.matrix],
                        dtype=complex)

    def __call__(self, v):
        v = as_vector(v)
        if self.sigma == "conjugation":
            v = tuple(conj(t) for t in v)
        if self.exact and is_exact_vector(v):
            return tuple(sum((self.matrix[i][j] * v[j] for j in range(len(v))), ZERO)
                         for i in range(len(self.matrix)))
        return tuple(complex(t) for t in self.array() @ to_complex_vector(v))


def phi_from_pair(u: SemilinearMap, v: SemilinearMap, src: FdAlgebra, dst: FdAlgebra) -> Callable:
    """Point map ``ker ω_{x,y} ↦ ker ω_{Ux, Vy}`` between single-block algebras."""
    if u.sigma != v.sigma:
        raise CStarError("U and V must share the same sigma")
    if len(src.blocks) != 1 or len(dst.blocks) != 1:
        raise CStarError("phi_from_pair works between single-block algebras")
    n, m = src.blocks[0], dst.blocks[0]
    for mat in (u, v):
        if len(mat.matrix) != m or len(mat.matrix[0]) != n:
            raise CStarError("matrix shape does not match the algebras")

    def phi(p: GssPointC) -> GssPointC:
        return canonicalize_point(dst, 0, u(p.x.coords), v(p.y.coords))

    return phi


def adjoint_after(phi: Callable) -> Callable:
    return lambda p: involutions(phi(p), "adjoint")


# R-sets -----------------------------------------------------------------------

@dataclass(frozen=True)
class RSet:
    kind: str          # "x", "y" or "both" (single point)
    members: tuple     # indices into the sample
    line: ProjPoint | None


@dataclass(frozen=True)
class RSetClassification:
    sets: tuple
    witnesses: tuple   # (set index, outside point index, member index not tied) triples
    all_typed: bool


def maximal_r_sets(algebra: FdAlgebra, sample: Sequence[GssPointC], tie: Callable = tie_fast) -> RSetClassification:
    """Maximal pairwise-tied subsets of the sample, typed by their shared line."""
    sample = list(sample)
    if len(algebra.blocks) != 1 or any(p.block != 0 for p in sample):
        raise CStarError("maximal_r_sets expects points of a single-block algebra")
    g = nx.Graph()
    g.add_nodes_from(range(len(sample)))
    for i, j in combinations(range(len(sample)), 2):
        if tie(sample[i], sample[j]):
            g.add_edge(i, j)
    sets = []
    all_typed = True
    for clique in sorted(sorted(c) for c in nx.find_cliques(g)):
        pts = [sample[i] for i in clique]
        if len(pts) == 1:
            sets.append(RSet("both", tuple(clique), None))
        elif all(p.x == pts[0].x for p in pts):
            sets.append(RSet("x", tuple(clique), pts[0].x))
        elif all(p.y == pts[0].y for p in pts):
            sets.append(RSet("y", tuple(clique), pts[0].y))
        else:
            sets.append(RSet("none", tuple(clique), None))
            all_typed = False
    witnesses = []
    for si, rs in enumerate(sets):
        if rs.kind not in ("x", "y"):
            continue
        for oi, q in enumerate(sample):
            if oi in rs.members:
                continue
            other = q.x if rs.kind == "x" else q.y
            if other == rs.line:
                continue
            for mi in rs.members:
                if not tie(sample[mi], q):
                    witnesses.append((si, oi, mi))
                    break
    return RSetClassification(tuple(sets), tuple(witnesses), all_typed)


# reconstruction -------------------------------------------------------------------

@dataclass(frozen=True)
class Reconstruction:
    u: SemilinearMap
    v: SemilinearMap
    flipped: bool
    sigma: str
    probes_checked: int


def _frame_map(line_image: Callable, m: int, exact: bool):
    """Semilinear matrix and sigma from images of the standard projective frame."""
    e = [basis_vector(m, i, exact) for i in range(m)]
    z = [line_image(v) for v in e]
    total = tuple((ONE if exact else 1.0 + 0j) for _ in range(m))
    zs = line_image(total)
    if exact:
        lam = exact_solve_combination(z, zs, QQ_I)
        if lam is None or any(gq_is_zero(t) for t in lam):
            raise ReconstructionError("frame images are not in general position")
        cols = [tuple(lam[i] * t for t in z[i]) for i in range(m)]
        probe = tuple(ONE if k == 0 else (I_UNIT if k == 1 else ZERO) for k in range(m))
        w = line_image(probe)
        coeffs = exact_solve_combination(cols, w, QQ_I)
        if coeffs is None or any(not gq_is_zero(c) for c in coeffs[2:]) or gq_is_zero(coeffs[0]):
            raise ReconstructionError("image of e1 + i e2 outside the expected line")
        ratio = coeffs[1] / coeffs[0]
        if ratio == I_UNIT:
            sigma = "identity"
        elif ratio == QQ_I(0, -1):
            sigma = "conjugation"
        else:
            raise ReconstructionError("field automorphism is neither identity nor conjugation")
        mat = tuple(tuple(cols[j][i] for j in range(m)) for i in range(m))
        return mat, sigma
    zmat = np.array([to_complex_vector(t) for t in z]).T
    lam, *_ = np.linalg.lstsq(zmat, to_complex_vector(zs), rcond=None)
    resid = np.linalg.norm(zmat @ lam - to_complex_vector(zs))
    if resid > 1e-6 or np.min(np.abs(lam)) < 1e-9:
        raise ReconstructionError("frame images are not in general position")
    mat = zmat * lam[None, :]
    probe = np.zeros(m, dtype=complex)
    probe[0], probe[1] = 1, 1j
    w = to_complex_vector(line_image(tuple(probe)))
    coeffs, *_ = np.linalg.lstsq(mat, w, rcond=None)
    if np.linalg.norm(mat @ coeffs - w) > 1e-6 * np.linalg.norm(w) or np.max(np.abs(coeffs[2:]), initial=0) > 1e-6:
        raise ReconstructionError("image of e1 + i e2 outside the expected line")
    ratio = coeffs[1] / coeffs[0]
    if abs(ratio - 1j) < 1e-6:
        sigma = "identity"
    elif abs(ratio + 1j) < 1e-6:
        sigma = "conjugation"
    else:
        raise ReconstructionError("field automorphism is neither identity nor conjugation")
    return mat, sigma


def reconstruct_pair(phi: Callable, m: int, exact: bool = True, probes: int = 50, seed: int = 0) -> Reconstruction:
    """Recover ``(U, V, flipped)`` from a tie-preserving point map on ``M_m``.

    The flip is read off from the image of a set of points sharing their
    first line; the line maps come from transporting such sets; the
    semilinear matrices come from the images of the projective frame.
    """
    if m < 3:
        raise CStarError("reconstruction needs m >= 3")
    alg = FdAlgebra((m,))
    e = [basis_vector(m, i, exact) for i in range(m)]
    one = ONE if exact else 1.0 + 0j

    def point(x, y):
        return canonicalize_point(alg, 0, x, y)

    e12 = tuple(a + b for a, b in zip(e[0], e[1]))
    rset = [point(e[0], e[0]), point(e[0], e[1]), point(e[0], e12)]
    images = [phi(p) for p in rset]
    if all(q.x == images[0].x for q in images):
        flipped = False
        oracle = phi
    elif all(q.y == images[0].y for q in images):
        flipped = True
        oracle = adjoint_after(phi)
    else:
        raise ReconstructionError("image of a shared-first-line set has no shared line")

    def phi_x(x):
        return oracle(point(x, e[0])).x.coords

    def phi_y(y):
        return oracle(point(e[0], y)).y.coords

    umat, su = _frame_map(phi_x, m, exact)
    vmat, sv = _frame_map(phi_y, m, exact)
    if su != sv:
        raise ReconstructionError("line maps disagree on the field automorphism")
    u = SemilinearMap(umat, su)
    v = SemilinearMap(vmat, sv)
    rebuilt = phi_from_pair(u, v, alg, alg)
    if flipped:
        rebuilt = adjoint_after(rebuilt)
    rng = random.Random(seed)
    checked = 0
    frame = e + [tuple(one for _ in range(m))]
    pairs = [(a, b) for a in frame for b in frame]
    for _ in range(probes):
        a = [gq(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(m)]
        b = [gq(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(m)]
        a[0] = a[0] + 7  # keep away from zero
        b[0] = b[0] + 7
        if not exact:
            a = [gq_to_complex(t) for t in a]
            b = [gq_to_complex(t) for t in b]
        pairs.append((tuple(a), tuple(b)))
    for a, b in pairs:
        p = point(a, b)
        if rebuilt(p) != phi(p):
            raise ReconstructionError(f"rebuilt map disagrees with the oracle at {p}")
        checked += 1
    return Reconstruction(u, v, flipped, su, checked)


def scalar_residual(found: SemilinearMap, truth: SemilinearMap) -> float:
    """``min_λ ‖M_found − λ M_truth‖_F / ‖M_found‖_F``."""
    a, b = found.array(), truth.array()
    lam = np.vdot(b, a) / np.vdot(b, b)
    return float(np.linalg.norm(a - lam * b) / np.linalg.norm(a))


def exactly_proportional(found: SemilinearMap, truth: SemilinearMap) -> bool:
    fa = [v for r in found.matrix for v in r]
    tb = [v for r in truth.matrix for v in r]
    k = next(i for i, v in enumerate(tb) if not gq_is_zero(v))
    lam = fa[k] / tb[k]
    return all(a == lam * b for a, b in zip(fa, tb))


# classification ---------------------------------------------------------------

def dimension_of_class(algebra: FdAlgebra, block: int) -> int:
    """Fewest points sharing a second line whose closure holds every probe with that line."""
    n = algebra.blocks[block]
    y0 = basis_vector(n, 0)
    probes = [canonicalize_point(algebra, block, x, y0) for x in _probe_vectors(n, True, extra=n, seed=block)]
    chosen: list = []
    for p in probes:
        if not chosen or not closure_membership_c(algebra, chosen, p):
            chosen.append(p)
    # minimality: dropping any chosen point loses some probe
    for i in range(len(chosen)):
        rest = chosen[:i] + chosen[i + 1:]
        if rest and all(closure_membership_c(algebra, rest, p) for p in probes):
            raise AssertionError("greedy spanning set is not minimal")
    return len(chosen)


@dataclass(frozen=True)
class Classification:
    isomorphic: bool
    fingerprint_a: tuple
    fingerprint_b: tuple
    ccr: bool = True
    discrete_primitive_spectrum: bool = True


def fingerprint(algebra: FdAlgebra) -> tuple:
    """Sorted class dimensions, each computed from closure data only."""
    dims = []
    for members, _, support in block_classes(algebra):
        dims.append(dimension_of_class(algebra, members[0].block))
    return tuple(sorted(dims))


def classify_algebra(a: FdAlgebra, b: FdAlgebra) -> Classification:
    fa, fb = fingerprint(a), fingerprint(b)
    disc = spectra(a, build_spaces=False).discrete and spectra(b, build_spaces=False).discrete
    # every block is a full matrix algebra, so each irreducible image is all compact operators
    return Classification(fa == fb, fa, fb, True, disc)


# random generation ---------------------------------------------------------------

def random_gaussian_vector(rng: random.Random, n: int, bound: int = 2, pool: Sequence | None = None):
    if pool is not None and rng.random() < 0.5:
        return rng.choice(pool)
    while True:
        v = tuple(gq(rng.randint(-bound, bound), rng.randint(-bound, bound)) for _ in range(n))
        if any(not gq_is_zero(t) for t in v):
            return v


def random_point(rng: random.Random, algebra: FdAlgebra, block: int | None = None, pool: dict | None = None):
    k = rng.randrange(len(algebra.blocks)) if block is None else block
    n = algebra.blocks[k]
    choices = pool.get(n) if pool else None
    return canonicalize_point(algebra, k, random_gaussian_vector(rng, n, pool=choices),
                              random_gaussian_vector(rng, n, pool=choices))


def random_invertible(rng: random.Random, m: int, exact: bool = True, bound: int = 3):
    while True:
        if exact:
            mat = [[gq(rng.randint(-bound, bound), rng.randint(-bound, bound)) for _ in range(m)]
                   for _ in range(m)]
            if exact_rank(mat) == m:
                return mat
        else:
            mat = np.array([[complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(m)] for _ in range(m)])
            if np.linalg.cond(mat) < 1e4:
                return mat
