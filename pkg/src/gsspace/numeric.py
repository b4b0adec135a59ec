"""Scalar helpers and rank decisions shared by the Banach and C*-algebra modules.

Exact arithmetic uses sympy polynomial domains: ``QQ`` for real rationals,
``QQ_I`` for Gaussian rationals and cyclotomic algebraic fields for roots of
unity.  Float arithmetic uses numpy with an explicit rank tolerance; every
float decision carries a margin and ambiguous ones raise
:class:`IndeterminateError`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import sympy
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix

RANK_TOL = 1e-9
MARGIN_FLOOR = 1e-6


class IndeterminateError(ArithmeticError):
    """A float decision fell inside the ambiguity band."""

    def __init__(self, message: str, margin: float):
        super().__init__(f"{message} (margin {margin:.3e})")
        self.margin = margin


@dataclass(frozen=True)
class Decision:
    """Boolean outcome with the numerical margin that supports it.

    Exact decisions use ``margin = inf``.
    """

    value: bool
    margin: float = float("inf")

    def __bool__(self) -> bool:
        return self.value


# Gaussian rationals ---------------------------------------------------------

def gq(re_part=0, im_part=0):
    """Gaussian rational from two rationals (int, Fraction, str or QQ)."""
    return QQ_I(_qq(re_part), _qq(im_part))


def _qq(value):
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, str):
        f = Fraction(value)
        return QQ(f.numerator, f.denominator)
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass a Fraction or string")
    return QQ.convert(value)


def to_gq(value):
    """Coerce an int, Fraction, string literal or Gaussian rational."""
    if isinstance(value, str):
        return parse_gaussian(value)
    if isinstance(value, complex):
        raise TypeError("complex floats are not exact")
    if type(value).__name__ == "GaussianRational":
        return value
    return gq(value, 0)


def conj(z):
    """Complex conjugate for Gaussian rationals, Fractions and floats."""
    if type(z).__name__ == "GaussianRational":
        return QQ_I(z.x, -z.y)
    if isinstance(z, (complex, np.complexfloating)):
        return z.conjugate()
    return z


def gq_is_zero(z) -> bool:
    return not z.x and not z.y


def gq_to_complex(z) -> complex:
    return complex(float(z.x), float(z.y))


_GAUSS_RE = re.compile(
    r"^\s*(?P<re>[+-]?\d+(?:/\d+)?)?\s*(?:(?P<sign>[+-])\s*(?P<im>\d+(?:/\d+)?)?\s*\*?\s*i)?\s*$"
)
_PURE_IM_RE = re.compile(r"^\s*(?P<sign>[+-]?)\s*(?P<im>\d+(?:/\d+)?)?\s*\*?\s*i\s*$")


def parse_gaussian(text: str):
    """Parse literals such as ``3``, ``-1/2``, ``1+2i``, ``-i`` or ``2/3-1/4i``."""
    m = _PURE_IM_RE.match(text)
    if m:
        im = Fraction(m.group("im") or 1)
        if m.group("sign") == "-":
            im = -im
        return gq(0, im)
    m = _GAUSS_RE.match(text)
    if not m or (m.group("re") is None and m.group("sign") is None):
        raise ValueError(f"not a Gaussian rational literal: {text!r}")
    re_part = Fraction(m.group("re") or 0)
    im_part = Fraction(0)
    if m.group("sign"):
        im_part = Fraction(m.group("im") or 1)
        if m.group("sign") == "-":
            im_part = -im_part
    return gq(re_part, im_part)


def format_gaussian(z) -> str:
    """Inverse of :func:`parse_gaussian` with a canonical spelling."""
    re_part, im_part = Fraction(int(z.x.numerator), int(z.x.denominator)), Fraction(
        int(z.y.numerator), int(z.y.denominator))
    if im_part == 0:
        return str(re_part)
    im_txt = "" if abs(im_part) == 1 else str(abs(im_part))
    sign = "-" if im_part < 0 else "+"
    if re_part == 0:
        return f"{'-' if sign == '-' else ''}{im_txt}i"
    return f"{re_part}{sign}{im_txt}i"


# cyclotomic fields -------------------------------------------------------

@lru_cache(maxsize=None)
def cyclotomic_field(order: int):
    """Return ``(K, zeta)`` with ``zeta`` a primitive ``order``-th root of unity."""
    if order < 1:
        raise ValueError("order must be positive")
    gen = sympy.exp(2 * sympy.pi * sympy.I / order)
    field = QQ.algebraic_field(gen)
    return field, field.from_sympy(gen)


def root_of_unity(turn: Fraction, order: int):
    """``exp(2 pi i turn)`` as an element of the ``order``-th cyclotomic field."""
    field, zeta = cyclotomic_field(order)
    k = turn * order
    if k.denominator != 1:
        raise ValueError(f"turn {turn} is not a multiple of 1/{order}")
    return zeta ** (int(k) % order) if int(k) % order else field.one


# exact linear algebra --------------------------------------------------------

def _domain_for(rows, domain=None):
    if domain is not None:
        return domain
    for row in rows:
        for v in row:
            if type(v).__name__ == "GaussianRational":
                return QQ_I
    return QQ


def _dm(rows, domain=None):
    rows = [list(r) for r in rows]
    dom = _domain_for(rows, domain)
    ncols = len(rows[0]) if rows else 0
    conv = [[dom.convert(_qq(v)) if isinstance(v, Fraction) else dom.convert(v) for v in r]
            for r in rows]
    return DomainMatrix(conv, (len(rows), ncols), dom).to_sparse()


def exact_rank(rows, domain=None) -> int:
    rows = [list(r) for r in rows]
    if not rows or not rows[0]:
        return 0
    return _dm(rows, domain).rank()


def exact_nullspace(rows, ncols: int, domain=None):
    """Basis (list of coordinate lists) of ``{v : rows @ v = 0}``."""
    rows = [list(r) for r in rows]
    if not rows:
        dom = domain or QQ
        return [[dom.one if i == j else dom.zero for j in range(ncols)] for i in range(ncols)]
    dm = _dm(rows, domain)
    ns = dm.nullspace()
    return [list(r) for r in ns.to_list()] if ns.shape[0] else []


def exact_in_span(rows, vec, domain=None) -> bool:
    rows = [list(r) for r in rows]
    if not rows:
        return all(_is_zero(v) for v in vec)
    base = exact_rank(rows, domain)
    return exact_rank(rows + [list(vec)], domain) == base


def exact_solve_combination(rows, vec, domain=None):
    """Coefficients ``c`` with ``sum c_i rows_i = vec`` or ``None``."""
    rows = [list(r) for r in rows]
    dom = _domain_for(rows + [list(vec)], domain)
    n = len(rows)
    # columns are the generating vectors
    aug = [[rows[i][k] for i in range(n)] + [vec[k]] for k in range(len(vec))]
    rref, pivots = _dm(aug, dom).rref()
    if n in pivots:
        return None
    mat = rref.to_list()
    coeffs = [dom.zero] * n
    for r, p in enumerate(pivots):
        coeffs[p] = mat[r][n]
    return coeffs


def _is_zero(v) -> bool:
    if type(v).__name__ == "GaussianRational":
        return gq_is_zero(v)
    return v == 0


# float linear algebra ------------------------------------------------------

def float_rank(matrix, tol: float = RANK_TOL):
    """Numerical rank of ``matrix`` with its margin.

    The margin is the smallest retained singular value relative to the
    largest; a retained value below ``MARGIN_FLOOR`` is ambiguous.
    """
    m = np.atleast_2d(np.asarray(matrix, dtype=complex))
    if m.size == 0:
        return 0, float("inf")
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] == 0:
        return 0, float("inf")
    ratios = s / s[0]
    kept = ratios[ratios > tol]
    margin = float(kept.min())
    if margin < MARGIN_FLOOR:
        raise IndeterminateError("singular value inside ambiguity band", margin)
    return int(kept.size), margin


def float_row_basis(rows, tol: float = RANK_TOL):
    """Orthonormal basis of the row space, plus the rank margin."""
    m = np.atleast_2d(np.asarray(rows, dtype=complex))
    r, margin = float_rank(m, tol)
    if r == 0:
        return np.zeros((0, m.shape[1]), dtype=complex), margin
    _, _, vh = np.linalg.svd(m)
    return vh[:r], margin


def float_in_span(rows, vec, tol: float = RANK_TOL) -> Decision:
    """Whether ``vec`` lies in the row span of ``rows`` (relative residual test)."""
    v = np.asarray(vec, dtype=complex)
    nv = np.linalg.norm(v)
    if nv == 0:
        return Decision(True)
    if len(rows) == 0:
        return Decision(False, 1.0)
    basis, rank_margin = float_row_basis(rows, tol)
    # rows of basis are orthonormal in C^n with the plain dot product on conj
    proj = (basis.conj() @ v) @ basis
    resid = float(np.linalg.norm(v - proj) / nv)
    if resid <= tol:
        return Decision(True, rank_margin)
    if resid < MARGIN_FLOOR:
        raise IndeterminateError("span residual inside ambiguity band", resid)
    return Decision(False, resid)


def float_nullspace(matrix, tol: float = RANK_TOL):
    """Orthonormal basis (rows) of the null space of ``matrix``, with margin."""
    m = np.atleast_2d(np.asarray(matrix, dtype=complex))
    r, margin = float_rank(m, tol)
    _, _, vh = np.linalg.svd(m)
    return vh[r:].conj(), margin
