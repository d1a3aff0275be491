"""Closed-form trigonometry of right-angled hyperbolic hexagons.

A right-angled hexagon is determined by three pairwise non-adjacent side
lengths ``a, b, c``.  Going counterclockwise its sides are
``a, gamma, b, alpha, c, beta`` where ``alpha`` is opposite ``a``,
``beta`` opposite ``b`` and ``gamma`` opposite ``c``.

Functions named with upper-case arguments (``side_sum``,
``side_sum_partial``) take hyperbolic cosines ``A = cosh a`` etc.; all
others take lengths.
"""

import math

from .errors import DomainError

__all__ = [
    "opposite_side",
    "hexagon_sides",
    "side_sum",
    "side_sum_partial",
    "altitude",
    "collar_width",
    "equal_dual_length",
    "validate_signature",
    "bavard_bound",
    "equal_boundary_bound",
]


def _check_lengths(*xs):
    for x in xs:
        if not (x > 0 and math.isfinite(x)):
            raise DomainError(f"lengths must be positive and finite, got {x!r}")


def _check_cosh(*xs):
    for x in xs:
        if not (x > 1 and math.isfinite(x)):
            raise DomainError(f"cosh-values must be finite and > 1, got {x!r}")


def _log_cosh(x):
    x = abs(x)
    return x + math.log1p(math.exp(-2.0 * x)) - math.log(2.0)


def _log_sinh(x):
    if x > 20.0:
        return x + math.log1p(-math.exp(-2.0 * x)) - math.log(2.0)
    return math.log(math.sinh(x))


def opposite_side(a, b, c):
    """Length of the side opposite ``a`` in the hexagon with alternating sides a, b, c."""
    _check_lengths(a, b, c)
    # cosh(alpha) - 1 = (cosh(b - c) + cosh a) / (sinh b sinh c); no cancellation when b, c are long
    p, q = _log_cosh(b - c), _log_cosh(a)
    top = max(p, q)
    lg = top + math.log(math.exp(p - top) + math.exp(q - top)) - _log_sinh(b) - _log_sinh(c)
    if lg > 30.0:
        return lg + math.log(2.0) + math.log1p(math.exp(-lg))
    eps = math.exp(lg)
    # sqrt(eps) through lg / 2 survives where eps itself underflows
    return math.log1p(eps + math.exp(0.5 * lg) * math.sqrt(eps + 2.0))


def hexagon_sides(a, b, c):
    """All six side lengths counterclockwise: ``(a, gamma, b, alpha, c, beta)``.

    Index ``2k`` is an input side and index ``2k + 1`` is the side opposite
    input ``(2k + 4) % 6``.
    """
    return (a, opposite_side(c, a, b), b, opposite_side(a, b, c), c, opposite_side(b, c, a))


def _acosh_ratio(a, b, c):
    # acosh((a + b c) / (sinh sinh)), arranged so huge cosh-values do not overflow
    sb = math.sqrt(b - 1.0) * math.sqrt(b + 1.0)
    sc = math.sqrt(c - 1.0) * math.sqrt(c + 1.0)
    return math.acosh(a / sb / sc + (b / sb) * (c / sc))


def side_sum(A, B, C):
    """Sum ``alpha + beta + gamma`` of the three remaining sides, from cosh-values."""
    _check_cosh(A, B, C)
    return _acosh_ratio(A, B, C) + _acosh_ratio(B, A, C) + _acosh_ratio(C, A, B)


def side_sum_partial(A, B, C):
    """Partial derivative of :func:`side_sum` with respect to its first argument."""
    _check_cosh(A, B, C)
    return (A - 1.0 - B - C) / ((A - 1.0) * math.sqrt(A * A + B * B + C * C + 2.0 * A * B * C - 1.0))


def altitude(a, b, c):
    """Length of the common perpendicular from side ``a`` to the opposite side."""
    _check_lengths(a, b, c)
    A, B, C = math.cosh(a), math.cosh(b), math.cosh(c)
    return math.acosh(math.sqrt(A * A + B * B + C * C + 2.0 * A * B * C - 1.0) / math.sinh(a))


def collar_width(length):
    """Half-width of the embedded collar around a simple closed geodesic."""
    _check_lengths(length)
    return math.asinh(1.0 / math.sinh(length / 2.0))


def equal_dual_length(x):
    """The ``y`` with ``cosh y = cosh x / (cosh x - 1)``.

    In a hexagon with three alternating sides of length ``x`` the other three
    sides have length ``y``; the map is an involution.
    """
    _check_lengths(x)
    s = math.sinh(x / 2.0)
    return math.acosh(math.cosh(x) / (2.0 * s * s))


def validate_signature(g, n):
    """Raise :class:`DomainError` unless ``(g, n)`` is a hyperbolic signature with boundary."""
    if int(g) != g or int(n) != n:
        raise DomainError(f"signature must be integral, got ({g}, {n})")
    if g < 0 or n < 1:
        raise DomainError(f"need g >= 0 and n >= 1, got ({g}, {n})")
    if 2 * g - 2 + n <= 0:
        raise DomainError(f"signature ({g}, {n}) is not hyperbolic")
    return int(g), int(n)


def bavard_bound(g, n, L):
    """Sharp upper bound for the orthosystole at total boundary length ``L``."""
    g, n = validate_signature(g, n)
    _check_lengths(L)
    return 2.0 * math.asinh(1.0 / (2.0 * math.sinh(L / (24 * g - 24 + 12 * n))))


def equal_boundary_bound(g, ell):
    """Orthosystole of the equal-arc genus-``g`` surface with two boundaries of length ``ell``."""
    if int(g) != g or g < 1:
        raise DomainError(f"genus must be an integer >= 1, got {g!r}")
    _check_lengths(ell)
    return equal_dual_length(ell / (6 * int(g)))
