"""Gauss hypergeometric function on the real axis and the interference kernels.

Only the real branch z < 1 is supported: every kernel argument below is of
the form -v or -v * x^(-beta) with v >= 0, so no complex continuation is
needed.  Evaluation strategy:

  * |z| <= 0.5              direct power series,
  * 0.5 < z < 1             power series with a raised term budget,
  * -2 <= z < -0.5          Pfaff transformation z -> z/(z-1),
  * z < -2                  1/z connection formula (fast for huge |z|),
                            falling back to Pfaff when a - b is integral.
"""

from __future__ import annotations

import math

_MAX_TERMS = 500_000
_SERIES_TOL = 1e-16


class ConvergenceError(RuntimeError):
    """Series or quadrature failed to reach the requested accuracy."""


def _series_2f1(a: float, b: float, c: float, z: float, max_terms: int = _MAX_TERMS) -> float:
    term = 1.0
    total = 1.0
    for n in range(max_terms):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
        total += term
        if abs(term) <= _SERIES_TOL * max(1.0, abs(total)):
            return total
    raise ConvergenceError(
        f"2F1 series did not converge for (a={a}, b={b}, c={c}, z={z}); "
        f"last term {term:.3e} after {max_terms} terms"
    )


def _pfaff_2f1(a: float, b: float, c: float, z: float) -> float:
    # 2F1(a,b;c;z) = (1-z)^(-a) 2F1(a, c-b; c; z/(z-1)); maps z<-0.5 to (1/3, 1)
    w = z / (z - 1.0)
    return (1.0 - z) ** (-a) * _series_2f1(a, c - b, c, w)


def _large_z_2f1(a: float, b: float, c: float, z: float) -> float:
    # Inversion formula for z < -2 (requires a - b non-integral):
    # 2F1 = G(c)G(b-a)/(G(b)G(c-a)) (-z)^-a 2F1(a, a-c+1; a-b+1; 1/z)
    #     + G(c)G(a-b)/(G(a)G(c-b)) (-z)^-b 2F1(b, b-c+1; b-a+1; 1/z)
    inv = 1.0 / z
    ga = math.gamma
    t1 = ga(c) * ga(b - a) / (ga(b) * ga(c - a)) * (-z) ** (-a) \
        * _series_2f1(a, a - c + 1.0, a - b + 1.0, inv)
    t2 = ga(c) * ga(a - b) / (ga(a) * ga(c - b)) * (-z) ** (-b) \
        * _series_2f1(b, b - c + 1.0, b - a + 1.0, inv)
    return t1 + t2


def _is_nonpositive_integer(x: float, tol: float = 1e-12) -> bool:
    return x <= tol and abs(x - round(x)) < tol


def gauss_2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric function 2F1(a, b; c; z) for real z < 1."""
    if _is_nonpositive_integer(c):
        raise ValueError(f"2F1 parameter pole: c = {c} is a non-positive integer")
    if z >= 1.0:
        raise ValueError(f"argument z = {z} outside the supported branch z < 1")
    if z == 0.0:
        return 1.0
    if abs(z) <= 0.5:
        return _series_2f1(a, b, c, z)
    if z > 0.0:
        # slow convergence near 1 is tolerated; the kernels never land here
        return _series_2f1(a, b, c, z)
    if z >= -2.0:
        return _pfaff_2f1(a, b, c, z)
    ab_diff = a - b
    if abs(ab_diff - round(ab_diff)) < 1e-9:
        # degenerate inversion; Pfaff still converges, just more slowly
        return _pfaff_2f1(a, b, c, z)
    # gamma() overflows for large parameters; fall back to Pfaff there too
    try:
        return _large_z_2f1(a, b, c, z)
    except (OverflowError, ValueError):
        return _pfaff_2f1(a, b, c, z)


def _check_beta(beta: float) -> None:
    if beta <= 2.0:
        raise ValueError(
            f"path-loss exponent beta = {beta} makes the interference integral diverge (need beta > 2)"
        )


def kernel_z1(v: float, beta: float) -> float:
    """Interference kernel with near-field exclusion at the serving distance.

    Z1(v) = (2v / (beta-2)) * 2F1(1, 1-2/beta; 2-2/beta; -v)
          = v^(2/beta) * int_{v^(-2/beta)}^inf du / (1 + u^(beta/2)).
    """
    _check_beta(beta)
    if v < 0.0:
        raise ValueError("kernel argument must be non-negative")
    if v == 0.0:
        return 0.0
    return 2.0 * v / (beta - 2.0) * gauss_2f1(1.0, 1.0 - 2.0 / beta, 2.0 - 2.0 / beta, -v)


def kernel_z2(v: float, beta: float, a: float = 0.0) -> float:
    """Interference kernel for interferers allowed arbitrarily close.

    For a = 0 (the default, taken as the exact analytic limit):
    Z2 = v^(2/beta) * int_0^inf du / (1 + u^(beta/2))
       = v^(2/beta) * (2 pi / beta) / sin(2 pi / beta).
    For a > 0 the lower cutoff is kept for sensitivity checks.
    """
    _check_beta(beta)
    if v < 0.0 or a < 0.0:
        raise ValueError("kernel arguments must be non-negative")
    if v == 0.0:
        return 0.0
    if a == 0.0:
        return v ** (2.0 / beta) * (2.0 * math.pi / beta) / math.sin(2.0 * math.pi / beta)
    return (
        v ** (2.0 / beta)
        * (2.0 * a ** ((2.0 - beta) / 2.0) / (beta - 2.0))
        * gauss_2f1(1.0, 1.0 - 2.0 / beta, 2.0 - 2.0 / beta, -(a ** (-beta / 2.0)))
    )


def kernel_z3(v: float, x: float, beta: float) -> float:
    """Interference kernel at normalized serving-vs-blocker distance x in (0, 1].

    Z3(v; x) = (2v / (beta-2)) x^(-beta) 2F1(1, 1-2/beta; 2-2/beta; -v x^(-beta)),
    which equals Z1(v * x^(-beta)).  Diverges as x -> 0; callers integrate it
    against an x^2 weight and must use open-endpoint rules near 0.
    """
    _check_beta(beta)
    if v < 0.0:
        raise ValueError("kernel argument must be non-negative")
    if not 0.0 < x <= 1.0:
        raise ValueError(f"normalized distance x = {x} outside (0, 1]")
    if v == 0.0:
        return 0.0
    return kernel_z1(v * x ** (-beta), beta)


def kernel_z2_scale(beta: float) -> float:
    """Large-argument slope of Z1 and the a=0 prefactor of Z2:
    (2 pi / beta) / sin(2 pi / beta)."""
    _check_beta(beta)
    return (2.0 * math.pi / beta) / math.sin(2.0 * math.pi / beta)
