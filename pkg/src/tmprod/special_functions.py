"""Log-Gamma and the classical sine/Gamma identities the finite forms rest on.

Everything here is a scalar helper: log_gamma with a stated accuracy contract,
the Gauss-type row product of Gamma values at equally spaced arguments, the
reflection formula, and the sine multiplication formula.  The *_check
functions return both sides of their identity so tests can compare them.
"""

from __future__ import annotations

import math


def log_gamma(x: float) -> float:
    """log Gamma(x) for x > 0.

    Delegates to the platform lgamma, which meets a 1e-13 relative-error
    contract on (0, 1e4] with a wide margin; the test suite checks this
    against an independent high-precision oracle.
    """
    if not x > 0:
        raise ValueError("log_gamma requires x > 0")
    return math.lgamma(x)


def gamma_row_product(m: int) -> float:
    """log of Gamma(1/m) * Gamma(2/m) * ... * Gamma((m-1)/m), summed directly.

    The closed form ((m-1)/2) log(2 pi) - (1/2) log m is served separately by
    gamma_row_product_closed_form so the two can be compared.
    """
    if m < 2:
        raise ValueError("row product needs m >= 2")
    return math.fsum(log_gamma(j / m) for j in range(1, m))


def gamma_row_product_closed_form(m: int) -> float:
    if m < 2:
        raise ValueError("row product needs m >= 2")
    return 0.5 * (m - 1) * math.log(2.0 * math.pi) - 0.5 * math.log(m)


def sin_pi(u: float) -> float:
    """sin(pi * u) with exact argument reduction.

    Reduces u mod 2 with fmod (exact), folds into [0, 1/2] with exact
    subtractions, and only then multiplies by pi.  Near-integer arguments
    therefore lose no accuracy to the pi multiplication, and arguments that
    differ by an exact even integer give bit-identical results.
    """
    r = math.fmod(u, 2.0)
    if r < 0.0:
        r += 2.0
    sign = 1.0
    if r > 1.0:
        sign = -1.0
        r -= 1.0
    if r > 0.5:
        r = 1.0 - r
    return sign * math.sin(math.pi * r)


def reflection_check(z: float) -> tuple[float, float]:
    """Both sides of the reflection formula in log form, for 0 < z < 1.

    Returns (log Gamma(z) + log Gamma(1-z), log(pi / sin(pi z))).  The sine is
    evaluated at the reduced argument pi * min(z, 1-z) so the right side stays
    accurate next to the poles at 0 and 1.
    """
    if not (0.0 < z < 1.0):
        raise ValueError("reflection_check requires 0 < z < 1")
    lhs = log_gamma(z) + log_gamma(1.0 - z)
    rhs = math.log(math.pi) - math.log(math.sin(math.pi * min(z, 1.0 - z)))
    return lhs, rhs


def sine_multiplication(n: int, x: float) -> tuple[float, float]:
    """Both sides of sin(n x) = (1/2) * prod_{j<n} 2 sin(x + j pi / n)."""
    if n < 1:
        raise ValueError("sine_multiplication requires n >= 1")
    lhs = math.sin(n * x)
    rhs = 0.5 * math.prod(2.0 * math.sin(x + j * math.pi / n) for j in range(n))
    return lhs, rhs
