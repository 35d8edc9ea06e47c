"""Special functions used by the analytic outage engine.

Regularized incomplete gamma and beta functions are evaluated with the
usual series / continued-fraction split (modified Lentz).  For large
shape parameters the log-prefactor is formed from a Stirling expansion so
the leading terms cancel analytically instead of numerically; absolute
accuracy is ~1e-13 for shapes below ~1e3 and degrades to ~1e-10 near 1e6.
"""
import math

__all__ = [
    "DomainError",
    "clamp_probability",
    "log_gamma",
    "log_beta",
    "reg_lower_gamma",
    "reg_upper_gamma",
    "reg_inc_beta",
]

_EPS = 1e-16
_TINY = 1e-300
_LOG_2PI = math.log(2.0 * math.pi)


class DomainError(ValueError):
    """Argument outside the mathematical domain of a function."""


def clamp_probability(p: float) -> float:
    if math.isnan(p):
        raise DomainError("probability is NaN")
    return min(1.0, max(0.0, p))


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    if not x > 0 or math.isinf(x):
        raise DomainError(f"log_gamma requires a finite x > 0, got {x!r}")
    return math.lgamma(x)


def log_beta(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def _log1p(t: float) -> float:
    # t rounds to -1 when the true argument is merely tiny; the prefactor then underflows anyway
    return math.log1p(t) if t > -1.0 else -math.inf


def _log1pmx(t: float) -> float:
    # log(1 + t) - t without cancellation for small |t|
    if abs(t) > 0.1:
        return _log1p(t) - t
    y = t / (2.0 + t)
    y2 = y * y
    term = y * y2
    acc = 0.0
    k = 3
    while True:
        inc = term / k
        acc += inc
        if abs(inc) <= 1e-17 * abs(acc):
            break
        term *= y2
        k += 2
    return -t * t / (2.0 + t) + 2.0 * acc


def _stirling_error(a: float) -> float:
    """lgamma(a) - [(a - 1/2) ln a - a + ln(2 pi)/2] for a >= 10."""
    r = 1.0 / a
    r2 = r * r
    return r * (1.0 / 12 - r2 * (1.0 / 360 - r2 * (1.0 / 1260 - r2 * (1.0 / 1680 - r2 / 1188))))


def _log_gamma_prefactor(a: float, x: float) -> float:
    # ln(x^a e^-x / Gamma(a))
    if a < 10.0:
        return a * math.log(x) - x - math.lgamma(a)
    t = (x - a) / a
    return a * _log1pmx(t) + 0.5 * math.log(a) - 0.5 * _LOG_2PI - _stirling_error(a)


def _max_iter(scale: float) -> int:
    return 500 + int(50.0 * math.sqrt(scale))


def _gamma_series(a: float, x: float) -> float:
    # sum_{n>=0} x^n / ((a+1)...(a+n))
    term = 1.0
    total = 1.0
    ap = a
    for _ in range(_max_iter(a)):
        ap += 1.0
        term *= x / ap
        total += term
        if term < total * _EPS:
            return total
    raise ArithmeticError(f"incomplete gamma series did not converge (a={a}, x={x})")


def _gamma_cont_frac(a: float, x: float) -> float:
    # Lentz evaluation of the continued fraction for Gamma(a, x) e^x x^-a
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _max_iter(a)):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete gamma continued fraction did not converge (a={a}, x={x})")


def _check_gamma_args(shape: float, x: float) -> None:
    if not shape > 0 or math.isinf(shape):
        raise DomainError(f"shape must be finite and > 0, got {shape!r}")
    if not x >= 0:
        raise DomainError(f"x must be >= 0, got {x!r}")


def reg_lower_gamma(shape: float, x: float) -> float:
    """Regularized lower incomplete gamma P(shape, x) = gamma(shape, x) / Gamma(shape)."""
    _check_gamma_args(shape, x)
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    log_pref = _log_gamma_prefactor(shape, x)
    if x < shape + 1.0:
        if log_pref < -745.0:
            return 0.0
        return clamp_probability(math.exp(log_pref) / shape * _gamma_series(shape, x))
    if log_pref < -745.0:
        return 1.0
    return clamp_probability(1.0 - math.exp(log_pref) * _gamma_cont_frac(shape, x))


def reg_upper_gamma(shape: float, x: float) -> float:
    """Q(shape, x) = 1 - P(shape, x), computed without cancellation in the right tail."""
    _check_gamma_args(shape, x)
    if x == 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    log_pref = _log_gamma_prefactor(shape, x)
    if x < shape + 1.0:
        if log_pref < -745.0:
            return 1.0
        return clamp_probability(1.0 - math.exp(log_pref) / shape * _gamma_series(shape, x))
    if log_pref < -745.0:
        return 0.0
    return clamp_probability(math.exp(log_pref) * _gamma_cont_frac(shape, x))


def _log_beta_prefactor_mixed(x: float, a: float, b: float) -> float:
    # a small, b >= 10: lgamma(b) - lgamma(a+b) expanded so O(b) terms cancel analytically
    s = a + b
    return (
        a * math.log(x * s)
        + b * _log1p(-x)
        + (b - 0.5) * math.log1p(a / b)
        - a
        - math.lgamma(a)
        - _stirling_error(b)
        + _stirling_error(s)
    )


def _log_beta_prefactor(x: float, a: float, b: float) -> float:
    # ln(x^a (1-x)^b / B(a, b))
    if a < 10.0 and b < 10.0:
        return a * math.log(x) + b * math.log1p(-x) - log_beta(a, b)
    if a < 10.0:
        return _log_beta_prefactor_mixed(x, a, b)
    if b < 10.0:
        return _log_beta_prefactor_mixed(1.0 - x, b, a)
    # x^a (1-x)^b / B(a,b) = sqrt(ab/(2 pi (a+b))) * exp(a*log1pmx + b*log1pmx - stirling errors)
    s = a + b
    t_a = x * s / a - 1.0
    t_b = (1.0 - x) * s / b - 1.0
    return (
        a * _log1pmx(t_a)
        + b * _log1pmx(t_b)
        + 0.5 * (math.log(a) + math.log(b) - math.log(s) - _LOG_2PI)
        + _stirling_error(s)
        - _stirling_error(a)
        - _stirling_error(b)
    )


def _beta_cont_frac(x: float, a: float, b: float) -> float:
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _max_iter(max(a, b))):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (x={x}, a={a}, b={b})")


def reg_inc_beta(x: float, a: float, b: float) -> float:
    """Regularized incomplete beta function I(x; a, b)."""
    if not (a > 0 and b > 0) or math.isinf(a) or math.isinf(b):
        raise DomainError(f"a and b must be finite and > 0, got a={a!r}, b={b!r}")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x must lie in [0, 1], got {x!r}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    if x < (a + 1.0) / (a + b + 2.0):
        log_pref = _log_beta_prefactor(x, a, b)
        if log_pref < -745.0:
            return 0.0
        return clamp_probability(math.exp(log_pref) * _beta_cont_frac(x, a, b) / a)
    log_pref = _log_beta_prefactor(1.0 - x, b, a)
    if log_pref < -745.0:
        return 1.0
    return clamp_probability(1.0 - math.exp(log_pref) * _beta_cont_frac(1.0 - x, b, a) / b)
