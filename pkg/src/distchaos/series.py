"""Truncated Taylor series of entire functions.

An :class:`EntireSeries` holds the coefficients ``a_0 .. a_cap`` of
``f(z) = sum a_n z**n``.  Coefficients built symbolically stay exact
(:class:`~fractions.Fraction`), so ``D`` and ``S`` identities hold exactly;
floating point only enters inside the norm routines.  Coefficients that
would underflow a double (``1/n!`` for large ``n``) can be carried as
:mod:`mpmath` numbers instead.

All norms are computed from ``log|a_n|`` so that radii where ``e**r``
overflows still give finite log-norms; the plain-valued functions raise
:class:`~distchaos._errors.RangeError` only when the final value itself is
not representable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple

import mpmath
import numpy as np
from scipy.optimize import minimize_scalar

from ._errors import ContractError, ParameterError, RangeError

_EXACT_TYPES = (int, Fraction)


def _is_exact(c) -> bool:
    return isinstance(c, _EXACT_TYPES) and not isinstance(c, bool)


def _log_abs(c) -> float:
    if c == 0:
        return -math.inf
    if isinstance(c, Fraction):
        return math.log(abs(c.numerator)) - math.log(c.denominator)
    if isinstance(c, int):
        return math.log(abs(c))
    if isinstance(c, (mpmath.mpf, mpmath.mpc)):
        return float(mpmath.log(abs(c)))
    return math.log(abs(c))


def _phase(c) -> complex:
    if isinstance(c, (Fraction, int)):
        return 1.0 if c > 0 else (-1.0 if c < 0 else 0.0)
    if isinstance(c, mpmath.mpf):
        return float(mpmath.sign(c))
    if isinstance(c, mpmath.mpc):
        a = abs(c)
        return complex(c / a) if a else 0.0
    a = abs(c)
    return complex(c) / a if a else 0.0


@dataclass(frozen=True, eq=False)
class EntireSeries:
    """Coefficients ``a_0 .. a_cap`` of a truncated entire function."""

    coeffs: Tuple

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        if not coeffs:
            coeffs = (Fraction(0),)
        for c in coeffs:
            if isinstance(c, float) and not math.isfinite(c):
                raise ContractError("coefficients must be finite")
            if isinstance(c, complex) and not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise ContractError("coefficients must be finite")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def cap(self) -> int:
        return len(self.coeffs) - 1

    @property
    def exact(self) -> bool:
        return all(_is_exact(c) for c in self.coeffs)

    @classmethod
    def zero(cls, cap: int = 0) -> "EntireSeries":
        return cls((Fraction(0),) * (cap + 1))

    @classmethod
    def monomial(cls, n: int, coef=1) -> "EntireSeries":
        return cls((Fraction(0),) * n + (Fraction(coef),))

    @classmethod
    def exp(cls, cap: int) -> "EntireSeries":
        """Exact truncation of ``e**z``."""
        out, c = [], Fraction(1)
        for n in range(cap + 1):
            out.append(c)
            c /= n + 1
        return cls(tuple(out))

    @classmethod
    def e_n(cls, n: int) -> "EntireSeries":
        """The normalised monomial ``z**n / n!``."""
        return cls.monomial(n, Fraction(1, math.factorial(n)))

    def __call__(self, z):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def __eq__(self, other):
        if not isinstance(other, EntireSeries):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return all(x == y for x, y in zip(a, b))

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other: "EntireSeries") -> "EntireSeries":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return EntireSeries(tuple(x + y for x, y in zip(a, b)))

    def __sub__(self, other: "EntireSeries") -> "EntireSeries":
        return self + other.scale(-1)

    def __mul__(self, other: "EntireSeries") -> "EntireSeries":
        """Product truncated to ``min(self.cap, other.cap)``."""
        cap = min(self.cap, other.cap)
        out = []
        for k in range(cap + 1):
            out.append(sum((self.coeffs[i] * other.coeffs[k - i] for i in range(k + 1)), Fraction(0)))
        return EntireSeries(tuple(out))

    def scale(self, c) -> "EntireSeries":
        return EntireSeries(tuple(c * a for a in self.coeffs))

    def truncate(self, cap: int) -> "EntireSeries":
        return EntireSeries(self.coeffs[: cap + 1])

    def derivative_at_zero(self, n: int):
        """``D**n f (0) = n! a_n`` (zero past the cap)."""
        if n > self.cap:
            return Fraction(0)
        return self.coeffs[n] * math.factorial(n)

    def log_abs_coeffs(self) -> np.ndarray:
        return np.array([_log_abs(c) for c in self.coeffs], dtype=float)

    def phases(self) -> np.ndarray:
        return np.array([_phase(c) for c in self.coeffs], dtype=complex)

    # serialisation -------------------------------------------------------
    def to_json(self) -> dict:
        def enc(x):
            if _is_exact(x):
                return str(Fraction(x))
            if isinstance(x, mpmath.mpf):
                return mpmath.nstr(x, 17, min_fixed=1, max_fixed=0)
            return repr(float(x))

        pairs = []
        for c in self.coeffs:
            if isinstance(c, (complex, mpmath.mpc)):
                pairs.append([enc(mpmath.mpf(c.real) if isinstance(c, mpmath.mpc) else c.real),
                              enc(mpmath.mpf(c.imag) if isinstance(c, mpmath.mpc) else c.imag)])
            else:
                pairs.append([enc(c), "0"])
        return {"kind": "entire-series", "cap": self.cap, "exact": self.exact, "coeffs": pairs}

    @classmethod
    def from_json(cls, data: dict) -> "EntireSeries":
        if data.get("kind") != "entire-series":
            raise ContractError(f"not an entire-series document: kind={data.get('kind')!r}")
        exact = data.get("exact", True)

        def dec(s):
            if exact:
                return Fraction(s)
            v = mpmath.mpf(s)
            if v == 0:
                return 0.0
            # keep mpf only where a double would under/overflow
            return float(v) if 1e-300 < abs(v) < 1e300 else v

        coeffs = []
        for re_s, im_s in data["coeffs"]:
            re_v, im_v = dec(re_s), dec(im_s)
            if im_v == 0:
                coeffs.append(re_v)
            elif exact:
                raise ContractError("exact series cannot carry imaginary parts")
            else:
                coeffs.append(mpmath.mpc(re_v, im_v) if isinstance(re_v, mpmath.mpf) or isinstance(im_v, mpmath.mpf)
                              else complex(re_v, im_v))
        if len(coeffs) != data["cap"] + 1:
            raise ContractError("cap does not match the number of coefficients")
        return cls(tuple(coeffs))


def differentiate(f: EntireSeries) -> EntireSeries:
    """``D f``; the cap drops by one (a cap-0 input gives the zero series)."""
    if f.cap == 0:
        return EntireSeries.zero(0)
    return EntireSeries(tuple((n + 1) * f.coeffs[n + 1] for n in range(f.cap)))


def integrate(f: EntireSeries) -> EntireSeries:
    """``S f = int_0^z f``; the cap grows by one and ``D S f == f``."""
    out = [Fraction(0)]
    for n, c in enumerate(f.coeffs):
        out.append(Fraction(c) / (n + 1) if _is_exact(c) else c / (n + 1))
    return EntireSeries(tuple(out))


def _coerce_exact(c):
    return Fraction(c) if isinstance(c, int) else c


def translate(f: EntireSeries, a, cap_out: Optional[int] = None) -> EntireSeries:
    """Exact re-expansion of ``f(z + a)`` truncated to ``cap_out``."""
    if cap_out is None:
        cap_out = f.cap
    if cap_out > f.cap:
        raise ContractError(f"cap_out={cap_out} exceeds the series cap {f.cap}")
    a = _coerce_exact(a)
    # powers of a computed once; b_k = sum_n a_n C(n,k) a^(n-k)
    pw = [Fraction(1) if _is_exact(a) else 1]
    for _ in range(f.cap):
        pw.append(pw[-1] * a)
    out = []
    for k in range(cap_out + 1):
        acc = Fraction(0)
        for n in range(k, f.cap + 1):
            c = f.coeffs[n]
            if c:
                acc = acc + c * math.comb(n, k) * pw[n - k]
        out.append(acc)
    return EntireSeries(tuple(out))


# --------------------------------------------------------------------------
# norms

def _check_r(r) -> float:
    r = float(r)
    if not r > 0:
        raise ParameterError(f"radius must be positive, got {r}")
    return r


def _exp_or_raise(logv: float, what: str) -> float:
    if logv == -math.inf:
        return 0.0
    if logv > 709.78:
        raise RangeError(f"{what} = exp({logv:.6g}) overflows a double; use the log_ variant")
    return math.exp(logv)


def _log_m2_from_logs(la: np.ndarray, r: float) -> float:
    n = np.arange(la.size)
    t = 2.0 * (la + n * math.log(r))
    t = t[np.isfinite(t)]
    if t.size == 0:
        return -math.inf
    top = float(t.max())
    return 0.5 * (top + math.log(math.fsum(np.exp(t - top))))


def log_m2_norm(f: EntireSeries, r: float) -> float:
    """``log M_2(f, r)`` from ``sum |a_n|^2 r^(2n)``, safe for large ``r``."""
    return _log_m2_from_logs(f.log_abs_coeffs(), _check_r(r))


def m2_norm(f: EntireSeries, r: float) -> float:
    """``M_2(f, r) = sqrt(sum |a_n|^2 r^(2n))`` by coefficient orthogonality."""
    return _exp_or_raise(log_m2_norm(f, r), "M_2")


def default_quad_points(cap: int, p: float) -> int:
    need = 8 * cap if p == math.inf else 4 * cap
    q = 16
    while q < need:
        q *= 2
    return q


def _scaled_coeffs(la: np.ndarray, ph: np.ndarray, r: float) -> Tuple[np.ndarray, float]:
    n = np.arange(la.size)
    t = la + n * math.log(r)
    fin = np.isfinite(t)
    if not fin.any():
        return np.zeros(la.size, dtype=complex), -math.inf
    top = float(t[fin].max())
    c = np.zeros(la.size, dtype=complex)
    c[fin] = np.exp(t[fin] - top) * ph[fin]
    return c, top


def _circle_values(c: np.ndarray, q: int) -> np.ndarray:
    """Values of ``sum c_n e^(i n t)`` at ``t_j = 2 pi j / q``."""
    buf = np.zeros(q, dtype=complex)
    buf[: c.size] = c
    return np.fft.ifft(buf) * q


def _log_sup_from_scaled(c: np.ndarray, top: float, samples: int) -> float:
    vals = np.abs(_circle_values(c, samples))
    j = int(np.argmax(vals))
    best = float(vals[j])
    if best == 0.0:
        return -math.inf
    # refinement pass: bounded scalar search on the bracketing sample cell
    h = 2 * math.pi / samples
    t0 = 2 * math.pi * j / samples
    poly = c[::-1]

    def neg(t):
        return -abs(np.polyval(poly, np.exp(1j * t)))

    res = minimize_scalar(neg, bounds=(t0 - h, t0 + h), method="bounded",
                          options={"xatol": 1e-13 * max(1.0, h)})
    best = max(best, -float(res.fun))
    return top + math.log(best)


def _log_mp_from_logs(la, ph, r, p, quad_points) -> float:
    c, top = _scaled_coeffs(la, ph, r)
    if top == -math.inf:
        return -math.inf
    if p == math.inf:
        return _log_sup_from_scaled(c, top, quad_points)
    vals = np.abs(_circle_values(c, quad_points))
    if p == 1:
        mean = math.fsum(vals) / quad_points
    else:
        mean = math.fsum(vals ** p) / quad_points
    if mean == 0.0:
        return -math.inf
    return top + math.log(mean) / p


def _resolve_p(p) -> float:
    p = math.inf if p in ("inf", "infinity", math.inf) else float(p)
    if not (p >= 1):
        raise ParameterError(f"p must lie in [1, inf], got {p}")
    return p


def log_mp_norm(f: EntireSeries, r: float, p=2, quad_points: Optional[int] = None) -> float:
    """``log M_p(f, r)``; see :func:`mp_norm`."""
    r, p = _check_r(r), _resolve_p(p)
    if quad_points is None:
        quad_points = default_quad_points(f.cap, p)
    minimum = 8 * f.cap if p == math.inf else 4 * f.cap
    if quad_points < max(minimum, 1):
        raise ParameterError(f"quad_points={quad_points} below the required {minimum} for cap {f.cap}")
    return _log_mp_from_logs(f.log_abs_coeffs(), f.phases(), r, p, quad_points)


def mp_norm(f: EntireSeries, r: float, p=2, quad_points: Optional[int] = None) -> float:
    """Average ``L^p`` norm of ``f`` on the circle ``|z| = r``.

    For finite ``p`` the circle average uses the trapezoid rule with
    ``quad_points >= 4 * cap`` nodes, exact for the trigonometric polynomial
    ``|f|^2`` and ``|f|^4``.  For ``p = inf`` the maximum of ``8 * cap``
    equispaced samples is refined by a bounded scalar search over the
    neighbouring cells.
    """
    return _exp_or_raise(log_mp_norm(f, r, p, quad_points), "M_p")


def sup_norm(f: EntireSeries, r: float) -> float:
    return mp_norm(f, r, math.inf)


# --------------------------------------------------------------------------
# orbits

class OrbitNorms(Sequence):
    """``M_p(D^n f, r)`` for ``n = 0 .. horizon`` plus faithfulness data.

    ``faithful_horizon`` is the last index whose truncation error (from the
    caller's tail bound) stays below ``faithful_tol``; ``tail_errors`` holds
    the bound used for each index (all zero when the series is declared a
    polynomial with ``tail_bound=0``).
    """

    def __init__(self, values, faithful_horizon, tail_errors, log_values):
        self.values = list(values)
        self.faithful_horizon = faithful_horizon
        self.tail_errors = list(tail_errors)
        self.log_values = list(log_values)

    def __getitem__(self, i):
        return self.values[i]

    def __len__(self):
        return len(self.values)

    def __repr__(self):
        return f"OrbitNorms({self.values!r}, faithful_horizon={self.faithful_horizon})"


def derivative_logs(f: EntireSeries, n: int, la=None, ph=None):
    """``log|b_k|`` and phases of ``D^n f`` computed from those of ``f``."""
    if la is None:
        la, ph = f.log_abs_coeffs(), f.phases()
    if n > f.cap:
        return np.array([-math.inf]), np.zeros(1, dtype=complex)
    k = np.arange(la.size - n, dtype=float)
    from scipy.special import gammaln

    lb = la[n:] + gammaln(k + n + 1) - gammaln(k + 1)
    return lb, ph[n:]


def _tail_indices(tail_bound, cap: int, max_terms: int):
    support = getattr(tail_bound, "support", None)
    if support is None:
        yield from range(cap + 1, cap + 1 + max_terms)
        return
    count = 0
    for lo, hi in support.intervals:
        for n in range(max(lo, cap + 1), hi + 1):
            yield n
            count += 1
            if count >= max_terms:
                return


def _tail_error(tail_bound: Callable[[int], float], cap: int, j: int, r: float,
                max_terms: int = 100000) -> float:
    """Bound on ``sup_{|z|=r} |D^j (f - f_cap)(z)|`` from ``|a_n| <= tail_bound(n)``.

    Summation stops once a term is at most half its predecessor and
    negligible, which is rigorous when the bound's consecutive-term ratio is
    non-increasing (true for ``n / n!`` style bounds).  A bound exposing a
    ``support`` index set is only evaluated on that set; an empty support
    beyond the cap gives 0, and one exposing ``log_bound(n)`` is read in the
    log domain so that bounds below the double range still count.
    """
    lr = math.log(r)
    log_total, prev, count = -math.inf, -math.inf, 0
    for n in _tail_indices(tail_bound, cap, max_terms):
        count += 1
        if n < j:
            continue
        if hasattr(tail_bound, "log_bound"):
            lb = tail_bound.log_bound(n)
        else:
            b = tail_bound(n)
            lb = math.log(b) if b > 0 else -math.inf
        if lb == -math.inf:
            continue
        lt = lb + math.lgamma(n + 1) - math.lgamma(n - j + 1) + (n - j) * lr
        log_total = np.logaddexp(log_total, lt)
        if prev > -math.inf and lt <= prev - math.log(2) and lt <= log_total - 39.0:
            # terms now shrink by at least half: remainder is below the last one
            return math.exp(np.logaddexp(log_total, lt))
        prev = lt
    if getattr(tail_bound, "support", None) is not None and count < max_terms:
        return math.exp(log_total)
    return math.inf


def orbit_norms(f: EntireSeries, horizon: int, r: float, p=math.inf, op: str = "D",
                tail_bound=None, faithful_tol: float = 1e-12,
                quad_points: Optional[int] = None) -> OrbitNorms:
    """Norms ``M_p(D^n f, r)`` for ``n = 0 .. horizon``.

    ``tail_bound`` describes the dropped coefficients: ``0`` declares ``f``
    an exact polynomial; a callable ``n -> B_n`` asserts ``|a_n| <= B_n`` for
    ``n > cap``.  Without it, a horizon past the cap is refused.
    """
    if op != "D":
        raise ParameterError(f"unsupported operator {op!r}; only 'D' is available")
    r, p = _check_r(r), _resolve_p(p)
    if horizon < 0:
        raise ParameterError("horizon must be non-negative")
    if horizon > f.cap and tail_bound is None:
        raise ContractError(
            f"horizon {horizon} exceeds cap {f.cap}; derivatives past the cap are not faithful "
            "without a tail bound (pass tail_bound=0 for an exact polynomial)")
    la, ph = f.log_abs_coeffs(), f.phases()
    logs, vals, errs = [], [], []
    faithful = -1
    for n in range(horizon + 1):
        lb, pb = derivative_logs(f, n, la, ph)
        if p == 2:
            lv = _log_m2_from_logs(lb, r)
        else:
            q = quad_points or default_quad_points(max(lb.size - 1, 0), p)
            lv = _log_mp_from_logs(lb, pb, r, p, q)
        logs.append(lv)
        vals.append(_exp_or_raise(lv, "orbit norm"))
        if tail_bound is None or (not callable(tail_bound) and tail_bound == 0):
            err = 0.0
        else:
            err = _tail_error(tail_bound, f.cap, n, r)
        errs.append(err)
        if err <= faithful_tol and faithful == n - 1:
            faithful = n
    return OrbitNorms(vals, faithful, errs, logs)


def exp_type_estimate(f: EntireSeries, r_grid: Sequence[float]) -> float:
    """``max_r log M_inf(f, r) / r`` over the grid.

    A finite-grid stand-in for ``limsup r^-1 log M_inf``; it is an estimate,
    not a limit.  The zero function gives ``-inf``.
    """
    la, ph = f.log_abs_coeffs(), f.phases()
    best = -math.inf
    for r in r_grid:
        r = _check_r(r)
        lv = _log_mp_from_logs(la, ph, r, math.inf, default_quad_points(f.cap, math.inf))
        best = max(best, lv / r)
    return best


# --------------------------------------------------------------------------
# growth envelopes

_PHI_KINDS = ("constant", "log", "power", "table")


@dataclass(frozen=True)
class GrowthEnvelope:
    """The majorant ``r -> phi(r) * exp(rate * r) / r**a``.

    ``phi`` is one of ``constant`` (value ``scale``), ``log``
    (``scale * log(e + r)``), ``power`` (``scale * r**eps``) or ``table``
    (log-linear interpolation of ``table`` pairs ``(r, phi)``).  ``p`` is the
    norm index the envelope is meant for.
    """

    a: float
    phi: str = "constant"
    p: float = 2.0
    scale: float = 1.0
    eps: float = 0.0
    rate: float = 1.0
    table: Tuple[Tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.phi not in _PHI_KINDS:
            raise ParameterError(f"phi must be one of {_PHI_KINDS}, got {self.phi!r}")
        if not self.scale > 0:
            raise ParameterError("envelope scale must be positive")
        if self.phi == "table":
            if len(self.table) < 1 or any(v <= 0 for _, v in self.table):
                raise ParameterError("table envelope needs positive (r, phi) pairs")

    def log_phi(self, r: float) -> float:
        if self.phi == "constant":
            return math.log(self.scale)
        if self.phi == "log":
            return math.log(self.scale) + math.log(math.log(math.e + r))
        if self.phi == "power":
            return math.log(self.scale) + self.eps * math.log(r)
        rs = np.array([t[0] for t in self.table], dtype=float)
        vs = np.log(np.array([t[1] for t in self.table], dtype=float))
        return float(np.interp(r, rs, vs))

    def log_value(self, r: float) -> float:
        r = _check_r(r)
        return self.log_phi(r) + self.rate * r - self.a * math.log(r)

    def __call__(self, r: float) -> float:
        return _exp_or_raise(self.log_value(r), "envelope")

    def to_json(self) -> dict:
        return {"kind": "growth-envelope", "a": self.a, "phi": self.phi, "p": self.p,
                "scale": self.scale, "eps": self.eps, "rate": self.rate,
                "table": [list(t) for t in self.table]}

    @classmethod
    def from_json(cls, data: dict) -> "GrowthEnvelope":
        return cls(a=data["a"], phi=data.get("phi", "constant"), p=data.get("p", 2.0),
                   scale=data.get("scale", 1.0), eps=data.get("eps", 0.0),
                   rate=data.get("rate", 1.0),
                   table=tuple(tuple(t) for t in data.get("table", ())))


def critical_exponent(p: float, upper: bool = True) -> float:
    """Envelope exponent ``1/(2 max{2,p})`` (upper) or ``1/(2 min{2,p})`` (lower)."""
    p = _resolve_p(p)
    if upper:
        return 1.0 / (2 * max(2.0, p))
    return 1.0 / (2 * min(2.0, p))
