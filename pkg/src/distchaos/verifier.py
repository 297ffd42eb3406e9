"""Finite-horizon certificates for growth, orbit and averaging statements.

Each check returns a :class:`Certificate` whose verdict is a deterministic
function of the measured values: grids and summation orders are fixed and
any sampling takes an explicit seed.  Limits are never asserted; the
horizon or grid behind every verdict is stored with it.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, NamedTuple, Optional, Sequence

import numpy as np
from scipy.special import gammaln

from . import harmonic as hc
from ._errors import ContractError, ParameterError
from .density import IndexSet, density_profile, distribution_functions
from .series import (EntireSeries, GrowthEnvelope, derivative_logs, log_mp_norm,
                     _log_m2_from_logs, _log_mp_from_logs, default_quad_points)

EXACT_TOL = 1e-9
QUAD_TOL = 1e-6

CLAIMS = ("growth-envelope", "di-unbounded", "near-zero", "cesaro-average",
          "lower-bound-average", "barnes", "absolutely-cesaro", "chaotic-pair")
VERDICTS = ("pass", "fail", "inconclusive")


# --------------------------------------------------------------------------
# canonical JSON and digests

def to_jsonable(obj):
    """Plain JSON structure for digests and certificate payloads."""
    if hasattr(obj, "to_json"):
        return to_jsonable(obj.to_json())
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [to_jsonable(v) for v in obj]
    return repr(obj)


def canonical_json(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"))


def digest(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


@dataclass(frozen=True)
class Certificate:
    claim: str
    inputs_digest: str
    horizon: dict
    measured: dict
    tolerance: float
    verdict: str

    def __post_init__(self):
        if self.claim not in CLAIMS:
            raise ContractError(f"unknown claim {self.claim!r}")
        if self.verdict not in VERDICTS:
            raise ContractError(f"verdict must be one of {VERDICTS}")

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json(self) -> dict:
        return {"claim": self.claim, "inputs_digest": self.inputs_digest,
                "horizon": to_jsonable(self.horizon), "measured": to_jsonable(self.measured),
                "tolerance": self.tolerance, "verdict": self.verdict}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, data: dict) -> "Certificate":
        return cls(data["claim"], data["inputs_digest"], data["horizon"], data["measured"],
                   float(data["tolerance"]), data["verdict"])


def _cert(claim, inputs, horizon, measured, tolerance, verdict) -> Certificate:
    return Certificate(claim, digest(inputs), dict(horizon), dict(measured), float(tolerance),
                       verdict)


# --------------------------------------------------------------------------
# growth

def _log_norm(func, r: float, p: float, samples: int) -> float:
    if isinstance(func, EntireSeries):
        return log_mp_norm(func, r, p)
    if isinstance(func, hc.MultiIndexPoly):
        if p == 2:
            v = hc.m2_sphere(func, r)
        elif math.isinf(p):
            v = hc.sup_norm_sphere(func, r, samples=samples, allow_sampling=func.dim > 3)
        else:
            raise ParameterError("harmonic norms are available for p = 2 and p = inf")
        return math.log(v) if v > 0 else -math.inf
    raise ContractError(f"cannot take norms of {type(func).__name__}")


def check_growth_envelope(func, env: GrowthEnvelope, r_grid: Sequence[float],
                          tolerance: float = EXACT_TOL, samples: int = 256) -> Certificate:
    """Largest ``M_p(func, r) / envelope(r)`` over ``r_grid``; pass iff ``<= 1 + tolerance``.

    ``p`` is taken from the envelope.  Harmonic inputs use the exact sphere
    ``L^2`` norm or the searched sphere maximum.
    """
    grid = [float(r) for r in r_grid]
    if not grid or min(grid) <= 0:
        raise ParameterError("r_grid must be non-empty and positive")
    ratios = []
    for r in grid:
        ratios.append(math.exp(min(_log_norm(func, r, env.p, samples) - env.log_value(r), 700.0)))
    i = int(np.argmax(ratios))
    verdict = "pass" if ratios[i] <= 1 + tolerance else "fail"
    return _cert("growth-envelope", {"func": func, "env": env, "grid": grid},
                 {"r_grid": grid}, {"ratios": ratios, "max_ratio": ratios[i], "argmax_r": grid[i]},
                 tolerance, verdict)


# --------------------------------------------------------------------------
# orbit certificates

def _blocks_within(S: IndexSet, horizon: int) -> List[tuple]:
    return [(lo, hi) for lo, hi in S.intervals if lo <= horizon]


def _profile_rows(S: IndexSet, horizon: int):
    cps = sorted({min(hi, horizon) for lo, hi in _blocks_within(S, horizon)} | {horizon})
    prof = density_profile(S, cps)
    return prof, [[c, d] for c, d in zip(prof.checkpoints, prof.densities)]


def certify_distributionally_unbounded(norms: Sequence[float], B: IndexSet, schedule,
                                       k_max: Optional[int] = None,
                                       tolerance: float = EXACT_TOL) -> Certificate:
    """``norms[n] >= omega~_n`` for every ``n`` in ``B`` up to the horizon.

    ``norms[n]`` is the orbit norm at step ``n`` (``n = 0 .. horizon``).
    The density profile of ``B`` is taken at its block ends; the largest
    value must reach ``1 - 1/k_max``, where ``k_max`` defaults to the number
    of ``B`` blocks entered before the horizon (at least 2).
    """
    horizon = len(norms) - 1
    blocks = _blocks_within(B, horizon)
    if k_max is None:
        k_max = max(2, len(blocks))
    tested, short = 0, []
    worst = math.inf
    for n in B.members_upto(horizon):
        if n < 1:
            continue
        target = float(schedule.tilde(n))
        tested += 1
        worst = min(worst, norms[n] / target if target else math.inf)
        if norms[n] < target * (1 - tolerance):
            short.append([n, norms[n], target])
    prof, rows = _profile_rows(B, horizon) if blocks else (None, [])
    upper = prof.upper if prof else Fraction(0)
    dens_ok = upper >= 1 - Fraction(1, k_max)
    ok = tested > 0 and not short and dens_ok
    measured = {"tested": tested, "shortfalls": short[:50], "n_shortfalls": len(short),
                "min_ratio": worst if tested else None, "density_profile": rows,
                "upper_density": upper, "density_target": 1 - Fraction(1, k_max)}
    return _cert("di-unbounded", {"norms": list(norms), "B": B, "k_max": k_max},
                 {"horizon": horizon, "blocks": len(blocks), "k_max": k_max}, measured,
                 tolerance, "pass" if ok else "fail")


def _eps_of(eps_schedule) -> Callable[[int], float]:
    if eps_schedule is None:
        return lambda K: 1.0 / K
    if callable(eps_schedule):
        return eps_schedule
    seq = list(eps_schedule)
    return lambda K: seq[K - 1]


def certify_near_zero(norms: Sequence[float], A: IndexSet, eps_schedule=None,
                      radius: Optional[float] = None, rate: float = 1.0,
                      k_max: Optional[int] = None, tolerance: float = 0.0) -> Certificate:
    """``norms[n] < eps_K`` for ``n`` in the ``K``-th block of ``A``.

    Smallness is only promised for blocks with ``K >= rate * radius``; when
    ``radius`` is given, earlier blocks are skipped and listed.  Blocks past
    ``k_max`` are ignored.  ``eps_schedule`` is a callable ``K -> eps``, a
    sequence, or ``None`` for ``1/K``.
    """
    horizon = len(norms) - 1
    eps = _eps_of(eps_schedule)
    tested, skipped, misses = 0, [], []
    largest: Dict[int, float] = {}
    used: Dict[int, float] = {}
    for K, (lo, hi) in enumerate(A.intervals, start=1):
        if lo > horizon or (k_max is not None and K > k_max):
            break
        if radius is not None and K < rate * radius:
            skipped.append(K)
            continue
        e = float(eps(K))
        used[K] = e
        for n in range(lo, min(hi, horizon) + 1):
            tested += 1
            largest[K] = max(largest.get(K, 0.0), norms[n])
            if not norms[n] < e * (1 + tolerance):
                misses.append([n, K, norms[n], e])
    _, rows = _profile_rows(A, horizon) if _blocks_within(A, horizon) else (None, [])
    ok = tested > 0 and not misses
    measured = {"tested": tested, "skipped_blocks": skipped, "misses": misses[:50],
                "n_misses": len(misses), "block_max": {str(k): v for k, v in largest.items()},
                "density_profile": rows}
    return _cert("near-zero", {"norms": list(norms), "A": A, "radius": radius, "rate": rate,
                               "eps": used},
                 {"horizon": horizon, "radius": radius, "k_max": k_max}, measured,
                 tolerance, "pass" if ok else "fail")


# --------------------------------------------------------------------------
# Cesaro averages

def cesaro_weight_logs(n_max: int, alpha: float, beta: float, R: float) -> np.ndarray:
    """``log( R^(alpha n + beta) e^(-alpha R) / (n!^alpha n^(beta - alpha/2 + 1/2)) )``, ``n = 1..n_max``."""
    n = np.arange(1, n_max + 1, dtype=float)
    return ((alpha * n + beta) * math.log(R) - alpha * R - alpha * gammaln(n + 1)
            - (beta - alpha / 2 + 0.5) * np.log(n))


def cesaro_average_check(f_values, alpha: float, beta: float, C: float,
                         R_grid: Sequence[float], m_max: int,
                         tolerance: float = EXACT_TOL) -> Certificate:
    """Check the weighted-sum hypothesis on ``R_grid``, then report the largest Cesaro mean.

    ``f_values`` is an array of shape ``(points, terms)`` (or a sequence of
    rows) with ``f_values[x][n-1] = f_n(x) >= 0``; the hypothesis sum runs
    over all supplied terms.  The verdict fails when the hypothesis is
    violated (the violating ``(x, R)`` pairs are recorded) and passes when
    it holds and ``B_emp`` is finite.
    """
    if not (alpha > 0 and beta > 0 and C > 0):
        raise ParameterError("alpha, beta and C must be positive")
    F = np.atleast_2d(np.asarray(f_values, dtype=float))
    if F.shape[1] < m_max:
        raise ParameterError(f"need at least m_max={m_max} terms per point, got {F.shape[1]}")
    if np.any(F < 0):
        raise ContractError("f_n must be non-negative")
    grid = [float(R) for R in R_grid]
    violations = []
    sup_hyp = 0.0
    with np.errstate(divide="ignore"):
        logF = np.log(F)
    for R in grid:
        w = cesaro_weight_logs(F.shape[1], alpha, beta, R)
        t = logF + w
        top = np.max(t, axis=1)
        safe = np.where(np.isfinite(top), top, 0.0)
        sums = np.where(np.isfinite(top), np.exp(safe) * np.sum(np.exp(t - safe[:, None]), axis=1), 0.0)
        sup_hyp = max(sup_hyp, float(np.max(sums)))
        for x in np.nonzero(sums > C * (1 + tolerance))[0]:
            violations.append([int(x), R, float(sums[x])])
    means = np.cumsum(F[:, :m_max], axis=1) / np.arange(1, m_max + 1)
    b_emp = float(np.max(means))
    ok = not violations and math.isfinite(b_emp)
    measured = {"hypothesis_sup": sup_hyp, "hypothesis_C": C, "violations": violations[:50],
                "n_violations": len(violations), "B_emp": b_emp,
                "B_emp_half": float(np.max(means[:, : max(1, m_max // 2)]))}
    return _cert("cesaro-average", {"f": F, "alpha": alpha, "beta": beta, "C": C, "R": grid,
                                    "m_max": m_max},
                 {"m_max": m_max, "terms": F.shape[1], "points": F.shape[0], "R_grid": grid},
                 measured, tolerance, "pass" if ok else "fail")


def orbit_power_means(f: EntireSeries, q: float, r: float, m_max: int) -> np.ndarray:
    """``v_n = M_q^q(D^n f, r)`` for ``n = 1..m_max`` (zero once the orbit dies)."""
    la, ph = f.log_abs_coeffs(), f.phases()
    out = np.zeros(m_max)
    for n in range(1, m_max + 1):
        if n > f.cap:
            break
        lb, pb = derivative_logs(f, n, la, ph)
        if q == 2:
            lv = _log_m2_from_logs(lb, r)
        else:
            lv = _log_mp_from_logs(lb, pb, r, q, default_quad_points(max(lb.size - 1, 0), q))
        out[n - 1] = math.exp(q * lv) if lv > -math.inf else 0.0
    return out


def lower_bound_average_check(f: EntireSeries, p: float, r: float, m_max: int,
                              envelope_const: float = 1.0,
                              R_grid: Optional[Sequence[float]] = None,
                              bound_factor: float = 10.0, burn_in: Optional[int] = None,
                              sample_points: int = 64, tolerance: float = QUAD_TOL) -> Certificate:
    """Bounded Cesaro means of ``M_q^q(D^n f, r)`` under ``M_p(f, R) <= c e^R / R^(1/(2p))``.

    The envelope is checked first on ``R_grid``; if it fails the verdict is
    ``inconclusive`` (the averages are still reported).  Otherwise the check
    passes when the mean at ``m_max`` does not exceed the mean at
    ``burn_in`` (relative ``tolerance``) and every mean stays below
    ``bound_factor * c^q * e^(q r)``.  ``q = p/(p-1)``.

    Also reported: for a few ``n``, the mean of ``|D^n f|^q`` over
    ``sample_points`` equispaced points of the circle divided by
    ``M_q^q(D^n f, r)``.
    """
    if not 1 < p <= 2:
        raise ParameterError("p must lie in (1, 2]")
    if m_max < 2:
        raise ParameterError("m_max must be at least 2")
    q = p / (p - 1)
    if R_grid is None:
        R_grid = np.linspace(1.0, max(2.0, min(30.0, f.cap / 4)), 30)
    env_ratios = []
    for R in R_grid:
        lv = log_mp_norm(f, float(R), p)
        env_ratios.append(math.exp(min(lv - (math.log(envelope_const) + R - math.log(R) / (2 * p)), 700)))
    env_ok = max(env_ratios) <= 1 + tolerance
    vals = orbit_power_means(f, q, r, m_max)
    means = np.cumsum(vals) / np.arange(1, m_max + 1)
    burn = burn_in if burn_in is not None else m_max // 2
    burn = min(max(burn, 1), m_max)
    bound = bound_factor * envelope_const ** q * math.exp(q * r)
    trend_ok = means[-1] <= means[burn - 1] * (1 + tolerance) + 1e-300
    bounded = float(np.max(means)) <= bound
    # empirical circle averages against the exact norm
    ratios = []
    thetas = 2 * np.pi * np.arange(sample_points) / sample_points
    pts = r * np.exp(1j * thetas)
    for n in sorted({1, max(1, m_max // 2), m_max}):
        if n > f.cap or vals[n - 1] == 0:
            continue
        lb, pb = derivative_logs(f, n, f.log_abs_coeffs(), f.phases())
        top = float(np.max(lb))
        c = np.exp(lb - top) * pb
        w = np.polyval(c[::-1], pts)
        emp = float(np.mean(np.abs(w) ** q)) * math.exp(q * top)
        ratios.append([n, emp / vals[n - 1]])
    if not env_ok:
        verdict = "inconclusive"
    else:
        verdict = "pass" if trend_ok and bounded else "fail"
    measured = {"q": q, "envelope_max_ratio": max(env_ratios), "envelope_holds": env_ok,
                "averages": means.tolist(), "sup_average": float(np.max(means)),
                "final_average": float(means[-1]), "burn_in_average": float(means[burn - 1]),
                "bound": bound, "trend_ok": trend_ok, "bounded": bounded,
                "circle_sample_ratios": ratios}
    return _cert("lower-bound-average",
                 {"f": f, "p": p, "r": r, "m_max": m_max, "c": envelope_const,
                  "R": [float(R) for R in R_grid], "bound_factor": bound_factor, "burn": burn},
                 {"m_max": m_max, "burn_in": burn, "R_grid": [float(R) for R in R_grid]},
                 measured, tolerance, verdict)


# --------------------------------------------------------------------------
# Frechet metric

class FrechetDistance(NamedTuple):
    value: float
    tail_bound: float


def _seminorm_log(diff, n: int, samples: int) -> float:
    if isinstance(diff, EntireSeries):
        return log_mp_norm(diff, float(n), math.inf)
    v = hc.sup_norm_sphere(diff, float(n), samples=samples, allow_sampling=diff.dim > 3)
    return math.log(v) if v > 0 else -math.inf


def frechet_distance(g, h, n_max: int, samples: int = 256) -> FrechetDistance:
    """``sum_{n<=n_max} 2^-n s_n / (1 + s_n)`` with ``s_n = sup_{|x|=n} |g - h|``.

    The omitted terms add at most ``2^-n_max``, returned as ``tail_bound``.
    """
    if n_max < 1:
        raise ParameterError("n_max must be at least 1")
    diff = g - h
    total = []
    for n in range(1, n_max + 1):
        ls = _seminorm_log(diff, n, samples)
        # s / (1 + s) = 1 / (1 + e^-log s), stable for huge s
        frac = 0.0 if ls == -math.inf else 1.0 / (1.0 + math.exp(-ls)) if ls > -700 else math.exp(ls)
        total.append(frac * 2.0 ** -n)
    return FrechetDistance(math.fsum(total), 2.0 ** -n_max)


# --------------------------------------------------------------------------
# series asymptotics

def barnes_log_sum(alpha: float, beta: float, r: float) -> float:
    """``log sum_{n>=0} r^(alpha n) / ((n+1)^beta n!^alpha)`` with a rigorous tail.

    Terms are summed up to an index past which the consecutive-term ratio
    is at most 1/2; the remainder is bounded by the last term.
    """
    if not 0 < alpha <= 2:
        raise ParameterError("alpha must lie in (0, 2]")
    if r < 0:
        raise ParameterError("r must be non-negative")
    if r == 0:
        return 0.0
    # ratio (r/(n+1))^alpha ((n+1)/(n+2))^beta <= 1/2 once n + 1 >= r (2 * 2^max(0,-beta))^(1/alpha)
    n1 = int(math.ceil(r * (2.0 * 2.0 ** max(0.0, -beta)) ** (1.0 / alpha))) + 1
    while True:
        n = np.arange(n1 + 1, dtype=float)
        t = alpha * n * math.log(r) - beta * np.log(n + 1) - alpha * gammaln(n + 1)
        top = float(np.max(t))
        # keep going until the bounded remainder is negligible
        if t[-1] < top - 40:
            break
        n1 *= 2
    s = math.fsum(np.exp(t - top).tolist()) + math.exp(t[-1] - top)
    return top + math.log(s)


def barnes_series_check(alpha: float, beta: float, r_grid: Sequence[float],
                        r_split: Optional[float] = None, stability_tol: float = 1e-2) -> Certificate:
    """Ratio ``S(r) r^((alpha + 2 beta - 1)/2) / e^(alpha r)`` over ``r_grid``.

    ``sup_ratio`` is the maximum over the grid and ``tail_ratio`` the value
    at the largest ``r``.  Stability compares the sup over ``r <= r_split``
    (default: half the largest ``r``) with the sup over the whole grid;
    pass iff both are finite and differ by less than ``stability_tol``
    relatively.
    """
    grid = sorted(float(r) for r in r_grid)
    if not grid or grid[0] <= 0:
        raise ParameterError("r_grid must be non-empty and positive")
    expo = (alpha + 2 * beta - 1) / 2
    ratios = [math.exp(barnes_log_sum(alpha, beta, r) + expo * math.log(r) - alpha * r)
              for r in grid]
    if r_split is None:
        r_split = grid[-1] / 2
    head = [v for r, v in zip(grid, ratios) if r <= r_split]
    sup_all = max(ratios)
    sup_head = max(head) if head else math.nan
    change = abs(sup_all - sup_head) / sup_all if head else math.inf
    ok = all(math.isfinite(v) for v in ratios) and change < stability_tol
    return _cert("barnes", {"alpha": alpha, "beta": beta, "grid": grid, "split": r_split},
                 {"r_grid": grid, "r_split": r_split},
                 {"ratios": ratios, "sup_ratio": sup_all, "sup_ratio_head": sup_head,
                  "relative_change": change, "tail_ratio": ratios[-1]},
                 stability_tol, "pass" if ok else "fail")


# --------------------------------------------------------------------------
# operator models

def truncated_d_matrix(cap: int) -> np.ndarray:
    """Matrix of ``D`` on coefficient vectors of polynomials of degree ``<= cap``."""
    M = np.zeros((cap + 1, cap + 1))
    for k in range(1, cap + 1):
        M[k - 1, k] = k
    return M


def m2_unit_norm(v: np.ndarray) -> float:
    """``M_2(., 1)`` of a coefficient vector: its Euclidean norm."""
    return float(np.linalg.norm(v))


def absolutely_cesaro_check(T, sample_vectors: Sequence, N_max: int,
                            norm: Callable[[np.ndarray], float] = m2_unit_norm,
                            bound: Optional[float] = None,
                            unbounded_flags: Optional[Sequence[bool]] = None) -> Certificate:
    """``sup_{N <= N_max} (1/N) sum_{j=1}^N ||T^j x|| / ||x||`` for each sample.

    Pass iff every sup is finite (and at most ``bound`` when given).  For
    samples flagged as distributionally unbounded the running average must
    still be growing at ``N_max`` (mean over the second half above the
    first), otherwise the cross-check fails.
    """
    T = np.asarray(T, dtype=float)
    sups, growth, rows = [], [], []
    for x in sample_vectors:
        x = np.asarray(x, dtype=float)
        nx = norm(x)
        if nx == 0:
            raise ParameterError("sample vectors must be non-zero")
        v = x.copy()
        acc = 0.0
        avgs = []
        for N in range(1, N_max + 1):
            v = T @ v
            acc += norm(v)
            avgs.append(acc / (N * nx))
        sups.append(max(avgs))
        growth.append(avgs[-1] > avgs[max(0, N_max // 2 - 1)])
        rows.append(avgs[-1])
    finite = all(math.isfinite(s) for s in sups)
    ok = finite and (bound is None or max(sups) <= bound)
    cross = []
    if unbounded_flags is not None:
        for i, flag in enumerate(unbounded_flags):
            if flag and not growth[i]:
                cross.append(i)
        ok = ok and not cross
    return _cert("absolutely-cesaro",
                 {"T": T, "x": [np.asarray(x, dtype=float) for x in sample_vectors],
                  "N_max": N_max, "bound": bound, "flags": unbounded_flags},
                 {"N_max": N_max}, {"sup_averages": sups, "final_averages": rows,
                                    "growing": growth, "cross_check_failures": cross},
                 0.0, "pass" if ok else "fail")


def chaotic_pair_report(dist: Sequence[float], deltas: Sequence[float], eps: float,
                        horizon: int, threshold: float = 0.9,
                        start: Optional[int] = None) -> Certificate:
    """Finite-horizon ``F*(delta)`` and ``F(eps)`` for one orbit pair.

    ``dist[n-1]`` is the distance between the two orbits at step ``n``.
    Partial densities are taken at every ``n`` in ``[start, horizon]``
    (default ``start = max(1, horizon // 100)``).
    Pass iff ``F*(delta) >= threshold`` for every ``delta`` and
    ``F(eps) <= 1 - threshold``.
    """
    if start is None:
        start = max(1, horizon // 100)
    if not 1 <= start <= horizon:
        raise ParameterError("start must lie in [1, horizon]")
    marks = range(start, horizon + 1)
    upper = {}
    for d in deltas:
        _, up = distribution_functions(dist, d, horizon, marks)
        upper[repr(float(d))] = up
    low, _ = distribution_functions(dist, eps, horizon, marks)
    ok = all(v >= threshold for v in upper.values()) and low <= 1 - threshold
    return _cert("chaotic-pair", {"dist": list(dist), "deltas": list(deltas), "eps": eps,
                                  "horizon": horizon, "threshold": threshold, "start": start},
                 {"horizon": horizon, "start": start}, {"F_star": upper, "F_eps": low}, threshold,
                 "pass" if ok else "fail")
