"""Builders for the distributionally irregular witnesses.

The construction picks anchors ``a_K < b_K`` so that the blocks
``[a_K, a_K^2]`` (where the orbit is near zero) and ``[b_K, b_K^2]``
(where it is large) each have upper density one, then places the weights
``omega*`` on the second family of blocks.  Entire witnesses use the
antiderivative chain ``S^n 1 = z^n / n!``; harmonic witnesses use the
minimal-norm ``D^alpha`` antiderivatives from :mod:`distchaos.harmonic`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np

from . import harmonic as hc
from ._errors import BudgetError, ContractError, ParameterError
from .density import IndexSet, build_blocks
from .series import EntireSeries, differentiate, integrate, m2_norm

Alpha = Union[str, Tuple[int, ...]]


def alpha_order(alpha: Alpha) -> int:
    """``|alpha|``; the entire-function operator ``"D"`` has order 1."""
    if alpha == "D":
        return 1
    alpha = tuple(int(a) for a in alpha)
    if min(alpha) < 0 or sum(alpha) == 0:
        raise ParameterError(f"alpha must be a non-zero multi-index, got {alpha}")
    return sum(alpha)


# --------------------------------------------------------------------------
# block parameters

def _logsumexp(vals: Sequence[float]) -> float:
    top = max(vals)
    if top == -math.inf:
        return -math.inf
    return top + math.log(math.fsum(math.exp(v - top) for v in vals))


def selection_log_bound(a: int, K: int, order: int, A_const: float, C_const: float,
                        max_terms: int = 100000) -> float:
    """Log of an upper bound for ``C sum_{n >= 2a^2} n^A K^(n|a|) / ((n - a^2)|a|)!``.

    Terms are summed until the consecutive-term ratio, which decreases in
    ``n``, is at most 1/2 and the current term is negligible; the remainder
    is then bounded by the geometric series with that ratio.
    """
    a2 = a * a
    n = 2 * a2
    lK = math.log(K)

    def log_term(n):
        return (math.log(C_const) + A_const * math.log(n) + n * order * lK
                - math.lgamma((n - a2) * order + 1))

    def log_ratio(n):
        s = A_const * math.log1p(1.0 / n) + order * lK
        for i in range(1, order + 1):
            s -= math.log((n - a2) * order + i)
        return s

    logs = []
    for _ in range(max_terms):
        logs.append(log_term(n))
        lr = log_ratio(n)
        # stop once the ratio is small and the last term is negligible
        if lr <= -math.log(2.0) and logs[-1] < max(logs) - 40.0:
            rho = math.exp(lr)
            logs.append(logs[-1] + math.log(rho / (1.0 - rho)))
            return _logsumexp(logs)
        n += 1
    raise BudgetError(f"selection tail for a={a}, K={K} did not reach ratio 1/2 in {max_terms} terms")


def selection_holds(a: int, K: int, order: int, A_const: float, C_const: float) -> bool:
    """Whether ``a`` satisfies the block inequality ``... < 1/K`` (with the rigorous tail)."""
    return selection_log_bound(a, K, order, A_const, C_const) < -math.log(K) - 1e-12


@dataclass(frozen=True)
class ConstructionParams:
    alpha: Alpha
    N: int
    A_const: float
    C_const: float
    anchors_a: Tuple[int, ...]
    anchors_b: Tuple[int, ...]
    cap: int = 0
    selection_logs: Tuple[float, ...] = ()

    def __post_init__(self):
        if len(self.anchors_a) != len(self.anchors_b):
            raise ContractError("anchors_a and anchors_b must have the same length")
        for K, (a, b) in enumerate(zip(self.anchors_a, self.anchors_b)):
            if b <= 2 * a * a:
                raise ContractError(f"b_{K+1}={b} must exceed 2 a_{K+1}^2 = {2 * a * a}")
            if K + 1 < len(self.anchors_a) and self.anchors_a[K + 1] <= b * b:
                raise ContractError(f"a_{K+2}={self.anchors_a[K + 1]} must exceed b_{K+1}^2 = {b * b}")

    @property
    def K_max(self) -> int:
        return len(self.anchors_a)

    @property
    def order(self) -> int:
        return alpha_order(self.alpha)

    @property
    def A(self) -> IndexSet:
        return build_blocks(self.anchors_a)

    @property
    def B(self) -> IndexSet:
        return build_blocks(self.anchors_b)

    def with_cap(self, cap: int) -> "ConstructionParams":
        return ConstructionParams(self.alpha, self.N, self.A_const, self.C_const,
                                  self.anchors_a, self.anchors_b, cap, self.selection_logs)

    def to_json(self) -> dict:
        return {"kind": "construction-params",
                "alpha": self.alpha if self.alpha == "D" else list(self.alpha),
                "N": self.N, "A_const": self.A_const, "C_const": self.C_const,
                "anchors_a": [str(a) for a in self.anchors_a],
                "anchors_b": [str(b) for b in self.anchors_b],
                "cap": self.cap, "selection_logs": list(self.selection_logs)}

    @classmethod
    def from_json(cls, data: dict) -> "ConstructionParams":
        alpha = data["alpha"]
        alpha = "D" if alpha == "D" else tuple(int(a) for a in alpha)
        return cls(alpha, int(data["N"]), float(data["A_const"]), float(data["C_const"]),
                   tuple(int(a) for a in data["anchors_a"]),
                   tuple(int(b) for b in data["anchors_b"]),
                   int(data.get("cap", 0)), tuple(data.get("selection_logs", ())))


def choose_block_parameters(alpha: Alpha, N: int, K_max: int, A_const: float = 1.0,
                            C_const: float = 1.0, cap: int = 0,
                            budget: int = 100000) -> ConstructionParams:
    """Minimal anchors ``a_K`` satisfying the block inequality for ``K <= K_max``.

    ``a_1`` is searched from 1 and ``a_{K+1}`` from ``b_K^2 + 1``; each
    ``b_K = 2 a_K^2 + 1`` is the smallest admissible value.
    """
    if K_max < 1:
        raise ParameterError("K_max must be at least 1")
    if A_const < 0 or C_const <= 0:
        raise ParameterError("need A_const >= 0 and C_const > 0")
    order = alpha_order(alpha)
    a_list: List[int] = []
    b_list: List[int] = []
    logs: List[float] = []
    lower = 1
    for K in range(1, K_max + 1):
        a = lower
        for _ in range(budget):
            lb = selection_log_bound(a, K, order, A_const, C_const)
            if lb < -math.log(K) - 1e-12:
                break
            a += 1
        else:
            raise BudgetError(f"no a_{K} found in [{lower}, {a}) (last log bound {lb:.4g}, "
                              f"target {-math.log(K):.4g})")
        a_list.append(a)
        logs.append(lb)
        b = 2 * a * a + 1
        b_list.append(b)
        lower = b * b + 1
    return ConstructionParams(alpha, N, float(A_const), float(C_const), tuple(a_list),
                              tuple(b_list), cap, tuple(logs))


# --------------------------------------------------------------------------
# weights

def named_omega(name: str) -> Callable[[int], float]:
    """Weight sequences usable by name in parameter files."""
    table = {
        "log": lambda n: math.log(n + 1),
        "sqrt": lambda n: math.sqrt(n),
        "linear": lambda n: float(n),
        "square": lambda n: float(n * n),
    }
    try:
        return table[name]
    except KeyError:
        raise ParameterError(f"unknown omega {name!r}; choose from {sorted(table)}") from None


@dataclass(frozen=True)
class WeightSchedule:
    """``omega``, ``min(omega_n, n)`` and its restriction to ``B``, for ``n = 1 .. horizon``.

    Index ``n`` is stored at position ``n - 1``.
    """

    omega: Tuple
    omega_tilde: Tuple
    omega_star: Tuple
    B: IndexSet
    horizon: int

    def tilde(self, n: int):
        return self.omega_tilde[n - 1]

    def star(self, n: int):
        if n < 1:
            return 0
        if n > self.horizon:
            raise ParameterError(f"index {n} beyond the schedule horizon {self.horizon}")
        return self.omega_star[n - 1]

    def to_json(self) -> dict:
        def enc(v):
            return str(v) if isinstance(v, Fraction) else repr(float(v))
        return {"kind": "weight-schedule", "horizon": self.horizon, "B": self.B.to_json(),
                "omega": [enc(v) for v in self.omega]}

    @classmethod
    def from_json(cls, data: dict) -> "WeightSchedule":
        def dec(s):
            return Fraction(s) if "/" in s or s.lstrip("-").isdigit() else float(s)
        omega = [dec(s) for s in data["omega"]]
        return build_weight_star(omega, IndexSet.from_json(data["B"]), int(data["horizon"]))


def build_weight_star(omega, B: IndexSet, horizon: int) -> WeightSchedule:
    """``omega~_n = min(omega_n, n)`` and ``omega*_n = omega~_n`` on ``B``, else 0.

    ``omega`` is a callable ``n -> omega_n`` or a sequence with ``omega[n-1]``.
    """
    if callable(omega):
        vals = [omega(n) for n in range(1, horizon + 1)]
    else:
        if len(omega) < horizon:
            raise ParameterError(f"need {horizon} weights, got {len(omega)}")
        vals = list(omega[:horizon])
    if any(v < 0 for v in vals):
        raise ContractError("omega must be non-negative")
    tilde = tuple(v if v <= n else type(v)(n) if isinstance(v, Fraction) else float(n)
                  for n, v in enumerate(vals, start=1))
    star = tuple(t if n in B else 0 for n, t in enumerate(tilde, start=1))
    return WeightSchedule(tuple(vals), tilde, star, B, horizon)


# --------------------------------------------------------------------------
# witnesses

def build_irregular_entire(params: ConstructionParams, schedule: WeightSchedule,
                           exact: bool = True) -> EntireSeries:
    """``f = sum_{n>=0} omega*_{n+1} S^(n+1) 1 = sum_{m>=1} omega*_m z^m / m!`` up to ``params.cap``.

    Hence ``D^j f(0) = omega*_j``.  With ``exact=True`` the coefficients are
    exact rationals of the (float) weights; otherwise :mod:`mpmath` numbers,
    which stay representable far past ``1/170!``.
    """
    cap = params.cap
    if cap < 1:
        raise ParameterError("params.cap must be at least 1")
    if schedule.horizon < cap:
        raise ParameterError(f"schedule horizon {schedule.horizon} shorter than cap {cap}")
    coeffs: List = [Fraction(0)]
    if exact:
        fact = 1
        for m in range(1, cap + 1):
            fact *= m
            w = schedule.star(m)
            coeffs.append(Fraction(w) / fact if w else Fraction(0))
    else:
        for m in range(1, cap + 1):
            w = schedule.star(m)
            coeffs.append(mpmath.mpf(w) / mpmath.factorial(m) if w else mpmath.mpf(0))
    return EntireSeries(tuple(coeffs))


class WitnessTailBound:
    """Coefficient bound ``|a_m| <= m / m!`` on ``support``, 0 elsewhere.

    Valid for any entire witness built on ``B = support`` because
    ``omega~_m <= m``; pass it as ``tail_bound`` to ``orbit_norms``.
    """

    def __init__(self, support: IndexSet):
        self.support = support

    def log_bound(self, m: int) -> float:
        if m not in self.support:
            return -math.inf
        return math.log(m) - math.lgamma(m + 1)

    def __call__(self, m: int) -> float:
        return math.exp(self.log_bound(m))


def antiderivative_chain(alpha: Sequence[int], length: int,
                         max_degree: Optional[int] = None) -> List[hc.MultiIndexPoly]:
    """``[H_{0 alpha}, ..., H_{(length-1) alpha}]`` with ``D^alpha H_{0 alpha} = 1``.

    Each element is the minimal-norm ``D^alpha`` antiderivative of the
    previous one, so ``D^(n alpha) H_{n alpha} = H_{0 alpha}``.
    """
    alpha = tuple(int(a) for a in alpha)
    order = alpha_order(alpha)
    N = len(alpha)
    if max_degree is not None and length * order > max_degree:
        raise BudgetError(f"chain of length {length} needs degree {length * order} > {max_degree}; "
                          f"achievable cap {max_degree // order - 1}")
    chain = []
    cur = hc.MultiIndexPoly.constant(N, 1)
    for _ in range(length):
        cur = hc.antiderivative_alpha(cur, alpha)
        chain.append(cur)
    return chain


def build_irregular_harmonic(params: ConstructionParams, schedule: WeightSchedule,
                             max_degree: int = 400, chain=None) -> hc.MultiIndexPoly:
    """``h = sum_{n <= cap} omega*_{n+1} H_{n alpha}`` (exact, harmonic).

    ``D^(n alpha) h (0) = omega*_n`` for ``1 <= n <= cap + 1``.
    """
    if params.alpha == "D":
        raise ParameterError("harmonic witnesses need a multi-index alpha")
    alpha = tuple(params.alpha)
    if len(alpha) != params.N:
        raise ParameterError("alpha length must equal N")
    cap = params.cap
    if schedule.horizon < cap + 1:
        raise ParameterError(f"schedule horizon {schedule.horizon} shorter than cap + 1 = {cap + 1}")
    if chain is None:
        chain = antiderivative_chain(alpha, cap + 1, max_degree)
    terms: Dict = {}
    for n in range(cap + 1):
        w = schedule.star(n + 1)
        if not w:
            continue
        w = Fraction(w)
        for beta, c in chain[n].terms.items():
            terms[beta] = terms.get(beta, 0) + w * c
    return hc.MultiIndexPoly(params.N, terms)


def derivative_readout(h: hc.MultiIndexPoly, alpha: Sequence[int], n: int):
    """``D^(n alpha) h (0)``."""
    g = h
    for _ in range(n):
        g = hc.partial_derivative(g, alpha)
    return g.terms.get((0,) * h.dim, Fraction(0))


def growth_constants(N: int, alpha: Alpha, ratio_A: float = 0.0, ratio_C: float = 1.0,
                     r_grid: Optional[Sequence[float]] = None) -> dict:
    """Constants ``(A, C)`` with ``M_inf(h, r) <= C r^A exp(c_N r)`` for witnesses.

    Built from the majorant ``sum_n (n+1) sqrt(d_k) C' k^A' (c_N r)^k / k!``
    with ``k = (n+1)|alpha|`` (using ``omega*_n <= n``, the sup/L2 estimate
    and the antiderivative bound with constants ``A', C'``).  The power is
    ``A = 1 + A' + (N-2)/2`` and ``C`` is the largest ratio of the majorant
    to ``r^A exp(c_N r)`` over ``r_grid``.
    """
    order = alpha_order(alpha)
    cN = hc.cN_constant(N)
    A = 1.0 + ratio_A + (N - 2) / 2.0
    if r_grid is None:
        r_grid = np.linspace(0.05, 60.0, 600)

    def log_major(r):
        s = cN * r
        logs = []
        n = 0
        while True:
            k = (n + 1) * order
            dk = hc.dim_harmonic(N, k)
            lt = (math.log(n + 1) + 0.5 * math.log(dk) + math.log(ratio_C) + ratio_A * math.log(k)
                  + k * math.log(s) - math.lgamma(k + 1))
            logs.append(lt)
            if k > 2 * s + 40 and lt < logs[0] - 60 and lt < max(logs) - 60:
                break
            n += 1
        return _logsumexp(logs)

    ratios = [log_major(r) - A * math.log(r) - cN * r for r in r_grid]
    C = math.exp(max(ratios))
    return {"A": A, "C": C, "rate": cN, "ratio_A": ratio_A, "ratio_C": ratio_C,
            "r_range": [float(min(r_grid)), float(max(r_grid))]}


class PeriodicPoint(NamedTuple):
    w: object
    defect: float
    tail_norm: float


def build_periodic_point(shift_model, z, k0: int, truncation: int) -> PeriodicPoint:
    """``w = sum_{n>=1} T^(k0 n) z + z + sum_{n=1}^{L} S^(k0 n) z``.

    ``shift_model`` is ``"D"`` (``z`` an :class:`EntireSeries`) or a
    multi-index ``alpha`` (``z`` a harmonic polynomial, ``T = D^alpha``).
    Truncating the ``S``-sum at ``L = truncation`` leaves the defect
    ``T^k0 w - w = -S^(k0 L) z``; both its measured ``M_2(., 1)`` and the
    norm of ``S^(k0 L) z`` are returned.
    """
    if k0 < 1 or truncation < 0:
        raise ParameterError("need k0 >= 1 and truncation >= 0")
    if shift_model == "D":
        if not isinstance(z, EntireSeries):
            raise ContractError("shift model D acts on EntireSeries")
        T, S = differentiate, integrate

        def norm(v):
            return m2_norm(v, 1.0)

        def is_zero(v):
            return all(c == 0 for c in v.coeffs)
    else:
        alpha = tuple(int(a) for a in shift_model)
        if not isinstance(z, hc.MultiIndexPoly) or z.dim != len(alpha):
            raise ContractError("shift model D^alpha acts on harmonic polynomials of matching dim")

        def T(v):
            return hc.partial_derivative(v, alpha)

        def S(v):
            out = hc.MultiIndexPoly(v.dim)
            for part in hc.homogeneous_decompose(v):
                if not part.is_zero():
                    out = out + hc.antiderivative_alpha(part, alpha)
            return out

        def norm(v):
            return hc.m2_sphere(v, 1)

        def is_zero(v):
            return v.is_zero()

    w = z
    v = z
    while True:
        for _ in range(k0):
            v = T(v)
        if is_zero(v):
            break
        w = w + v
    v = z
    for _ in range(truncation):
        for _ in range(k0):
            v = S(v)
        w = w + v
    tail = norm(v) if truncation else norm(z)
    Tw = w
    for _ in range(k0):
        Tw = T(Tw)
    defect = norm(Tw - w)
    return PeriodicPoint(w, defect, tail)
