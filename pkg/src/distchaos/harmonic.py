"""Exact harmonic polynomial algebra on ``R^N``.

Polynomials carry :class:`~fractions.Fraction` coefficients keyed by
exponent tuples.  Everything that is a polynomial identity (harmonicity,
derivative identities, orthogonality, sphere norms at rational radii) is
decided in exact arithmetic.  Sup norms and the Poisson integral are the
only float computations here.

Sphere averages use the normalised surface measure, so ``<1, 1>_r = 1``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from . import exact
from ._errors import ContractError, ParameterError, SingularityError

Exponent = Tuple[int, ...]


def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, float) and not math.isfinite(c):
        raise ContractError("coefficients must be finite")
    return Fraction(c)


class MultiIndexPoly:
    """Polynomial in ``dim`` real variables with exact rational coefficients.

    Zero coefficients are never stored; ``terms`` maps exponent tuples of
    length ``dim`` to non-zero fractions.
    """

    __slots__ = ("dim", "terms", "_arrays")

    def __init__(self, dim: int, terms: Optional[Dict[Exponent, object]] = None):
        if dim < 1:
            raise ParameterError("dimension must be at least 1")
        self.dim = int(dim)
        clean = {}
        for beta, c in (terms or {}).items():
            beta = tuple(int(b) for b in beta)
            if len(beta) != self.dim or min(beta, default=0) < 0:
                raise ContractError(f"bad multi-index {beta} for dim {self.dim}")
            c = _frac(c)
            if c:
                clean[beta] = clean.get(beta, 0) + c
                if not clean[beta]:
                    del clean[beta]
        self.terms: Dict[Exponent, Fraction] = clean
        self._arrays = None

    # construction ---------------------------------------------------------
    @classmethod
    def constant(cls, dim: int, c=1) -> "MultiIndexPoly":
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def variable(cls, dim: int, k: int) -> "MultiIndexPoly":
        """The coordinate ``x_k`` (0-based ``k``)."""
        beta = [0] * dim
        beta[k] = 1
        return cls(dim, {tuple(beta): 1})

    @classmethod
    def monomial(cls, beta: Sequence[int], c=1) -> "MultiIndexPoly":
        return cls(len(beta), {tuple(beta): c})

    # basic structure --------------------------------------------------------
    @property
    def degree(self) -> int:
        return max((sum(b) for b in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def is_homogeneous(self) -> bool:
        return len({sum(b) for b in self.terms}) <= 1

    def __eq__(self, other):
        if not isinstance(other, MultiIndexPoly):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        return hash((self.dim, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return f"MultiIndexPoly({self.dim}, 0)"
        parts = []
        for beta in sorted(self.terms, key=lambda b: (-sum(b), tuple(-x for x in b))):
            mono = "*".join(f"x{i+1}^{e}" if e > 1 else f"x{i+1}" for i, e in enumerate(beta) if e)
            parts.append(f"{self.terms[beta]}{'*' + mono if mono else ''}")
        return f"MultiIndexPoly({self.dim}, {' + '.join(parts)})"

    def _check_dim(self, other: "MultiIndexPoly"):
        if self.dim != other.dim:
            raise ParameterError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other):
        if not isinstance(other, MultiIndexPoly):
            other = MultiIndexPoly.constant(self.dim, other)
        self._check_dim(other)
        out = dict(self.terms)
        for b, c in other.terms.items():
            v = out.get(b, 0) + c
            if v:
                out[b] = v
            else:
                out.pop(b, None)
        return MultiIndexPoly(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiIndexPoly(self.dim, {b: -c for b, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, MultiIndexPoly) else -_frac(other))

    def __mul__(self, other):
        if isinstance(other, MultiIndexPoly):
            self._check_dim(other)
            out: Dict[Exponent, Fraction] = {}
            for b1, c1 in self.terms.items():
                for b2, c2 in other.terms.items():
                    b = tuple(x + y for x, y in zip(b1, b2))
                    out[b] = out.get(b, 0) + c1 * c2
            return MultiIndexPoly(self.dim, out)
        c = _frac(other)
        return MultiIndexPoly(self.dim, {b: c * v for b, v in self.terms.items()})

    __rmul__ = __mul__

    def __call__(self, x):
        """Exact evaluation at a point with rational (or int) coordinates."""
        if len(x) != self.dim:
            raise ParameterError("point dimension mismatch")
        total = 0
        for beta, c in self.terms.items():
            t = c
            for xi, e in zip(x, beta):
                if e:
                    t = t * xi ** e
            total = total + t
        return total

    def homogeneous_part(self, m: int) -> "MultiIndexPoly":
        return MultiIndexPoly(self.dim, {b: c for b, c in self.terms.items() if sum(b) == m})

    # float evaluation ---------------------------------------------------------
    def _float_arrays(self):
        if self._arrays is None:
            if self.terms:
                exps = np.array(list(self.terms.keys()), dtype=np.int64)
                coefs = np.array([float(c) for c in self.terms.values()], dtype=float)
            else:
                exps = np.zeros((0, self.dim), dtype=np.int64)
                coefs = np.zeros(0)
            self._arrays = (exps, coefs)
        return self._arrays

    def evaluate(self, points) -> np.ndarray:
        """Float values at an ``(M, dim)`` array of points."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        exps, coefs = self._float_arrays()
        if coefs.size == 0:
            return np.zeros(pts.shape[0])
        maxe = int(exps.max()) if exps.size else 0
        out = np.zeros(pts.shape[0])
        # power tables per coordinate, then accumulate term by term in blocks
        powers = [np.vander(pts[:, i], maxe + 1, increasing=True) for i in range(self.dim)]
        block = 512
        for s in range(0, coefs.size, block):
            e = exps[s:s + block]
            acc = np.ones((pts.shape[0], e.shape[0]))
            for i in range(self.dim):
                acc *= powers[i][:, e[:, i]]
            out += acc @ coefs[s:s + block]
        return out

    # serialisation -------------------------------------------------------------
    def to_json(self, kind: str = "harmonic-poly") -> dict:
        terms = []
        for beta in sorted(self.terms, key=grlex_key):
            c = self.terms[beta]
            terms.append({"alpha": list(beta), "num": str(c.numerator), "den": str(c.denominator)})
        return {"kind": kind, "dim": self.dim, "terms": terms}

    @classmethod
    def from_json(cls, data: dict) -> "MultiIndexPoly":
        if data.get("kind") not in ("harmonic-poly", "poly"):
            raise ContractError(f"not a polynomial document: kind={data.get('kind')!r}")
        terms = {}
        for t in data["terms"]:
            terms[tuple(t["alpha"])] = Fraction(int(t["num"]), int(t["den"]))
        return cls(int(data["dim"]), terms)


def grlex_key(beta: Exponent):
    """Sort key: higher total degree first, then lexicographically larger first."""
    return (-sum(beta), tuple(-b for b in beta))


@lru_cache(maxsize=None)
def monomials(dim: int, m: int) -> Tuple[Exponent, ...]:
    """All exponents of total degree ``m`` in lexicographically decreasing order."""
    if m < 0:
        return ()
    if dim == 1:
        return ((m,),)
    return tuple((i,) + rest for i in range(m, -1, -1) for rest in monomials(dim - 1, m - i))


# --------------------------------------------------------------------------
# differential operators

def partial_derivative(h: MultiIndexPoly, alpha: Sequence[int]) -> MultiIndexPoly:
    """``D^alpha h`` (exact)."""
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != h.dim or min(alpha) < 0:
        raise ParameterError(f"bad multi-index {alpha} for dim {h.dim}")
    out = {}
    for beta, c in h.terms.items():
        if any(b < a for b, a in zip(beta, alpha)):
            continue
        f = 1
        for b, a in zip(beta, alpha):
            for j in range(a):
                f *= b - j
        out[tuple(b - a for b, a in zip(beta, alpha))] = c * f
    return MultiIndexPoly(h.dim, out)


def coordinate_derivative(h: MultiIndexPoly, k: int, n: int = 1) -> MultiIndexPoly:
    """``d^n h / dx_k^n`` with 0-based ``k``."""
    alpha = [0] * h.dim
    alpha[k] = n
    return partial_derivative(h, alpha)


def laplacian(p: MultiIndexPoly) -> MultiIndexPoly:
    out: Dict[Exponent, Fraction] = {}
    for beta, c in p.terms.items():
        for k, e in enumerate(beta):
            if e >= 2:
                g = list(beta)
                g[k] -= 2
                g = tuple(g)
                out[g] = out.get(g, 0) + c * e * (e - 1)
    return MultiIndexPoly(p.dim, out)


def is_harmonic(p: MultiIndexPoly) -> bool:
    return laplacian(p).is_zero()


def homogeneous_decompose(h: MultiIndexPoly) -> List[MultiIndexPoly]:
    """Homogeneous parts ``[H_0, H_1, ..., H_deg]`` (zero parts included)."""
    parts: List[Dict[Exponent, Fraction]] = [dict() for _ in range(max(h.degree, 0) + 1)]
    for beta, c in h.terms.items():
        parts[sum(beta)][beta] = c
    return [MultiIndexPoly(h.dim, t) for t in parts]


# --------------------------------------------------------------------------
# dimensions and bases

def dim_harmonic(N: int, m: int) -> int:
    """Dimension ``d_m(N)`` of the homogeneous harmonic polynomials of degree ``m``."""
    if N < 2 or m < 0:
        raise ParameterError(f"need N >= 2 and m >= 0, got N={N}, m={m}")
    if N == 2 and m == 0:
        return 1
    num = (N + 2 * m - 2) * math.comb(N + m - 2, m)
    den = N + m - 2
    if num % den:
        raise ArithmeticError("dimension formula did not give an integer")
    return num // den


def laplacian_matrix(N: int, m: int) -> Tuple[List[Dict[int, int]], int]:
    """Sparse rows of the Laplacian from degree ``m`` to degree ``m - 2`` monomials."""
    cols = monomials(N, m)
    rows_idx = {b: i for i, b in enumerate(monomials(N, m - 2))}
    rows: List[Dict[int, int]] = [dict() for _ in rows_idx]
    for j, beta in enumerate(cols):
        for k, e in enumerate(beta):
            if e >= 2:
                g = list(beta)
                g[k] -= 2
                rows[rows_idx[tuple(g)]][j] = e * (e - 1)
    return rows, len(cols)


def laplacian_nullity(N: int, m: int) -> int:
    """Exact nullity of the Laplacian on degree-``m`` forms, by elimination."""
    rows, ncols = laplacian_matrix(N, m)
    return ncols - exact.rank(rows, ncols)


@dataclass(frozen=True)
class HarmonicHomogBasis:
    dim: int
    degree: int
    elements: Tuple[MultiIndexPoly, ...]
    free_monomials: Tuple[Exponent, ...]

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def to_json(self) -> dict:
        return {"kind": "harmonic-basis", "dim": self.dim, "degree": self.degree,
                "ordering": "grlex; element i has leading free monomial free_monomials[i]",
                "free_monomials": [list(b) for b in self.free_monomials],
                "elements": [e.to_json() for e in self.elements]}


def _laplacian_tail(q: Dict[Exponent, Fraction]) -> Dict[Exponent, Fraction]:
    """Laplacian in the variables ``x_2 .. x_N`` of a polynomial in those variables."""
    out: Dict[Exponent, Fraction] = {}
    for beta, c in q.items():
        for k, e in enumerate(beta):
            if e >= 2:
                g = list(beta)
                g[k] -= 2
                g = tuple(g)
                out[g] = out.get(g, 0) + c * e * (e - 1)
    return {b: c for b, c in out.items() if c}


def _harmonic_extension(N: int, beta: Exponent) -> MultiIndexPoly:
    """Unique harmonic ``x^beta + (terms with x_1-degree >= 2)``, ``beta[0] <= 1``.

    Writing ``P = sum_j x_1^(e+2j) q_j`` the Laplacian vanishes iff
    ``q_{j+1} = -Lap'(q_j) / ((e+2j+2)(e+2j+1))``.
    """
    e0 = beta[0]
    q = {beta[1:]: Fraction(1)}
    terms: Dict[Exponent, Fraction] = {}
    e = e0
    while q:
        for b, c in q.items():
            terms[(e,) + b] = c
        nxt = _laplacian_tail(q)
        scale = Fraction(-1, (e + 2) * (e + 1))
        q = {b: c * scale for b, c in nxt.items()}
        e += 2
    return MultiIndexPoly(N, terms)


_BASIS_CACHE: Dict[Tuple[int, int], HarmonicHomogBasis] = {}
_BASIS_LOCK = threading.Lock()


def harmonic_basis(N: int, m: int) -> HarmonicHomogBasis:
    """Exact basis of the degree-``m`` homogeneous harmonic polynomials.

    This is the reduced nullspace basis of the Laplacian when the monomials
    with ``x_1``-degree at most 1 are taken as the free columns: element
    ``i`` has coefficient 1 on ``free_monomials[i]`` and 0 on every other
    free monomial.  Free monomials are listed in grlex order.  Results are
    memoised per ``(N, m)``.
    """
    if N < 2 or m < 0:
        raise ParameterError(f"need N >= 2 and m >= 0, got N={N}, m={m}")
    key = (N, m)
    with _BASIS_LOCK:
        hit = _BASIS_CACHE.get(key)
    if hit is not None:
        return hit
    free = tuple(b for b in monomials(N, m) if b[0] <= 1)
    elems = tuple(_harmonic_extension(N, b) for b in free)
    basis = HarmonicHomogBasis(N, m, elems, free)
    with _BASIS_LOCK:
        _BASIS_CACHE.setdefault(key, basis)
    return _BASIS_CACHE[key]


# --------------------------------------------------------------------------
# sphere integrals

@lru_cache(maxsize=None)
def sphere_moment(N: int, beta: Exponent) -> Fraction:
    """Average of ``x^beta`` over the unit sphere in ``R^N`` (normalised measure)."""
    beta = tuple(beta)
    if len(beta) != N:
        raise ParameterError("multi-index length must equal N")
    if any(b % 2 for b in beta):
        return Fraction(0)
    num = 1
    for b in beta:
        num *= _double_factorial(b - 1)
    den = 1
    for j in range(sum(beta) // 2):
        den *= N + 2 * j
    return Fraction(num, den)


def _double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _radius_power(r, d: int):
    return r ** d


def inner_product_r(g: MultiIndexPoly, h: MultiIndexPoly, r=1):
    """``<g, h>_r``: the average of ``g h`` over the sphere of radius ``r``.

    Exact when ``r`` is an int or Fraction; otherwise a float.
    """
    g._check_dim(h)
    N = g.dim
    by_deg: Dict[int, Fraction] = {}
    for b1, c1 in g.terms.items():
        for b2, c2 in h.terms.items():
            b = tuple(x + y for x, y in zip(b1, b2))
            if any(x % 2 for x in b):
                continue
            d = sum(b)
            by_deg[d] = by_deg.get(d, 0) + c1 * c2 * sphere_moment(N, b)
    if isinstance(r, (int, Fraction)):
        r = Fraction(r)
        if r <= 0:
            raise ParameterError("radius must be positive")
        return sum((v * r ** d for d, v in by_deg.items()), Fraction(0))
    r = float(r)
    if not r > 0:
        raise ParameterError("radius must be positive")
    return math.fsum(float(v) * r ** d for d, v in by_deg.items())


def m2_sphere_sq(h: MultiIndexPoly, r=1):
    """``M_2(h, r)^2`` as the sum of the squared norms of the homogeneous parts.

    Cross terms between different degrees vanish only for harmonic parts,
    so non-harmonic input falls back to the full inner product.
    """
    parts = homogeneous_decompose(h)
    if all(is_harmonic(p) for p in parts):
        return sum((inner_product_r(p, p, r) for p in parts if not p.is_zero()),
                   Fraction(0) if isinstance(r, (int, Fraction)) else 0.0)
    return inner_product_r(h, h, r)


def m2_sphere(h: MultiIndexPoly, r=1) -> float:
    """Average ``L^2`` norm of ``h`` on the sphere of radius ``r``."""
    return math.sqrt(m2_sphere_sq(h, r))


def m2_profile(h: MultiIndexPoly, r=1) -> List[float]:
    """Per-degree norms ``M_2(H_m, r)`` of the homogeneous decomposition."""
    return [math.sqrt(inner_product_r(p, p, r)) if not p.is_zero() else 0.0
            for p in homogeneous_decompose(h)]


def _coeff_matrix(polys: Sequence[MultiIndexPoly], monos: Sequence[Exponent]):
    return [[p.terms.get(b, Fraction(0)) for p in polys] for b in monos]


_GRAM_CACHE: Dict[Tuple[int, int], List[List[Fraction]]] = {}
_GRAM_LOCK = threading.Lock()


def basis_gram(N: int, m: int) -> List[List[Fraction]]:
    """Exact Gram matrix ``<B_i, B_j>_1`` of :func:`harmonic_basis`."""
    key = (N, m)
    with _GRAM_LOCK:
        hit = _GRAM_CACHE.get(key)
    if hit is not None:
        return hit
    basis = harmonic_basis(N, m)
    monos = monomials(N, m)
    moment = [[sphere_moment(N, tuple(x + y for x, y in zip(a, b))) for b in monos] for a in monos]
    coef = _coeff_matrix(basis.elements, monos)
    gram = exact.matmul(exact.transpose(coef), exact.matmul(moment, coef))
    with _GRAM_LOCK:
        _GRAM_CACHE.setdefault(key, gram)
    return _GRAM_CACHE[key]


# --------------------------------------------------------------------------
# antiderivatives

def _require_harmonic_homogeneous(H: MultiIndexPoly):
    if not H.is_homogeneous():
        raise ContractError("input must be homogeneous")
    if not is_harmonic(H):
        raise ContractError("input must be harmonic")


def _min_norm_preimage(H: MultiIndexPoly, alpha: Sequence[int]) -> MultiIndexPoly:
    """Minimal ``M_2(., 1)`` solution ``P`` in ``H_{m+|alpha|}`` of ``D^alpha P = H``."""
    _require_harmonic_homogeneous(H)
    N = H.dim
    order = sum(alpha)
    if H.is_zero():
        return MultiIndexPoly(N)
    m = H.degree
    basis = harmonic_basis(N, m + order)
    images = [partial_derivative(b, alpha) for b in basis]
    monos = monomials(N, m)
    rows = [{i: img.terms[b] for i, img in enumerate(images) if b in img.terms} for b in monos]
    rhs = [H.terms.get(b, Fraction(0)) for b in monos]
    d = len(basis)
    c = exact.solve(rows, rhs, d)
    if c is None:
        raise ContractError(f"no harmonic preimage of degree {m + order} under D^{tuple(alpha)}")
    Z = exact.nullspace(rows, d)
    if Z:
        G = basis_gram(N, m + order)
        Zt = Z  # each entry is a column vector of length d
        GZ = exact.matmul(G, exact.transpose(Zt))
        M = exact.matmul(Zt, GZ)
        Gc = exact.matmul(G, [[x] for x in c])
        v = [-sum((z[i] * Gc[i][0] for i in range(d)), Fraction(0)) for z in Zt]
        t = exact.solve(M, v, len(Zt))
        if t is None:
            raise ArithmeticError("normal equations of the minimal-norm solve are singular")
        c = [c[i] + sum((t[j] * Zt[j][i] for j in range(len(Zt))), Fraction(0)) for i in range(d)]
    terms: Dict[Exponent, Fraction] = {}
    for ci, b in zip(c, basis):
        if ci:
            for beta, v in b.terms.items():
                terms[beta] = terms.get(beta, 0) + ci * v
    return MultiIndexPoly(N, terms)


def antiderivative_coord(H: MultiIndexPoly, n: int, k: int) -> MultiIndexPoly:
    """Minimal-norm ``P`` in ``H_{m+n}`` with ``d^n P / dx_k^n = H``.

    ``k`` is 1-based as in ``x_1 .. x_N``.  Among all harmonic solutions the
    one with the smallest ``M_2(P, 1)`` is returned; it is unique because
    the solutions form an affine subspace and the norm is strictly convex.
    """
    if not 1 <= k <= H.dim:
        raise ParameterError(f"coordinate k={k} outside 1..{H.dim}")
    if n < 0:
        raise ParameterError("n must be non-negative")
    if n == 0:
        _require_harmonic_homogeneous(H)
        return H
    alpha = [0] * H.dim
    alpha[k - 1] = n
    return _min_norm_preimage(H, alpha)


def antiderivative_alpha(H: MultiIndexPoly, alpha: Sequence[int]) -> MultiIndexPoly:
    """Minimal-norm ``H_alpha`` in ``H_{m+|alpha|}`` with ``D^alpha H_alpha = H``.

    Solved jointly for the whole multi-index, not one coordinate at a time.
    """
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != H.dim or min(alpha) < 0:
        raise ParameterError(f"bad multi-index {alpha}")
    if sum(alpha) == 0:
        _require_harmonic_homogeneous(H)
        return H
    return _min_norm_preimage(H, alpha)


def c_coeff(n: int, m: int, N: int) -> Fraction:
    """``(N+2m-2)! / (n! (N+2m+n-3)! (N+2m+2n-2))``."""
    if n < 0 or m < 0 or N < 2 or N + 2 * m + n < 3:
        raise ParameterError(f"(n, m, N) = {(n, m, N)} outside the admissible range")
    f = math.factorial
    return Fraction(f(N + 2 * m - 2), f(n) * f(N + 2 * m + n - 3) * (N + 2 * m + 2 * n - 2))


def c_coeff_estimate(n: int, m: int, N: int) -> Fraction:
    """The simpler majorant ``c_m / ((n+m)!^2 (n+m+1)^(N-2))`` with ``c_m = (N+2m-2)!``."""
    f = math.factorial
    return Fraction(f(N + 2 * m - 2), f(n + m) ** 2 * (n + m + 1) ** (N - 2))


def norm_ratio_sq(P: MultiIndexPoly, H: MultiIndexPoly) -> Fraction:
    """``M_2(P,1)^2 / M_2(H,1)^2`` exactly."""
    return Fraction(m2_sphere_sq(P, 1)) / Fraction(m2_sphere_sq(H, 1))


def antiderivative_report(H: MultiIndexPoly, n: int, k: int) -> dict:
    """Minimal-norm antiderivative with its norm ratio against ``c_{n,m,N}``."""
    P = antiderivative_coord(H, n, k)
    m = H.degree
    ratio = norm_ratio_sq(P, H)
    bound = c_coeff(n, m, H.dim)
    identity = coordinate_derivative(P, k - 1, n) == H
    return {"P": P, "ratio": ratio, "bound": bound, "holds": ratio <= bound,
            "identity": identity, "equality": ratio == bound}


def compatibility_check(H: MultiIndexPoly, ell: int, n: int, k: int) -> dict:
    """Compare ``P_{ell+n,k}(H)`` with ``P_{ell,k}(P_{n,k}(H))`` for the minimal-norm maps."""
    joint = antiderivative_coord(H, ell + n, k)
    chained = antiderivative_coord(antiderivative_coord(H, n, k), ell, k)
    # d^n/dx_k^n P_{ell,k}(H) should again solve the (ell-n)-antiderivative problem
    derived = None
    if ell > n:
        P_ell = antiderivative_coord(H, ell, k)
        dn = coordinate_derivative(P_ell, k - 1, n)
        derived = coordinate_derivative(dn, k - 1, ell - n) == H
    return {"equal": joint == chained, "joint": joint, "chained": chained,
            "derivative_identity": derived}


# --------------------------------------------------------------------------
# translation and norms on spheres

def translate_harmonic(h: MultiIndexPoly, a: Sequence) -> MultiIndexPoly:
    """Exact expansion of ``h(x + a)``."""
    if len(a) != h.dim:
        raise ParameterError("translation vector dimension mismatch")
    a = [_frac(x) for x in a]
    out: Dict[Exponent, Fraction] = {}
    maxe = max((max(b) for b in h.terms), default=0)
    pw = [[x ** e for e in range(maxe + 1)] for x in a]
    for beta, c in h.terms.items():
        ranges = [range(b + 1) for b in beta]
        for gamma in product(*ranges):
            v = c
            for i, (b, g) in enumerate(zip(beta, gamma)):
                if b - g:
                    v *= math.comb(b, g) * pw[i][b - g]
            if v:
                out[gamma] = out.get(gamma, 0) + v
    return MultiIndexPoly(h.dim, out)


def translation_constant(N: int, r, R):
    """``(2r/R + 1) (r/R + 1)^(N-2)``; exact for rational ``r, R``."""
    q = Fraction(r) / Fraction(R) if isinstance(r, (int, Fraction)) and isinstance(R, (int, Fraction)) else r / R
    return (2 * q + 1) * (q + 1) ** (N - 2)


def harnack_factor(N: int, r: float, dist: float) -> float:
    """Harnack ratio ``(r + d) r^(N-2) / (r - d)^(N-1)`` for a point at distance ``d < r``."""
    if not 0 <= dist < r:
        raise ParameterError("need 0 <= dist < r")
    return (r + dist) * r ** (N - 2) / (r - dist) ** (N - 1)


def _sphere_grid(N: int, samples: int) -> np.ndarray:
    if N == 2:
        t = 2 * np.pi * np.arange(samples) / samples
        return np.column_stack([np.cos(t), np.sin(t)])
    th = np.pi * (np.arange(samples) + 0.5) / samples
    ph = 2 * np.pi * np.arange(2 * samples) / (2 * samples)
    T, P = np.meshgrid(th, ph, indexing="ij")
    pts = np.column_stack([(np.sin(T) * np.cos(P)).ravel(), (np.sin(T) * np.sin(P)).ravel(),
                           np.cos(T).ravel()])
    # include the poles explicitly
    return np.vstack([pts, [[0, 0, 1], [0, 0, -1]]])


def sup_norm_sphere(h: MultiIndexPoly, r: float, samples: int = 256, allow_sampling: bool = False,
                    seed: int = 0, return_info: bool = False):
    """Estimated ``M_inf(h, r)``.

    ``N = 2``: ``samples`` equispaced angles, then a bounded local search
    around the best one.  ``N = 3``: a ``samples x 2 samples`` angular grid
    refined by Nelder-Mead.  Other ``N`` need ``allow_sampling=True`` and use
    ``samples**2`` uniform random points from ``seed``; the result is then a
    lower estimate whose coverage is reported in the info dict.
    """
    r = float(r)
    if not r > 0:
        raise ParameterError("radius must be positive")
    N = h.dim
    info = {"method": None, "points": 0, "seed": None}
    if h.is_zero():
        return (0.0, info) if return_info else 0.0
    if N == 2:
        pts = _sphere_grid(2, samples)
        vals = np.abs(h.evaluate(r * pts))
        j = int(np.argmax(vals))
        t0 = 2 * np.pi * j / samples
        step = 2 * np.pi / samples
        from scipy.optimize import minimize_scalar

        res = minimize_scalar(lambda t: -abs(h.evaluate([[r * math.cos(t), r * math.sin(t)]])[0]),
                              bounds=(t0 - step, t0 + step), method="bounded",
                              options={"xatol": 1e-12})
        best = max(float(vals[j]), -float(res.fun))
        info.update(method="trapezoid-grid+bounded", points=samples)
    elif N == 3:
        pts = _sphere_grid(3, samples)
        vals = np.abs(h.evaluate(r * pts))
        j = int(np.argmax(vals))
        x0 = pts[j]

        def neg(v):
            u = np.asarray(v, dtype=float)
            nrm = np.linalg.norm(u)
            if nrm == 0:
                return 0.0
            return -abs(h.evaluate([r * u / nrm])[0])

        res = minimize(neg, x0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 2000})
        best = max(float(vals[j]), -float(res.fun))
        info.update(method="angular-grid+nelder-mead", points=len(pts))
    else:
        if not allow_sampling:
            raise ParameterError(f"no sphere grid for N={N}; pass allow_sampling=True")
        rng = np.random.default_rng(seed)
        pts = rng.standard_normal((samples * samples, N))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        best = float(np.abs(h.evaluate(r * pts)).max())
        info.update(method="random-sampling", points=len(pts), seed=seed)
    return (best, info) if return_info else best


def sphere_area(N: int) -> float:
    """Unnormalised surface area of the unit sphere in ``R^N``."""
    return 2 * math.pi ** (N / 2) / math.gamma(N / 2)


def poisson_kernel(x0, r: float, x, y) -> float:
    """Poisson kernel of the ball ``B(x0, r)`` at ``x`` for boundary point ``y``."""
    x0, x, y = (np.asarray(v, dtype=float) for v in (x0, x, y))
    N = x0.size
    dxy = float(np.linalg.norm(x - y))
    if dxy == 0.0:
        raise SingularityError("Poisson kernel is singular at x == y")
    return (r * r - float(np.dot(x - x0, x - x0))) / (sphere_area(N) * r * dxy ** N)


def _sphere_rule(N: int, n: int):
    """Nodes on the unit sphere and weights summing to ``sigma_N``."""
    if N == 2:
        t = 2 * np.pi * np.arange(n) / n
        return np.column_stack([np.cos(t), np.sin(t)]), np.full(n, 2 * np.pi / n)
    if N == 3:
        u, wu = np.polynomial.legendre.leggauss(n)
        ph = 2 * np.pi * np.arange(2 * n) / (2 * n)
        U, P = np.meshgrid(u, ph, indexing="ij")
        W = np.repeat(wu[:, None], 2 * n, axis=1) * (2 * np.pi / (2 * n))
        s = np.sqrt(1 - U ** 2)
        pts = np.column_stack([(s * np.cos(P)).ravel(), (s * np.sin(P)).ravel(), U.ravel()])
        return pts, W.ravel()
    raise ParameterError("Poisson quadrature is available for N in {2, 3}")


def poisson_integral(h: MultiIndexPoly, x0, r: float, x, nodes: int = 2048) -> float:
    """``int K_{x0,r}(x, y) h(y) dsigma(y)`` over ``S(x0, r)`` by quadrature.

    ``N = 2`` uses the trapezoid rule with ``nodes`` points; ``N = 3`` a
    product Gauss-Legendre (in ``cos theta``) by trapezoid (in ``phi``) rule
    with ``nodes`` and ``2 nodes`` points.
    """
    x0 = np.asarray(x0, dtype=float)
    x = np.asarray(x, dtype=float)
    N = x0.size
    if np.linalg.norm(x - x0) >= r:
        raise ParameterError("x must lie inside the ball")
    u, w = _sphere_rule(N, nodes)
    y = x0 + r * u
    d = np.linalg.norm(x - y, axis=1)
    K = (r * r - float(np.dot(x - x0, x - x0))) / (sphere_area(N) * r * d ** N)
    # surface element on S(x0, r) is r^(N-1) times the unit-sphere element
    return float(np.sum(K * h.evaluate(y) * w) * r ** (N - 1))


# --------------------------------------------------------------------------
# constants

def cN_constant(N: int) -> float:
    """``c_2 = 1``; for ``N >= 3`` the product constant, evaluated in logs."""
    if N < 2:
        raise ParameterError("N must be at least 2")
    if N == 2:
        return 1.0
    s = math.fsum(2 * j * math.log(2 * j) - (2 * j + 1) * math.log(2 * j + 1) for j in range(1, N))
    return N * math.exp(s / (2 * N))


def antiderivative_ratio(H: MultiIndexPoly, alpha: Sequence[int]) -> float:
    """``M_2(H_alpha,1) |alpha|! / (c_N^|alpha| M_2(H,1))`` for the minimal-norm ``H_alpha``."""
    Ha = antiderivative_alpha(H, alpha)
    k = sum(alpha)
    r2 = norm_ratio_sq(Ha, H)
    return math.sqrt(r2) * math.factorial(k) / cN_constant(H.dim) ** k


def _multi_indices(N: int, order: int):
    return [b for b in monomials(N, order)]


def calibrate_antiderivative_constants(N: int, max_order: int = 4, max_degree: int = 2) -> dict:
    """Empirical constants ``A, C`` with ``ratio <= C |alpha|^A`` on a corpus.

    The corpus is every multi-index with ``1 <= |alpha| <= max_order`` and
    every basis element of ``H_m``, ``m <= max_degree``.  ``A`` is the
    smallest non-negative exponent making the per-order maxima fit a power
    law through order 1, and ``C`` the matching prefactor.  For ``N = 2``
    the bound holds with ``A = 0, C = 1`` and the measured maxima are only
    recorded.
    """
    per_order = {}
    for k in range(1, max_order + 1):
        worst = 0.0
        for alpha in _multi_indices(N, k):
            for m in range(max_degree + 1):
                for H in harmonic_basis(N, m):
                    worst = max(worst, antiderivative_ratio(H, alpha))
        per_order[k] = worst
    if N == 2:
        return {"A": 0.0, "C": 1.0, "per_order": per_order}
    A = 0.0
    for k in range(2, max_order + 1):
        A = max(A, math.log(per_order[k] / per_order[1]) / math.log(k))
    C = max(per_order[k] / k ** A for k in per_order)
    return {"A": A, "C": C, "per_order": per_order}
