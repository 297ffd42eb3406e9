"""Index sets of positive integers and their finite-horizon densities.

Densities are exact :class:`~fractions.Fraction` values.  Upper and lower
densities are limits and cannot be read off a finite set of indices; the
profiles here report partial densities at explicit checkpoints together
with their running extremes, and every consumer records the horizon.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from ._errors import ContractError, ParameterError


@dataclass(frozen=True)
class IndexSet:
    """Finite union of disjoint closed integer intervals ``[lo, hi]``, ``lo >= 1``.

    Adjacent or overlapping input intervals are merged, so the stored list
    is sorted with ``hi_i < lo_{i+1} - 1``.
    """

    intervals: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        ivs = sorted((int(lo), int(hi)) for lo, hi in self.intervals)
        merged: List[List[int]] = []
        for lo, hi in ivs:
            if lo < 1 or hi < lo:
                raise ContractError(f"bad interval [{lo}, {hi}]")
            if merged and lo <= merged[-1][1] + 1:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        object.__setattr__(self, "intervals", tuple((lo, hi) for lo, hi in merged))

    @classmethod
    def from_members(cls, members: Iterable[int]) -> "IndexSet":
        return cls(tuple((n, n) for n in members))

    def __contains__(self, n: int) -> bool:
        i = bisect.bisect_right(self.intervals, (n, float("inf"))) - 1
        return i >= 0 and self.intervals[i][0] <= n <= self.intervals[i][1]

    def __iter__(self):
        for lo, hi in self.intervals:
            yield from range(lo, hi + 1)

    def __len__(self):
        return sum(hi - lo + 1 for lo, hi in self.intervals)

    def count_upto(self, n: int) -> int:
        """``|A ∩ {1, ..., n}|``."""
        total = 0
        for lo, hi in self.intervals:
            if lo > n:
                break
            total += min(hi, n) - lo + 1
        return total

    def members_upto(self, n: int) -> List[int]:
        out = []
        for lo, hi in self.intervals:
            if lo > n:
                break
            out.extend(range(lo, min(hi, n) + 1))
        return out

    def block_of(self, n: int) -> Optional[int]:
        """1-based index of the interval containing ``n`` (``None`` if absent)."""
        i = bisect.bisect_right(self.intervals, (n, float("inf"))) - 1
        if i >= 0 and self.intervals[i][0] <= n <= self.intervals[i][1]:
            return i + 1
        return None

    def issubset(self, other: "IndexSet") -> bool:
        return all(any(olo <= lo and hi <= ohi for olo, ohi in other.intervals)
                   for lo, hi in self.intervals)

    def to_json(self) -> dict:
        return {"kind": "index-set", "intervals": [[lo, hi] for lo, hi in self.intervals]}

    @classmethod
    def from_json(cls, data: dict) -> "IndexSet":
        if data.get("kind") != "index-set":
            raise ContractError(f"not an index-set document: kind={data.get('kind')!r}")
        return cls(tuple(tuple(iv) for iv in data["intervals"]))


def partial_density(A: IndexSet, n: int) -> Fraction:
    """``|A ∩ {1..n}| / n``."""
    if n < 1:
        raise ParameterError("n must be at least 1")
    return Fraction(A.count_upto(n), n)


@dataclass(frozen=True)
class DensityProfile:
    checkpoints: Tuple[int, ...]
    densities: Tuple[Fraction, ...]
    running_max: Tuple[Fraction, ...]
    running_min: Tuple[Fraction, ...]

    @property
    def upper(self) -> Fraction:
        """Largest checkpoint density (finite stand-in for the upper density)."""
        return self.running_max[-1]

    @property
    def lower(self) -> Fraction:
        return self.running_min[-1]

    def rows(self):
        return list(zip(self.checkpoints, self.densities, self.running_max, self.running_min))


def density_profile(A: IndexSet, checkpoints: Sequence[int]) -> DensityProfile:
    cps = tuple(int(c) for c in checkpoints)
    if not cps:
        raise ParameterError("need at least one checkpoint")
    if any(b <= a for a, b in zip(cps, cps[1:])):
        raise ParameterError("checkpoints must be strictly increasing")
    dens = tuple(partial_density(A, n) for n in cps)
    rmax, rmin = [], []
    for d in dens:
        rmax.append(max(rmax[-1], d) if rmax else d)
        rmin.append(min(rmin[-1], d) if rmin else d)
    return DensityProfile(cps, dens, tuple(rmax), tuple(rmin))


def build_blocks(anchors: Sequence[int]) -> IndexSet:
    """``∪ {a_n, ..., a_n^2}`` for anchors with ``a_{n+1} > a_n^2``."""
    anchors = [int(a) for a in anchors]
    if any(a < 1 for a in anchors):
        raise ContractError("anchors must be positive")
    for a, b in zip(anchors, anchors[1:]):
        if b <= a * a:
            raise ContractError(f"anchor {b} does not exceed the previous block end {a * a}")
    return IndexSet(tuple((a, a * a) for a in anchors))


def block_checkpoints(anchors: Sequence[int]) -> List[int]:
    """Block ends ``a_K^2``, where the partial density of a block set peaks."""
    return [int(a) ** 2 for a in anchors]


def distribution_functions(dist: Sequence[float], delta: float, horizon: int,
                           checkpoints: Optional[Sequence[int]] = None) -> Tuple[Fraction, Fraction]:
    """Finite-horizon ``(F, F*)`` for the set ``{n <= horizon : dist_n < delta}``.

    ``dist[n-1]`` is the distance at step ``n``.  Returns the minimum and the
    maximum partial density over ``checkpoints`` (default: every ``n`` in
    the second half ``[ceil(horizon/2), horizon]``), as stand-ins for the
    lower and upper densities.
    """
    if not delta > 0:
        raise ParameterError("delta must be positive")
    if horizon < 1 or len(dist) < horizon:
        raise ParameterError(f"need at least horizon={horizon} distances, got {len(dist)}")
    close = IndexSet.from_members(n for n in range(1, horizon + 1) if dist[n - 1] < delta)
    if checkpoints is None:
        checkpoints = range((horizon + 1) // 2, horizon + 1)
    prof = density_profile(close, list(checkpoints))
    return prof.lower, prof.upper
