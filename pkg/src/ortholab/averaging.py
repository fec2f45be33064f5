"""Cesaro and logarithmic averaging with subsequence evaluation.

A scheme fixes the weighting mode and an increasing list of cutoffs N_1 <
... < N_K; every statistic in the library reports one value per cutoff. The
logarithmic mode weights x(n) by 1/n and normalizes by the exact harmonic
sum L(N) = 1 + 1/2 + ... + 1/N.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._util import complex_pair
from .errors import BoundsError, ValidationError

CESARO = "cesaro"
LOGARITHMIC = "logarithmic"


@dataclass(frozen=True)
class AveragingScheme:
    mode: str
    lengths: tuple[int, ...]

    def __post_init__(self):
        if self.mode not in (CESARO, LOGARITHMIC):
            raise ValidationError(f"mode must be {CESARO!r} or {LOGARITHMIC!r}")
        lengths = tuple(int(n) for n in self.lengths)
        if not lengths:
            raise ValidationError("at least one cutoff is required")
        if any(b <= a for a, b in zip(lengths, lengths[1:])) or lengths[0] < 1:
            raise ValidationError("cutoffs must be strictly increasing positive integers")
        object.__setattr__(self, "lengths", lengths)

    @property
    def max_cutoff(self) -> int:
        return self.lengths[-1]

    def check_fits(self, available: int, extra: int = 0):
        if self.max_cutoff + extra > available:
            raise BoundsError(
                f"cutoff {self.max_cutoff} (+{extra}) exceeds the {available} available entries"
            )


def cesaro(*lengths) -> AveragingScheme:
    return AveragingScheme(CESARO, _flat(lengths))


def logarithmic(*lengths) -> AveragingScheme:
    return AveragingScheme(LOGARITHMIC, _flat(lengths))


def _flat(lengths):
    if len(lengths) == 1 and np.iterable(lengths[0]):
        return tuple(int(x) for x in lengths[0])
    return tuple(int(x) for x in lengths)


def geometric_lengths(n_max: int, count: int, ratio: float = 10.0) -> tuple[int, ...]:
    """Geometric grid ending at n_max, for sweeping outer parameters."""
    if count < 1 or n_max < 1:
        raise ValidationError("need count >= 1 and n_max >= 1")
    out = []
    x = float(n_max)
    for _ in range(count):
        out.append(max(1, int(round(x))))
        x /= ratio
    return tuple(sorted(set(out)))


@dataclass
class ConvergenceReport:
    """Per-cutoff values of a statistic plus two convergence diagnostics:
    the value at the largest cutoff and the max pairwise distance over the
    last ceil(K/3) cutoffs."""

    cutoffs: tuple[int, ...]
    values: np.ndarray
    stderr: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.cutoffs = tuple(int(c) for c in self.cutoffs)
        self.values = np.asarray(self.values, dtype=np.complex128)
        if len(self.cutoffs) != len(self.values):
            raise ValidationError("one value per cutoff required")

    @property
    def tail(self) -> complex:
        return complex(self.values[-1])

    @property
    def spread(self) -> float:
        k = len(self.values)
        last = self.values[k - (k + 2) // 3 :]
        return float(np.max(np.abs(last[:, None] - last[None, :])))

    def to_json_dict(self) -> dict:
        out = {
            "cutoffs": list(self.cutoffs),
            "values": [complex_pair(v) for v in self.values],
            "tail": complex_pair(self.tail),
            "spread": self.spread,
        }
        if self.stderr is not None:
            out["stderr"] = [float(s) for s in self.stderr]
        if self.meta:
            out["meta"] = self.meta
        return out


def harmonic_number(n: int) -> float:
    """L(N) as the literal sum of 1/n."""
    return float(np.sum(1.0 / np.arange(1, n + 1)))


def _weights_and_norms(scheme: AveragingScheme, n: int):
    idx = np.arange(1, n + 1, dtype=np.float64)
    if scheme.mode == CESARO:
        w = np.ones(n)
        norms = {c: float(c) for c in scheme.lengths}
    else:
        w = 1.0 / idx
        cum = np.cumsum(w)
        norms = {c: float(cum[c - 1]) for c in scheme.lengths}
    return w, norms


def average(x, scheme: AveragingScheme) -> ConvergenceReport:
    """Weighted average of a series x(1..N) at every cutoff of the scheme."""
    x = np.asarray(x, dtype=np.complex128)
    scheme.check_fits(len(x))
    n = scheme.max_cutoff
    w, norms = _weights_and_norms(scheme, n)
    cum = np.cumsum(w * x[:n])
    values = np.array([cum[c - 1] / norms[c] for c in scheme.lengths])
    return ConvergenceReport(scheme.lengths, values, meta={"mode": scheme.mode})


def log_density(index_set, scheme: AveragingScheme) -> ConvergenceReport:
    """(1/L(N)) * sum of 1/d_k over indices d_k <= N."""
    return log_weighted_average(index_set, None, scheme)


def log_weighted_average(index_set, weights, scheme: AveragingScheme) -> ConvergenceReport:
    """(1/L(N)) * sum of rho_k/d_k over d_k <= N; weights default to 1."""
    d = np.asarray(index_set, dtype=np.int64)
    if len(d) == 0 or d[0] < 1 or np.any(np.diff(d) <= 0):
        raise ValidationError("index set must be strictly increasing positive integers")
    if d[-1] > scheme.max_cutoff:
        raise BoundsError("indices exceed the largest cutoff")
    if weights is None:
        rho = np.ones(len(d))
    else:
        rho = np.asarray(weights, dtype=np.float64)
        if len(rho) != len(d):
            raise ValidationError("weights must align with the index set")
        if np.any(rho < 0) or np.any(rho > 1):
            raise ValidationError("weights must lie in [0, 1]")
    n = scheme.max_cutoff
    harm = np.cumsum(1.0 / np.arange(1, n + 1, dtype=np.float64))
    cum = np.cumsum(rho / d)
    counts = np.searchsorted(d, scheme.lengths, side="right")
    values = np.array(
        [
            (cum[k - 1] if k else 0.0) / harm[c - 1]
            for k, c in zip(counts, scheme.lengths)
        ],
        dtype=np.complex128,
    )
    return ConvergenceReport(scheme.lengths, values, meta={"mode": LOGARITHMIC})
