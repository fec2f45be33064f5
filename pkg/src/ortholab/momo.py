"""Block-partition exponential-sum statistics: the fixed-frequency rotation
statistic, the sup-over-frequency statistic with an oversampled FFT kernel,
and the swapped-sup short-interval statistic.

A partition covers 1..N with blocks [b_k, b_{k+1}) plus the partial tail
[b_{K_N}, N] where K_N = max{k : b_k < N}; every statistic normalizes the
summed per-block magnitudes by 1/N.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.fft import next_fast_len
from scipy.optimize import minimize_scalar

from ._util import parallel_map, unit_phases
from .averaging import ConvergenceReport
from .errors import BoundsError, ValidationError
from .seqgen import SequenceSample

REFINE_MAX_BLOCK = 2**14


@dataclass(frozen=True)
class BlockPartition:
    """Increasing cut points with b_1 = 1 and growing gaps."""

    cuts: tuple[int, ...]
    descriptor: str = "explicit"

    def __post_init__(self):
        cuts = tuple(int(b) for b in self.cuts)
        if not cuts or cuts[0] != 1:
            raise ValidationError("cuts must start at b_1 = 1")
        if any(b <= a for a, b in zip(cuts, cuts[1:])) :
            raise ValidationError("cuts must be strictly increasing")
        object.__setattr__(self, "cuts", cuts)

    def k_n(self, n: int) -> int:
        """K_N = max{k : b_k < N} (1-based)."""
        from bisect import bisect_left

        k = bisect_left(self.cuts, n)
        if k == 0:
            raise BoundsError(f"no cut below N={n}")
        return k

    def blocks(self, n: int):
        """Half-open index ranges covering 1..N, tail block included."""
        k = self.k_n(n)
        edges = list(self.cuts[:k]) + [n + 1]
        return [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)]

    def gap_diagnostics(self) -> dict:
        gaps = np.diff(self.cuts)
        return {
            "first_gap": int(gaps[0]) if len(gaps) else 0,
            "last_gap": int(gaps[-1]) if len(gaps) else 0,
            "last_gap_ratio": float(gaps[-1] / self.cuts[-1]) if len(gaps) else 0.0,
        }


def make_partition(kind: str, params, n: int) -> BlockPartition:
    """Generate cuts below N.

    kinds: "power" (c, gamma) with b_k = ceil(c * k^gamma), gamma in (1, 2];
    "sqrt-log" with b_k = ceil(k * sqrt(ln(k+1))); "explicit" with the cut
    list given directly. Generators prepend 1 when the formula starts later,
    and the growing-gap invariants are checked over the generated range.
    """
    if n < 2:
        raise ValidationError("N must be >= 2")
    if kind == "explicit":
        cuts = [int(b) for b in params]
        if any(b <= a for a, b in zip(cuts, cuts[1:])):
            raise ValidationError("explicit cuts must be strictly increasing")
        return BlockPartition(tuple(cuts), "explicit")
    if kind == "power":
        c, gamma = float(params[0]), float(params[1])
        if not 1.0 < gamma <= 2.0 or c <= 0:
            raise ValidationError("power kind needs c > 0 and gamma in (1, 2]")
        cuts, k = [], 1
        while True:
            b = math.ceil(c * k**gamma)
            if b >= n:
                break
            if not cuts or b > cuts[-1]:
                cuts.append(b)
            k += 1
        descriptor = f"power:{c}:{gamma}"
    elif kind == "sqrt-log":
        cuts, k = [], 1
        while True:
            b = math.ceil(k * math.sqrt(math.log(k + 1)))
            if b >= n:
                break
            b = max(b, (cuts[-1] + 1) if cuts else 1)
            cuts.append(b)
            k += 1
        descriptor = "sqrt-log"
    else:
        raise ValidationError(f"unknown partition kind {kind!r}")
    if not cuts or cuts[0] != 1:
        cuts.insert(0, 1)
    part = BlockPartition(tuple(cuts), descriptor)
    _check_gap_growth(part)
    return part


def _check_gap_growth(part: BlockPartition):
    gaps = np.diff(part.cuts)
    if len(gaps) < 2:
        return
    # non-decreasing beyond a finite prefix, vanishing relative to b_k
    tail = gaps[len(gaps) // 2 :]
    if np.any(np.diff(tail) < -1):
        raise ValidationError("gaps must be non-decreasing beyond a finite prefix")
    if gaps[-1] / part.cuts[-1] > 0.5:
        raise ValidationError("gap/b_k must decay over the generated range")


def momo_rotation(u: SequenceSample, partition: BlockPartition, alpha: float,
                  n: int) -> float:
    """(1/N) * sum over blocks of |sum_{b_k<=n'<b_{k+1}} u(n') e^{2 pi i n' alpha}|."""
    if n > len(u):
        raise BoundsError(f"N={n} exceeds the {len(u)} available entries")
    x = u.values[:n] * unit_phases(np.arange(1, n + 1), alpha)
    edges = np.array([lo - 1 for lo, _ in partition.blocks(n)], dtype=np.intp)
    sums = np.add.reduceat(x, edges)
    return float(np.sum(np.abs(sums)) / n)


def _block_sup(block: np.ndarray, oversample: int, refine: bool):
    """Max of |sum_j block[j] e^{2 pi i alpha j}| over an oversampled grid,
    optionally polished; returns (sup, guarantee_factor)."""
    length = len(block)
    if length == 1:
        return float(abs(block[0])), 1.0
    grid = next_fast_len(oversample * length)
    mags = np.abs(np.fft.fft(block, grid))
    g = int(np.argmax(mags))
    sup = float(mags[g])
    guarantee = 1.0 - np.pi * length / grid
    if refine:
        # FFT frequency g corresponds to alpha = -g/grid (mod 1)
        center = (-g / grid) % 1.0
        j = np.arange(length)

        def neg_mag(a):
            return -abs(np.dot(block, np.exp(2j * np.pi * a * j)))

        res = minimize_scalar(
            neg_mag, bounds=(center - 1.0 / grid, center + 1.0 / grid),
            method="bounded", options={"xatol": 1e-12},
        )
        sup = max(sup, float(-res.fun))
    return sup, float(guarantee)


@dataclass
class MomoSupResult:
    value: float
    blocks: tuple  # (k, b_k, length, sup, guarantee_factor)
    oversample: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("k,b_k,length,sup,guarantee_factor\n")
        for k, b, length, sup, g in self.blocks:
            buf.write(f"{k},{b},{length},{sup!r},{g!r}\n")
        return buf.getvalue()

    def to_json_dict(self) -> dict:
        return {
            "value": self.value,
            "oversample": self.oversample,
            "blocks": [list(row) for row in self.blocks],
        }


def momo_sup(u: SequenceSample, partition: BlockPartition, n: int,
             oversample: int = 64, refine: bool | None = None,
             workers: int = 1) -> MomoSupResult:
    """(1/N) * sum over blocks of sup_alpha |sum u(n') e^{2 pi i alpha n'}|.

    Per-block sups come from a zero-padded FFT grid of >= oversample x block
    length points (grid max >= (1 - pi L/G) x true sup); refine runs a
    bounded scalar polish around the argmax and defaults to on for blocks
    shorter than 2^14.
    """
    if oversample < 8:
        raise ValidationError("oversample must be >= 8")
    if n > len(u):
        raise BoundsError(f"N={n} exceeds the {len(u)} available entries")
    spans = partition.blocks(n)

    def one(item):
        k, (lo, hi) = item
        block = u.values[lo - 1 : hi - 1]
        do_refine = refine if refine is not None else (hi - lo) < REFINE_MAX_BLOCK
        sup, guarantee = _block_sup(block, oversample, do_refine)
        return (k, lo, hi - lo, sup, guarantee)

    rows = parallel_map(one, enumerate(spans, start=1), workers=workers)
    value = float(sum(r[3] for r in rows) / n)
    return MomoSupResult(value, tuple(rows), oversample)


@dataclass
class MrtSwappedResult:
    mean: float
    stderr: float
    m_window: int
    sample_count: int

    def to_json_dict(self) -> dict:
        return {
            "mean": self.mean, "stderr": self.stderr,
            "M": self.m_window, "samples": self.sample_count,
        }


def mrt_swapped(u: SequenceSample, n: int, m_window: int, sample_count: int,
                seed, oversample: int = 64, refine: bool = False) -> MrtSwappedResult:
    """Monte Carlo estimate of (1/N) sum_n sup_alpha |(1/M) sum_{n<=m'<n+M}
    u(m') e^{2 pi i m' alpha}| over sampled window starts."""
    if sample_count < 1:
        raise ValidationError("need at least one sample")
    if n + m_window > len(u):
        raise BoundsError("need N + M entries")
    rng = np.random.default_rng(seed)
    starts = rng.integers(1, n + 1, size=sample_count)
    sups = np.empty(sample_count)
    for i, start in enumerate(starts):
        block = u.values[start - 1 : start - 1 + m_window]
        sup, _ = _block_sup(block, oversample, refine)
        sups[i] = sup / m_window
    stderr = float(sups.std(ddof=1) / np.sqrt(sample_count)) if sample_count > 1 else 0.0
    return MrtSwappedResult(float(sups.mean()), stderr, m_window, sample_count)
