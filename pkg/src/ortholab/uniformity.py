"""Gowers-Host-Kra uniformity seminorms of a sample along a cutoff
subsequence.

Degree 1 averages the truncated autocorrelations; each higher degree
averages the previous degree applied to the shifted products
v_h(n) = u(n+h) * conj(u(n)). The accumulation stays complex all the way
down and only the final real part is clamped before taking the 2^s-th
root (negative values are finite-scale noise; the raw value is retained).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._util import complex_pair, lag_window_sum, parallel_map
from .averaging import AveragingScheme
from .errors import BoundsError, ValidationError
from .seqgen import SequenceSample

SUPPORTED_DEGREES = (1, 2, 3)


@dataclass
class UniformityResult:
    degree: int
    windows: tuple[int, ...]
    value: float
    raw: complex
    cutoffs: tuple[int, ...]
    raw_per_cutoff: np.ndarray

    @property
    def imag_residue(self) -> float:
        return float(abs(self.raw.imag))

    def to_json_dict(self) -> dict:
        return {
            "degree": self.degree,
            "windows": list(self.windows),
            "value": self.value,
            "raw": complex_pair(self.raw),
            "imag_residue": self.imag_residue,
            "cutoffs": list(self.cutoffs),
            "raw_per_cutoff": [complex_pair(z) for z in self.raw_per_cutoff],
        }


def _degree_raw(x: np.ndarray, n: int, windows: tuple[int, ...], workers: int = 1) -> complex:
    """Raw 2^s-power average for degree s = len(windows); x needs
    n + sum(windows) entries."""
    h = windows[-1]
    if len(windows) == 1:
        return lag_window_sum(x, n, h) / (h * n)
    inner = windows[:-1]
    xc = np.conj(x)

    def one(shift):
        v = x[shift : shift + n + sum(inner)] * xc[: n + sum(inner)]
        return _degree_raw(v, n, inner)

    vals = parallel_map(one, range(1, h + 1), workers=workers)
    return complex(np.sum(np.array(vals))) / h


def _norm(u: SequenceSample, scheme: AveragingScheme, windows: tuple[int, ...],
          workers: int = 1) -> UniformityResult:
    s = len(windows)
    if any(w < 1 for w in windows):
        raise ValidationError("window sizes must be >= 1")
    extra = sum(windows)
    if scheme.max_cutoff + extra > len(u):
        raise BoundsError(
            f"need N + sum(H_i) = {scheme.max_cutoff + extra} entries, have {len(u)}"
        )
    raws = np.array(
        [_degree_raw(u.values, n, windows, workers=workers) for n in scheme.lengths]
    )
    raw = complex(raws[-1])
    value = max(raw.real, 0.0) ** (1.0 / 2**s)
    return UniformityResult(s, tuple(windows), float(value), raw,
                            scheme.lengths, raws)


def u1_norm(u: SequenceSample, scheme: AveragingScheme, h: int,
            workers: int = 1) -> UniformityResult:
    """Degree-1 seminorm: sqrt of the h-averaged truncated autocorrelation."""
    return _norm(u, scheme, (int(h),), workers=workers)


def us_norm(u: SequenceSample, scheme: AveragingScheme, s: int, windows,
            workers: int = 1) -> UniformityResult:
    """Degree-s seminorm for s in {2, 3} with explicit windows H_1..H_s.

    H_s drives the outermost shift average; H_1 the innermost lag average.
    """
    if s not in (2, 3):
        raise ValidationError(f"unsupported degree {s}; only s in {{2, 3}}")
    windows = tuple(int(w) for w in windows)
    if len(windows) != s:
        raise ValidationError(f"degree {s} needs exactly {s} windows")
    return _norm(u, scheme, windows, workers=workers)
