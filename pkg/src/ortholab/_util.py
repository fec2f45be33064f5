"""Internal helpers: deterministic parallel map, phase-accurate exponentials,
truncated lag sums, canonical JSON."""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.fft import next_fast_len


def env_workers(default: int | None = None) -> int:
    if default is not None:
        return default
    w = os.environ.get("ORTHOLAB_WORKERS")
    if w:
        return max(1, int(w))
    return min(8, os.cpu_count() or 1)


def parallel_map(fn, items, workers=1):
    """Map with an ordered merge: results come back in input order, so the
    reduction downstream is bit-identical for any worker count."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def unit_phases(n_indices, alpha) -> np.ndarray:
    """e^{2*pi*i*n*alpha} with the fractional part taken in extended precision.

    Plain float64 n*alpha loses ~1e-10 of phase for n ~ 1e5; long doubles keep
    round trips (modulate by alpha then -alpha) below 1e-12 per entry.
    """
    n = np.asarray(n_indices)
    frac = (n.astype(np.longdouble) * np.longdouble(alpha)) % 1.0
    return np.exp(2j * np.pi * frac.astype(np.float64))


def quadratic_phases(n_indices, alpha) -> np.ndarray:
    """e^{2*pi*i*n^2*alpha}, same extended-precision treatment."""
    n = np.asarray(n_indices).astype(np.longdouble)
    frac = (n * n * np.longdouble(alpha)) % 1.0
    return np.exp(2j * np.pi * frac.astype(np.float64))


def cumsum_with_zero(x: np.ndarray) -> np.ndarray:
    out = np.empty(len(x) + 1, dtype=np.complex128)
    out[0] = 0.0
    np.cumsum(x, out=out[1:])
    return out


def lag_window_sum(v: np.ndarray, n: int, h: int) -> complex:
    """Exact sum_{h'=1..h} sum_{m<=n-h'} v(m)*conj(v(m+h')) in O(n).

    v is 0-indexed (v[0] is the m=1 entry) and must have at least n entries.
    Equals the h-fold truncated lag sums a direct double loop would produce.
    """
    if n < 2 or h < 1:
        return 0.0 + 0.0j
    h = min(h, n - 1)
    c = cumsum_with_zero(np.conj(v[:n]))
    # m = 1..n-h sees the full window of h lags, the rest truncate at n
    t1 = np.dot(v[: n - h], c[1 + h :] - c[1 : n - h + 1])
    t2 = np.dot(v[n - h : n - 1], c[n] - c[n - h + 1 : n])
    return complex(t1 + t2)


def cross_lags(w: np.ndarray, v: np.ndarray, n: int, h: int) -> np.ndarray:
    """FFT evaluation of R[h'] = sum_{m=1..n} w(m) * v(m+h') for h' = 1..h.

    w needs n entries, v needs n+h. Zero-padded to a fast length so there is
    no circular wrap.
    """
    m = next_fast_len(n + h + 1)
    fw = np.fft.fft(np.conj(w[:n]), m)
    fv = np.fft.fft(v[: n + h], m)
    r = np.fft.ifft(fv * np.conj(fw))
    return r[1 : h + 1]


def dumps_canonical(obj) -> str:
    """Deterministic JSON: sorted keys, fixed separators, repr floats."""
    return json.dumps(obj, sort_keys=True, separators=(", ", ": "), allow_nan=False)


def complex_pair(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def spawn_seeds(seed, count):
    """Deterministic child seeds regardless of how the work is sharded."""
    return [s.generate_state(4).tolist() for s in np.random.SeedSequence(seed).spawn(count)]
