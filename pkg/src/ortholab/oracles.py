"""Reference implementations kept deliberately naive: trial division,
literal multi-loop correlation sums, exhaustive subset enumeration, dense
direct frequency scans. These are the independent second routes the test
suite and the `suite` subcommand compare the optimized paths against; do
not optimize them.
"""

from __future__ import annotations

import numpy as np


def trial_division_mobius(n: int) -> int:
    if n < 1:
        raise ValueError("n must be >= 1")
    count = 0
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            count += 1
        else:
            d += 1
    if n > 1:
        count += 1
    return -1 if count % 2 else 1


def trial_division_omega(n: int) -> int:
    """Number of prime factors with multiplicity."""
    count = 0
    d = 2
    while d * d <= n:
        while n % d == 0:
            n //= d
            count += 1
        d += 1
    if n > 1:
        count += 1
    return count


def trial_division_liouville(n: int) -> int:
    return -1 if trial_division_omega(n) % 2 else 1


def mobius_range(n_max: int) -> np.ndarray:
    return np.array([trial_division_mobius(n) for n in range(1, n_max + 1)], dtype=np.int8)


def liouville_range(n_max: int) -> np.ndarray:
    return np.array([trial_division_liouville(n) for n in range(1, n_max + 1)], dtype=np.int8)


def autocorr_loop(values: np.ndarray, n: int, h_max: int) -> np.ndarray:
    """rho(h) by the literal truncated double sum."""
    out = np.empty(h_max + 1, dtype=np.complex128)
    for h in range(h_max + 1):
        total = 0.0 + 0.0j
        for m in range(n - h):
            total += values[m] * np.conj(values[m + h])
        out[h] = total / n
    return out


def u1_square_loop(values: np.ndarray, n: int, h: int) -> complex:
    total = 0.0 + 0.0j
    for lag in range(1, h + 1):
        inner = 0.0 + 0.0j
        for m in range(n - lag):
            inner += values[m] * np.conj(values[m + lag])
        total += inner / n
    return total / h


def us_raw_loop(values: np.ndarray, n: int, windows) -> complex:
    """Literal recursion for the degree-len(windows) raw average."""
    if len(windows) == 1:
        return u1_square_loop(values, n, windows[0])
    h = windows[-1]
    total = 0.0 + 0.0j
    need = n + sum(windows[:-1])
    for shift in range(1, h + 1):
        v = values[shift : shift + need] * np.conj(values[:need])
        total += us_raw_loop(v, n, windows[:-1])
    return total / h


def exhaustive_subset_sup(sums: np.ndarray) -> float:
    """Max over all subsets C of |sum_{B in C} s_B| (ascending-index
    summation, so the sign-splitting identity is reproduced bitwise for
    real input)."""
    best = 0.0
    k = len(sums)
    if k > 20:
        raise ValueError("exhaustive enumeration capped at 20 blocks")
    for mask in range(1 << k):
        picked = [sums[i] for i in range(k) if mask >> i & 1]
        val = abs(sum(picked)) if picked else 0.0
        if val > best:
            best = float(val)
    return best


def dense_sup_scan(block: np.ndarray, grid_points: int, chunk: int = 2048) -> float:
    """Direct max of |sum_j block[j] e^{2 pi i alpha j}| over a uniform
    alpha grid, evaluated by explicit matrix products (no FFT)."""
    j = np.arange(len(block))
    best = 0.0
    for lo in range(0, grid_points, chunk):
        alphas = np.arange(lo, min(lo + chunk, grid_points)) / grid_points
        mags = np.abs(np.exp(2j * np.pi * np.outer(alphas, j)) @ block)
        best = max(best, float(mags.max()))
    return best


def short_interval_variance_loop(values: np.ndarray, n: int, h: int) -> float:
    total = 0.0
    for m in range(n):
        total += abs(np.sum(values[m + 1 : m + 1 + h]) / h) ** 2
    return total / n


def chowlak_loop(u: np.ndarray, v_list, n: int, h: int, k: int) -> float:
    """Exact (1/H^k) sum over lag tuples of |(1/N) sum u(n) prod v_i(n+h_i)|."""
    import itertools

    total = 0.0
    for tup in itertools.product(range(1, h + 1), repeat=k):
        w = u[:n].copy()
        for i, hi in enumerate(tup):
            w *= v_list[i][hi : hi + n]
        total += abs(w.sum()) / n
    return total / h**k
