"""Autocorrelation profiles and the statistics built from them: averaged
Chowla sums, short-interval variance, the Wiener atom at 1, and the
double-to-multiple correlation reduction diagnostic.

Truncation convention: every sum over n stops at N-h (no wraparound, no
two-sided extension). Chowla-type lag ranges start at h=1, the Wiener atom
at h=0.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import next_fast_len

from ._util import cross_lags, cumsum_with_zero, lag_window_sum
from .averaging import AveragingScheme, ConvergenceReport
from .errors import BoundsError, ValidationError
from .seqgen import SequenceSample


@dataclass
class CorrelationProfile:
    """rho_N(h) = (1/N) sum_{n<=N-h} u(n) conj(u(n+h)) for h = 0..H."""

    values: np.ndarray
    n: int
    h_max: int

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if len(self.values) != self.h_max + 1:
            raise ValidationError("profile must carry lags 0..H")
        if self.h_max >= self.n:
            raise ValidationError("H must be smaller than N")
        # rho(0) is a sum of squared moduli
        if abs(self.values[0].imag) > 1e-9 * max(1.0, abs(self.values[0])):
            raise ValidationError("rho(0) must be real")
        self.values[0] = self.values[0].real

    @property
    def lags(self) -> np.ndarray:
        return np.arange(self.h_max + 1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("h,abs_rho,re,im\n")
        for h, z in enumerate(self.values):
            buf.write(f"{h},{abs(z)!r},{z.real!r},{z.imag!r}\n")
        return buf.getvalue()


def _check_autocorr_range(u: SequenceSample, n: int, h: int):
    if not 0 <= h < n:
        raise BoundsError(f"need 0 <= H < N, got H={h}, N={n}")
    if n > len(u) - h:
        raise BoundsError(f"need N <= len(u) - H = {len(u) - h}, got N={n}")


def autocorr(u: SequenceSample, n: int, h: int, method: str = "fft") -> CorrelationProfile:
    """Correlation profile at lags 0..h from the first n samples."""
    _check_autocorr_range(u, n, h)
    x = u.values[:n]
    if method == "fft":
        m = next_fast_len(n + h + 1)
        fx = np.fft.fft(x, m)
        full = np.fft.ifft(fx * np.conj(fx))
        # full[k] = sum_n x(n+k) conj(x(n)); our rho(h) is its conjugate
        rho = np.conj(full[: h + 1]) / n
    elif method == "direct":
        rho = np.array(
            [np.dot(x[: n - k], np.conj(x[k:n])) / n for k in range(h + 1)]
        )
    else:
        raise ValidationError(f"unknown method {method!r}")
    top = u.bound * u.bound * (1 + 1e-9) + 1e-9
    if float(np.max(np.abs(rho))) > top:
        raise ValidationError("profile exceeds bound^2; inconsistent input bound")
    return CorrelationProfile(rho, n, h)


def averaged_chowla2(u: SequenceSample, scheme: AveragingScheme, h: int,
                     method: str = "fft") -> ConvergenceReport:
    """(1/H) sum_{h<=H} |rho_N(h)| at every cutoff."""
    scheme.check_fits(len(u), extra=h)
    values = []
    for n in scheme.lengths:
        prof = autocorr(u, n, h, method=method)
        values.append(np.mean(np.abs(prof.values[1:])))
    return ConvergenceReport(scheme.lengths, np.array(values, dtype=np.complex128),
                             meta={"H": h})


def chowla2_sweep(u: SequenceSample, scheme: AveragingScheme, h_list) -> dict[int, ConvergenceReport]:
    return {int(h): averaged_chowla2(u, scheme, int(h)) for h in h_list}


EXACT_ENUMERATION_CAP = 100_000


def averaged_chowlak(u: SequenceSample, v_list, scheme: AveragingScheme, h: int,
                     samples: int = 400, seed=None) -> ConvergenceReport:
    """(1/H^k) sum over (h_1..h_k) of |(1/N) sum_n u(n) prod_i v_i(n+h_i)|.

    Enumerates exactly when H^k <= 100000 (FFT over the last lag axis),
    otherwise Monte Carlo over uniform lag tuples using the given seed;
    the report then carries a per-cutoff standard error.
    """
    k = len(v_list)
    if k < 1:
        raise ValidationError("need at least one shifted factor (k >= 1)")
    if samples < 1:
        raise ValidationError("need at least one Monte Carlo sample")
    for v in v_list:
        if len(v) < scheme.max_cutoff + h:
            raise BoundsError("every factor must cover N + H entries")
    scheme.check_fits(len(u))
    if h**k <= EXACT_ENUMERATION_CAP:
        return _chowlak_exact(u, v_list, scheme, h)
    if seed is None:
        raise ValidationError("Monte Carlo path requires a seed")
    return _chowlak_sampled(u, v_list, scheme, h, samples, seed)


def _chowlak_exact(u, v_list, scheme, h):
    k = len(v_list)
    values = []
    for n in scheme.lengths:
        total = 0.0
        prefix = np.ndindex(*([h] * (k - 1)))
        base = u.values[:n]
        for tup in prefix:
            w = base
            for i, hi in enumerate(tup):
                w = w * v_list[i].values[hi + 1 : hi + 1 + n]
            total += np.sum(np.abs(cross_lags(w, v_list[-1].values, n, h))) / n
        values.append(total / h**k)
    return ConvergenceReport(scheme.lengths, np.array(values, dtype=np.complex128),
                             meta={"H": h, "k": k, "path": "exact"})


def _chowlak_sampled(u, v_list, scheme, h, samples, seed):
    k = len(v_list)
    rng = np.random.default_rng(seed)
    tuples = rng.integers(1, h + 1, size=(samples, k))
    values, errs = [], []
    for n in scheme.lengths:
        base = u.values[:n]
        per = np.empty(samples)
        for s in range(samples):
            w = base
            for i in range(k):
                hi = int(tuples[s, i])
                w = w * v_list[i].values[hi : hi + n]
            per[s] = abs(np.sum(w)) / n
        values.append(per.mean())
        errs.append(per.std(ddof=1) / np.sqrt(samples) if samples > 1 else 0.0)
    return ConvergenceReport(scheme.lengths, np.array(values, dtype=np.complex128),
                             stderr=np.array(errs),
                             meta={"H": h, "k": k, "path": "monte-carlo", "samples": samples})


def short_interval_variance(u: SequenceSample, scheme: AveragingScheme, h: int) -> ConvergenceReport:
    """(1/N) sum_{n<=N} |(1/H) sum_{h'<=H} u(n+h')|^2 via a sliding window."""
    if h < 1:
        raise ValidationError("H must be >= 1")
    scheme.check_fits(len(u), extra=h)
    nmax = scheme.max_cutoff
    c = cumsum_with_zero(u.values[: nmax + h])
    win = (c[1 + h : 1 + h + nmax] - c[1 : 1 + nmax]) / h  # window mean at n=1..nmax
    sq = np.abs(win) ** 2
    cums = np.cumsum(sq)
    values = np.array([cums[n - 1] / n for n in scheme.lengths], dtype=np.complex128)
    return ConvergenceReport(scheme.lengths, values, meta={"H": h})


def wiener_atom(u: SequenceSample, scheme: AveragingScheme, h: int) -> ConvergenceReport:
    """(1/H) sum_{h'=0}^{H-1} rho_N(h'): the mass the spectral measure puts
    at 1, estimated from the first N samples at every cutoff."""
    if h < 1:
        raise ValidationError("H must be >= 1")
    scheme.check_fits(len(u), extra=h)
    values = []
    for n in scheme.lengths:
        x = u.values[:n]
        rho0 = np.dot(x, np.conj(x)) / n
        tail = lag_window_sum(x, n, h - 1) / n if h > 1 else 0.0
        values.append((rho0 + tail) / h)
    values = np.array(values, dtype=np.complex128)
    return ConvergenceReport(
        scheme.lengths, values,
        meta={"H": h, "imag_residue": float(abs(values[-1].imag))},
    )


def fejer_prediction(u: SequenceSample, n: int, h: int) -> float:
    """Fejer-kernel restatement of the short-interval variance from the
    correlation profile: (1/H) sum_{|j|<H} (1-|j|/H) rho~(j)."""
    prof = autocorr(u, n, h - 1) if h > 1 else autocorr(u, n, 0)
    rho = prof.values
    j = np.arange(len(rho))
    w = (1.0 - j / h) / h
    total = w[0] * rho[0] + 2 * np.sum(w[1:] * rho[1:].real)
    return float(total.real)


@dataclass
class AppendixAReport:
    """The double-to-multiple reduction surrogate: the multi-correlation
    statistic A, the lag-window energy D(H'), the bound sqrt(D) + H'/N +
    (H')^k/H with unit constants, and the Markov-inequality consistency pair
    for the |.| vs |.|^2 averages."""

    n: int
    h: int
    h_prime: int
    k: int
    a_stat: float
    d_energy: float
    surrogate_bound: float
    holds: bool
    square_pair: tuple[float, float]
    square_pair_holds: bool

    def to_json_dict(self) -> dict:
        return {
            "N": self.n, "H": self.h, "H_prime": self.h_prime, "k": self.k,
            "A": self.a_stat, "D": self.d_energy, "bound": self.surrogate_bound,
            "holds": self.holds,
            "square_pair": [self.square_pair[0], self.square_pair[1]],
            "square_pair_holds": self.square_pair_holds,
        }


def appendixA_report(u: SequenceSample, scheme: AveragingScheme, h: int,
                     h_prime: int, k: int = 2) -> AppendixAReport:
    """Evaluate the reduction diagnostic at the scheme's largest cutoff.

    The auxiliary factors are shifted copies b_i(n) = u(n+i), and all values
    are normalized by the bound so the bounded-by-1 hypothesis holds.
    """
    if h_prime >= h:
        raise ValidationError("H' must be much smaller than H")
    if k < 1:
        raise ValidationError("k must be >= 1")
    n = scheme.max_cutoff
    if n + h + k > len(u):
        raise BoundsError("need N + H + k entries for the shifted factors")
    norm = SequenceSample(u.values / u.bound, 1.0, label=u.label)
    shifted = [
        SequenceSample(norm.values[i:], 1.0, label=f"{u.label}<<{i}")
        for i in range(1, k + 1)
    ]
    sub = AveragingScheme(scheme.mode, (n,))
    a_stat = float(averaged_chowlak(norm, shifted, sub, h).tail.real)

    prof = autocorr(norm, n, h_prime)
    two_sided = np.concatenate([np.abs(prof.values[1:][::-1]), np.abs(prof.values)])
    d_energy = float(np.sum(two_sided**2) / h_prime)
    bound = np.sqrt(d_energy) + h_prime / n + h_prime**k / h

    mean_abs = float(np.mean(two_sided))
    eps = float(np.mean(two_sided**2))
    rhs = eps**0.25 + eps**0.5
    return AppendixAReport(
        n=n, h=h, h_prime=h_prime, k=k, a_stat=a_stat, d_energy=d_energy,
        surrogate_bound=float(bound), holds=bool(a_stat <= bound),
        square_pair=(mean_abs, rhs), square_pair_holds=bool(mean_abs <= rhs + 1e-12),
    )
