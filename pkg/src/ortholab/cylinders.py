"""Empirical cylinder-set statistics on finite-alphabet samples: block
frequencies, the cancellation statistic over a set of blocks, its worst case
over all block sets (with witness), the conditional per-block version, and
the decay scan across shifts.

Shift convention: the inspected window for the term at n starts m+1
positions later, i.e. it reads u(n+m+1 .. n+m+ell). m = 0 therefore probes
the immediately following block, and the window never overlaps u(n) itself
(overlap pins the leading symbol and forbids cancellation for any
sequence).
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from ._util import parallel_map
from .averaging import AveragingScheme, ConvergenceReport
from .errors import BoundsError, ResourceLimitError, ValidationError
from .seqgen import SequenceSample

BLOCK_UNIVERSE_CAP = 2**20
DIRECTION_GRID = 64


@dataclass(frozen=True)
class BlockQuery:
    """A block length, a shift, and a set of length-ell blocks (or "all")."""

    ell: int
    m: int
    blocks: tuple | str = "all"

    def __post_init__(self):
        if self.ell < 1 or self.m < 0:
            raise ValidationError("need ell >= 1 and m >= 0")
        if self.blocks != "all":
            blocks = tuple(tuple(complex(s) for s in b) for b in self.blocks)
            if any(len(b) != self.ell for b in blocks):
                raise ValidationError("every block must have length ell")
            object.__setattr__(self, "blocks", blocks)


def _alphabet_indices(u: SequenceSample) -> tuple[np.ndarray, list[complex]]:
    if not u.is_finite_alphabet:
        raise ValidationError("cylinder statistics need a finite-alphabet sample")
    alpha = sorted(u.alphabet, key=lambda z: (z.real, z.imag))
    arr = np.array(alpha)
    idx = np.argmin(np.abs(u.values[:, None] - arr[None, :]), axis=1)
    return idx.astype(np.int64), alpha


def _window_codes(idx: np.ndarray, ell: int, base: int) -> np.ndarray:
    """Integer code of the length-ell window starting at each position."""
    if base**ell > 2**62:
        raise ResourceLimitError(f"block space {base}^{ell} exceeds the 2^62 code range")
    n = len(idx) - ell + 1
    codes = np.zeros(n, dtype=np.int64)
    mult = 1
    for i in range(ell):
        codes += idx[i : i + n] * mult
        mult *= base
    return codes


def _decode(code: int, ell: int, alpha: list[complex]) -> tuple:
    base = len(alpha)
    out = []
    for _ in range(ell):
        out.append(alpha[code % base])
        code //= base
    return tuple(out)


def _encode_block(block, alpha: list[complex]) -> int:
    base = len(alpha)
    code = 0
    for s in reversed(block):
        hits = [i for i, a in enumerate(alpha) if abs(a - complex(s)) <= 1e-12]
        if not hits:
            raise ValidationError(f"block symbol {s} is not in the alphabet")
        code = code * base + hits[0]
    return code


def block_frequencies(u: SequenceSample, n: int, ell: int) -> dict:
    """Frequencies of the length-ell windows starting at 1..N."""
    if n < 1 or n + ell > len(u) + 1:
        raise BoundsError(f"need N + ell <= len(u) + 1, got N={n}, ell={ell}")
    idx, alpha = _alphabet_indices(u)
    codes = _window_codes(idx[: n + ell - 1], ell, len(alpha))
    uniq, counts = np.unique(codes[:n], return_counts=True)
    return {_decode(int(c), ell, alpha): k / n for c, k in zip(uniq, counts)}


def _prepare(u: SequenceSample, scheme: AveragingScheme, m: int, ell: int):
    scheme.check_fits(len(u), extra=m + ell)
    idx, alpha = _alphabet_indices(u)
    nmax = scheme.max_cutoff
    codes = _window_codes(idx[: nmax + m + ell], ell, len(alpha))
    # indicator window for the term at n (1-based) starts at n+m+1
    window_codes = codes[m + 1 : m + 1 + nmax]
    return window_codes, alpha


def cancellation_stat(u: SequenceSample, scheme: AveragingScheme,
                      query: BlockQuery) -> ConvergenceReport:
    """|(1/N) sum_{n<=N} u(n) * 1[window at n+m+1 lies in C]| per cutoff."""
    window_codes, alpha = _prepare(u, scheme, query.m, query.ell)
    if query.blocks == "all":
        ind = np.ones(len(window_codes), dtype=bool)
    else:
        wanted = np.array([_encode_block(b, alpha) for b in query.blocks], dtype=np.int64)
        ind = np.isin(window_codes, wanted)
    x = u.values[: len(window_codes)] * ind
    cum = np.cumsum(x)
    values = np.array([abs(cum[n - 1]) / n for n in scheme.lengths], dtype=np.complex128)
    return ConvergenceReport(scheme.lengths, values,
                             meta={"ell": query.ell, "m": query.m})


def _per_block_sums(window_codes, values, n):
    uniq, inv = np.unique(window_codes[:n], return_inverse=True)
    if len(uniq) > BLOCK_UNIVERSE_CAP:
        raise ResourceLimitError(
            f"{len(uniq)} distinct blocks exceed the cap of {BLOCK_UNIVERSE_CAP}"
        )
    re = np.bincount(inv, weights=values[:n].real, minlength=len(uniq)) / n
    im = np.bincount(inv, weights=values[:n].imag, minlength=len(uniq)) / n
    return uniq, re + 1j * im


def _sup_over_sets(sums: np.ndarray, real_input: bool):
    """Sup over subsets C of |sum_{B in C} s_B|.

    Real data: exact by sign splitting. Complex data: 64-direction grid,
    guaranteed >= cos(pi/64) of the true sup.
    """
    if real_input:
        s = sums.real
        pos = float(np.sum(s[s > 0]))
        neg = float(-np.sum(s[s < 0]))
        if pos >= neg:
            return pos, s > 0, 1.0
        return neg, s < 0, 1.0
    best, best_mask = -1.0, None
    for g in range(DIRECTION_GRID):
        proj = (sums * np.exp(-2j * np.pi * g / DIRECTION_GRID)).real
        mask = proj > 0
        val = float(np.abs(np.sum(sums[mask])))
        if val > best:
            best, best_mask = val, mask
    return best, best_mask, float(np.cos(np.pi / DIRECTION_GRID))


def worst_case_cancellation(u: SequenceSample, scheme: AveragingScheme, m: int,
                            ell: int):
    """Sup over all block sets C of the cancellation statistic.

    Returns (report, witness): per-cutoff sup values, and the maximizing
    block set at the largest cutoff. The report meta carries the witness
    size and the direction-grid guarantee factor (1.0 when exact).
    """
    window_codes, alpha = _prepare(u, scheme, m, ell)
    real_input = u.is_real
    sups, witness, guarantee = [], (), 1.0
    for n in scheme.lengths:
        uniq, sums = _per_block_sums(window_codes, u.values, n)
        sup, mask, guarantee = _sup_over_sets(sums, real_input)
        sups.append(sup)
        witness = tuple(_decode(int(c), ell, alpha) for c in uniq[mask])
    report = ConvergenceReport(
        scheme.lengths, np.array(sups, dtype=np.complex128),
        meta={"ell": ell, "m": m, "witness_size": len(witness),
              "guarantee_factor": guarantee},
    )
    return report, witness


@dataclass
class ConditionalCancellation:
    """Per-block ratios and the measure of blocks that cancel to within eps."""

    cutoffs: tuple[int, ...]
    good_mass: tuple[float, ...]
    ratios: dict
    excluded_mass: float
    eps: float

    def to_json_dict(self) -> dict:
        return {
            "cutoffs": list(self.cutoffs),
            "good_mass": list(self.good_mass),
            "eps": self.eps,
            "excluded_mass": self.excluded_mass,
            "ratios": [
                {"block": [[s.real, s.imag] for s in b], "ratio": r}
                for b, r in sorted(self.ratios.items(), key=lambda kv: str(kv[0]))
            ],
        }


def conditional_cancellation(u: SequenceSample, scheme: AveragingScheme, m: int,
                             ell: int, eps: float) -> ConditionalCancellation:
    """Per-block |shifted signed sum| / unshifted count, and the mass of
    blocks whose ratio is <= eps. Blocks never seen unshifted are excluded
    and their (shifted) mass reported separately."""
    if eps < 0:
        raise ValidationError("eps must be >= 0")
    window_codes, alpha = _prepare(u, scheme, m, ell)
    idx, _ = _alphabet_indices(u)
    base_codes = _window_codes(idx[: scheme.max_cutoff + ell], ell, len(alpha))
    good_masses = []
    ratios = {}
    excluded = 0.0
    for n in scheme.lengths:
        uniq, sums = _per_block_sums(window_codes, u.values, n)
        den_uniq, den_counts = np.unique(base_codes[:n], return_counts=True)
        den = dict(zip(den_uniq.tolist(), den_counts.tolist()))
        good = 0.0
        ratios = {}
        excluded = 0.0
        shifted_uniq, shifted_counts = np.unique(window_codes[:n], return_counts=True)
        shifted = dict(zip(shifted_uniq.tolist(), shifted_counts.tolist()))
        for c, s in zip(uniq.tolist(), sums):
            d = den.get(c, 0)
            if d == 0:
                excluded += shifted.get(c, 0) / n
                continue
            ratio = abs(s) * n / d
            ratios[_decode(int(c), ell, alpha)] = float(ratio)
            if ratio <= eps:
                good += d / n
        good_masses.append(good)
    return ConditionalCancellation(scheme.lengths, tuple(good_masses), ratios,
                                   float(excluded), float(eps))


@dataclass
class KMixingScan:
    """Worst-case cancellation as a function of the shift, with the
    monotone envelope max over shifts >= M."""

    ell: int
    rows: tuple  # (m, sup, witness_size)
    envelope: tuple  # (M, max over m >= M)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("m,sup,witness_size\n")
        for m, sup, w in self.rows:
            buf.write(f"{m},{sup!r},{w}\n")
        return buf.getvalue()

    def to_json_dict(self) -> dict:
        return {
            "ell": self.ell,
            "rows": [[m, s, w] for m, s, w in self.rows],
            "envelope": [[m, s] for m, s in self.envelope],
        }


def kmixing_scan(u: SequenceSample, scheme: AveragingScheme, ell: int, m_grid,
                 workers: int = 1) -> KMixingScan:
    """Scan worst_case_cancellation across shifts (values at the largest
    cutoff)."""
    m_grid = sorted(int(m) for m in m_grid)

    def one(m):
        report, witness = worst_case_cancellation(u, scheme, m, ell)
        return m, float(report.tail.real), len(witness)

    rows = tuple(parallel_map(one, m_grid, workers=workers))
    sups = [r[1] for r in rows]
    envelope = tuple(
        (m_grid[i], max(sups[i:])) for i in range(len(m_grid))
    )
    return KMixingScan(ell, rows, envelope)
