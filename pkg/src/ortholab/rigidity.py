"""Sampler and verifier for the Cantor measure that is rigid along (q_n) in
measure but not almost everywhere.

Each level n refines the current admissible interval: one of its two
designated children (the two leftmost level-n grid cells fully contained in
it) is picked with equal probability, then with probability 1 - p_n the
point is confined to the leading fractional region [0, p_n] of that cell
(where e^{2 pi i q_n x} sits near 1) and with probability p_n to the middle
region [1/4, 3/4] (where it does not). Interval endpoints stay exact
rationals throughout, so arbitrarily deep levels only grow the integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ValidationError

DEFAULT_MAX_DEPTH = 20


@dataclass(frozen=True)
class CantorMeasureSpec:
    """Grid refinements (q_n) and branch masses (p_n); q must grow by at
    least ceil(4/p_n) per level so every constrained region keeps two full
    children."""

    q: tuple[int, ...]
    p: tuple
    child_rule: str = "leftmost-pair"

    def __post_init__(self):
        q = tuple(int(x) for x in self.q)
        p = tuple(Fraction(x) if isinstance(x, (int, str, Fraction)) else Fraction(x).limit_denominator(10**9) for x in self.p)
        if len(q) != len(p) or not q:
            raise ValidationError("q and p must be nonempty and aligned")
        if self.child_rule != "leftmost-pair":
            raise ValidationError(f"unknown child rule {self.child_rule!r}")
        for n, (pn) in enumerate(p, start=1):
            if not 0 < pn < 1:
                raise ValidationError(f"level {n}: p must lie in (0, 1), got {pn}")
        for n in range(1, len(p)):
            if p[n] > p[n - 1]:
                raise ValidationError(f"level {n + 1}: p must be non-increasing")
        if q[0] < 2:
            raise ValidationError("level 1: q_1 must be at least 2 (two children of [0,1))")
        for n in range(1, len(q)):
            need = math.ceil(Fraction(4) / p[n - 1]) * q[n - 1]
            if q[n] < need:
                raise ValidationError(
                    f"level {n + 1}: q={q[n]} violates the growth condition "
                    f"q >= ceil(4/p_{n}) * q_{n} = {need}"
                )
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def max_depth(self) -> int:
        return len(self.q)

    def no_visit_probability(self, depth: int) -> Fraction:
        """Closed form: prod_{n<=depth} (1 - p_n)."""
        out = Fraction(1)
        for pn in self.p[:depth]:
            out *= 1 - pn
        return out

    def expected_visits(self, depth: int) -> Fraction:
        return sum((pn for pn in self.p[:depth]), Fraction(0))


@dataclass
class CantorSamples:
    points: np.ndarray
    a_mask: np.ndarray
    depth: int
    interval_lo: list
    interval_hi: list

    def a_branch_frequency(self, level: int) -> float:
        """Fraction of samples that took the A branch at the given level."""
        bit = 1 << (level - 1)
        return float(np.mean((self.a_mask & bit) > 0))

    def no_visit_fraction(self, depth: int | None = None) -> float:
        d = self.depth if depth is None else depth
        mask = (1 << d) - 1
        return float(np.mean((self.a_mask & mask) == 0))


def sample_cantor(spec: CantorMeasureSpec, depth: int, count: int, seed) -> CantorSamples:
    """Draw points of the level-`depth` approximation; each point is the
    midpoint of its admissible interval and carries the bitmask of levels
    at which the A branch was taken (bit n-1 for level n)."""
    if depth < 0 or depth > spec.max_depth:
        raise ValidationError(f"depth must lie in 0..{spec.max_depth}")
    if depth > 62:
        raise ValidationError("bitmask limited to 62 levels")
    if count < 1:
        raise ValidationError("count must be >= 1")
    rng = np.random.default_rng(seed)
    child_bits = rng.integers(0, 2, size=(count, depth)) if depth else np.zeros((count, 0), int)
    branch_draws = rng.random((count, depth)) if depth else np.zeros((count, 0))
    p_floats = [float(pn) for pn in spec.p[:depth]]

    points = np.empty(count)
    masks = np.zeros(count, dtype=np.int64)
    los, his = [], []
    for s in range(count):
        lo_num, hi_num, den = 0, 1, 1  # interval [lo_num/den, hi_num/den)
        mask = 0
        for lvl in range(depth):
            qn = spec.q[lvl]
            pn = spec.p[lvl]
            # leftmost level grid cell [j/qn, (j+1)/qn) fully inside
            j = -((-lo_num * qn) // den)  # ceil(lo * qn)
            j += int(child_bits[s, lvl])
            if (j + 1) * den > hi_num * qn:
                raise ValidationError(
                    f"level {lvl + 1}: admissible interval lost its two children "
                    "(growth condition too weak for these parameters)"
                )
            if branch_draws[s, lvl] < p_floats[lvl]:
                # A branch: middle region [1/4, 3/4] of the cell
                mask |= 1 << lvl
                lo_num, hi_num, den = 4 * j + 1, 4 * j + 3, 4 * qn
            else:
                # B branch: leading region [0, p_n] of the cell
                lo_num, hi_num, den = (
                    j * pn.denominator,
                    j * pn.denominator + pn.numerator,
                    qn * pn.denominator,
                )
            g = math.gcd(math.gcd(lo_num, hi_num), den)
            if g > 1:
                lo_num, hi_num, den = lo_num // g, hi_num // g, den // g
        lo = Fraction(lo_num, den)
        hi = Fraction(hi_num, den)
        points[s] = float((lo + hi) / 2)
        masks[s] = mask
        los.append(lo)
        his.append(hi)
    return CantorSamples(points, masks, depth, los, his)


@dataclass
class CharacterEstimate:
    level: int
    q: int
    estimate: complex
    stderr: float
    count: int

    def to_json_dict(self) -> dict:
        return {
            "level": self.level, "q": self.q,
            "estimate": [self.estimate.real, self.estimate.imag],
            "stderr": self.stderr, "count": self.count,
        }


def estimate_character(spec: CantorMeasureSpec, level: int, count: int, seed,
                       depth: int | None = None) -> CharacterEstimate:
    """Monte Carlo estimate of the integral of e^{2 pi i q_level x} against
    the sampled measure (level 0: no constraint has been applied yet)."""
    if level < 0 or level > spec.max_depth:
        raise ValidationError(f"level must lie in 0..{spec.max_depth}")
    q = spec.q[max(level, 1) - 1]
    d = level if depth is None else depth
    if d < level:
        raise ValidationError("sampling depth must be >= the character level")
    samples = sample_cantor(spec, d, count, seed)
    # exact fractional parts of q*x keep the character honest at deep levels
    fracs = np.array(
        [float((q * (lo + hi) / 2) % 1) for lo, hi in zip(samples.interval_lo, samples.interval_hi)]
    )
    z = np.exp(2j * np.pi * fracs)
    est = complex(z.mean())
    if count > 1:
        stderr = float(np.sqrt(np.sum(np.abs(z - est) ** 2) / (count * (count - 1))))
    else:
        stderr = 0.0
    return CharacterEstimate(level, int(q), est, stderr, count)


def arc_lower_bound(spec: CantorMeasureSpec, level: int) -> float:
    """Deterministic lower bound for Re of the level-n character: B-branch
    points contribute at least cos(2 pi p_n), A-branch points at least -1."""
    pn = float(spec.p[level - 1])
    return (1 - pn) * math.cos(2 * math.pi * min(pn, 0.5)) - pn


def rigidity_report(spec: CantorMeasureSpec, depth: int, count: int, seed) -> dict:
    """Per-level character estimates, A-branch frequencies and the no-visit
    curve, next to their closed forms."""
    samples = sample_cantor(spec, depth, count, seed)
    levels = []
    for lvl in range(1, depth + 1):
        est = estimate_character(spec, lvl, count, seed)
        levels.append(
            {
                "level": lvl,
                "q": spec.q[lvl - 1],
                "p": float(spec.p[lvl - 1]),
                "character": est.to_json_dict(),
                "arc_lower_bound": arc_lower_bound(spec, lvl),
                "a_branch_frequency": samples.a_branch_frequency(lvl),
            }
        )
    no_visit = [
        {
            "depth": d,
            "empirical": samples.no_visit_fraction(d),
            "closed_form": float(spec.no_visit_probability(d)),
        }
        for d in range(1, depth + 1)
    ]
    return {
        "depth": depth, "count": count,
        "levels": levels, "no_visit": no_visit,
        "expected_visits": float(spec.expected_visits(depth)),
    }
