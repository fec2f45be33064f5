"""Generation, transformation and persistence of bounded arithmetic-function
samples.

A sample is a finite window u(1..N) of complex values with a declared modulus
bound, optionally carrying a finite alphabet. Number-theoretic generators
(Mobius, Liouville) use a vectorized multiplicative sieve: primes up to
sqrt(N) are applied with slice updates while a running product of the
detected prime part tells which entries still hide one prime factor larger
than sqrt(N). Above SEGMENT_THRESHOLD the same update runs per segment so
memory stays bounded.
"""

from __future__ import annotations

import csv
import io
import math
import os
import struct
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import BoundsError, ParseError, ResourceLimitError, ValidationError

DEFAULT_MAX_N = 2**31
SEGMENT_THRESHOLD = 2**26
SEGMENT_SIZE = 2**24

BINARY_MAGIC = b"OLAB1SEQ"
CSV_HEADER = ("n", "re", "im")


def max_n_budget() -> int:
    env = os.environ.get("ORTHOLAB_MAX_N")
    return int(env) if env else DEFAULT_MAX_N


@dataclass
class SequenceSample:
    """Finite window u(1..N); values[k] holds u(k+1).

    bound is the declared L with |u(n)| <= L everywhere; alphabet, when
    present, is the exhaustive list of values the sample takes.
    """

    values: np.ndarray
    bound: float
    alphabet: list[complex] | None = None
    label: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.ndim != 1 or len(self.values) < 1:
            raise ValidationError("a sample needs at least one value")
        if self.bound <= 0:
            raise ValidationError("bound must be positive")
        top = float(np.max(np.abs(self.values)))
        if top > self.bound * (1 + 1e-12) + 1e-12:
            raise ValidationError(
                f"value of modulus {top:.6g} exceeds declared bound {self.bound:.6g}"
            )
        if self.alphabet is not None:
            self.alphabet = [complex(a) for a in self.alphabet]
            if len(set(self.alphabet)) != len(self.alphabet):
                raise ValidationError("alphabet entries must be distinct")
            dist = np.min(
                np.abs(self.values[:, None] - np.array(self.alphabet)[None, :]), axis=1
            )
            if float(dist.max()) > 1e-12:
                k = int(np.argmax(dist))
                raise ValidationError(
                    f"value {self.values[k]} at n={k + 1} is not in the alphabet"
                )

    def __len__(self) -> int:
        return len(self.values)

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.values.imag == 0.0))

    @property
    def is_finite_alphabet(self) -> bool:
        return self.alphabet is not None


def _check_budget(n: int):
    budget = max_n_budget()
    if n < 1:
        raise ValidationError("N must be >= 1")
    if n > budget:
        raise ResourceLimitError(
            f"N={n} exceeds the memory budget of {budget} (ORTHOLAB_MAX_N)"
        )


def _primes_upto(n: int) -> np.ndarray:
    if n < 2:
        return np.empty(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def _mobius_segment(lo: int, hi: int, primes: np.ndarray) -> np.ndarray:
    """mu(lo..hi-1); primes must cover sqrt(hi-1)."""
    m = hi - lo
    mu = np.ones(m, dtype=np.int8)
    prod = np.ones(m, dtype=np.int64)
    for p in primes:
        p = int(p)
        start = (-lo) % p
        mu[start::p] *= -1
        prod[start::p] *= p
        p2 = p * p
        if p2 < hi:
            mu[(-lo) % p2 :: p2] = 0
    rem = prod != np.arange(lo, hi, dtype=np.int64)
    mu[rem] *= -1
    return mu


def _liouville_segment(lo: int, hi: int, primes: np.ndarray) -> np.ndarray:
    """lambda(lo..hi-1) = (-1)^Omega; prime powers flip once per power level."""
    m = hi - lo
    lam = np.ones(m, dtype=np.int8)
    prod = np.ones(m, dtype=np.int64)
    for p in primes:
        p = int(p)
        pk = p
        while pk < hi:
            start = (-lo) % pk
            lam[start::pk] *= -1
            prod[start::pk] *= p
            pk *= p
    rem = prod != np.arange(lo, hi, dtype=np.int64)
    lam[rem] *= -1
    return lam


def _sieve(n: int, segment_fn, segment_size=SEGMENT_SIZE) -> np.ndarray:
    primes = _primes_upto(math.isqrt(n))
    if n <= SEGMENT_THRESHOLD:
        return segment_fn(1, n + 1, primes)
    parts = []
    for lo in range(1, n + 1, segment_size):
        parts.append(segment_fn(lo, min(lo + segment_size, n + 1), primes))
    return np.concatenate(parts)


def mobius(n: int) -> SequenceSample:
    """Mobius function on 1..N."""
    _check_budget(n)
    mu = _sieve(n, _mobius_segment)
    return SequenceSample(mu.astype(np.complex128), 1.0, [-1, 0, 1], label=f"mobius:{n}")


def liouville(n: int) -> SequenceSample:
    """Liouville function on 1..N: completely multiplicative, lambda(p) = -1."""
    _check_budget(n)
    lam = _sieve(n, _liouville_segment)
    return SequenceSample(lam.astype(np.complex128), 1.0, [-1, 1], label=f"liouville:{n}")


def constant(n: int, value=1.0) -> SequenceSample:
    _check_budget(n)
    v = np.full(n, complex(value))
    return SequenceSample(v, max(abs(complex(value)), 1e-30), [complex(value)], label=f"constant:{n}")


def parity(n: int) -> SequenceSample:
    """(-1)^n on 1..N."""
    _check_budget(n)
    v = np.where(np.arange(1, n + 1) % 2 == 0, 1.0, -1.0).astype(np.complex128)
    return SequenceSample(v, 1.0, [-1, 1], label=f"parity:{n}")


def iid_signs(n: int, seed) -> SequenceSample:
    """Seeded i.i.d. +-1 sample."""
    _check_budget(n)
    rng = np.random.default_rng(seed)
    v = (rng.integers(0, 2, size=n) * 2 - 1).astype(np.complex128)
    return SequenceSample(v, 1.0, [-1, 1], label=f"iid:{n}:{seed}")


def _jacobi(a: int, q: int) -> int:
    """Jacobi symbol (a|q) for odd positive q."""
    if q <= 0 or q % 2 == 0:
        raise ValidationError("Jacobi symbol needs an odd positive modulus")
    a %= q
    sign = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if q % 8 in (3, 5):
                sign = -sign
        a, q = q, a
        if a % 4 == 3 and q % 4 == 3:
            sign = -sign
        a %= q
    return sign if q == 1 else 0


def _primitive_root(q: int) -> int:
    order = q - 1
    fac = []
    t, d = order, 2
    while d * d <= t:
        if t % d == 0:
            fac.append(d)
            while t % d == 0:
                t //= d
        d += 1
    if t > 1:
        fac.append(t)
    for g in range(2, q):
        if all(pow(g, order // f, q) != 1 for f in fac):
            return g
    raise ValidationError(f"{q} has no primitive root; is it prime?")


def _character_table(q: int, chi) -> np.ndarray:
    """Values chi(0..q-1) as complex128. chi is 'principal', 'jacobi', an
    integer character index (prime q, via a discrete-log table), or an
    explicit completely multiplicative table of length q."""
    if isinstance(chi, str):
        if chi == "principal":
            return np.array(
                [1.0 if math.gcd(r, q) == 1 else 0.0 for r in range(q)], dtype=np.complex128
            )
        if chi == "jacobi":
            return np.array([_jacobi(r, q) for r in range(q)], dtype=np.complex128)
        raise ValidationError(f"unknown character spec {chi!r}")
    if isinstance(chi, int):
        if q < 2:
            raise ValidationError("indexed characters need q >= 2")
        g = _primitive_root(q)
        table = np.zeros(q, dtype=np.complex128)
        e = 1
        for k in range(q - 1):
            table[e] = np.exp(2j * np.pi * (chi * k % (q - 1)) / (q - 1))
            e = e * g % q
        return table
    table = np.asarray(chi, dtype=np.complex128)
    if len(table) != q:
        raise ValidationError(f"character table must have length q={q}")
    # complete multiplicativity mod q, checked on the full multiplication table
    prod_idx = (np.arange(q)[:, None] * np.arange(q)[None, :]) % q
    lhs = table[prod_idx]
    rhs = table[:, None] * table[None, :]
    bad = np.argwhere(np.abs(lhs - rhs) > 1e-9)
    if len(bad):
        a, b = map(int, bad[0])
        raise ValidationError(
            f"table is not completely multiplicative mod {q}: "
            f"chi({a})*chi({b}) != chi({a * b % q})"
        )
    return table


def dirichlet_twist(u: SequenceSample, q: int, chi) -> SequenceSample:
    """Multiply u(n) by chi(n) for a Dirichlet character mod q."""
    if q < 1:
        raise ValidationError("modulus must be >= 1")
    table = _character_table(q, chi)
    n = len(u)
    residues = np.arange(1, n + 1) % q
    values = u.values * table[residues]
    alphabet = None
    if u.alphabet is not None:
        chivals = {complex(c) for c in table}
        alphabet = sorted(
            {a * c for a in u.alphabet for c in chivals}, key=lambda z: (z.real, z.imag)
        )
        if len(alphabet) > 4096:
            alphabet = None
    return SequenceSample(values, u.bound, alphabet, label=f"{u.label}*chi[{q}]")


def modulate(u: SequenceSample, alpha: float) -> SequenceSample:
    """u(n) -> u(n) * e^{2*pi*i*n*alpha}, alpha in [0,1)."""
    from ._util import unit_phases

    alpha = float(alpha) % 1.0
    if alpha == 0.0:
        return SequenceSample(u.values.copy(), u.bound, u.alphabet, label=u.label)
    values = u.values * unit_phases(np.arange(1, len(u) + 1), alpha)
    alphabet = None
    if u.alphabet is not None:
        frac = Fraction(alpha).limit_denominator(64)
        if abs(float(frac) - alpha) < 1e-12 and len(u.alphabet) * frac.denominator <= 256:
            b = frac.denominator
            roots = np.exp(2j * np.pi * np.arange(b) / b)
            raw = sorted(
                {complex(a) * complex(r) for a in u.alphabet for r in roots},
                key=lambda z: (round(z.real, 12), round(z.imag, 12)),
            )
            alphabet = []
            for z in raw:
                if not alphabet or abs(z - alphabet[-1]) > 1e-12:
                    alphabet.append(z)
            # snap stored values onto the alphabet so membership is exact
            arr = np.array(alphabet)
            values = arr[np.argmin(np.abs(values[:, None] - arr[None, :]), axis=1)]
    return SequenceSample(values, u.bound, alphabet, label=f"{u.label}*e({alpha})")


def save_sequence(u: SequenceSample, path, fmt: str = "bin"):
    """Persist to CSV (header n,re,im) or the OLAB1SEQ binary layout."""
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            for k, z in enumerate(u.values):
                w.writerow([k + 1, repr(float(z.real)), repr(float(z.imag))])
    elif fmt == "bin":
        with open(path, "wb") as fh:
            fh.write(BINARY_MAGIC)
            fh.write(struct.pack("<Q", len(u)))
            inter = np.empty(2 * len(u), dtype="<f8")
            inter[0::2] = u.values.real
            inter[1::2] = u.values.imag
            fh.write(inter.tobytes())
    else:
        raise ValidationError(f"unknown format {fmt!r}")


def load_sequence(path, fmt: str | None = None, bound: float | None = None,
                  label: str | None = None) -> SequenceSample:
    """Load a sample; fmt is sniffed from the file when not given.

    A declared bound is validated against the data; otherwise the observed
    max modulus is used. Binary round trips are bit exact.
    """
    if fmt is None:
        with open(path, "rb") as fh:
            fmt = "bin" if fh.read(8) == BINARY_MAGIC else "csv"
    if fmt == "bin":
        with open(path, "rb") as fh:
            magic = fh.read(8)
            if magic != BINARY_MAGIC:
                raise ParseError(f"bad magic {magic!r}, expected {BINARY_MAGIC!r}")
            (n,) = struct.unpack("<Q", fh.read(8))
            raw = fh.read(16 * n)
            if len(raw) != 16 * n:
                raise ParseError(f"truncated payload: expected {16 * n} bytes")
            inter = np.frombuffer(raw, dtype="<f8")
            values = inter[0::2] + 1j * inter[1::2]
    elif fmt == "csv":
        values = _read_csv(path)
    else:
        raise ValidationError(f"unknown format {fmt!r}")
    observed = float(np.max(np.abs(values))) if len(values) else 0.0
    if bound is not None and observed > bound * (1 + 1e-12) + 1e-12:
        raise ValidationError(
            f"data exceeds the declared bound {bound}: max modulus {observed:.6g}"
        )
    return SequenceSample(
        values, bound if bound is not None else max(observed, 1e-30),
        label=label or os.path.basename(str(path)),
    )


def _read_csv(path) -> np.ndarray:
    rows = []
    last_n = 0
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not "".join(row).strip():
                continue
            if lineno == 1 and row[0].strip().lower() == "n":
                continue  # header
            if len(row) < 3:
                raise ParseError(f"expected 3 columns, got {len(row)}", line=lineno)
            try:
                n = int(row[0])
                re, im = float(row[1]), float(row[2])
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
            if n != last_n + 1:
                raise ValidationError(
                    f"line {lineno}: indices must increase by 1 (got n={n} after {last_n})"
                )
            last_n = n
            rows.append(complex(re, im))
    if not rows:
        raise ParseError("no data rows")
    return np.array(rows, dtype=np.complex128)


def slice_sample(u: SequenceSample, n: int) -> SequenceSample:
    """First n entries, same bound/alphabet."""
    if n > len(u):
        raise BoundsError(f"cannot take {n} entries from a sample of length {len(u)}")
    return SequenceSample(u.values[:n].copy(), u.bound, u.alphabet, label=u.label)
