"""Constructive positive-correlation coupling of a finite-state stationary
Markov chain with an i.i.d. target process, plus its exact closed-form
correlation and simulation diagnostics.

The construction follows the two-step quantile picture: conditioned on the
previous state, the unit interval splits into sub-intervals I_j of lengths
given by the transition row; landing uniformly inside the interval of the
realized state turns the chain into an i.i.d. uniform sequence U, and the
target process reads Y off U through the quantile partition J_k of the
target distribution. Monotonicity of the interval order in the state makes
E[X Y] strictly positive whenever some realized row is non-Dirac.

Rational inputs (ints or Fractions) keep every interval endpoint exact, so
exact_correlation returns a Fraction in that case.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ValidationError


def _is_rational(x) -> bool:
    return isinstance(x, (int, Fraction)) or (
        isinstance(x, str) and "/" in x
    )


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    return Fraction(x).limit_denominator(10**12)


@dataclass
class MarkovModel:
    """Strictly increasing real states, a row-stochastic transition matrix,
    and the stationary distribution (computed when omitted)."""

    states: tuple
    transition: tuple
    stationary: tuple | None = None

    def __post_init__(self):
        states = tuple(self.states)
        if len(states) < 1:
            raise ValidationError("need at least one state")
        if any(float(b) <= float(a) for a, b in zip(states, states[1:])):
            raise ValidationError("states must be strictly increasing")
        rows = tuple(tuple(row) for row in self.transition)
        r = len(states)
        if len(rows) != r or any(len(row) != r for row in rows):
            raise ValidationError(f"transition matrix must be {r}x{r}")
        for i, row in enumerate(rows):
            if any(float(p) < 0 for p in row):
                raise ValidationError(f"row {i} has a negative probability")
            if abs(float(sum(Fraction(p) if _is_rational(p) else Fraction(float(p)) for p in row)) - 1.0) > 1e-12:
                raise ValidationError(f"row {i} does not sum to 1")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "transition", rows)
        if self.stationary is None:
            object.__setattr__(self, "stationary", self._solve_stationary())
        pi = tuple(self.stationary)
        if len(pi) != r or abs(float(sum(float(p) for p in pi)) - 1.0) > 1e-10:
            raise ValidationError("stationary distribution must sum to 1")
        pi_p = np.array([float(p) for p in pi]) @ self.float_transition()
        if np.max(np.abs(pi_p - np.array([float(p) for p in pi]))) > 1e-10:
            raise ValidationError("pi P = pi fails beyond 1e-10")
        object.__setattr__(self, "stationary", pi)

    @property
    def rational(self) -> bool:
        return all(
            _is_rational(x)
            for row in self.transition for x in row
        ) and all(_is_rational(p) for p in self.stationary)

    def _solve_stationary(self):
        rows = self.transition
        r = len(self.states)
        if r == 1:
            return (Fraction(1),) if _is_rational(rows[0][0]) else (1.0,)
        if all(_is_rational(x) for row in rows for x in row):
            return _stationary_exact([[_as_fraction(x) for x in row] for row in rows])
        p = np.array([[float(x) for x in row] for row in rows])
        a = np.vstack([p.T - np.eye(r), np.ones(r)])
        b = np.concatenate([np.zeros(r), [1.0]])
        pi, *_ = np.linalg.lstsq(a, b, rcond=None)
        return tuple(float(x) for x in pi)

    def float_transition(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.transition])

    def float_states(self) -> np.ndarray:
        return np.array([float(x) for x in self.states])

    def float_stationary(self) -> np.ndarray:
        return np.array([float(x) for x in self.stationary])

    @property
    def all_rows_dirac(self) -> bool:
        return all(any(float(p) == 1.0 for p in row) for row in self.transition)


def _stationary_exact(p):
    """Exact nullspace of (P^T - I) with sum-1 normalization."""
    r = len(p)
    a = [[p[j][i] - (1 if i == j else 0) for j in range(r)] + [Fraction(0)] for i in range(r)]
    a.append([Fraction(1)] * r + [Fraction(1)])
    # Gaussian elimination on the (r+1) x r augmented system
    rank_rows = []
    used = [False] * len(a)
    for col in range(r):
        piv = None
        for i, row in enumerate(a):
            if not used[i] and row[col] != 0:
                piv = i
                break
        if piv is None:
            raise ValidationError("transition matrix has no unique stationary law")
        used[piv] = True
        rank_rows.append(piv)
        fac = a[piv][col]
        a[piv] = [x / fac for x in a[piv]]
        for i, row in enumerate(a):
            if i != piv and row[col] != 0:
                f = row[col]
                a[i] = [x - f * y for x, y in zip(row, a[piv])]
    sol = [Fraction(0)] * r
    for col, i in enumerate(rank_rows):
        sol[col] = a[i][r]
    return tuple(sol)


@dataclass
class TargetDist:
    """Finite output distribution: strictly increasing values y_k with
    positive probabilities beta_k; centered values have mean exactly 0."""

    values: tuple
    probs: tuple

    def __post_init__(self):
        values = tuple(self.values)
        probs = tuple(self.probs)
        if len(values) < 2:
            raise ValidationError("target distribution must be non-trivial (s >= 2)")
        if len(values) != len(probs):
            raise ValidationError("values and probabilities must align")
        if any(float(b) <= float(a) for a, b in zip(values, values[1:])):
            raise ValidationError("values must be strictly increasing")
        if any(float(p) <= 0 for p in probs):
            raise ValidationError("probabilities must be strictly positive")
        if abs(float(sum(float(p) for p in probs)) - 1.0) > 1e-12:
            raise ValidationError("probabilities must sum to 1")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", probs)

    @property
    def rational(self) -> bool:
        return all(_is_rational(x) for x in self.values) and all(
            _is_rational(p) for p in self.probs
        )

    def centered_values(self):
        if self.rational:
            vals = [_as_fraction(v) for v in self.values]
            probs = [_as_fraction(p) for p in self.probs]
            mean = sum(p * v for p, v in zip(probs, vals))
            return tuple(v - mean for v in vals)
        vals = np.array([float(v) for v in self.values])
        probs = np.array([float(p) for p in self.probs])
        return tuple(vals - float(np.dot(probs, vals)))

    def quantile_edges(self):
        """Cumulative edges 0 = c_0 < c_1 < ... < c_s = 1 of the J_k."""
        if self.rational:
            edges = [Fraction(0)]
            for p in self.probs:
                edges.append(edges[-1] + _as_fraction(p))
            return edges
        edges = np.concatenate([[0.0], np.cumsum([float(p) for p in self.probs])])
        edges[-1] = 1.0
        return list(edges)


@dataclass
class CouplingPaths:
    """Simulated aligned paths; states[t] is the chain at time t+1 and
    prev_states[t] the conditioning state (an extra stationary warm-up step
    gives t=1 a real predecessor)."""

    x: np.ndarray
    y: np.ndarray
    u: np.ndarray
    v: np.ndarray
    states: np.ndarray
    prev_states: np.ndarray
    zero_entropy_boundary: bool
    seed: object


def simulate_coupling(model: MarkovModel, beta: TargetDist, n: int, seed) -> CouplingPaths:
    """Run the two-step construction for n steps from a stationary start."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    p = model.float_transition()
    states = model.float_states()
    pi = model.float_stationary()
    r = len(states)
    rng = np.random.default_rng(seed)

    cum_rows = np.cumsum(p, axis=1)
    cum_rows[:, -1] = 1.0
    draws = rng.random(n + 1)
    v = rng.random(n)

    idx = np.empty(n + 1, dtype=np.int64)
    idx[0] = int(np.searchsorted(np.cumsum(pi), draws[0], side="right"))
    if r == 1:
        idx[1:] = 0
    else:
        rows = cum_rows  # local alias; the loop is the only sequential part
        cur = idx[0]
        for t in range(1, n + 1):
            cur = int(np.searchsorted(rows[cur], draws[t], side="right"))
            idx[t] = cur
    prev, cur = idx[:-1], idx[1:]

    excl = np.concatenate([np.zeros((r, 1)), np.cumsum(p, axis=1)[:, :-1]], axis=1)
    u = excl[prev, cur] + v * p[prev, cur]

    edges = np.array([float(e) for e in beta.quantile_edges()])
    centered = np.array([float(c) for c in beta.centered_values()])
    k = np.clip(np.searchsorted(edges, u, side="right") - 1, 0, len(centered) - 1)
    y = centered[k]

    return CouplingPaths(
        x=states[cur], y=y, u=u, v=v, states=cur, prev_states=prev,
        zero_entropy_boundary=bool(r == 1 or model.all_rows_dirac), seed=seed,
    )


def _interval_mean(lo, hi, edges, centered):
    """E[Y | U in [lo, hi)] * (hi - lo): sum of centered values weighted by
    overlap lengths with the quantile cells."""
    total = lo * 0  # keeps Fraction arithmetic when inputs are Fractions
    for k, y in enumerate(centered):
        a, b = edges[k], edges[k + 1]
        ov = min(hi, b) - max(lo, a)
        if ov > 0:
            total += y * ov
    return total


def exact_correlation(model: MarkovModel, beta: TargetDist):
    """Closed-form E[X_0 Y_0] (E[Y] = 0 after centering).

    Sums pi_i P_ij x_j E[Y | U in I_j^(i)] over the row intervals I_j^(i);
    exact Fractions when the model and target are rational. Strictly
    positive whenever some row with positive stationary mass is non-Dirac,
    zero when every row is Dirac.
    """
    exact = model.rational and beta.rational
    if exact:
        p = [[_as_fraction(x) for x in row] for row in model.transition]
        pi = [_as_fraction(x) for x in model.stationary]
        xs = [_as_fraction(x) for x in model.states]
        edges = beta.quantile_edges()
        centered = beta.centered_values()
        zero = Fraction(0)
    else:
        p = [[float(x) for x in row] for row in model.transition]
        pi = [float(x) for x in model.stationary]
        xs = [float(x) for x in model.states]
        edges = [float(e) for e in beta.quantile_edges()]
        centered = [float(c) for c in beta.centered_values()]
        zero = 0.0
    total = zero
    for i, row in enumerate(p):
        lo = zero
        for j, pij in enumerate(row):
            if pij == 0:
                continue
            hi = lo + pij
            total += pi[i] * xs[j] * _interval_mean(lo, hi, edges, centered)
            lo = hi
    return total


def row_conditional_means(model: MarkovModel, beta: TargetDist, i: int):
    """P_ij-weighted conditional means E[Y | I_j^(i)] * |I_j| for row i;
    they telescope to E[Y] = 0."""
    row = [float(x) for x in model.transition[i]]
    edges = [float(e) for e in beta.quantile_edges()]
    centered = [float(c) for c in beta.centered_values()]
    out, lo = [], 0.0
    for pij in row:
        hi = lo + pij
        out.append(_interval_mean(lo, hi, edges, centered))
        lo = hi
    return out


@dataclass
class CouplingDiagnostics:
    ks_uniform: float
    tv_marginal: float
    autocorr_u: tuple
    autocorr_y: tuple
    exy: float
    exy_stderr: float
    ex: float
    ey: float
    n: int

    def to_json_dict(self) -> dict:
        return {
            "ks_uniform": self.ks_uniform,
            "tv_marginal": self.tv_marginal,
            "autocorr_u": list(self.autocorr_u),
            "autocorr_y": list(self.autocorr_y),
            "exy": self.exy, "exy_stderr": self.exy_stderr,
            "ex": self.ex, "ey": self.ey, "n": self.n,
        }


def _sample_autocorr(x: np.ndarray, max_lag: int) -> tuple:
    x = x - x.mean()
    denom = float(np.dot(x, x))
    if denom == 0.0:
        return tuple(0.0 for _ in range(max_lag))
    return tuple(
        float(np.dot(x[:-h], x[h:]) / denom) for h in range(1, max_lag + 1)
    )


def coupling_diagnostics(paths: CouplingPaths, beta: TargetDist,
                         max_lag: int = 20) -> CouplingDiagnostics:
    """Kolmogorov-Smirnov distance of U from uniform, total-variation
    distance of Y's marginal from beta, short-lag autocorrelations, and the
    empirical E[XY] with its standard error."""
    n = len(paths.u)
    su = np.sort(paths.u)
    grid = np.arange(1, n + 1) / n
    ks = float(np.max(np.maximum(np.abs(grid - su), np.abs(grid - 1.0 / n - su))))

    centered = np.array([float(c) for c in beta.centered_values()])
    probs = np.array([float(p) for p in beta.probs])
    freq = np.array([np.mean(np.abs(paths.y - c) < 1e-12) for c in centered])
    tv = float(0.5 * np.sum(np.abs(freq - probs)))

    prod = paths.x * paths.y
    exy = float(prod.mean())
    stderr = float(prod.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return CouplingDiagnostics(
        ks_uniform=ks, tv_marginal=tv,
        autocorr_u=_sample_autocorr(paths.u, max_lag),
        autocorr_y=_sample_autocorr(paths.y, max_lag),
        exy=exy, exy_stderr=stderr,
        ex=float(paths.x.mean()), ey=float(paths.y.mean()), n=n,
    )


def quantile_map(model: MarkovModel, beta: TargetDist, row_index: int,
                 state_index: int, v: float) -> float:
    """Y as a function of (conditioning row, realized state, V): the
    monotone-coupling surface asserted in the tests."""
    p = model.float_transition()[row_index]
    lo = float(np.sum(p[:state_index]))
    u = lo + v * p[state_index]
    edges = np.array([float(e) for e in beta.quantile_edges()])
    centered = [float(c) for c in beta.centered_values()]
    k = int(np.clip(np.searchsorted(edges, u, side="right") - 1, 0, len(centered) - 1))
    return centered[k]
