"""Continuous-time branching approximation of the exploration ball.

Each live individual dies after an Exp(1) lifetime and leaves ``D_hat``
children drawn from the size-biased law, so the population after ``i``
splits is ``Sigma_i = D + sum_{j<=i} (D_hat_j - 1)`` and split ``i`` happens at
``T_i = sum_{j<i} E_j / Sigma_j``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from fpplab.degrees import DegreeDistribution, SizeBiasedDistribution, size_biased
from fpplab.errors import DegenerateDistributionError, OutOfScopeError

MAX_POPULATION = 10**7
KEEP_LIMIT = 10**5
CHUNK = 1 << 16


@dataclass(frozen=True, eq=False)
class BranchingTrace:
    """One run of the split-time recursion.

    ``T`` and ``Sigma`` have entries for ``i = 0..splits`` (``T[0] = 0``,
    ``Sigma[0] = D``); ``E[j]`` and ``offspring[j-1]`` drive step ``j``. The
    arrays are dropped (None) for runs longer than the keep limit, leaving
    only the final values.
    """

    root_degree: int
    splits: int
    T_last: float
    Sigma_last: int
    T: np.ndarray | None = None
    Sigma: np.ndarray | None = None
    E: np.ndarray | None = None
    offspring: np.ndarray | None = None

    def to_csv(self) -> str:
        if self.T is None:
            raise ValueError("per-step arrays were not kept for this trace")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["i", "T_i", "Sigma_i"])
        for i, (t, s) in enumerate(zip(self.T.tolist(), self.Sigma.tolist())):
            w.writerow([i, f"{t:.17g}", s])
        return buf.getvalue()


def _sampler(dist):
    support = dist.support
    cdf = np.cumsum(dist.probs)
    cdf[-1] = 1.0

    def draw(rng: np.random.Generator, k: int) -> np.ndarray:
        return support[np.searchsorted(cdf, rng.random(k), side="right")]
    return draw


def _check(p: DegreeDistribution, q: SizeBiasedDistribution | None) -> SizeBiasedDistribution:
    if p.support_min < 3:
        raise OutOfScopeError(f"minimum degree {p.support_min} < 3")
    q = size_biased(p) if q is None else q
    if not q.nu > 1:
        raise DegenerateDistributionError(f"nu = {q.nu} <= 1")
    return q


def _run(p, q, seed, target_pop=None, until=None, keep=True):
    """Advance the recursion in chunks until the population reaches ``target_pop``
    or the next split would fall after time ``until``."""
    rng = np.random.default_rng(seed)
    draw_d = _sampler(p)
    draw_q = _sampler(q)
    D = int(draw_d(rng, 1)[0])
    # separate streams keep the draws independent of how the run is chunked
    off_rng, exp_rng = rng.spawn(2)
    sigma, t, splits = D, 0.0, 0
    Ts, Ss, Es, Os = [np.zeros(1)], [np.array([D])], [], []
    while True:
        if target_pop is not None:
            if sigma >= target_pop:
                break
            # population grows by at least one per split
            k = min(CHUNK, target_pop - sigma)
        else:
            k = CHUNK
        off = draw_q(off_rng, k)
        e = exp_rng.standard_exponential(k)
        S = sigma + np.cumsum(off - 1)
        prev = np.concatenate(([sigma], S[:-1]))
        T = t + np.cumsum(e / prev)
        stop = k
        if target_pop is not None:
            hit = np.flatnonzero(S >= target_pop)
            if hit.size:
                stop = int(hit[0]) + 1
        if until is not None:
            late = np.flatnonzero(T > until)
            if late.size:
                stop = min(stop, int(late[0]))
        if stop:
            sigma, t = int(S[stop - 1]), float(T[stop - 1])
            splits += stop
            if keep:
                Ts.append(T[:stop])
                Ss.append(S[:stop])
                Es.append(e[:stop])
                Os.append(off[:stop])
        if stop < k:
            break
        if until is not None and sigma > MAX_POPULATION:
            raise ValueError(f"population exceeded {MAX_POPULATION} before time {until}")
        if keep and splits > KEEP_LIMIT:
            keep = False
            Ts = Ss = Es = Os = None
    if not keep:
        return BranchingTrace(D, splits, t, sigma)
    return BranchingTrace(
        D, splits, t, sigma,
        T=np.concatenate(Ts), Sigma=np.concatenate(Ss).astype(np.int64),
        E=np.concatenate(Es) if Es else np.zeros(0),
        offspring=np.concatenate(Os).astype(np.int64) if Os else np.zeros(0, dtype=np.int64),
    )


def simulate_branching(p: DegreeDistribution, q: SizeBiasedDistribution | None = None,
                       target_pop: int = 10**6, seed=None, keep: bool = True) -> BranchingTrace:
    """Run splits until the population reaches ``target_pop``.

    ``q`` defaults to the size-biased law of ``p``. Per-step arrays are kept
    only while the run stays below 10^5 splits.
    """
    q = _check(p, q)
    if not 1 <= target_pop <= MAX_POPULATION:
        raise ValueError(f"target_pop must lie in 1..{MAX_POPULATION}")
    return _run(p, q, seed, target_pop=int(target_pop), keep=keep)


def population_at_time(trace: BranchingTrace, t: float) -> int:
    """Sigma_i for the largest ``i`` with ``T_i <= t``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if trace.T is None:
        raise ValueError("per-step arrays were not kept for this trace")
    if t >= trace.T_last:
        return int(trace.Sigma_last)
    i = int(np.searchsorted(trace.T, t, side="right")) - 1
    return int(trace.Sigma[i])


def simulate_population(p: DegreeDistribution, t: float, seed=None,
                        q: SizeBiasedDistribution | None = None) -> int:
    """Population alive at time ``t``, streaming the recursion without storing it."""
    q = _check(p, q)
    if t < 0:
        raise ValueError("t must be nonnegative")
    return _run(p, q, seed, until=float(t), keep=False).Sigma_last


def growth_rate_estimate(populations, t: float) -> float:
    return float(np.mean(np.log(populations))) / t if t > 0 else math.nan
