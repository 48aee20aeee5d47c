"""Degree distributions, degree-sequence sampling and closed-form prefactors."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

from fpplab.errors import DegenerateDistributionError, OutOfScopeError, ParityError

PROB_TOL = 1e-12


def _clean_pmf(pmf: Mapping[int, float]) -> dict[int, float]:
    out = {}
    for r, pr in pmf.items():
        r = int(r)
        pr = float(pr)
        if r < 0:
            raise DegenerateDistributionError(f"negative degree {r}")
        if pr < 0 or not math.isfinite(pr):
            raise DegenerateDistributionError(f"bad probability {pr} for degree {r}")
        if pr > 0:
            out[r] = out.get(r, 0.0) + pr
    return dict(sorted(out.items()))


@dataclass(frozen=True)
class DegreeDistribution:
    """Probability mass function of vertex degrees.

    >>> p = DegreeDistribution({3: 0.5, 4: 0.5})
    >>> p.lam, p.support_min
    (3.5, 3)
    """

    pmf: Mapping[int, float]
    lam: float = field(init=False)
    support_min: int = field(init=False)

    def __post_init__(self):
        pmf = _clean_pmf(self.pmf)
        if not pmf:
            raise DegenerateDistributionError("empty distribution")
        total = math.fsum(pmf.values())
        if abs(total - 1.0) > PROB_TOL:
            raise DegenerateDistributionError(f"probabilities sum to {total!r}, not 1")
        lam = math.fsum(r * pr for r, pr in pmf.items())
        if not lam > 0:
            raise DegenerateDistributionError("mean degree must be positive")
        object.__setattr__(self, "pmf", pmf)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "support_min", min(pmf))

    @classmethod
    def regular(cls, r: int) -> DegreeDistribution:
        return cls({int(r): 1.0})

    @classmethod
    def from_callable(cls, f: Callable[[int], float], r_min: int = 0,
                      tail: float = 1e-15, r_max: int = 10**6) -> DegreeDistribution:
        """Tabulate an infinite-support pmf until the remaining mass drops below ``tail``.

        The truncated table is renormalised; with the default ``tail`` the change
        is far below the 1e-12 comparison tolerance.
        """
        pmf = {}
        acc = 0.0
        for r in range(r_min, r_max + 1):
            pr = float(f(r))
            if pr > 0:
                pmf[r] = pr
                acc += pr
            if acc >= 1.0 - tail:
                break
        total = math.fsum(pmf.values())
        return cls({r: pr / total for r, pr in pmf.items()})

    @property
    def flooding_valid(self) -> bool:
        return self.support_min >= 3

    @property
    def support(self) -> np.ndarray:
        return np.fromiter(self.pmf.keys(), dtype=np.int64)

    @property
    def probs(self) -> np.ndarray:
        return np.fromiter(self.pmf.values(), dtype=np.float64)

    def to_text(self) -> str:
        return "".join(f"{r} {pr!r}\n" for r, pr in self.pmf.items())


@dataclass(frozen=True)
class SizeBiasedDistribution:
    pmf: Mapping[int, float]
    nu: float

    @property
    def support(self) -> np.ndarray:
        return np.fromiter(self.pmf.keys(), dtype=np.int64)

    @property
    def probs(self) -> np.ndarray:
        return np.fromiter(self.pmf.values(), dtype=np.float64)


@dataclass(frozen=True)
class TheoreticalConstants:
    """Prefactors of ``log n``: typical distance, flooding, diameter, hop diameter."""

    typical: float
    flood: float
    diam: float
    unweighted: float


def size_biased(p: DegreeDistribution) -> SizeBiasedDistribution:
    """Offspring law q_r = (r+1) p_{r+1} / lambda and its mean nu."""
    if not p.lam > 0:
        raise DegenerateDistributionError("mean degree must be positive")
    q = {r - 1: r * pr / p.lam for r, pr in p.pmf.items() if r >= 1}
    nu = math.fsum(r * qr for r, qr in q.items())
    return SizeBiasedDistribution(q, nu)


def theoretical_constants(p: DegreeDistribution) -> TheoreticalConstants:
    if p.support_min < 3:
        raise OutOfScopeError(f"minimum degree {p.support_min} < 3")
    nu = size_biased(p).nu
    typical = 1.0 / (nu - 1.0)
    d_min = p.support_min
    return TheoreticalConstants(
        typical=typical,
        flood=typical + 1.0 / d_min,
        diam=typical + 2.0 / d_min,
        unweighted=1.0 / math.log(nu),
    )


def parse_distribution(text: str) -> DegreeDistribution:
    """Parse ``r probability`` lines or a ``regular r`` line; ``#`` starts a comment."""
    pmf: dict[int, float] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0].lower() == "regular":
            if len(parts) != 2 or pmf:
                raise ValueError(f"line {lineno}: 'regular r' must stand alone")
            return DegreeDistribution.regular(int(parts[1]))
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'r probability', got {raw!r}")
        r = int(parts[0])
        if r in pmf:
            raise ValueError(f"line {lineno}: degree {r} listed twice")
        pmf[r] = float(parts[1])
    return DegreeDistribution(pmf)


def load_distribution(path: str | Path) -> DegreeDistribution:
    return parse_distribution(Path(path).read_text())


def distribution_from_arg(arg: str) -> DegreeDistribution:
    """Accept ``regular 3``, ``3:0.5,4:0.5`` or a path to a distribution file."""
    arg = arg.strip()
    if arg.lower().startswith("regular"):
        return parse_distribution(arg)
    if ":" in arg and not Path(arg).exists():
        pmf = {}
        for item in arg.split(","):
            r, pr = item.split(":")
            pmf[int(r)] = float(pr)
        return DegreeDistribution(pmf)
    return load_distribution(arg)


@dataclass(frozen=True)
class DegreeSequence:
    degrees: np.ndarray

    def __post_init__(self):
        d = np.array(self.degrees, dtype=np.int64)
        if d.ndim != 1:
            raise ValueError("degrees must be one-dimensional")
        if d.size and d.min() < 0:
            raise ValueError("negative degree")
        if int(d.sum()) % 2:
            raise ParityError(f"total degree {int(d.sum())} is odd")
        d.setflags(write=False)
        object.__setattr__(self, "degrees", d)

    @property
    def n(self) -> int:
        return int(self.degrees.size)

    @property
    def total_degree(self) -> int:
        return int(self.degrees.sum())

    @property
    def d_min(self) -> int:
        return int(self.degrees.min())

    @property
    def delta_max(self) -> int:
        return int(self.degrees.max())

    @property
    def flooding_valid(self) -> bool:
        return self.d_min >= 3

    def counts(self) -> dict[int, int]:
        """u_r: number of vertices of each degree."""
        r, c = np.unique(self.degrees, return_counts=True)
        return dict(zip(r.tolist(), c.tolist()))


def degree_cap(n: int, support_min: int = 0) -> int:
    # ceil(n^0.4), never below the smallest supported degree
    return max(math.ceil(n ** 0.4 - 1e-12), support_min)


def sample_degree_sequence(p: DegreeDistribution, n: int, seed=None) -> DegreeSequence:
    """Draw ``n`` i.i.d. degrees from ``p``, capped at ``ceil(n**0.4)``, then fix parity.

    Values above the cap are redrawn, which is the same as inverse-CDF sampling
    from ``p`` conditioned on the capped support. If the total is odd, one
    uniformly chosen vertex gets one extra half-edge.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    rng = np.random.default_rng(seed)
    cap = degree_cap(n, p.support_min)
    support = p.support
    probs = p.probs
    keep = support <= cap
    support, probs = support[keep], probs[keep]
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    cdf[-1] = 1.0
    degrees = support[np.searchsorted(cdf, rng.random(n), side="right")]
    if int(degrees.sum()) % 2:
        degrees[rng.integers(n)] += 1
    return DegreeSequence(degrees)
