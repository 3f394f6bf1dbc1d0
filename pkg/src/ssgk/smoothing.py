"""Estimators for a graphlet distribution at one catalog level.

``kneser_ney`` discounts every count by ``d`` and hands the removed mass
back through a base distribution. With the base obtained by pushing the
level below through the graphlet DAG it becomes structural Kneser-Ney:
a graphlet that was never observed still receives mass in proportion to
the edge weights from its parents.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .catalog import BASE_MODES, GraphletDag, base_distribution
from .errors import EstimationError
from .vectors import CountVector, Distribution, normalize_counts

METHODS = ("mle", "laplace", "kn", "skn", "pyp")

DISCOUNT_GRID = (0.01, 0.1, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10,
                 25, 50, 100, 250, 500, 1000, 2500, 5000, 10000)


@dataclass(frozen=True)
class SmoothingConfig:
    """Which estimator to run and its knobs.

    ``d`` is the Kneser-Ney discount. The ``pyp_*`` fields configure the
    hierarchical Pitman-Yor chain (discount, strength, sweeps, burn-in,
    number of trailing sweeps averaged, lowest level with an explicit base).
    """
    method: str = "mle"
    d: float = 1.0
    base_mode: str = "parent-mle"
    renormalize: bool = True
    pyp_d: float = 0.5
    pyp_theta: float = 1.0
    sweeps: int = 100
    burn_in: int = 50
    average: int = 10
    base_level: int = 2

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if not (self.d >= 0 and np.isfinite(self.d)):
            raise ValueError(f"discount must be a finite non-negative number, got {self.d!r}")
        if self.base_mode not in BASE_MODES:
            raise ValueError(f"base_mode must be one of {BASE_MODES}, got {self.base_mode!r}")
        if not 0 <= self.pyp_d < 1:
            raise ValueError("pyp_d must lie in [0, 1)")
        if not self.pyp_theta > -self.pyp_d:
            raise ValueError("pyp_theta must exceed -pyp_d")
        if self.sweeps < 0 or self.burn_in < 0 or self.average < 1:
            raise ValueError("sweeps and burn_in must be >= 0, average >= 1")
        if self.burn_in > self.sweeps:
            raise ValueError("burn_in cannot exceed sweeps")

    def with_d(self, d: float) -> "SmoothingConfig":
        return replace(self, d=float(d))

    @property
    def needs_lower_level(self) -> bool:
        return self.method in ("skn", "pyp")


def mle(counts: CountVector) -> Distribution:
    return normalize_counts(counts)


def laplace(counts: CountVector) -> Distribution:
    """Add-one estimate; a zero vector gives the uniform distribution."""
    m = len(counts)
    return Distribution(counts.level, (counts.counts + 1.0) / (counts.total + m))


def kneser_ney_raw(counts: CountVector, base: Distribution, d: float) -> np.ndarray:
    """The unnormalised vector ``max(c_i - d, 0)/N + T d/N base_i``, ``T = #{j: c_j > d}``."""
    if base.level != counts.level or len(base) != len(counts):
        raise ValueError("base distribution must be at the level of the counts")
    if d < 0:
        raise ValueError(f"discount must be non-negative, got {d}")
    n = counts.total
    if n <= 0:
        raise EstimationError(f"level-{counts.level} counts have zero total")
    c = counts.counts.astype(np.float64)
    t = np.count_nonzero(c > d)
    return np.maximum(c - d, 0.0) / n + (t * d / n) * base.probs


def kneser_ney(counts: CountVector, base: Distribution, d: float,
               renormalize: bool = True) -> Distribution:
    """Kneser-Ney estimate over one level.

    The raw vector sums to one exactly when ``d`` is below every positive
    count; otherwise it is rescaled when ``renormalize`` is set. When no
    count exceeds ``d`` nothing is left but the base, which is returned.
    """
    p = kneser_ney_raw(counts, base, d)
    s = p.sum()
    if s == 0.0:
        return base
    if renormalize:
        p = p / s
    elif abs(s - 1.0) > 1e-9:
        raise EstimationError(
            f"unnormalised Kneser-Ney vector sums to {s:.12g} (d={d} is not below "
            "every positive count); enable renormalisation")
    return Distribution(counts.level, p)


def structural_kneser_ney(counts: CountVector, lower: CountVector | None, dag: GraphletDag,
                          config: SmoothingConfig) -> Distribution:
    """Kneser-Ney at level ``k+1`` with the DAG push-forward of level ``k`` as base."""
    if counts.level < 3:
        raise ValueError("structural Kneser-Ney needs counts at level >= 3")
    if lower is None:
        raise ValueError(f"level-{counts.level - 1} counts are required")
    if lower.level != counts.level - 1:
        raise ValueError(f"expected level-{counts.level - 1} counts, got level {lower.level}")
    base = base_distribution(lower, dag, config.base_mode)
    return kneser_ney(counts, base, config.d, config.renormalize)


def smooth(counts: CountVector, dag: GraphletDag, config: SmoothingConfig,
           lower: CountVector | None = None, seed: int = 0) -> Distribution:
    """Dispatch on ``config.method``."""
    m = config.method
    if m == "mle":
        return mle(counts)
    if m == "laplace":
        return laplace(counts)
    if m == "kn":
        # generic Kneser-Ney: uniform fallback, no structure
        uniform = Distribution(counts.level, np.full(len(counts), 1.0 / len(counts)))
        return kneser_ney(counts, uniform, config.d, config.renormalize)
    if m == "skn":
        return structural_kneser_ney(counts, lower, dag, config)
    from .pyp import pyp_smooth
    return pyp_smooth(counts, dag, config, seed=seed, lower=lower)
