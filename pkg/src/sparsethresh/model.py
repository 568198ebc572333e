"""Hybrid sparse-signal model: fixed support on block A, random support on B.

An instance is a coefficient vector x of length N with

  - a caller-chosen support of size n_a inside block A (any strategy, or an
    explicit index list),
  - a support of size n_b drawn uniformly at random from block B,
  - nonzero values z_i = r_i * exp(i theta_i) with magnitudes r_i from a
    configurable law and phases theta_i i.i.d. uniform on [0, 2 pi),

together with the measurement y = D x.  Everything is driven by explicit
generator streams (see ``sparsethresh.rng``), so instances are reproducible
and independent of evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dictionary import PartitionedDictionary
from .rng import derive_rng

__all__ = [
    "MAGNITUDE_LAWS",
    "SUPPORT_A_STRATEGIES",
    "HybridSupportSpec",
    "CoefficientSpec",
    "SparseInstance",
    "sample_support_b",
    "choose_support_a",
    "sample_instance",
]

MAGNITUDE_LAWS = ("half-normal-modulus", "uniform", "unit")
SUPPORT_A_STRATEGIES = ("prescribed", "first-n", "spread", "random-baseline")


@dataclass(frozen=True)
class HybridSupportSpec:
    """Support sizes for one experiment: fixed A-indices plus n_b random B-columns."""

    support_a: tuple[int, ...]
    n_b: int
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "support_a", tuple(int(i) for i in self.support_a))
        if len(set(self.support_a)) != len(self.support_a):
            raise ValueError(f"support_a has duplicate indices: {self.support_a}")
        if any(i < 0 for i in self.support_a):
            raise ValueError(f"support_a has negative indices: {self.support_a}")
        if self.n_b < 0:
            raise ValueError(f"n_b must be nonnegative, got {self.n_b}")

    @property
    def n_a(self) -> int:
        return len(self.support_a)


@dataclass(frozen=True)
class CoefficientSpec:
    """Law of the nonzero values; phases are always uniform on [0, 2 pi).

    magnitude_law:
      half-normal-modulus  modulus of a standard complex Gaussian (default);
                           continuous and strictly positive a.s.
      uniform              uniform on (0, 1]; continuous
      unit                 constant 1; NOT continuous, kept for worst-case
                           style experiments only
    """

    magnitude_law: str = "half-normal-modulus"

    def __post_init__(self):
        if self.magnitude_law not in MAGNITUDE_LAWS:
            raise ValueError(
                f"unknown magnitude_law {self.magnitude_law!r}, "
                f"expected one of {MAGNITUDE_LAWS}"
            )

    def sample_magnitudes(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.magnitude_law == "half-normal-modulus":
            re = rng.standard_normal(n)
            im = rng.standard_normal(n)
            return np.hypot(re, im) / np.sqrt(2.0)
        if self.magnitude_law == "uniform":
            # 1 - U with U in [0, 1) lands in (0, 1]
            return 1.0 - rng.uniform(0.0, 1.0, size=n)
        return np.ones(n)


@dataclass(frozen=True, eq=False)
class SparseInstance:
    """One sampled coefficient vector and its measurement y = D x."""

    support: tuple[int, ...]
    values: np.ndarray
    x: np.ndarray
    y: np.ndarray

    @property
    def sparsity(self) -> int:
        return len(self.support)


# ============================================================
# support sampling
# ============================================================


def sample_support_b(n_total: int, n_pick: int, rng: np.random.Generator) -> tuple[int, ...]:
    """Uniformly random size-n_pick subset of {0..n_total-1}, sorted ascending."""
    if not 0 <= n_pick <= n_total:
        raise ValueError(f"need 0 <= n_pick <= n_total, got {n_pick} of {n_total}")
    if n_pick == 0:
        return ()
    picked = rng.choice(n_total, size=n_pick, replace=False)
    return tuple(int(i) for i in np.sort(picked))


def choose_support_a(
    strategy: str,
    n_total: int,
    n_pick: int,
    indices=None,
    rng: np.random.Generator | None = None,
    seed: int | None = None,
) -> tuple[int, ...]:
    """Pick the fixed block-A support per strategy.

    prescribed        pass ``indices`` through after validation
    first-n           {0, 1, ..., n_pick - 1}
    spread            evenly spaced, index i -> floor(i * n_total / n_pick)
    random-baseline   uniform subset from ``rng`` (or a fresh stream from
                      ``seed``); the control against the fixed strategies
    """
    if strategy not in SUPPORT_A_STRATEGIES:
        raise ValueError(
            f"unknown strategy {strategy!r}, expected one of {SUPPORT_A_STRATEGIES}"
        )
    if not 0 <= n_pick <= n_total:
        raise ValueError(f"need 0 <= n_pick <= n_total, got {n_pick} of {n_total}")
    if strategy == "prescribed":
        if indices is None:
            raise ValueError("prescribed strategy needs an explicit index list")
        chosen = tuple(int(i) for i in indices)
        if len(chosen) != n_pick:
            raise ValueError(f"expected {n_pick} indices, got {len(chosen)}")
        if len(set(chosen)) != len(chosen):
            raise ValueError(f"prescribed indices contain duplicates: {chosen}")
        if any(not 0 <= i < n_total for i in chosen):
            raise ValueError(f"prescribed indices out of range [0, {n_total}): {chosen}")
        return chosen
    if strategy == "first-n":
        return tuple(range(n_pick))
    if strategy == "spread":
        # floor(i * n_total / n_pick) is strictly increasing since n_total >= n_pick
        return tuple(i * n_total // n_pick for i in range(n_pick))
    if rng is None:
        if seed is None:
            raise ValueError("random-baseline needs an rng or a seed")
        rng = derive_rng(seed)
    return sample_support_b(n_total, n_pick, rng)


# ============================================================
# instance sampling
# ============================================================


def sample_instance(
    D: PartitionedDictionary,
    spec: HybridSupportSpec,
    coeff: CoefficientSpec | None = None,
    rng: np.random.Generator | None = None,
) -> SparseInstance:
    """Draw one hybrid-model instance.

    Draw order is fixed (B-support, then magnitudes, then phases) so a given
    stream always produces the same instance.  When ``rng`` is omitted a
    stream is derived from ``spec.seed``.
    """
    coeff = coeff or CoefficientSpec()
    if rng is None:
        rng = derive_rng(spec.seed)
    if any(i >= D.Na for i in spec.support_a):
        raise ValueError(
            f"support_a {spec.support_a} outside block A of size {D.Na}"
        )
    if spec.n_b > D.Nb:
        raise ValueError(f"n_b={spec.n_b} exceeds block B size {D.Nb}")

    support_b = sample_support_b(D.Nb, spec.n_b, rng)
    support = tuple(sorted(spec.support_a)) + tuple(D.Na + j for j in support_b)
    k = len(support)

    magnitudes = coeff.sample_magnitudes(k, rng)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=k)
    values = magnitudes * np.exp(1j * phases)

    x = np.zeros(D.N, dtype=complex)
    x[list(support)] = values
    y = D.matrix @ x
    return SparseInstance(support=support, values=values, x=x, y=y)
