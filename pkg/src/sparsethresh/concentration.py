"""Singular-value concentration for random sub-dictionaries.

For a sub-dictionary S = [A' B'] (n_a fixed columns of A, n_b random columns
of B) the smallest singular value is controlled through the hollow Gram norm
Xi_S = ||S^H S - I||:

    sigma_min(S)^2 >= 1 - Xi_S
    Xi_S <= max{Xi_A, Xi_B} + Xi_X <= Xi_A + Xi_B + Xi_X
    Xi_A <= (n_a - 1) mu_a                   (Gersgorin disc bound)
    ||A'^H B||_{1,2} <= sqrt(mu^2 n_a)       (entrywise coherence bound)
    Xi_X <= ||A|| ||B||                      (norm sub-multiplicativity)

with Xi_A, Xi_B the block hollow Gram norms and Xi_X = ||A'^H B'||.  The
random part concentrates; with L = s log N and

    alpha = 6 sqrt(mu_b^2 n_b) + 3 sqrt(mu^2 n_a / 2)
    beta  = (n_a - 1) mu_a + 2 n_b ||B||^2 / N_b + sqrt(n_b / N_b) ||A|| ||B||
    Q1    = max{4 log(n_b/2 + 1), 4 log n_b, 4}

the tail bound  P{Xi_S >= e^{1/4} (alpha u + beta)} <= e^{-u^2/4}  holds for
all u >= sqrt(Q1).  At u = sqrt(4 s log N) the failure probability is N^{-s};
when the two block conditions (eq3/eq4) hold the threshold e^{1/4}(alpha u +
beta) is at most 1/2, which pins sigma_min > 1/sqrt(2) outside the N^{-s}
event.  ``run_smin_trials`` measures all of this empirically and
``estimate_moment`` compares Monte Carlo moments of Xi_B and Xi_X against
their closed-form bounds

    [E Xi_B^q]^{1/q} <= 6 sqrt(mu_b^2 n_b) sqrt(q) + 2 n_b ||B||^2 / N_b
                        valid for q >= max{4 log(n_b/2 + 1), 4}
    [E Xi_X^q]^{1/q} <= (3/sqrt(2)) sqrt(mu^2 n_a) sqrt(q)
                        + sqrt(n_b / N_b) ||A|| ||B||
                        valid for q >= max{4 log n_b, 4}
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dictionary import DictionaryStats, PartitionedDictionary, analyze
from .model import choose_support_a, sample_support_b
from .rng import derive_rng
from .threshold import (
    GAMMA_GRID_DEFAULT,
    TheoremParams,
    check_arbitrary_block,
    check_random_block,
)

__all__ = [
    "SubDictionary",
    "HollowGramRecord",
    "TailBoundSpec",
    "SminExperimentResult",
    "MomentEstimate",
    "extract_subdictionary",
    "sigma_min",
    "hollow_gram_chain",
    "alpha_beta",
    "default_u",
    "tail_probability",
    "run_smin_trials",
    "estimate_moment",
]

CHAIN_SLACK = 1e-9

TRIAL_CSV_HEADER = "trialIndex,sigmaMin,xiS,xiA,xiB,xiX"
MOMENT_CSV_HEADER = "trialIndex,xiB,xiX"


# ============================================================
# sub-dictionaries and the inequality chain
# ============================================================


@dataclass(frozen=True, eq=False)
class SubDictionary:
    """Selected columns [A' B'] of a partitioned dictionary, plus the parent."""

    columns_a: tuple[int, ...]
    columns_b: tuple[int, ...]
    S: np.ndarray
    parent: PartitionedDictionary

    @property
    def n_a(self) -> int:
        return len(self.columns_a)

    @property
    def n_b(self) -> int:
        return len(self.columns_b)

    @property
    def A_part(self) -> np.ndarray:
        return self.S[:, : self.n_a]

    @property
    def B_part(self) -> np.ndarray:
        return self.S[:, self.n_a :]


def extract_subdictionary(
    D: PartitionedDictionary, columns_a, columns_b
) -> SubDictionary:
    """Assemble S from duplicate-free index sets into blocks A and B."""
    ca = tuple(int(i) for i in columns_a)
    cb = tuple(int(j) for j in columns_b)
    if not ca and not cb:
        raise ValueError("empty sub-dictionary has no smallest singular value")
    if len(set(ca)) != len(ca) or len(set(cb)) != len(cb):
        raise ValueError("column index sets must be duplicate-free")
    if any(not 0 <= i < D.Na for i in ca):
        raise ValueError(f"A-column indices out of range [0, {D.Na}): {ca}")
    if any(not 0 <= j < D.Nb for j in cb):
        raise ValueError(f"B-column indices out of range [0, {D.Nb}): {cb}")
    S = np.hstack([D.A[:, list(ca)], D.B[:, list(cb)]])
    return SubDictionary(columns_a=ca, columns_b=cb, S=S, parent=D)


def sigma_min(S) -> float:
    """Smallest singular value of S as an operator on coefficient space.

    A matrix with more columns than rows has a nontrivial null space, so the
    value is exactly 0 without touching the SVD.
    """
    mat = np.asarray(S, dtype=np.complex128)
    if mat.ndim != 2 or mat.size == 0:
        raise ValueError("sigma_min needs a nonempty matrix")
    if mat.shape[1] > mat.shape[0]:
        return 0.0
    return float(np.linalg.svd(mat, compute_uv=False)[-1])


def _hollow_norm(block: np.ndarray) -> float:
    """||X^H X - I|| for a column block; 0.0 for an empty block."""
    k = block.shape[1]
    if k == 0:
        return 0.0
    gram = block.conj().T @ block - np.eye(k)
    return float(np.linalg.norm(gram, ord=2))


@dataclass(frozen=True)
class HollowGramRecord:
    """All chain quantities for one sub-dictionary draw.

    ``gersgorin_rhs``, ``row_norm_bound`` and ``cross_bound`` are the
    closed-form ceilings the respective measured quantities must stay under;
    ``violations`` names any inequality broken beyond CHAIN_SLACK (always
    empty when the inputs are consistent).
    """

    sigma_min: float
    xi_s: float
    xi_a: float
    xi_b: float
    xi_x: float
    row_norm_ab: float
    gersgorin_rhs: float
    row_norm_bound: float
    cross_bound: float

    @property
    def xi_max_path(self) -> float:
        return max(self.xi_a, self.xi_b) + self.xi_x

    @property
    def xi_sum_path(self) -> float:
        return self.xi_a + self.xi_b + self.xi_x

    def violations(self, slack: float = CHAIN_SLACK) -> list[str]:
        out = []
        if self.sigma_min**2 < 1.0 - self.xi_s - slack:
            out.append("sigma_min^2 >= 1 - xi_s")
        if self.xi_s > self.xi_max_path + slack:
            out.append("xi_s <= max(xi_a, xi_b) + xi_x")
        if self.xi_s > self.xi_sum_path + slack:
            out.append("xi_s <= xi_a + xi_b + xi_x")
        if self.xi_a > self.gersgorin_rhs + slack:
            out.append("xi_a <= (n_a - 1) mu_a")
        if self.row_norm_ab > self.row_norm_bound + slack:
            out.append("row_norm_ab <= sqrt(mu^2 n_a)")
        if self.xi_x > self.cross_bound + slack:
            out.append("xi_x <= ||A|| ||B||")
        return out


def hollow_gram_chain(sub: SubDictionary, stats: DictionaryStats) -> HollowGramRecord:
    """Measure every quantity in the chain for one sub-dictionary."""
    a_part, b_part = sub.A_part, sub.B_part
    xi_x = 0.0
    if sub.n_a and sub.n_b:
        xi_x = float(np.linalg.norm(a_part.conj().T @ b_part, ord=2))
    row_norm_ab = 0.0
    if sub.n_a and sub.parent.Nb:
        # max column l2 norm of A'^H against the FULL block B
        row_norm_ab = float(
            np.linalg.norm(a_part.conj().T @ sub.parent.B, axis=0).max()
        )
    return HollowGramRecord(
        sigma_min=sigma_min(sub.S),
        xi_s=_hollow_norm(sub.S),
        xi_a=_hollow_norm(a_part),
        xi_b=_hollow_norm(b_part),
        xi_x=xi_x,
        row_norm_ab=row_norm_ab,
        gersgorin_rhs=max(sub.n_a - 1, 0) * stats.mu_a,
        row_norm_bound=math.sqrt(stats.mu**2 * sub.n_a),
        cross_bound=stats.spec_a * stats.spec_b,
    )


# ============================================================
# tail bound
# ============================================================


@dataclass(frozen=True)
class TailBoundSpec:
    """Coefficients of the concentration tail: threshold e^{1/4}(alpha u + beta).

    ``degenerate`` flags n_b = 0, where Q1's log terms are empty and the
    moment floor collapses to the constant 4.
    """

    alpha: float
    beta: float
    q1: float
    u: float
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "q1": self.q1,
            "u": self.u,
            "degenerate": self.degenerate,
        }


def default_u(s: float, N: int) -> float:
    """The canonical tail argument u = sqrt(4 s log N), giving bound N^{-s}."""
    if N <= 2:
        raise ValueError(f"need N > 2, got {N}")
    return math.sqrt(4.0 * s * math.log(N))


def alpha_beta(
    stats: DictionaryStats,
    n_a: int,
    n_b: int,
    Nb: int,
    N: int,
    s: float = 1.0,
) -> TailBoundSpec:
    """Assemble alpha, beta, Q1 and the default u for the given budgets."""
    if n_a < 0 or n_b < 0:
        raise ValueError(f"budgets must be nonnegative, got {n_a}, {n_b}")
    if n_b > 0 and Nb < 1:
        raise ValueError("n_b > 0 requires a nonempty block B")
    alpha = 3.0 * math.sqrt(stats.mu**2 * n_a / 2.0)
    beta = max(n_a - 1, 0) * stats.mu_a
    degenerate = n_b == 0
    if n_b > 0:
        alpha += 6.0 * math.sqrt(stats.mu_b**2 * n_b)
        beta += 2.0 * n_b * stats.spec_b**2 / Nb
        beta += math.sqrt(n_b / Nb) * stats.spec_a * stats.spec_b
        q1 = max(4.0 * math.log(n_b / 2.0 + 1.0), 4.0 * math.log(n_b), 4.0)
    else:
        q1 = 4.0
    return TailBoundSpec(
        alpha=alpha, beta=beta, q1=q1, u=default_u(s, N), degenerate=degenerate
    )


def tail_probability(u: float, spec: TailBoundSpec) -> tuple[float, float]:
    """Return (threshold, bound): P{Xi >= threshold} <= bound for u >= sqrt(Q1)."""
    if u < math.sqrt(spec.q1) - 1e-12:
        raise ValueError(
            f"tail bound needs u >= sqrt(Q1) = {math.sqrt(spec.q1):.6g}, got {u:.6g}"
        )
    threshold = math.exp(0.25) * (spec.alpha * u + spec.beta)
    bound = math.exp(-u * u / 4.0)
    return threshold, bound


# ============================================================
# sigma_min Monte Carlo
# ============================================================


def _resolve_support_a(D, strategy, n_a, support_a):
    if strategy == "random-baseline":
        return None  # re-drawn per trial
    return choose_support_a(strategy, D.Na, n_a, indices=support_a)


def _smin_chunk(payload):
    D, strategy, fixed_a, n_a, n_b, lo, hi, master_seed = payload
    stats = analyze(D)
    rows = np.empty((hi - lo, 5))
    violations = 0
    for t in range(lo, hi):
        rng = derive_rng(master_seed, t)
        cols_a = (
            sample_support_b(D.Na, n_a, rng) if fixed_a is None else fixed_a
        )
        cols_b = sample_support_b(D.Nb, n_b, rng)
        rec = hollow_gram_chain(extract_subdictionary(D, cols_a, cols_b), stats)
        violations += bool(rec.violations())
        rows[t - lo] = (rec.sigma_min, rec.xi_s, rec.xi_a, rec.xi_b, rec.xi_x)
    return rows, violations


@dataclass(eq=False)
class SminExperimentResult:
    """Per-trial chain measurements plus the empirical concentration summary."""

    n_a: int
    n_b: int
    trials: int
    s: float
    master_seed: int
    strategy: str
    support_a: tuple[int, ...] | None
    N: int
    sigma_min: np.ndarray
    xi_s: np.ndarray
    xi_a: np.ndarray
    xi_b: np.ndarray
    xi_x: np.ndarray
    violation_count: int
    failure_count: int
    empirical_failure_rate: float
    lemma_bound: float
    gamma_feasible: float | None
    bound_respected: bool | None
    histogram_counts: np.ndarray
    histogram_edges: np.ndarray

    def csv_rows(self) -> list[str]:
        out = [TRIAL_CSV_HEADER]
        for t in range(self.trials):
            values = (
                self.sigma_min[t], self.xi_s[t], self.xi_a[t],
                self.xi_b[t], self.xi_x[t],
            )
            out.append(f"{t}," + ",".join(repr(float(v)) for v in values))
        return out

    def summary_dict(self) -> dict:
        return {
            "n_a": self.n_a,
            "n_b": self.n_b,
            "trials": self.trials,
            "s": self.s,
            "master_seed": self.master_seed,
            "strategy": self.strategy,
            "support_a": list(self.support_a) if self.support_a is not None else None,
            "N": self.N,
            "violation_count": self.violation_count,
            "failure_count": self.failure_count,
            "empirical_failure_rate": self.empirical_failure_rate,
            "lemma1_bound": self.lemma_bound,
            "gamma_feasible": self.gamma_feasible,
            "conditions_hold": self.gamma_feasible is not None,
            "bound_respected": self.bound_respected,
            "sigma_min_mean": float(self.sigma_min.mean()),
            "sigma_min_smallest": float(self.sigma_min.min()),
            "histogram": {
                "counts": [int(c) for c in self.histogram_counts],
                "edges": [float(e) for e in self.histogram_edges],
            },
        }


def run_smin_trials(
    D: PartitionedDictionary,
    strategy: str,
    n_a: int,
    n_b: int,
    trials: int,
    s: float = 1.0,
    master_seed: int = 0,
    support_a=None,
    workers: int = 1,
) -> SminExperimentResult:
    """Sample ``trials`` sub-dictionaries and measure the whole chain.

    The A-support is fixed once per run (any deterministic strategy or a
    prescribed list); the ``random-baseline`` strategy instead re-draws it
    every trial before the B-support, as the control experiment.  Failure means
    sigma_min <= 1/sqrt(2); the empirical failure rate is compared against
    the N^{-s} bound whenever some gamma in the default grid satisfies both
    block conditions.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    fixed_a = _resolve_support_a(D, strategy, n_a, support_a)

    chunks = _split_ranges(trials, workers)
    payloads = [
        (D, strategy, fixed_a, n_a, n_b, lo, hi, master_seed) for lo, hi in chunks
    ]
    if workers > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_smin_chunk, payloads))
    else:
        parts = [_smin_chunk(p) for p in payloads]
    rows = np.vstack([p[0] for p in parts])
    violation_count = sum(p[1] for p in parts)

    sig = rows[:, 0]
    failure_count = int(np.count_nonzero(sig <= 1.0 / math.sqrt(2.0)))
    rate = failure_count / trials
    lemma_bound = float(D.N) ** (-s)

    stats = analyze(D)
    gamma_feasible = None
    for gamma in GAMMA_GRID_DEFAULT:
        params = TheoremParams(s=s, gamma=gamma, n_a=n_a, n_b=n_b)
        ok_a = check_arbitrary_block(stats.mu, stats.mu_a, D.N, params).satisfied
        ok_b = check_random_block(
            stats.mu_b, stats.spec_a, stats.spec_b, D.Nb, D.N, params
        ).satisfied
        if ok_a and ok_b:
            gamma_feasible = gamma
            break
    bound_respected = (rate <= lemma_bound) if gamma_feasible is not None else None

    counts, edges = np.histogram(np.clip(sig, 0.0, 1.0), bins=50, range=(0.0, 1.0))
    return SminExperimentResult(
        n_a=n_a,
        n_b=n_b,
        trials=trials,
        s=s,
        master_seed=master_seed,
        strategy=strategy,
        support_a=fixed_a,
        N=D.N,
        sigma_min=sig,
        xi_s=rows[:, 1],
        xi_a=rows[:, 2],
        xi_b=rows[:, 3],
        xi_x=rows[:, 4],
        violation_count=violation_count,
        failure_count=failure_count,
        empirical_failure_rate=rate,
        lemma_bound=lemma_bound,
        gamma_feasible=gamma_feasible,
        bound_respected=bound_respected,
        histogram_counts=counts,
        histogram_edges=edges,
    )


def _split_ranges(n: int, workers: int) -> list[tuple[int, int]]:
    parts = max(1, min(workers, n))
    step = -(-n // parts)
    return [(lo, min(lo + step, n)) for lo in range(0, n, step)]


# ============================================================
# moment estimation
# ============================================================


def moment_floor_b(n_b: int) -> float:
    """Smallest q for which the Xi_B moment bound is valid."""
    if n_b < 1:
        return 4.0
    return max(4.0 * math.log(n_b / 2.0 + 1.0), 4.0)


def moment_floor_x(n_b: int) -> float:
    """Smallest q for which the Xi_X moment bound is valid (a higher floor)."""
    if n_b < 1:
        return 4.0
    return max(4.0 * math.log(n_b), 4.0)


@dataclass(eq=False)
class MomentEstimate:
    """Monte Carlo moment roots of Xi_B and Xi_X against their bounds.

    The Xi_X side is populated only when q clears its own validity floor;
    otherwise estimate/bound on that side are None and only the raw samples
    remain available.
    """

    q: float
    trials: int
    n_a: int
    n_b: int
    estimate_b: float
    upper95_b: float
    bound_b: float
    floor_b: float
    estimate_x: float | None
    upper95_x: float | None
    bound_x: float | None
    floor_x: float
    xi_b: np.ndarray
    xi_x: np.ndarray

    def csv_rows(self) -> list[str]:
        out = [MOMENT_CSV_HEADER]
        for t in range(self.trials):
            out.append(f"{t},{float(self.xi_b[t])!r},{float(self.xi_x[t])!r}")
        return out

    def summary_dict(self) -> dict:
        return {
            "q": self.q,
            "trials": self.trials,
            "n_a": self.n_a,
            "n_b": self.n_b,
            "estimate_b": self.estimate_b,
            "upper95_b": self.upper95_b,
            "bound_b": self.bound_b,
            "floor_b": self.floor_b,
            "estimate_x": self.estimate_x,
            "upper95_x": self.upper95_x,
            "bound_x": self.bound_x,
            "floor_x": self.floor_x,
        }


def _moment_root(values: np.ndarray, q: float) -> float:
    return float(np.mean(values**q) ** (1.0 / q))


def estimate_moment(
    D: PartitionedDictionary,
    n_a: int,
    n_b: int,
    q: float,
    trials: int,
    master_seed: int = 0,
    strategy: str = "first-n",
    support_a=None,
    n_boot: int = 1000,
) -> MomentEstimate:
    """Estimate [E Xi^q]^{1/q} for Xi_B and Xi_X over random B-supports.

    The A-support is fixed (default: first n_a columns).  Bootstrap
    percentiles (upper edge of the 95% interval) quantify Monte Carlo error;
    the analytic bounds are provably slack, so the upper edge should sit
    well below them.
    """
    if trials < 1000:
        raise ValueError(f"moment estimation needs >= 1000 trials, got {trials}")
    floor_b = moment_floor_b(n_b)
    floor_x = moment_floor_x(n_b)
    if q < floor_b - 1e-12:
        raise ValueError(
            f"q={q} is below the validity floor {floor_b:.6g} for n_b={n_b}"
        )
    stats = analyze(D)
    fixed_a = choose_support_a(strategy, D.Na, n_a, indices=support_a)
    a_sel = D.A[:, list(fixed_a)]

    xi_b = np.empty(trials)
    xi_x = np.empty(trials)
    for t in range(trials):
        rng = derive_rng(master_seed, t)
        cols_b = sample_support_b(D.Nb, n_b, rng)
        b_sel = D.B[:, list(cols_b)]
        xi_b[t] = _hollow_norm(b_sel)
        if n_a and n_b:
            xi_x[t] = float(np.linalg.norm(a_sel.conj().T @ b_sel, ord=2))
        else:
            xi_x[t] = 0.0

    sqrt_q = math.sqrt(q)
    bound_b = 6.0 * math.sqrt(stats.mu_b**2 * n_b) * sqrt_q
    if n_b:
        bound_b += 2.0 * n_b * stats.spec_b**2 / D.Nb
    x_valid = q >= floor_x - 1e-12
    bound_x = None
    if x_valid:
        bound_x = 3.0 / math.sqrt(2.0) * math.sqrt(stats.mu**2 * n_a) * sqrt_q
        if n_b:
            bound_x += math.sqrt(n_b / D.Nb) * stats.spec_a * stats.spec_b

    boot_rng = derive_rng(master_seed, trials, 1)
    boot_b = np.empty(n_boot)
    boot_x = np.empty(n_boot)
    chunk = 100
    for lo in range(0, n_boot, chunk):
        hi = min(lo + chunk, n_boot)
        idx = boot_rng.integers(0, trials, size=(hi - lo, trials))
        boot_b[lo:hi] = np.mean(xi_b[idx] ** q, axis=1) ** (1.0 / q)
        boot_x[lo:hi] = np.mean(xi_x[idx] ** q, axis=1) ** (1.0 / q)

    return MomentEstimate(
        q=q,
        trials=trials,
        n_a=n_a,
        n_b=n_b,
        estimate_b=_moment_root(xi_b, q),
        upper95_b=float(np.quantile(boot_b, 0.975)),
        bound_b=bound_b,
        floor_b=floor_b,
        estimate_x=_moment_root(xi_x, q) if x_valid else None,
        upper95_x=float(np.quantile(boot_x, 0.975)) if x_valid else None,
        bound_x=bound_x,
        floor_x=floor_x,
        xi_b=xi_b,
        xi_x=xi_x,
    )
