"""Partitioned dictionaries and their coherence and spectral statistics.

A dictionary is a complex m x N matrix with unit-norm columns, N >= m.  A
partitioned dictionary additionally carries a split point Na: the first Na
columns form block A, the remaining Nb = N - Na columns form block B.  The
quantities computed here:

    coherence         mu    = max_{i != j} |d_i^H d_j|
    sub-coherences    mu_a, mu_b (within each block)
    spectral norms    ||A||, ||B||, ||D||  (largest singular value)
    Welch bound       sqrt((N - m) / (m (N - 1)))  for N >= m, a universal
                      lower bound on mu
    tight-frame gap   | ||X||^2 - N_x / m |  per block (zero for a tight frame)

Builders cover the two standard unit-coherence-profile constructions: the
concatenation of the identity and Fourier bases (coherence 1/sqrt(m)), and the
identity plus p chirp bases for an odd prime p (p + 1 mutually unbiased bases
of C^p, coherence 1/sqrt(p)).  Arbitrary dictionaries round-trip through a
JSON text format, see ``save_dictionary``.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import InitVar, dataclass, field

import numpy as np

__all__ = [
    "DictionaryFormatError",
    "PartitionedDictionary",
    "DictionaryStats",
    "coherence",
    "cross_coherence",
    "spectral_norm",
    "welch_bound",
    "build_two_onb",
    "build_mub",
    "build_random_dictionary",
    "analyze",
    "save_dictionary",
    "load_dictionary",
]

COLUMN_NORM_TOL = 1e-10
LOAD_NORM_TOL = 1e-8


class DictionaryFormatError(ValueError):
    """Raised when a dictionary file violates the on-disk format contract."""


def _as_complex_matrix(matrix) -> np.ndarray:
    out = np.asarray(matrix, dtype=np.complex128)
    if out.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got ndim={out.ndim}")
    if out.shape[0] < 1 or out.shape[1] < 1:
        raise ValueError(f"matrix must be nonempty, got shape {out.shape}")
    if not np.all(np.isfinite(out.real)) or not np.all(np.isfinite(out.imag)):
        raise ValueError("matrix entries must all be finite")
    return out


# ============================================================
# core types
# ============================================================


@dataclass(frozen=True)
class PartitionedDictionary:
    """Unit-column complex matrix with a split into blocks A and B.

    The matrix is copied, validated (unit columns within ``norm_tol``,
    N >= m, 0 <= split <= N) and frozen read-only, so instances are safe
    to share across threads and processes.
    """

    matrix: np.ndarray
    split: int
    norm_tol: InitVar[float] = COLUMN_NORM_TOL

    def __post_init__(self, norm_tol: float):
        mat = _as_complex_matrix(self.matrix).copy()
        m, n = mat.shape
        if n < m:
            raise ValueError(f"dictionary must have N >= m, got m={m}, N={n}")
        if not 0 <= self.split <= n:
            raise ValueError(f"split must lie in [0, {n}], got {self.split}")
        norms = np.linalg.norm(mat, axis=0)
        bad = np.where(np.abs(norms - 1.0) > norm_tol)[0]
        if bad.size:
            j = int(bad[0])
            raise ValueError(
                f"column {j} has norm {norms[j]:.12g}, expected 1 within {norm_tol:g}"
            )
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "split", int(self.split))

    @property
    def m(self) -> int:
        return self.matrix.shape[0]

    @property
    def N(self) -> int:
        return self.matrix.shape[1]

    @property
    def Na(self) -> int:
        return self.split

    @property
    def Nb(self) -> int:
        return self.N - self.split

    @property
    def A(self) -> np.ndarray:
        return self.matrix[:, : self.split]

    @property
    def B(self) -> np.ndarray:
        return self.matrix[:, self.split :]


@dataclass(frozen=True)
class DictionaryStats:
    """Coherence and spectral summary of a partitioned dictionary.

    ``mu_a``/``mu_b`` are reported as 0.0 with the matching ``*_defined``
    flag cleared when a block has fewer than two columns, since a
    single-column coherence is undefined but every downstream formula
    multiplies it by a vanishing count.
    """

    mu: float
    mu_a: float
    mu_b: float
    spec_a: float
    spec_b: float
    spec_d: float
    welch: float
    tight_dev_a: float
    tight_dev_b: float
    mu_a_defined: bool = True
    mu_b_defined: bool = True

    def to_dict(self) -> dict:
        return {
            "mu": self.mu,
            "muA": self.mu_a,
            "muB": self.mu_b,
            "specA": self.spec_a,
            "specB": self.spec_b,
            "specD": self.spec_d,
            "welch": self.welch,
            "tightDevA": self.tight_dev_a,
            "tightDevB": self.tight_dev_b,
            "muADefined": self.mu_a_defined,
            "muBDefined": self.mu_b_defined,
        }


# ============================================================
# scalar statistics
# ============================================================


def coherence(matrix) -> float:
    """Largest |inner product| over distinct column pairs.

    Raises ValueError for fewer than two columns: the coherence of a single
    column is undefined and silently reporting 0 would hide the misuse.
    """
    mat = _as_complex_matrix(matrix)
    if mat.shape[1] < 2:
        raise ValueError("coherence is undefined for fewer than two columns")
    gram = np.abs(mat.conj().T @ mat)
    np.fill_diagonal(gram, 0.0)
    return float(gram.max())


def cross_coherence(block_a, block_b) -> float:
    """max_{i,j} |a_i^H b_j| between two column sets sharing a row count."""
    a = np.asarray(block_a, dtype=np.complex128)
    b = np.asarray(block_b, dtype=np.complex128)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError("cross_coherence expects two matrices")
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"row counts differ: {a.shape[0]} vs {b.shape[0]}")
    if a.shape[1] == 0 or b.shape[1] == 0:
        return 0.0
    return float(np.abs(a.conj().T @ b).max())


def spectral_norm(matrix) -> float:
    """Largest singular value; 0.0 for a block with no columns."""
    mat = np.asarray(matrix, dtype=np.complex128)
    if mat.size == 0:
        return 0.0
    return float(np.linalg.norm(mat, ord=2))


def welch_bound(m: int, N: int) -> float:
    """Universal coherence lower bound sqrt((N - m) / (m (N - 1)))."""
    if N < m:
        raise ValueError(f"welch_bound needs N >= m, got m={m}, N={N}")
    if m < 1 or N < 2:
        raise ValueError(f"welch_bound needs m >= 1 and N >= 2, got m={m}, N={N}")
    return math.sqrt((N - m) / (m * (N - 1)))


# ============================================================
# builders
# ============================================================


def build_two_onb(m: int) -> PartitionedDictionary:
    """Identity plus unitary Fourier basis, split at m; coherence 1/sqrt(m)."""
    if m < 2:
        raise ValueError(f"two-basis dictionary needs m >= 2, got {m}")
    j, k = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    fourier = np.exp(-2j * np.pi * ((j * k) % m) / m) / math.sqrt(m)
    return PartitionedDictionary(np.hstack([np.eye(m, dtype=complex), fourier]), m)


def _is_odd_prime(p: int) -> bool:
    if p < 3 or p % 2 == 0:
        return False
    return all(p % d for d in range(3, int(math.isqrt(p)) + 1, 2))


def build_mub(p: int) -> PartitionedDictionary:
    """Identity basis plus p quadratic-chirp bases of C^p, for odd prime p.

    Column (a, b) of the chirp part is t -> exp(2 pi i (a t^2 + b t) / p) / sqrt(p).
    The p + 1 bases are pairwise mutually unbiased, so the coherence is exactly
    1/sqrt(p), block A (the identity) is orthonormal, and the whole matrix is a
    tight frame with ||D||^2 = N / m = p + 1.

    Even p and prime powers p^k need a different field construction and are
    intentionally not built here; import such dictionaries from a file instead.
    """
    if not _is_odd_prime(p):
        raise ValueError(
            f"p must be an odd prime, got {p}; load prepared dictionaries "
            "from a file for other sizes"
        )
    t = np.arange(p)
    blocks = [np.eye(p, dtype=complex)]
    for a in range(p):
        chirp = np.empty((p, p), dtype=complex)
        for b in range(p):
            # exact modular phase keeps angles in [0, 2 pi) before the exp
            k = (a * t * t + b * t) % p
            chirp[:, b] = np.exp(2j * np.pi * k / p) / math.sqrt(p)
        blocks.append(chirp)
    return PartitionedDictionary(np.hstack(blocks), p)


def build_random_dictionary(m: int, N: int, seed: int, split: int = 0) -> PartitionedDictionary:
    """Columns i.i.d. uniform on the complex unit sphere of C^m; deterministic per seed."""
    if not 1 <= m <= N:
        raise ValueError(f"need N >= m >= 1, got m={m}, N={N}")
    rng = np.random.default_rng(np.random.SeedSequence([int(seed)]))
    mat = rng.standard_normal((m, N)) + 1j * rng.standard_normal((m, N))
    mat /= np.linalg.norm(mat, axis=0)
    return PartitionedDictionary(mat, split)


# ============================================================
# analysis
# ============================================================


def _block_coherence(block: np.ndarray) -> tuple[float, bool]:
    if block.shape[1] < 2:
        return 0.0, False
    return coherence(block), True


def analyze(D: PartitionedDictionary) -> DictionaryStats:
    """Populate every DictionaryStats field for a partitioned dictionary."""
    mu = coherence(D.matrix) if D.N >= 2 else 0.0
    mu_a, a_def = _block_coherence(D.A)
    mu_b, b_def = _block_coherence(D.B)
    spec_a = spectral_norm(D.A)
    spec_b = spectral_norm(D.B)
    spec_d = spectral_norm(D.matrix)
    welch = welch_bound(D.m, D.N) if D.N >= 2 else 0.0
    tight_dev_a = abs(spec_a**2 - D.Na / D.m)
    tight_dev_b = abs(spec_b**2 - D.Nb / D.m)
    return DictionaryStats(
        mu=mu,
        mu_a=mu_a,
        mu_b=mu_b,
        spec_a=spec_a,
        spec_b=spec_b,
        spec_d=spec_d,
        welch=welch,
        tight_dev_a=tight_dev_a,
        tight_dev_b=tight_dev_b,
        mu_a_defined=a_def,
        mu_b_defined=b_def,
    )


# ============================================================
# file format
# ============================================================
#
# JSON text, UTF-8, extension .dict.json:
#   {"m": <rows>, "N": <cols>, "Na": <split>, "entries": [[re, im], ...]}
# entries are row-major, one [re, im] pair per matrix entry, written with 17
# significant digits so the decimal representation round-trips bit-exact.


def save_dictionary(D: PartitionedDictionary, path) -> None:
    lines = ["{", f' "m": {D.m},', f' "N": {D.N},', f' "Na": {D.Na},', ' "entries": [']
    flat = D.matrix.reshape(-1)
    body = [f"  [{z.real:.16e}, {z.imag:.16e}]" for z in flat]
    lines.append(",\n".join(body))
    lines.extend([" ]", "}", ""])
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines))
    os.replace(tmp, path)


def load_dictionary(path, renormalize: bool = False) -> PartitionedDictionary:
    """Read a .dict.json file back into a PartitionedDictionary.

    Column norms are checked at the looser tolerance LOAD_NORM_TOL, since text
    formats written by other tools may round; pass renormalize=True to rescale
    columns instead of failing.  Zero columns are always an error.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DictionaryFormatError(f"cannot read dictionary file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DictionaryFormatError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise DictionaryFormatError(f"{path}: top-level value must be an object")
    for key in ("m", "N", "Na", "entries"):
        if key not in doc:
            raise DictionaryFormatError(f"{path}: missing field {key!r}")
    m, n, na = doc["m"], doc["N"], doc["Na"]
    if not all(isinstance(v, int) for v in (m, n, na)):
        raise DictionaryFormatError(f"{path}: m, N, Na must be integers")
    if m < 1 or n < m:
        raise DictionaryFormatError(f"{path}: need N >= m >= 1, got m={m}, N={n}")
    if not 0 <= na <= n:
        raise DictionaryFormatError(f"{path}: Na={na} outside [0, N={n}]")
    entries = doc["entries"]
    if len(entries) != m * n:
        raise DictionaryFormatError(
            f"{path}: expected {m * n} entries, found {len(entries)}"
        )
    try:
        pairs = np.asarray(entries, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DictionaryFormatError(f"{path}: entries must be [re, im] pairs") from exc
    if pairs.shape != (m * n, 2):
        raise DictionaryFormatError(f"{path}: entries must be [re, im] pairs")
    mat = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(m, n)
    if not np.all(np.isfinite(pairs)):
        raise DictionaryFormatError(f"{path}: entries must be finite")

    norms = np.linalg.norm(mat, axis=0)
    zero = np.where(norms <= 1e-300)[0]
    if zero.size:
        raise DictionaryFormatError(f"{path}: column {int(zero[0])} is zero")
    if renormalize:
        mat = mat / norms
    else:
        bad = np.where(np.abs(norms - 1.0) > LOAD_NORM_TOL)[0]
        if bad.size:
            j = int(bad[0])
            raise DictionaryFormatError(
                f"{path}: column {j} has norm {norms[j]:.12g}, beyond "
                f"{LOAD_NORM_TOL:g}; pass renormalize to rescale"
            )
    return PartitionedDictionary(mat, na, norm_tol=max(COLUMN_NORM_TOL, 2 * LOAD_NORM_TOL))
