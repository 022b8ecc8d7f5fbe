"""Dirichlet spectrum of the Laplacian on a box, and the spectrum container."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.special import gamma

from .errors import ResolutionTooCoarse

__all__ = [
    "Spectrum",
    "sphere_volume",
    "box_dirichlet_spectrum",
    "fd_dirichlet_spectrum",
    "fd_laplacian",
    "COINCIDENCE_RTOL",
]

COINCIDENCE_RTOL = 1e-12

TAGS = ("base", "tan", "cot", "both", "plus2V", "scaled")


def sphere_volume(N: int) -> float:
    """Surface measure of the unit sphere S^(N-1) in R^N."""
    if int(N) != N or N < 2:
        raise ValueError(f"N must be an integer >= 2, got {N}")
    return float(2.0 * math.pi ** (N / 2) / gamma(N / 2))


@dataclass(frozen=True)
class Spectrum:
    """Sorted distinct eigenvalues with multiplicities and tags.

    ``accumulation_points`` are limit points of the spectrum that are not
    themselves listed among the eigenvalues.
    """

    values: np.ndarray
    multiplicities: np.ndarray
    tags: tuple = ()
    accumulation_points: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).reshape(-1)
        mult = np.asarray(self.multiplicities, dtype=int).reshape(-1)
        tags = tuple(self.tags) if len(self.tags) else ("base",) * len(values)
        acc = np.sort(np.asarray(self.accumulation_points, dtype=float).reshape(-1))
        if not (len(values) == len(mult) == len(tags)):
            raise ValueError("values, multiplicities and tags must have equal length")
        if len(values) > 1 and not np.all(np.diff(values) > 0):
            raise ValueError("spectrum values must be strictly increasing")
        if np.any(mult < 1):
            raise ValueError("multiplicities must be >= 1")
        for arr in (values, mult, acc):
            arr.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "multiplicities", mult)
        object.__setattr__(self, "tags", tags)
        object.__setattr__(self, "accumulation_points", acc)

    @classmethod
    def from_values(cls, values: Iterable[float], tag: str = "base",
                    rtol: float = COINCIDENCE_RTOL, accumulation_points=()) -> "Spectrum":
        """Aggregate a raw list of eigenvalues (repeats allowed) into a spectrum."""
        v = np.sort(np.asarray(list(values), dtype=float))
        return cls._aggregate(v, np.ones(len(v), dtype=int), [tag] * len(v), rtol, accumulation_points)

    @classmethod
    def merge(cls, parts: Sequence["Spectrum"], rtol: float = COINCIDENCE_RTOL,
              accumulation_points=None) -> "Spectrum":
        """Union of several spectra; coincident values add multiplicities.

        A merged entry keeps the tag of its first contributor in ``parts``
        order.  Accumulation points are unioned unless given explicitly.
        """
        vals, mults, tags, order = [], [], [], []
        for k, s in enumerate(parts):
            vals.extend(s.values)
            mults.extend(s.multiplicities)
            tags.extend(s.tags)
            order.extend([k] * len(s.values))
        vals = np.asarray(vals, dtype=float)
        idx = np.lexsort((np.asarray(order), vals)) if len(vals) else np.array([], dtype=int)
        if accumulation_points is None:
            acc = np.unique(np.concatenate([s.accumulation_points for s in parts])) if parts else ()
        else:
            acc = accumulation_points
        return cls._aggregate(vals[idx], np.asarray(mults, dtype=int)[idx],
                              [tags[i] for i in idx], rtol, acc)

    @classmethod
    def _aggregate(cls, v, m, t, rtol, acc) -> "Spectrum":
        out_v, out_m, out_t = [], [], []
        for x, k, tag in zip(v, m, t):
            if out_v and abs(x - out_v[-1]) <= rtol * max(abs(x), abs(out_v[-1])):
                out_m[-1] += int(k)
            else:
                out_v.append(float(x))
                out_m.append(int(k))
                out_t.append(tag)
        return cls(np.array(out_v), np.array(out_m, dtype=int), tuple(out_t), np.asarray(acc, dtype=float))

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Spectrum):
            return NotImplemented
        return (np.array_equal(self.values, other.values)
                and np.array_equal(self.multiplicities, other.multiplicities)
                and self.tags == other.tags
                and np.array_equal(self.accumulation_points, other.accumulation_points))

    __hash__ = None

    @property
    def total_multiplicity(self) -> int:
        return int(self.multiplicities.sum())

    def expanded(self) -> np.ndarray:
        """Values repeated according to multiplicity, ascending."""
        return np.repeat(self.values, self.multiplicities)

    def truncated(self, count: int) -> "Spectrum":
        """First ``count`` values counted with multiplicity."""
        if count >= self.total_multiplicity:
            return self
        cum = np.cumsum(self.multiplicities)
        k = int(np.searchsorted(cum, count, side="left"))  # entry holding the count-th value
        if count == 0:
            return Spectrum(np.empty(0), np.empty(0, dtype=int), (), self.accumulation_points)
        mult = self.multiplicities[: k + 1].copy()
        mult[k] -= cum[k] - count
        return Spectrum(self.values[: k + 1], mult, self.tags[: k + 1], self.accumulation_points)

    def scaled(self, factor: float, tag: str | None = None) -> "Spectrum":
        tags = self.tags if tag is None else (tag,) * len(self)
        return Spectrum(self.values * factor, self.multiplicities, tags, self.accumulation_points * factor)

    def shifted(self, shift: float, tag: str | None = None) -> "Spectrum":
        tags = self.tags if tag is None else (tag,) * len(self)
        return Spectrum(self.values + shift, self.multiplicities, tags, self.accumulation_points)

    def with_multiplicity_factor(self, k: int) -> "Spectrum":
        return Spectrum(self.values, self.multiplicities * k, self.tags, self.accumulation_points)


def _lattice_values(inv_sq: np.ndarray, kmax: int) -> np.ndarray:
    ks = np.arange(1, kmax + 1, dtype=float) ** 2
    total = np.zeros(1)
    for c in inv_sq:
        total = (total[:, None] + c * ks[None, :]).ravel()
    return total


def box_dirichlet_spectrum(side_lengths: Sequence[float], count: int) -> Spectrum:
    """First ``count`` Dirichlet eigenvalues (with multiplicity) of a box.

    ``mu = pi^2 * sum_j (k_j / a_j)^2`` over integers ``k_j >= 1``.
    """
    a = np.asarray(side_lengths, dtype=float)
    if a.ndim != 1 or len(a) == 0 or np.any(a <= 0):
        raise ValueError(f"side lengths must be a nonempty list of positive numbers, got {side_lengths}")
    if count < 0:
        raise ValueError("count must be non-negative")
    if count == 0:
        return Spectrum(np.empty(0), np.empty(0, dtype=int))
    inv_sq = 1.0 / a**2
    floor = inv_sq.sum()
    kmax = max(2, int(math.ceil(count ** (1.0 / len(a)))) + 1)
    while True:
        vals = np.sort(_lattice_values(inv_sq, kmax))[:count]
        # any omitted lattice point has some k_j >= kmax + 1
        bound = floor + ((kmax + 1) ** 2 - 1) * inv_sq.min()
        if len(vals) == count and vals[-1] * (1 + 1e-12) < bound:
            break
        kmax *= 2
    return Spectrum.from_values(math.pi**2 * vals, tag="base").truncated(count)


def _grid_counts(side_lengths, h) -> list[int]:
    counts = []
    for a in side_lengths:
        n = a / h
        k = int(round(n))
        if k < 2 or abs(n - k) > 1e-9 * max(1.0, n):
            raise ValueError(f"h = {h} must divide side length {a} into at least 2 intervals")
        counts.append(k)
    return counts


def fd_laplacian(side_lengths: Sequence[float], h: float) -> sp.csr_matrix:
    """Standard (2N+1)-point Dirichlet Laplacian ``-Delta_h`` on interior nodes.

    Node ordering is row-major over the interior grid (last axis fastest).
    """
    counts = _grid_counts(side_lengths, h)
    mats = [sp.diags([-np.ones(n - 2), 2 * np.ones(n - 1), -np.ones(n - 2)], [-1, 0, 1]) for n in counts]
    eyes = [sp.identity(n - 1) for n in counts]
    total = None
    for j, T in enumerate(mats):
        term = None
        for i in range(len(counts)):
            f = T if i == j else eyes[i]
            term = f if term is None else sp.kron(term, f)
        total = term if total is None else total + term
    return (total / h**2).tocsr()


def fd_dirichlet_spectrum(side_lengths: Sequence[float], h: float, count: int) -> Spectrum:
    """Smallest ``count`` eigenvalues of the finite-difference Dirichlet Laplacian."""
    A = fd_laplacian(side_lengths, h)
    n = A.shape[0]
    if count > n:
        raise ResolutionTooCoarse(f"requested {count} eigenvalues but the grid has only {n} interior nodes")
    if count <= 0:
        return Spectrum(np.empty(0), np.empty(0, dtype=int))
    if n <= 2000 or count > n // 2:
        vals = scipy.linalg.eigh(A.toarray(), eigvals_only=True, subset_by_index=[0, count - 1])
    else:
        vals = spla.eigsh(A, k=count, sigma=0.0, which="LM", v0=np.ones(n),
                          tol=1e-14, return_eigenvectors=False)
    return Spectrum.from_values(np.sort(vals), tag="base", rtol=1e-10)
