"""Homogenized spectra and number-by-number eigenvalue limits."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .base import COINCIDENCE_RTOL, Spectrum
from .errors import InsufficientBase
from .pencil import PencilParams, branch_roots, interval_bounds, pencil_spectrum
from .regimes import Coupled, DecoupledThreshold, HomogenizedProblem, Pencil, ScaledLaplacian

__all__ = [
    "LimitQueryResult",
    "homogenized_spectrum",
    "threshold_index",
    "eigenvalue_limit",
    "pencil_params",
]


@dataclass(frozen=True)
class LimitQueryResult:
    m: int
    limit_value: float
    kind: str  # "discrete eigenvalue" | "threshold"


def pencil_params(problem: Pencil, pole_guard: float = 1e-9) -> PencilParams:
    return PencilParams(p=problem.p, q=problem.q, omega=problem.omega, pole_guard=pole_guard)


def _thresholds(q: float, n_max: int) -> np.ndarray:
    return np.array([(math.pi * n / q) ** 2 for n in range(1, n_max + 1)])


def homogenized_spectrum(problem: HomogenizedProblem, base: Spectrum, count: int,
                         n_max: int = 3) -> Spectrum:
    """Spectrum of the limit problem built from the base Dirichlet spectrum.

    For the pencil, ``count`` caps how many base values feed the hard branch
    of each of the ``n_max`` intervals (the pencil spectrum is infinite in
    every interval).  For the other problems ``count`` is the number of
    eigenvalues returned, counted with multiplicity.  ``n_max`` also bounds
    the accumulation points listed for ``q > 0`` problems.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    if isinstance(problem, Pencil):
        return pencil_spectrum(base, pencil_params(problem), n_max=n_max, per_interval_cap=count).to_spectrum()
    if isinstance(problem, DecoupledThreshold):
        acc = _thresholds(problem.q, n_max)
        doubled = base.with_multiplicity_factor(2).truncated(count)
        # a base value sitting exactly on a threshold is reported as that point only
        keep = [i for i, v in enumerate(doubled.values)
                if not np.any(np.abs(acc - v) <= COINCIDENCE_RTOL * v)]
        return Spectrum(doubled.values[keep], doubled.multiplicities[keep],
                        tuple(doubled.tags[i] for i in keep), acc)
    if isinstance(problem, ScaledLaplacian):
        return base.truncated(count).scaled(problem.c, tag="scaled")
    if isinstance(problem, Coupled):
        head = base.truncated(count)
        plus = head.shifted(2 * problem.V, tag="plus2V")
        return Spectrum.merge([head, plus]).truncated(count)
    raise TypeError(f"unknown homogenized problem {problem!r}")


def threshold_index(base: Spectrum, q: float) -> int:
    """Number of eigenvalues (with multiplicity) of the doubled Laplacian
    strictly below ``(pi / q)^2``."""
    if not q > 0:
        raise ValueError("q must be positive")
    thr = (math.pi / q) ** 2
    below = base.values < thr
    if below.all() and len(base):
        # cannot tell whether further base values also lie below the threshold
        raise InsufficientBase(
            f"all {len(base)} base values lie below the threshold {thr}; extend the base spectrum")
    return 2 * int(base.multiplicities[below].sum())


def _pencil_first_interval(problem: Pencil, base: Spectrum, m: int) -> float:
    params = pencil_params(problem)
    lo, hi = interval_bounds(1, params.q)
    tan_roots, _ = branch_roots("tan", 1, base.values, params)
    cot_roots, _ = branch_roots("cot", 1, base.values, params)
    vals, mults = [], []
    for roots in (tan_roots, cot_roots):
        ok = ~np.isnan(roots)
        vals.extend(roots[ok])
        mults.extend(base.multiplicities[ok])
    order = np.argsort(vals, kind="stable")
    merged = Spectrum._aggregate(np.asarray(vals)[order], np.asarray(mults)[order],
                                 ["pencil"] * len(vals), 1e-10, ())
    # roots from base values beyond the list are all >= the last tan root
    safe = merged.values <= tan_roots[-1] * (1 + 1e-14)
    expanded = np.repeat(merged.values[safe], merged.multiplicities[safe])
    if m > len(expanded):
        raise InsufficientBase(f"base spectrum only determines {len(expanded)} roots in (0, {hi}); need m = {m}")
    return float(expanded[m - 1])


def eigenvalue_limit(problem: HomogenizedProblem, base: Spectrum, m: int) -> LimitQueryResult:
    """Limit of the m-th eigenvalue of the eps-problem as eps -> 0."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if isinstance(problem, Pencil):
        return LimitQueryResult(m, _pencil_first_interval(problem, base, m), "discrete eigenvalue")
    if isinstance(problem, DecoupledThreshold):
        M = threshold_index(base, problem.q)
        if m > M:
            return LimitQueryResult(m, (math.pi / problem.q) ** 2, "threshold")
        return LimitQueryResult(m, float(base.with_multiplicity_factor(2).expanded()[m - 1]),
                                "discrete eigenvalue")
    if base.total_multiplicity < m:
        raise InsufficientBase(f"base spectrum has {base.total_multiplicity} values; need m = {m}")
    spec = homogenized_spectrum(problem, base, m)
    return LimitQueryResult(m, float(spec.expanded()[m - 1]), "discrete eigenvalue")
