"""Spectrum of the two-sheet operator pencil for q > 0, p > 0.

Over one Dirichlet eigenfunction of the base domain (eigenvalue ``mu``) the
pencil is the 2x2 block::

    [[mu + ct - lam, -cs], [-cs, mu + ct - lam]]
    ct = p w sqrt(lam) / (q tan(q sqrt(lam))),  cs = p w sqrt(lam) / (q sin(q sqrt(lam)))

Symmetric and antisymmetric combinations diagonalise it, so ``lam`` is an
eigenvalue iff one of the scalar equations holds::

    f_tan(lam) = lam + (p w / q) sqrt(lam) tan(q sqrt(lam) / 2) = mu
    f_cot(lam) = lam - (p w / q) sqrt(lam) cot(q sqrt(lam) / 2) = mu

Both ``f`` are strictly increasing on every interval
``J_n = ((pi (n-1) / q)^2, (pi n / q)^2)``.  On ``J_n`` the *hard* branch
(tan for odd n, cot for even n) runs from the left endpoint up to +inf, so
every ``mu`` above the left endpoint has exactly one root there and those
roots pile up at the right endpoint.  The *soft* branch runs from -inf (or
from ``-2 p w / q^2`` when n = 1) up to the right endpoint and contributes
finitely many roots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .base import Spectrum
from .errors import PoleProximity

__all__ = [
    "PencilParams",
    "PencilRoot",
    "IntervalRoots",
    "PencilSpectrum",
    "TubeCoefficients",
    "interval_bounds",
    "hard_branch",
    "branch_function",
    "branch_derivative",
    "branch_root",
    "branch_roots",
    "pencil_spectrum",
    "pencil_block",
    "block_factor_product",
    "tube_coefficients",
]

MERGE_RTOL = 1e-10


@dataclass(frozen=True)
class PencilParams:
    p: float
    q: float
    omega: float
    pole_guard: float = 1e-9

    def __post_init__(self):
        if not self.p >= 0:
            raise ValueError(f"p must be non-negative, got {self.p}")
        if not self.q > 0:
            raise ValueError(f"q must be positive, got {self.q}")
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not self.pole_guard > 0:
            raise ValueError("pole_guard must be positive")

    @property
    def coupling(self) -> float:
        """``p * omega / q``, the prefactor of both branch functions."""
        return self.p * self.omega / self.q


def interval_bounds(n: int, q: float) -> tuple[float, float]:
    if n < 1:
        raise ValueError(f"interval index must be >= 1, got {n}")
    return (math.pi * (n - 1) / q) ** 2, (math.pi * n / q) ** 2


def hard_branch(n: int) -> str:
    return "tan" if n % 2 == 1 else "cot"


def _check_branch(branch: str) -> None:
    if branch not in ("tan", "cot"):
        raise ValueError(f"branch must be 'tan' or 'cot', got {branch!r}")


def branch_function(branch: str, lam, params: PencilParams):
    """``f_tan`` or ``f_cot`` evaluated at ``lam`` (scalar or array)."""
    _check_branch(branch)
    lam = np.asarray(lam, dtype=float)
    s = np.sqrt(lam)
    x = 0.5 * params.q * s
    c = params.coupling
    with np.errstate(divide="ignore", invalid="ignore"):
        if branch == "tan":
            out = lam + c * s * np.tan(x)
        else:
            out = lam - c * s / np.tan(x)
    return out if out.ndim else float(out)


def branch_derivative(branch: str, lam, params: PencilParams):
    _check_branch(branch)
    lam = np.asarray(lam, dtype=float)
    s = np.sqrt(lam)
    x = 0.5 * params.q * s
    c, q = params.coupling, params.q
    with np.errstate(divide="ignore", invalid="ignore"):
        if branch == "tan":
            out = 1 + c * (np.tan(x) / (2 * s) + q / (4 * np.cos(x) ** 2))
        else:
            out = 1 - c * (1 / (np.tan(x) * 2 * s) - q / (4 * np.sin(x) ** 2))
    return out if out.ndim else float(out)


def _range_contains(branch: str, n: int, mu: np.ndarray, params: PencilParams) -> np.ndarray:
    lo, hi = interval_bounds(n, params.q)
    if branch == hard_branch(n):
        return mu > lo
    floor = -2 * params.p * params.omega / params.q**2 if n == 1 else -np.inf
    return (mu < hi) & (mu > floor)


def branch_roots(branch: str, n: int, mus, params: PencilParams) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised root search of ``f_branch(lam) = mu`` on ``J_n``.

    Returns ``(roots, near_pole)``: ``roots`` is NaN where ``mu`` lies outside
    the branch range; ``near_pole`` flags roots that fall inside the pole
    guard band (their value is then the nearest guard edge).
    """
    _check_branch(branch)
    mus = np.atleast_1d(np.asarray(mus, dtype=float))
    lo, hi = interval_bounds(n, params.q)
    roots = np.full(mus.shape, np.nan)
    near_pole = np.zeros(mus.shape, dtype=bool)
    ok = _range_contains(branch, n, mus, params)
    if params.p == 0:
        # both equations collapse to lam = mu
        ok &= (mus > lo) & (mus < hi)
        roots[ok] = mus[ok]
        return roots, near_pole
    if not ok.any():
        return roots, near_pole

    guard = params.pole_guard * (hi - lo)
    a0, b0 = lo + guard, hi - guard
    target = mus[ok]
    ga = branch_function(branch, np.full(target.shape, a0), params) - target
    gb = branch_function(branch, np.full(target.shape, b0), params) - target
    left_pole = ga > 0
    right_pole = gb < 0

    a = np.full(target.shape, a0)
    b = np.full(target.shape, b0)
    active = ~(left_pole | right_pole)
    # bisection until the bracket is two adjacent doubles
    for _ in range(200):
        mid = 0.5 * (a + b)
        live = active & (mid > a) & (mid < b)
        if not live.any():
            break
        g = branch_function(branch, mid, params) - target
        up = live & (g > 0)
        down = live & (g <= 0)
        b = np.where(up, mid, b)
        a = np.where(down, mid, a)
    ga_end = np.abs(branch_function(branch, a, params) - target)
    gb_end = np.abs(branch_function(branch, b, params) - target)
    lam = np.where(ga_end <= gb_end, a, b)
    # one Newton polish, kept only if it stays in the bracket and helps
    g = branch_function(branch, lam, params) - target
    step = lam - g / branch_derivative(branch, lam, params)
    inside = (step >= a) & (step <= b)
    better = inside & (np.abs(branch_function(branch, np.where(inside, step, lam), params) - target) < np.abs(g))
    lam = np.where(better, step, lam)

    lam = np.where(left_pole, a0, lam)
    lam = np.where(right_pole, b0, lam)
    roots[ok] = lam
    near_pole[ok] = left_pole | right_pole
    return roots, near_pole


def branch_root(branch: str, n: int, mu: float, params: PencilParams,
                tol: float = 1e-12) -> Optional[float]:
    """Unique root of ``f_branch(lam) = mu`` in ``J_n``, or None.

    The residual ``|f(lam) - mu| <= tol * max(1, mu)`` is enforced unless the
    root is already pinned between two adjacent doubles, in which case the
    double with the smaller residual is the best representable answer.
    """
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    if not tol > 0:
        raise ValueError("tol must be positive")
    roots, near = branch_roots(branch, n, [mu], params)
    lam = roots[0]
    if np.isnan(lam):
        return None
    if near[0]:
        lo, hi = interval_bounds(n, params.q)
        raise PoleProximity(
            f"{branch}-root for mu={mu} in J_{n} lies within {params.pole_guard:g} x width of "
            f"an endpoint of ({lo:.17g}, {hi:.17g})")
    if params.p > 0:
        res = abs(branch_function(branch, lam, params) - mu)
        if res > tol * max(1.0, mu):
            nxt = np.nextafter(lam, np.inf)
            prv = np.nextafter(lam, -np.inf)
            f_n = branch_function(branch, nxt, params) - mu
            f_p = branch_function(branch, prv, params) - mu
            if not (f_p <= 0 <= f_n or f_p >= 0 >= f_n):
                raise ArithmeticError(f"root refinement failed for mu={mu}: residual {res:g}")
    return float(lam)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PencilRoot:
    """One pencil eigenvalue inside some ``J_n``.

    ``sources`` are 0-based indices into the distinct values of the base
    spectrum; a root of both equations lists the tan source first.
    """

    value: float
    multiplicity: int
    branch: str
    sources: tuple
    near_pole: bool = False


@dataclass(frozen=True)
class IntervalRoots:
    n: int
    lower: float
    upper: float
    roots: tuple

    @property
    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.roots])

    def expanded(self) -> np.ndarray:
        return np.repeat(self.values, [r.multiplicity for r in self.roots])


@dataclass(frozen=True)
class PencilSpectrum:
    params: PencilParams
    intervals: tuple
    accumulation_points: np.ndarray = field(default_factory=lambda: np.empty(0))

    def interval(self, n: int) -> IntervalRoots:
        for block in self.intervals:
            if block.n == n:
                return block
        raise KeyError(n)

    def to_spectrum(self) -> Spectrum:
        vals, mults, tags = [], [], []
        for block in self.intervals:
            for r in block.roots:
                vals.append(r.value)
                mults.append(r.multiplicity)
                tags.append(r.branch)
        order = np.argsort(vals, kind="stable")
        return Spectrum._aggregate(np.asarray(vals)[order], np.asarray(mults, dtype=int)[order],
                                   [tags[i] for i in order], 1e-15, self.accumulation_points)


def _interval_roots(base: Spectrum, params: PencilParams, n: int, cap: Optional[int]) -> IntervalRoots:
    lo, hi = interval_bounds(n, params.q)
    mus = base.values
    found = []
    for branch in ("tan", "cot"):
        idx = np.arange(len(mus))
        if branch == hard_branch(n) and cap is not None:
            eligible = idx[mus > lo]
            keep = np.zeros(len(mus), dtype=bool)
            keep[eligible[:cap]] = True
            idx = idx[keep]
        roots, near = branch_roots(branch, n, mus[idx], params)
        for j, lam, flag in zip(idx, roots, near):
            if not np.isnan(lam):
                found.append((float(lam), int(base.multiplicities[j]), branch, (int(j),), bool(flag)))
    found.sort(key=lambda t: (t[0], t[2] != "tan"))
    merged: list[PencilRoot] = []
    for lam, mult, branch, src, flag in found:
        prev = merged[-1] if merged else None
        if (prev is not None and prev.branch != branch and prev.branch != "both"
                and abs(lam - prev.value) <= MERGE_RTOL * max(lam, prev.value)):
            merged[-1] = PencilRoot(prev.value, prev.multiplicity + mult, "both",
                                    prev.sources + src, prev.near_pole or flag)
        else:
            merged.append(PencilRoot(lam, mult, branch, src, flag))
    return IntervalRoots(n=n, lower=lo, upper=hi, roots=tuple(merged))


def pencil_spectrum(base: Spectrum, params: PencilParams, n_max: int = 3,
                    per_interval_cap: Optional[int] = None) -> PencilSpectrum:
    """Pencil eigenvalues in ``J_1 ... J_{n_max}`` generated by ``base``.

    ``per_interval_cap`` limits how many base values feed the hard branch in
    each interval (the soft branch is always finite).  Multiplicity of a root
    is the multiplicity of its source value, summed when one ``lam`` solves
    both equations.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    blocks = tuple(_interval_roots(base, params, n, per_interval_cap) for n in range(1, n_max + 1))
    acc = np.array([(math.pi * n / params.q) ** 2 for n in range(1, n_max + 1)])
    return PencilSpectrum(params=params, intervals=blocks, accumulation_points=acc)


# ---------------------------------------------------------------------------


def _guard_pole(lam: float, q: float, guard: float) -> None:
    n = round(q * math.sqrt(lam) / math.pi)
    if n >= 1:
        lo, hi = interval_bounds(n, q)
        if abs(lam - hi) <= guard * (hi - lo):
            raise PoleProximity(f"lambda={lam} is within the pole guard of (pi*{n}/q)^2 = {hi}")


def pencil_block(lam: float, mu: float, params: PencilParams) -> np.ndarray:
    """The 2x2 pencil block over a base eigenfunction with eigenvalue ``mu``."""
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if params.p == 0:
        return np.diag([mu - lam, mu - lam]).astype(float)
    _guard_pole(lam, params.q, params.pole_guard)
    s = math.sqrt(lam)
    t = params.q * s
    pref = params.p * params.omega * s / params.q
    ct = pref / math.tan(t)
    cs = pref / math.sin(t)
    d = mu + ct - lam
    return np.array([[d, -cs], [-cs, d]])


def block_factor_product(lam: float, mu: float, params: PencilParams) -> float:
    """``(mu - f_tan(lam)) * (mu - f_cot(lam))``, the factored block determinant."""
    return (mu - branch_function("tan", lam, params)) * (mu - branch_function("cot", lam, params))


class TubeCoefficients(NamedTuple):
    k1: float
    k2: float
    rho_plus: float
    rho_minus: float


def tube_coefficients(lam: float, q: float, pole_guard: float = 1e-9) -> TubeCoefficients:
    """Tube mass coefficients of a limit eigenfunction and the weights rho+-.

    A tube of length ``q`` carrying ``-v'' = lam v`` with end values ``a, b``
    has ``int v^2 = q (k1 (a^2 + b^2) + 2 k2 a b)``.
    """
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if not q > 0:
        raise ValueError(f"q must be positive, got {q}")
    _guard_pole(lam, q, pole_guard)
    t = q * math.sqrt(lam)
    if t < 1e-3:
        t2 = t * t
        k1 = 1 / 3 + 2 * t2 / 45 + 2 * t2 * t2 / 315
        k2 = 1 / 6 + 7 * t2 / 180 + 31 * t2 * t2 / 5040
    else:
        s, c = math.sin(t), math.cos(t)
        den = 2 * t * s * s
        k1 = (t - s * c) / den
        k2 = -(t * c - s) / den
    return TubeCoefficients(k1, k2, 0.5 + 0.5 * (k1 + k2), 0.5 + 0.5 * (k1 - k2))
