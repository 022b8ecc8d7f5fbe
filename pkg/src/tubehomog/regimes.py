"""Scaling laws, their limits, and the choice of homogenized problem.

Hole radius ``d(eps)`` and tube length ``q(eps)`` are described exactly:
power-law exponents are :class:`fractions.Fraction` so that every limit
``C * eps**gamma`` is decided by the sign of ``gamma`` alone.  No limit is
ever approximated by evaluating at a small ``eps``.

Five limits matter::

    p = lim d^(N-1) q / eps^N          q = lim q(eps)
    r = lim d^(N-1) / (eps^N q)        D = lim D(eps) / eps^N
    Q = lim q / d          (N > 2)     Q = lim q / (d |ln d|)   (N = 2)

with ``D(eps) = d^(N-2)`` for N > 2 and ``|ln d|^-1`` for N = 2.  ``Q`` is
only meaningful when ``0 < D < inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .base import sphere_volume
from .errors import InadmissibleLaw, MissingQ, UncoveredRegime

INF = math.inf

__all__ = [
    "PowerLaw",
    "Exponential",
    "ScalingLaw",
    "RegimeLimits",
    "Pencil",
    "DecoupledThreshold",
    "ScaledLaplacian",
    "Coupled",
    "HomogenizedProblem",
    "limits_from_law",
    "classify",
    "coupling_constant",
    "phase_point",
    "PHASE_LABELS",
]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        # floats are accepted only when they are exact dyadic values the
        # caller clearly meant (e.g. 1.5); limit_denominator keeps 0.1 -> 1/10
        return Fraction(x).limit_denominator(10**9)
    return Fraction(x)


@dataclass(frozen=True)
class PowerLaw:
    """``coef * eps**exponent`` with an exact rational exponent."""

    coef: float
    exponent: Fraction

    def __post_init__(self):
        object.__setattr__(self, "exponent", _frac(self.exponent))
        object.__setattr__(self, "coef", float(self.coef))
        if not self.coef > 0:
            raise InadmissibleLaw(f"power-law coefficient must be positive, got {self.coef}")

    def __call__(self, eps: float) -> float:
        return self.coef * eps ** float(self.exponent)


@dataclass(frozen=True)
class Exponential:
    """``exp(-a / eps**2)``; only used for the hole radius when N = 2."""

    a: float

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        if not self.a > 0:
            raise InadmissibleLaw(f"exponential rate a must be positive, got {self.a}")

    def __call__(self, eps: float) -> float:
        return math.exp(-self.a / eps**2)


@dataclass(frozen=True)
class ScalingLaw:
    """Hole radius ``d(eps)`` and tube length ``q(eps)`` in dimension ``N``.

    Construction only checks that the pieces are well formed; whether the
    law satisfies the standing assumptions is asked via
    :meth:`admissibility_failures`.
    """

    N: int
    d_form: Union[PowerLaw, Exponential]
    q_form: PowerLaw

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise InadmissibleLaw(f"dimension N must be an integer >= 2, got {self.N}")
        object.__setattr__(self, "N", int(self.N))

    @classmethod
    def power(cls, N: int, alpha, beta, d0: float = 1.0, q0: float = 1.0) -> "ScalingLaw":
        """``d = d0 eps^alpha``, ``q = q0 eps^beta``."""
        return cls(N, PowerLaw(d0, alpha), PowerLaw(q0, beta))

    @classmethod
    def exponential(cls, a: float, beta, q0: float = 1.0, N: int = 2) -> "ScalingLaw":
        """``d = exp(-a / eps^2)``, ``q = q0 eps^beta``."""
        return cls(N, Exponential(a), PowerLaw(q0, beta))

    @property
    def alpha(self) -> Optional[Fraction]:
        return self.d_form.exponent if isinstance(self.d_form, PowerLaw) else None

    @property
    def beta(self) -> Fraction:
        return self.q_form.exponent

    def d(self, eps: float) -> float:
        return self.d_form(eps)

    def q(self, eps: float) -> float:
        return self.q_form(eps)

    def admissibility_failures(self) -> list[str]:
        """Human-readable list of violated conditions (empty when admissible)."""
        out = []
        N, beta = self.N, self.beta
        if beta < 0:
            out.append(f"beta >= 0 fails (beta = {beta}): q(eps) is unbounded, q = inf")
        if isinstance(self.d_form, Exponential):
            if N != 2:
                out.append(f"exponential hole radius is only supported for N = 2 (got N = {N})")
            return out
        alpha = self.d_form.exponent
        if not alpha > 1:
            out.append(f"alpha > 1 fails (alpha = {alpha}): d/eps does not tend to 0")
        gamma_p = alpha * (N - 1) + beta - N
        if gamma_p < 0:
            out.append(
                f"alpha*(N-1) + beta - N >= 0 fails ({alpha}*{N - 1} + {beta} - {N} = {gamma_p}): p = inf"
            )
        return out

    def is_admissible(self) -> bool:
        return not self.admissibility_failures()


def _power_limit(coef: float, gamma: Fraction) -> float:
    """Limit of ``coef * eps**gamma`` as eps -> 0+."""
    if gamma > 0:
        return 0.0
    if gamma == 0:
        return float(coef)
    return INF


@dataclass(frozen=True)
class RegimeLimits:
    """Extended non-negative limits; ``math.inf`` stands for +infinity.

    ``Q`` is ``None`` unless ``0 < D < inf``.
    """

    p: float
    q: float
    r: float
    D: float
    Q: Optional[float] = None

    def __post_init__(self):
        for name in ("p", "q", "r", "D", "Q"):
            v = getattr(self, name)
            if v is None:
                continue
            if math.isnan(v) or v < 0:
                raise ValueError(f"limit {name} must be a non-negative extended real, got {v}")


def limits_from_law(law: ScalingLaw) -> RegimeLimits:
    """Exact limits p, q, r, D (and Q when ``0 < D < inf``) of a scaling law."""
    failures = law.admissibility_failures()
    if failures:
        raise InadmissibleLaw("; ".join(failures))
    N = law.N
    q0, beta = law.q_form.coef, law.beta
    q = _power_limit(q0, beta)

    if isinstance(law.d_form, Exponential):
        # d = exp(-a/eps^2) beats every power of eps
        a = law.d_form.a
        return RegimeLimits(p=0.0, q=q, r=0.0, D=1.0 / a, Q=INF)

    d0, alpha = law.d_form.coef, law.d_form.exponent
    p = _power_limit(d0 ** (N - 1) * q0, alpha * (N - 1) + beta - N)
    r = _power_limit(d0 ** (N - 1) / q0, alpha * (N - 1) - N - beta)
    if N == 2:
        # |ln(d0 eps^alpha)|^-1 / eps^2 -> inf for every alpha
        D = INF
    else:
        D = _power_limit(d0 ** (N - 2), alpha * (N - 2) - N)
    Q = None
    if 0 < D < INF:
        # only N > 2 reaches here for power laws
        Q = _power_limit(q0 / d0, beta - alpha)
    return RegimeLimits(p=p, q=q, r=r, D=D, Q=Q)


# ---------------------------------------------------------------------------
# homogenized problems


@dataclass(frozen=True)
class Pencil:
    """Nonlinear pencil; both p and q positive."""

    p: float
    q: float
    omega: float
    kind = "pencil"


@dataclass(frozen=True)
class DecoupledThreshold:
    """p = 0, q > 0: two decoupled Laplacians plus the points (pi n / q)^2."""

    q: float
    kind = "decoupled"


@dataclass(frozen=True)
class ScaledLaplacian:
    """q = 0, r = D = inf: the operator ``-c * Laplacian``."""

    c: float
    kind = "scaled"

    def __post_init__(self):
        if not 0 < self.c <= 1:
            raise ValueError(f"scale c must lie in (0, 1], got {self.c}")


@dataclass(frozen=True)
class Coupled:
    """q = 0 with finite r or finite D: two sheets coupled by a constant V."""

    V: float
    kind = "coupled"

    def __post_init__(self):
        if not self.V >= 0:
            raise ValueError(f"coupling constant must be non-negative, got {self.V}")


HomogenizedProblem = Union[Pencil, DecoupledThreshold, ScaledLaplacian, Coupled]


def _check_finite_pq(limits: RegimeLimits) -> None:
    bad = [n for n in ("p", "q") if getattr(limits, n) == INF]
    if bad:
        raise InadmissibleLaw(f"{' and '.join(bad)} must be finite, got inf")


def coupling_constant(limits: RegimeLimits, N: int, omega: float) -> float:
    """Constant potential V of the coupled two-sheet problem."""
    r, D, Q = limits.r, limits.D, limits.Q
    if limits.q != 0:
        raise UncoveredRegime(f"coupling constant needs q = 0, got q = {limits.q}")
    if D == INF:
        if r == INF:
            raise UncoveredRegime("coupling constant needs r < inf or D < inf (got r = D = inf)")
        return r * omega
    if D == 0:
        return 0.0
    if Q is None:
        raise MissingQ("0 < D < inf requires the limit Q, which is missing")
    if Q == INF:
        return 0.0
    if N > 2:
        return (N - 2) * omega * D / (2 + (N - 2) * Q)
    return 2 * math.pi * D / (2 + Q)


def classify(limits: RegimeLimits, N: int, omega: Optional[float] = None) -> HomogenizedProblem:
    """Pick the homogenized problem from the limits alone.

    ``omega`` defaults to the area of the unit sphere in R^N.
    """
    _check_finite_pq(limits)
    if omega is None:
        omega = sphere_volume(N)
    omega = float(omega)
    p, q = limits.p, limits.q
    if q > 0:
        if p > 0:
            return Pencil(p=p, q=q, omega=omega)
        return DecoupledThreshold(q=q)
    r, D = limits.r, limits.D
    if D is None:
        raise UncoveredRegime("q = 0 requires the limit D, which is missing")
    if D == INF:
        if r is None:
            raise UncoveredRegime("q = 0 and D = inf require the limit r, which is missing")
        if r == INF:
            return ScaledLaplacian(c=1.0 / (1.0 + 0.5 * p * omega))
    return Coupled(V=coupling_constant(limits, N, omega))


# ---------------------------------------------------------------------------
# the (alpha, beta) phase diagram for d = d0 eps^alpha, q = q0 eps^beta

PHASE_LABELS = (
    "A", "B", "C", "D", "E", "F", "G",
    "segment(B,C)", "ray(C,D)", "segment(C,E)", "ray(E,F)", "segment(E,G)",
    "Σ1", "Σ2", "inadmissible",
)


def phase_point(law: ScalingLaw) -> str:
    """Region of the (alpha, beta) plane a power law falls in (N > 2).

    A, D and F sit at infinity and B has alpha = 1, so finite admissible
    points only ever receive the remaining labels.
    """
    if not isinstance(law.d_form, PowerLaw) or law.N <= 2:
        raise ValueError("phase_point needs a power-law hole radius and N > 2")
    N = law.N
    a, b = law.alpha, law.beta
    if not law.is_admissible():
        return "inadmissible"
    aC = Fraction(N, N - 1)
    aE = Fraction(N, N - 2)
    on_bc = a * (N - 1) + b - N == 0  # lower boundary, p > 0
    ce_gap = a * (N - 1) - N - b      # sign of the r-exponent
    if b == 0:
        if a == aC:
            return "C"
        if a == aE:
            return "G"
        return "ray(C,D)"
    if on_bc:
        return "segment(B,C)"
    if a == aE:
        if b == aE:
            return "E"
        return "ray(E,F)" if b > aE else "segment(E,G)"
    if a > aE:
        return "Σ2"
    if ce_gap == 0:
        return "segment(C,E)"
    return "Σ1" if ce_gap < 0 else "Σ2"
