"""Finite-difference model of the two-sheet manifold with thin tubes (N = 2).

Each sheet is the unit-weight 5-point Dirichlet grid on the box with mesh
``h = eps / K``.  Holes are sub-grid: the tube over hole ``i`` attaches to
the single grid node at ``x_i = i * eps`` on each sheet.  A tube is a chain
of ``n_t`` segments of length ``h_t = q(eps) / n_t`` whose stiffness and
lumped mass both carry the cross-section measure ``w = 2 pi d(eps)``.

Unknowns are ordered sheet-major::

    [sheet 1 (row-major interior grid) | sheet 2 (same) | tube 0 pos 1..n_t-1 | tube 1 ...]

so the generalized problem ``K u = lam M u`` discretises the quadratic form
``int |grad u|^2`` on the sheets plus ``w int |v'|^2`` on each tube.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .base import box_dirichlet_spectrum, sphere_volume
from .errors import ConvergenceFailure, GeometryError, TubeHomogError
from .limits import eigenvalue_limit
from .regimes import ScalingLaw, classify, limits_from_law

__all__ = [
    "ModelConfig",
    "DiscreteModel",
    "assemble",
    "smallest_eigenpairs",
    "eigenvalues_in_window",
    "sheet_symmetry_indicator",
    "symmetry_half_models",
    "ConvergenceRow",
    "ConvergenceReport",
    "convergence_study",
]

DENSE_LIMIT = 3000


@dataclass(frozen=True)
class ModelConfig:
    """Direct-model parameters.

    ``n_t=None`` picks ``max(4, ceil(q(eps) / h))``.  ``tube_weight``
    overrides ``w = 2 pi d(eps)``; a weight of 0 drops the tubes altogether.
    """

    law: ScalingLaw
    eps: float
    K: int = 4
    n_t: Optional[int] = None
    side_lengths: tuple = (1.0, 1.0)
    tube_weight: Optional[float] = None

    @property
    def h(self) -> float:
        return self.eps / self.K


@dataclass(frozen=True, eq=False)
class DiscreteModel:
    stiffness: sp.csr_matrix
    mass: np.ndarray  # diagonal of M
    grid_shape: tuple  # interior nodes per axis
    tube_sites: np.ndarray  # (n_tubes, 2) interior grid indices of the hole centres
    n_t: int
    h: float
    h_t: float
    weight: float
    eps: float
    d_eps: float
    q_eps: float

    @property
    def n_sheet(self) -> int:
        return int(np.prod(self.grid_shape))

    @property
    def n_tubes(self) -> int:
        return len(self.tube_sites)

    @property
    def dim(self) -> int:
        return self.stiffness.shape[0]

    def sheet_rows(self, sheet: int) -> slice:
        """Rows of sheet 1 or 2."""
        if sheet not in (1, 2):
            raise ValueError("sheet must be 1 or 2")
        start = (sheet - 1) * self.n_sheet
        return slice(start, start + self.n_sheet)

    def sheet_row(self, sheet: int, ix: int, iy: int) -> int:
        """Row of interior grid node (ix, iy), 0-based interior indices."""
        nx, ny = self.grid_shape
        if not (0 <= ix < nx and 0 <= iy < ny):
            raise IndexError((ix, iy))
        return (sheet - 1) * self.n_sheet + ix * ny + iy

    def tube_row(self, tube: int, pos: int) -> int:
        """Row of chain position ``pos``; 0 and ``n_t`` are the junction nodes."""
        if not 0 <= tube < self.n_tubes:
            raise IndexError(tube)
        if pos == 0:
            return self.sheet_row(1, *self.tube_sites[tube])
        if pos == self.n_t:
            return self.sheet_row(2, *self.tube_sites[tube])
        if not 0 < pos < self.n_t:
            raise IndexError(pos)
        return 2 * self.n_sheet + tube * (self.n_t - 1) + (pos - 1)

    def tube_chain(self, tube: int) -> np.ndarray:
        return np.array([self.tube_row(tube, k) for k in range(self.n_t + 1)])

    def split(self, vector) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(sheet 1 grid, sheet 2 grid, tube interior values (n_tubes, n_t - 1))."""
        v = np.asarray(vector)
        s1 = v[self.sheet_rows(1)].reshape(self.grid_shape)
        s2 = v[self.sheet_rows(2)].reshape(self.grid_shape)
        tubes = v[2 * self.n_sheet:].reshape(self.n_tubes, self.n_t - 1) if self.n_tubes else v[:0].reshape(0, 0)
        return s1, s2, tubes


def _divides(length: float, step: float) -> int:
    n = length / step
    k = int(round(n))
    if k < 1 or abs(n - k) > 1e-9 * max(1.0, n):
        raise GeometryError(f"{step} does not divide side length {length}")
    return k


def _hole_cells(side_lengths, eps, K) -> np.ndarray:
    """Interior grid indices of lattice points i*eps with dist to boundary >= eps/2."""
    axes = []
    for a in side_lengths:
        cells = _divides(a, eps)
        i = np.arange(1, cells)  # i*eps with 1 <= i <= cells-1 keeps distance >= eps
        axes.append(i * K - 1)
    if any(len(ax) == 0 for ax in axes):
        return np.empty((0, 2), dtype=int)
    gx, gy = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([gx.ravel(), gy.ravel()])


def assemble(config: ModelConfig) -> DiscreteModel:
    """Stiffness and lumped mass of the direct model."""
    law = config.law
    if law.N != 2:
        raise GeometryError(f"the direct model is two-dimensional; got N = {law.N}")
    if len(config.side_lengths) != 2:
        raise GeometryError("side_lengths must have two entries")
    if config.K < 1:
        raise GeometryError("grid refinement K must be >= 1")
    eps, h = float(config.eps), config.h
    for a in config.side_lengths:
        _divides(a, eps)
    counts = [_divides(a, h) for a in config.side_lengths]
    if min(counts) < 2:
        raise GeometryError("grid has no interior nodes")
    d_eps, q_eps = law.d(eps), law.q(eps)
    if d_eps > h:
        raise GeometryError(f"hole radius d(eps) = {d_eps:g} exceeds the mesh size h = {h:g}")
    w = sphere_volume(2) * d_eps if config.tube_weight is None else float(config.tube_weight)
    if w < 0:
        raise GeometryError("tube weight must be non-negative")
    n_t = config.n_t if config.n_t is not None else max(4, math.ceil(q_eps / h - 1e-9))
    if n_t < 2:
        raise GeometryError("tube chains need n_t >= 2")
    h_t = q_eps / n_t

    grid_shape = (counts[0] - 1, counts[1] - 1)
    n_sheet = grid_shape[0] * grid_shape[1]
    T = [sp.diags([-np.ones(n - 1), 2 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1]) for n in grid_shape]
    lap = sp.kron(T[0], sp.identity(grid_shape[1])) + sp.kron(sp.identity(grid_shape[0]), T[1])
    blocks = [lap, lap]
    mass = [np.full(2 * n_sheet, h * h)]

    sites = _hole_cells(config.side_lengths, eps, config.K) if w > 0 else np.empty((0, 2), dtype=int)
    n_tubes = len(sites)
    dim = 2 * n_sheet + n_tubes * (n_t - 1)
    K = sp.block_diag(blocks, format="coo")
    rows, cols, vals = [K.row], [K.col], [K.data]
    M = np.zeros(dim)
    M[: 2 * n_sheet] = mass[0]

    if n_tubes:
        g = sites[:, 0] * grid_shape[1] + sites[:, 1]
        chain = np.empty((n_tubes, n_t + 1), dtype=int)
        chain[:, 0] = g
        chain[:, n_t] = n_sheet + g
        chain[:, 1:n_t] = 2 * n_sheet + np.arange(n_tubes)[:, None] * (n_t - 1) + np.arange(n_t - 1)[None, :]
        a, b = chain[:, :-1].ravel(), chain[:, 1:].ravel()
        k = w / h_t
        rows += [a, b, a, b]
        cols += [a, b, b, a]
        vals += [np.full(a.shape, k), np.full(a.shape, k), np.full(a.shape, -k), np.full(a.shape, -k)]
        M[2 * n_sheet:] = w * h_t
        np.add.at(M, chain[:, 0], 0.5 * w * h_t)
        np.add.at(M, chain[:, n_t], 0.5 * w * h_t)

    stiff = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim))
    stiff.sum_duplicates()
    return DiscreteModel(stiffness=stiff, mass=M, grid_shape=grid_shape, tube_sites=sites,
                         n_t=n_t, h=h, h_t=h_t, weight=w, eps=eps, d_eps=d_eps, q_eps=q_eps)


def _residuals(K, Mdiag, vals, vecs) -> np.ndarray:
    R = K @ vecs - (Mdiag[:, None] * vecs) * vals[None, :]
    scale = np.linalg.norm(Mdiag[:, None] * vecs, axis=0) * np.maximum(1.0, np.abs(vals))
    return np.linalg.norm(R, axis=0) / scale


def _generalized_eigs(K, Mdiag, k, sigma, dense):
    n = K.shape[0]
    if dense:
        s = 1.0 / np.sqrt(Mdiag)
        A = (s[:, None] * K.toarray()) * s[None, :]
        if sigma is None:
            vals, y = scipy.linalg.eigh(A, subset_by_index=[0, k - 1])
        else:
            vals, y = scipy.linalg.eigh(A)
        return vals, s[:, None] * y
    M = sp.diags(Mdiag).tocsc()
    vals, vecs = spla.eigsh(K.tocsc(), k=k, M=M, sigma=0.0 if sigma is None else sigma, which="LM",
                            v0=np.ones(n), tol=0, ncv=min(n, max(2 * k + 1, k + 32)))
    return vals, vecs


def smallest_eigenpairs(model: DiscreteModel, m: int, tol: float = 1e-8,
                        dense: Optional[bool] = None) -> tuple[np.ndarray, np.ndarray]:
    """The ``m`` smallest eigenpairs of ``K u = lam M u``.

    Vectors are M-orthonormal columns.  Raises :class:`ConvergenceFailure`
    when some relative residual exceeds ``tol``.
    """
    n = model.dim
    if not 1 <= m <= n:
        raise ValueError(f"m must lie in [1, {n}], got {m}")
    if dense is None:
        dense = n < DENSE_LIMIT or m >= n - 1
    try:
        vals, vecs = _generalized_eigs(model.stiffness, model.mass, m, None, dense)
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceFailure(f"ARPACK did not converge: {exc}") from exc
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    # fix the gauge: unit M-norm and a positive largest component
    norms = np.sqrt(np.einsum("ij,i,ij->j", vecs, model.mass, vecs))
    vecs = vecs / norms
    sign = np.sign(vecs[np.argmax(np.abs(vecs), axis=0), np.arange(vecs.shape[1])])
    vecs = vecs * sign
    res = _residuals(model.stiffness, model.mass, vals, vecs)
    if np.any(res > tol):
        raise ConvergenceFailure(f"residual {res.max():.3g} exceeds tolerance {tol:g}")
    return vals, vecs


def eigenvalues_in_window(model: DiscreteModel, lo: float, hi: float) -> np.ndarray:
    """All eigenvalues in the open interval ``(lo, hi)``.

    Shift-invert about the midpoint, enlarging the request until the
    returned set reaches past both ends of the window.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    n = model.dim
    if n < DENSE_LIMIT:
        vals, _ = _generalized_eigs(model.stiffness, model.mass, n, 0.0, True)
        return np.sort(vals[(vals > lo) & (vals < hi)])
    sigma, radius = 0.5 * (lo + hi), 0.5 * (hi - lo)
    k = 32
    while True:
        k = min(k, n - 1)
        try:
            vals = spla.eigsh(model.stiffness.tocsc(), k=k, M=sp.diags(model.mass).tocsc(), sigma=sigma,
                              which="LM", v0=np.ones(n), tol=1e-12, return_eigenvectors=False,
                              ncv=min(n, 2 * k + 1))
        except spla.ArpackNoConvergence as exc:
            raise ConvergenceFailure(f"ARPACK did not converge in window search: {exc}") from exc
        if np.max(np.abs(vals - sigma)) > radius or k == n - 1:
            return np.sort(vals[(vals > lo) & (vals < hi)])
        k *= 2


def sheet_symmetry_indicator(model: DiscreteModel, vector) -> float:
    """M-weighted correlation of the two sheet restrictions, in [-1, 1]."""
    v = np.asarray(vector, dtype=float)
    if v.shape != (model.dim,):
        raise ValueError(f"vector must have shape ({model.dim},)")
    s1, s2 = v[model.sheet_rows(1)], v[model.sheet_rows(2)]
    m1, m2 = model.mass[model.sheet_rows(1)], model.mass[model.sheet_rows(2)]
    a = float(np.sum(m1 * s1 * s2))
    n1, n2 = float(np.sum(m1 * s1 * s1)), float(np.sum(m2 * s2 * s2))
    if n1 == 0 or n2 == 0:
        return 0.0
    return float(np.clip(a / math.sqrt(n1 * n2), -1.0, 1.0))


def symmetry_half_models(model: DiscreteModel):
    """Stiffness/mass pairs on the sheet-swap symmetric and antisymmetric subspaces.

    Swapping the sheets reflects every tube through its midpoint.  Returns
    ``((K_sym, M_sym), (K_anti, M_anti))`` with ``M_*`` as diagonals; the two
    spectra together are exactly the spectrum of the full model.
    """
    n_sheet, n_t = model.n_sheet, model.n_t
    cols_s, cols_a = [], []
    for g in range(n_sheet):
        cols_s.append(([g, n_sheet + g], [1.0, 1.0]))
        cols_a.append(([g, n_sheet + g], [1.0, -1.0]))
    for t in range(model.n_tubes):
        for k in range(1, (n_t + 1) // 2):
            a, b = model.tube_row(t, k), model.tube_row(t, n_t - k)
            cols_s.append(([a, b], [1.0, 1.0]))
            cols_a.append(([a, b], [1.0, -1.0]))
        if n_t % 2 == 0:
            cols_s.append(([model.tube_row(t, n_t // 2)], [1.0]))

    def basis(cols):
        r = np.concatenate([np.asarray(c[0]) for c in cols])
        c = np.concatenate([np.full(len(x[0]), j) for j, x in enumerate(cols)])
        v = np.concatenate([np.asarray(x[1]) for x in cols])
        return sp.csr_matrix((v, (r, c)), shape=(model.dim, len(cols)))

    out = []
    M = sp.diags(model.mass)
    for cols in (cols_s, cols_a):
        P = basis(cols)
        out.append(((P.T @ model.stiffness @ P).tocsr(), np.asarray((P.T @ M @ P).diagonal())))
    return tuple(out)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceRow:
    eps: float
    computed: tuple
    predicted: tuple
    rel_errors: tuple
    dim: int = 0
    ground_symmetry: Optional[float] = None
    window_count: Optional[int] = None
    seconds: float = 0.0
    error: Optional[str] = None


@dataclass(frozen=True)
class ConvergenceReport:
    regime: str
    eps_list: tuple
    rows: tuple
    verdicts: dict = field(default_factory=dict)
    threshold: float = 0.1

    def errors(self, index: int = 0) -> np.ndarray:
        """Relative error of eigenvalue ``index`` (0-based) across the rows."""
        return np.array([r.rel_errors[index] if r.error is None else np.nan for r in self.rows])


def _study_row(law, eps, m, predicted, K, n_t, side_lengths, tol, window) -> ConvergenceRow:
    t0 = time.perf_counter()
    try:
        model = assemble(ModelConfig(law=law, eps=eps, K=K, n_t=n_t, side_lengths=tuple(side_lengths)))
        vals, vecs = smallest_eigenpairs(model, m, tol=tol)
        sym = sheet_symmetry_indicator(model, vecs[:, 0])
        count = None
        if window is not None:
            count = int(len(eigenvalues_in_window(model, *window)))
        rel = tuple(float(abs(v - p) / p) for v, p in zip(vals, predicted))
        return ConvergenceRow(eps=eps, computed=tuple(float(v) for v in vals), predicted=tuple(predicted),
                              rel_errors=rel, dim=model.dim, ground_symmetry=sym, window_count=count,
                              seconds=time.perf_counter() - t0)
    except TubeHomogError as exc:
        return ConvergenceRow(eps=eps, computed=(), predicted=tuple(predicted), rel_errors=(),
                              seconds=time.perf_counter() - t0, error=f"{type(exc).__name__}: {exc}")


def convergence_study(law: ScalingLaw, eps_list: Sequence[float], m: int = 1, K: int = 4,
                      n_t: Optional[int] = None, side_lengths=(1.0, 1.0), threshold: float = 0.1,
                      tol: float = 1e-8, window=None, base_count: Optional[int] = None,
                      max_workers: int = 1) -> ConvergenceReport:
    """Solve the direct model along ``eps_list`` and compare with the limits.

    The verdict passes iff the relative error of the first eigenvalue
    decreases strictly along ``eps_list`` and ends below ``threshold``.
    ``window=(lo, hi)`` additionally counts direct eigenvalues in that range.
    """
    eps_list = [float(e) for e in eps_list]
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must be strictly decreasing")
    problem = classify(limits_from_law(law), law.N)
    base = box_dirichlet_spectrum(side_lengths, base_count or max(4 * m, 64))
    predicted = tuple(eigenvalue_limit(problem, base, j).limit_value for j in range(1, m + 1))

    args = [(law, e, m, predicted, K, n_t, side_lengths, tol, window) for e in eps_list]
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(lambda a: _study_row(*a), args))
    else:
        rows = [_study_row(*a) for a in args]

    ok_rows = all(r.error is None for r in rows)
    errs = [r.rel_errors[0] for r in rows] if ok_rows else []
    monotone = ok_rows and all(b < a for a, b in zip(errs, errs[1:]))
    final = ok_rows and bool(errs) and errs[-1] < threshold
    verdicts = {"all_rows_solved": ok_rows, "monotone_error": monotone,
                "final_below_threshold": final, "pass": bool(monotone and final)}
    return ConvergenceReport(regime=problem.kind, eps_list=tuple(eps_list), rows=tuple(rows),
                             verdicts=verdicts, threshold=threshold)
