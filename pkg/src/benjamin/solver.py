"""Solitary-wave profiles: closed forms, Petviashvili iteration, constrained descent.

Two independent routes reach the same ground state:

* :func:`petviashvili` iterates ``phi <- m^s p(D)^{-1}(phi^2/2)`` with the
  stabilizing factor ``m = <p(D) phi, phi> / <phi^2/2, phi>``.
* :func:`constrained_minimize` minimizes ``I`` on the level set ``K = lambda``
  by projected descent with cube-root renormalization, and returns the
  Lagrange multiplier ``mu = 2 I / (3 K)``.  :func:`rescale_to_ground_state`
  turns ``(minimizer, mu)`` into ``mu * minimizer``, a solution of the
  unit-nonlinearity equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .functionals import (
    FunctionalReport,
    ModelParams,
    coercivity_check,
    coercivity_threshold,
    cubic_K,
    functional_report,
    grid_symbol,
    profile_residual,
    quad_I,
    symbol_min,
)
from .grid import Grid, make_grid


class SolverError(RuntimeError):
    """Base class for solver failures."""


class NotCoerciveError(SolverError, ValueError):
    """The dispersion symbol is not bounded below by a positive constant."""


class DivergenceError(SolverError):
    """The iteration failed to reach the requested residual."""


class DilationError(SolverError):
    """A dilated profile could not be represented on the requested grid."""


@dataclass(frozen=True)
class SolveConfig:
    tolerance: float = 1e-10
    max_iterations: int = 1000
    stabilizer_exponent: float = 2.0
    step_size: float = 1.0
    constraint_level: float = 1.0

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.step_size > 0:
            raise ValueError("step_size must be positive")


@dataclass
class SolitaryWave:
    params: ModelParams
    grid: Grid
    profile: np.ndarray
    residual_l2: float
    iterations: int
    report: FunctionalReport
    tolerance: float = 1e-10
    multiplier_mu: float | None = None
    stabilizer_history: list = field(default_factory=list, repr=False)

    @property
    def x(self):
        return self.grid.x


def _require_coercive(p: ModelParams):
    if not coercivity_check(p):
        m, _ = symbol_min(p)
        raise NotCoerciveError(
            f"symbol c + beta|xi| + alpha xi^2 has minimum {m:.6g} <= 0 for "
            f"{p}; need beta > -2 sqrt(c alpha) = {coercivity_threshold(p):.6g}"
        )


# -- closed forms -----------------------------------------------------------


def _sech2(y):
    # overflow-free sech^2
    e = np.exp(-2.0 * np.abs(y))
    return 4.0 * e / (1.0 + e) ** 2


def q_kdv(c: float, grid: Grid) -> np.ndarray:
    """KdV soliton ``3c sech^2(sqrt(c) x / 2)``."""
    if not c > 0:
        raise ValueError(f"speed must be positive, got {c!r}")
    return 3.0 * c * _sech2(0.5 * math.sqrt(c) * grid.x)


def q_bo(c: float, grid: Grid) -> np.ndarray:
    """Benjamin-Ono soliton ``4c / (1 + c^2 x^2)``."""
    if not c > 0:
        raise ValueError(f"speed must be positive, got {c!r}")
    return 4.0 * c / (1.0 + (c * grid.x) ** 2)


def default_initial(p: ModelParams, grid: Grid) -> np.ndarray:
    """Seed profile: KdV shape when ``alpha`` dominates, BO shape when ``beta`` does."""
    c = p.c
    kdv = bo = None
    if p.alpha > 0:
        kdv = 3.0 * c * _sech2(0.5 * math.sqrt(c / p.alpha) * grid.x)
    if p.beta > 0:
        bo = 4.0 * c / (1.0 + (c * grid.x / p.beta) ** 2)
    if bo is None:
        return kdv
    if kdv is None:
        return bo
    # linear blend in log(beta/alpha) over [1/2, 2]
    w = np.clip(0.5 - math.log(p.beta / p.alpha) / (2.0 * math.log(2.0)), 0.0, 1.0)
    return w * kdv + (1.0 - w) * bo


# -- Petviashvili -------------------------------------------------------------


def petviashvili(
    p: ModelParams,
    grid: Grid,
    initial=None,
    cfg: SolveConfig = SolveConfig(),
) -> SolitaryWave:
    """Solve ``p(D) phi = phi^2 / 2`` by the stabilized fixed-point iteration.

    Iterates until the L2 residual of the profile equation drops below
    ``cfg.tolerance``.  The iterate is symmetrized about ``x = 0`` each step.
    """
    _require_coercive(p)
    phi = default_initial(p, grid) if initial is None else np.array(initial, dtype=float)
    if phi.shape != (grid.n_points,) or not np.any(phi):
        raise ValueError("initial profile must be a nonzero field on the grid")
    phi = grid.symmetrize(phi)

    sym = grid_symbol(grid, p)
    s = cfg.stabilizer_exponent
    history = []
    for it in range(1, cfg.max_iterations + 1):
        F = grid.forward(phi)
        N = grid.forward(0.5 * phi * phi)
        den = np.real(np.vdot(F, N))
        if not den > 0:
            raise DivergenceError(f"stabilizing factor undefined at iteration {it}")
        m = np.real(np.vdot(F, sym * F)) / den
        history.append(m)
        phi = grid.symmetrize(grid.inverse(m**s * N / sym))
        if not np.all(np.isfinite(phi)):
            raise DivergenceError(f"non-finite iterate at iteration {it}")
        _, res = profile_residual(phi, grid, p)
        if res <= cfg.tolerance:
            return SolitaryWave(
                params=p,
                grid=grid,
                profile=phi,
                residual_l2=res,
                iterations=it,
                report=functional_report(phi, grid, p),
                tolerance=cfg.tolerance,
                stabilizer_history=history,
            )
    raise DivergenceError(
        f"no convergence in {cfg.max_iterations} iterations: residual {res:.3e}, "
        f"stabilizer {history[-1]:.12f}"
    )


# -- constrained minimization ---------------------------------------------------


def _renormalize(phi, grid, level):
    K = cubic_K(phi, grid)
    if not K > 0:
        raise DivergenceError("cubic functional left the positive cone")
    return np.cbrt(level / K) * phi


def constrained_minimize(
    p: ModelParams,
    grid: Grid,
    cfg: SolveConfig = SolveConfig(),
    initial=None,
) -> tuple[np.ndarray, float]:
    """Minimize ``I`` over even fields with ``K = cfg.constraint_level``.

    The descent direction is the ``I``-gradient taken in the metric of ``I``
    itself (i.e. the L2 gradient ``p(D) phi`` preconditioned by ``p(D)^{-1}``),
    projected onto the tangent space ``{v : <phi^2/2, v> = 0}`` of the
    constraint.  After each step the constraint is restored exactly by the
    cube-root rescale.  Steps that increase ``I`` are halved.

    Returns the minimizer and the multiplier ``mu = 2 I / (3 K)``; on exit
    the Euler-Lagrange residual ``||p(D) phi - mu phi^2/2||`` is at most
    ``cfg.tolerance``.
    """
    _require_coercive(p)
    level = cfg.constraint_level
    if not level > 0:
        raise ValueError(f"constraint level must be positive, got {level!r}")
    phi = default_initial(p, grid) if initial is None else np.array(initial, dtype=float)
    phi = _renormalize(grid.symmetrize(phi), grid, level)

    sym = grid_symbol(grid, p)
    I = quad_I(phi, grid, p)
    step = cfg.step_size
    for it in range(1, cfg.max_iterations + 1):
        F = grid.forward(phi)
        N = grid.forward(0.5 * phi * phi)
        mu = 2.0 * I / (3.0 * level)
        el = grid.inverse(sym * F - mu * N)
        if grid.l2_norm(el) <= cfg.tolerance:
            return phi, mu
        # preconditioned gradient of I is phi; of K it is p^{-1} N
        PN = N / sym
        proj = np.real(np.vdot(N, F)) / np.real(np.vdot(N, PN))
        direction = grid.inverse(F - proj * PN)
        while True:
            trial = _renormalize(grid.symmetrize(phi - step * direction), grid, level)
            I_trial = quad_I(trial, grid, p)
            if I_trial <= I * (1 + 1e-15):
                break
            step *= 0.5
            if step < 1e-12 * cfg.step_size:
                raise DivergenceError(f"descent stagnated at iteration {it}")
        phi, I = trial, I_trial
        if not np.all(np.isfinite(phi)):
            raise DivergenceError(f"non-finite iterate at iteration {it}")
    raise DivergenceError(
        f"constrained descent did not converge in {cfg.max_iterations} iterations"
    )


def rescale_to_ground_state(
    minimizer,
    mu: float,
    grid: Grid,
    p: ModelParams,
    tolerance: float = 1e-10,
) -> SolitaryWave:
    """Map a constrained minimizer to a solution of ``p(D) psi = psi^2/2``.

    The minimizer solves ``p(D) phi = (mu/2) phi^2``; multiplying by ``mu``
    shows that ``psi = mu phi`` solves the unit-coefficient equation.  The
    residual scales by ``mu`` too, so it is checked against
    ``tolerance * max(1, mu)``.
    """
    if not mu > 0:
        raise ValueError(f"Lagrange multiplier must be positive, got {mu!r}")
    psi = mu * np.asarray(minimizer, dtype=float)
    _, res = profile_residual(psi, grid, p)
    limit = tolerance * max(1.0, mu)
    if res > limit:
        raise SolverError(f"rescaled profile has residual {res:.3e} > {limit:.3e}")
    return SolitaryWave(
        params=p,
        grid=grid,
        profile=psi,
        residual_l2=res,
        iterations=0,
        report=functional_report(psi, grid, p),
        tolerance=tolerance,
        multiplier_mu=mu,
    )


def ground_state(p: ModelParams, grid: Grid, cfg: SolveConfig = SolveConfig(), initial=None):
    """Even ground state via Petviashvili (the default route)."""
    return petviashvili(p, grid, initial, cfg)


# -- dilation -----------------------------------------------------------------


def _interpolate(f, grid: Grid, points):
    """Trigonometric interpolant of ``f`` at arbitrary ``points`` in ``[-L, L)``."""
    F = grid.forward(f)
    xi = grid.wavenumbers
    keep = ~grid.nyquist
    E = np.exp(1j * np.outer(points, xi[keep]))
    return (E @ F[keep]).real / grid.length


def dilate(w: SolitaryWave, lam: float, grid: Grid | None = None) -> SolitaryWave:
    """``lam^2 phi(lam x)``: a solution for speed ``c lam^2`` and BO term ``|lam| beta``.

    By default the result lives on the dilated grid ``(N, L/|lam|)``, where
    the samples carry over exactly.  Passing ``grid`` resamples the dilated
    profile there by trigonometric interpolation; points mapping outside the
    source period are set to zero, which is only accurate for profiles that
    have decayed to round-off at the boundary.  The residual is re-checked
    against ten times the source tolerance, scaled by ``|lam|^3.5`` when
    ``|lam| > 1``.
    """
    if lam == 0 or not math.isfinite(lam):
        raise ValueError("dilation factor must be finite and nonzero")
    p = w.params
    a = abs(lam)
    q = ModelParams(p.c * lam**2, p.alpha, a * p.beta)
    src = w.grid
    natural = make_grid(src.n_points, src.half_length / a)
    target = natural if grid is None else grid
    if target == natural:
        # phi is even, so the sign of lam does not matter
        prof = lam**2 * np.array(w.profile)
    else:
        pts = a * target.x
        inside = np.abs(pts) < src.half_length
        prof = np.zeros(target.n_points)
        prof[inside] = lam**2 * _interpolate(w.profile, src, pts[inside])
    _, res = profile_residual(prof, target, q)
    # the residual field maps to lam^4 r(lam x), whose L2 norm is |lam|^3.5 ||r||
    limit = 10.0 * w.tolerance * max(1.0, a**3.5)
    if res > limit:
        raise DilationError(
            f"dilated profile has residual {res:.3e} > {limit:.3e} on {target}"
        )
    return replace(
        w,
        params=q,
        grid=target,
        profile=prof,
        residual_l2=res,
        report=functional_report(prof, target, q),
        stabilizer_history=[],
    )
