"""Quadratic and cubic functionals, the dispersion symbol and profile residuals.

All integrals are spectral/trapezoid quadratures on the periodic grid.  The
profile equation is

    c phi - alpha phi'' - beta H phi' = phi^2 / 2

whose linear part is the Fourier multiplier ``p(xi) = c + alpha xi^2 + beta |xi|``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .grid import Grid


@dataclass(frozen=True)
class ModelParams:
    """Speed ``c`` and dispersion coefficients ``alpha`` (KdV), ``beta`` (BO)."""

    c: float
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("c", "alpha", "beta"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, float(v))
        if self.alpha < 0:
            raise ValueError(f"alpha must be nonnegative, got {self.alpha!r}")
        if self.alpha == 0 and self.beta == 0 and self.c <= 0:
            raise ValueError("need some dispersion (alpha, beta) != (0, 0) or c > 0")

    def symbol(self, xi):
        xi = np.asarray(xi, dtype=float)
        return self.c + self.alpha * xi**2 + self.beta * np.abs(xi)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class FunctionalReport:
    quad_I: float
    cubic_K: float
    energy: float
    mass: float
    pohozaev_defect: float
    residual_l2: float

    def as_dict(self) -> dict:
        return asdict(self)


def grid_symbol(grid: Grid, p: ModelParams) -> np.ndarray:
    """``p(xi)`` on the grid, consistent with the grid's odd-multiplier convention.

    ``-beta H d/dx`` loses its Nyquist entry because both factors are odd
    multipliers; ``-alpha d^2/dx^2`` keeps it.
    """
    xi = grid.wavenumbers
    return p.c + p.alpha * xi**2 + np.where(grid.nyquist, 0.0, p.beta * np.abs(xi))


def _quadratic_form(f, grid: Grid, weights) -> float:
    F = grid.forward(f)
    return float(np.sum(weights * np.abs(F) ** 2) / grid.length)


def quad_I(f, grid: Grid, p: ModelParams) -> float:
    """``1/2 int (alpha f_x^2 + beta (D^{1/2} f)^2 + c f^2)``."""
    return 0.5 * _quadratic_form(f, grid, grid_symbol(grid, p))


def cubic_K(f, grid: Grid) -> float:
    """``1/6 int f^3``."""
    f = np.asarray(f)
    return grid.integrate(f**3) / 6.0


def mass(u, grid: Grid) -> float:
    """``1/2 int u^2``."""
    u = np.asarray(u)
    return 0.5 * grid.integrate(u * u)


def energy(u, grid: Grid, gamma: float, alpha: float = 1.0) -> float:
    """``int (alpha/2 u_x^2 + gamma/2 (D^{1/2} u)^2 - u^3/6)``.

    ``alpha`` defaults to 1, the normalization of the single-parameter equation.
    """
    xi = grid.wavenumbers
    weights = alpha * xi**2 + np.where(grid.nyquist, 0.0, gamma * np.abs(xi))
    return 0.5 * _quadratic_form(u, grid, weights) - cubic_K(u, grid)


def symbol_min(p: ModelParams) -> tuple[float, float]:
    """Exact minimum of ``c + beta|xi| + alpha xi^2`` over the real line.

    Returns ``(min_value, argmin |xi|)``; ``(-inf, inf)`` when ``alpha = 0``
    and ``beta < 0``.
    """
    if p.alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if p.beta >= 0:
        return p.c, 0.0
    if p.alpha == 0:
        return -math.inf, math.inf
    xi_star = -p.beta / (2.0 * p.alpha)
    return p.c - p.beta**2 / (4.0 * p.alpha), xi_star


def coercivity_check(p: ModelParams) -> bool:
    return symbol_min(p)[0] > 0


def coercivity_threshold(p: ModelParams) -> float:
    """Smallest admissible ``beta`` at fixed ``c, alpha``: ``-2 sqrt(c alpha)``."""
    return -2.0 * math.sqrt(p.c * p.alpha) if p.c > 0 else math.inf


def pohozaev_defect(f, grid: Grid, p: ModelParams) -> float:
    """``2 I(f) - 3 K(f)``; vanishes on solutions of the profile equation."""
    return 2.0 * quad_I(f, grid, p) - 3.0 * cubic_K(f, grid)


def profile_residual(f, grid: Grid, p: ModelParams) -> tuple[np.ndarray, float]:
    """Residual ``c f - alpha f'' - beta H f' - f^2/2`` and its L2 norm."""
    f = np.asarray(f, dtype=float)
    r = p.c * f
    if p.alpha:
        r = r - p.alpha * grid.derivative(f, 2)
    if p.beta:
        r = r - p.beta * grid.hilbert(grid.derivative(f, 1))
    r = r - 0.5 * f * f
    return r, grid.l2_norm(r)


def functional_report(f, grid: Grid, p: ModelParams) -> FunctionalReport:
    I = quad_I(f, grid, p)
    K = cubic_K(f, grid)
    return FunctionalReport(
        quad_I=I,
        cubic_K=K,
        energy=energy(f, grid, p.beta, p.alpha),
        mass=mass(f, grid),
        pohozaev_defect=2.0 * I - 3.0 * K,
        residual_l2=profile_residual(f, grid, p)[1],
    )
