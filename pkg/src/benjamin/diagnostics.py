"""Quantitative checks on solitary waves: orbital distance, linearized
coercivity, limit sweeps, far-field decay and the Green kernel.

All thresholds used here are empirical; none of them estimates a constant
that the analysis leaves unquantified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import zeta

from .evolution import EvolutionConfig, evolve
from .functionals import ModelParams, grid_symbol, quad_I, coercivity_check
from .grid import Grid, make_grid
from .solver import (
    NotCoerciveError,
    SolitaryWave,
    SolveConfig,
    SolverError,
    petviashvili,
    q_bo,
    q_kdv,
)


# -- orbital distance ----------------------------------------------------------


def _sobolev_weights(grid: Grid, s: float):
    return (1.0 + grid.wavenumbers**2) ** s / grid.length


def shift_min_distance(u, v, grid: Grid, s: float = 1.0) -> tuple[float, float]:
    """``min_z ||u(. + z) - v||_{H^s}`` and the minimizing shift ``z``.

    The coarse shift maximizes the L2 cross-correlation over grid offsets;
    it is then refined over one grid cell on each side with a bounded
    scalar search, translating spectrally.
    """
    U, V = grid.forward(u), grid.forward(v)
    xi = grid.wavenumbers
    w = _sobolev_weights(grid, s)

    corr = np.fft.ifft(U * np.conj(V)).real
    z0 = grid.spacing * int(np.argmax(corr))
    z0 = (z0 + grid.half_length) % grid.length - grid.half_length

    def dist2(z):
        return float(np.sum(w * np.abs(U * np.exp(1j * xi * z) - V) ** 2))

    h = grid.spacing
    res = minimize_scalar(dist2, bounds=(z0 - h, z0 + h), method="bounded",
                          options={"xatol": 1e-12 * max(1.0, grid.half_length)})
    z, d2 = float(res.x), float(res.fun)
    if dist2(z0) < d2:
        z, d2 = z0, dist2(z0)
    z = (z + grid.half_length) % grid.length - grid.half_length
    return math.sqrt(max(d2, 0.0)), z


# -- orbital stability -----------------------------------------------------------


@dataclass
class StabilityReport:
    epsilon: float
    times: list
    distances: list
    sup_distance: float
    ratio: float

    @property
    def distance_series(self):
        return list(zip(self.times, self.distances))

    def growth_ratio(self) -> float:
        """Max distance over the second half of the run over that of the first half."""
        t = np.asarray(self.times)
        d = np.asarray(self.distances)
        mid = 0.5 * (t[0] + t[-1])
        first, second = d[t <= mid], d[t > mid]
        return float(np.max(second) / np.max(first)) if np.max(first) > 0 else math.inf


def unit_direction(f, grid: Grid) -> np.ndarray:
    """``f`` scaled to unit H^1 norm."""
    n = grid.sobolev_norm(f, 1.0)
    if n == 0:
        raise ValueError("cannot normalize the zero field")
    return np.asarray(f, dtype=float) / n


def stability_experiment(
    w: SolitaryWave,
    epsilon: float,
    direction,
    cfg: EvolutionConfig,
) -> StabilityReport:
    """Evolve ``phi + epsilon * direction`` and track its H^1 distance to the orbit of ``phi``."""
    grid = w.grid
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    nd = grid.sobolev_norm(direction, 1.0)
    if abs(nd - 1.0) > 1e-8:
        raise ValueError(f"direction must have unit H^1 norm, got {nd:.6g}")
    u0 = w.profile + epsilon * np.asarray(direction, dtype=float)
    trace = evolve(u0, w.params, grid, cfg)
    if trace.snapshots is None:
        raise ValueError("stability experiment needs snapshots (keep_snapshots=True)")
    dist = [shift_min_distance(u, w.profile, grid, 1.0)[0] for u in trace.snapshots]
    sup = max(dist)
    ratio = sup / epsilon if epsilon > 0 else math.nan
    return StabilityReport(epsilon, list(trace.times), dist, sup, ratio)


# -- linearized operator -----------------------------------------------------------


def linearized_form(w: SolitaryWave, u) -> float:
    """``<(p(D) - phi) u, u>`` for the linearization at ``w``."""
    u = np.asarray(u, dtype=float)
    return 2.0 * quad_I(u, w.grid, w.params) - w.grid.integrate(w.profile * u * u)


def apply_linearized(w: SolitaryWave, u) -> np.ndarray:
    """``(c - alpha d^2 - beta H d + ... - phi) u`` applied spectrally."""
    grid = w.grid
    return grid.apply(u, grid_symbol(grid, w.params)) - w.profile * np.asarray(u)


def random_trial_field(grid: Grid, rng: np.random.Generator) -> np.ndarray:
    """Band-limited Gaussian field with random correlation length and window.

    The spectrum is cut at half the Nyquist wavenumber before and after
    windowing.
    """
    xi = grid.wavenumbers
    band = np.abs(xi) <= 0.5 * grid.nyquist_wavenumber
    ell = math.exp(rng.uniform(math.log(0.2), math.log(5.0)))
    center = rng.uniform(-5.0, 5.0)
    width = math.exp(rng.uniform(math.log(0.5), math.log(15.0)))
    noise = rng.standard_normal(grid.n_points)
    F = np.fft.fft(noise) * np.exp(-0.5 * (ell * xi) ** 2) * band
    f = np.fft.ifft(F).real * np.exp(-0.5 * ((grid.x - center) / width) ** 2)
    return np.fft.ifft(np.fft.fft(f) * band).real


def project_out_modes(w: SolitaryWave, u) -> np.ndarray:
    """L2 projection of ``u`` onto the complement of ``span{phi, phi'}``."""
    grid = w.grid
    u = np.asarray(u, dtype=float)
    for mode in (w.profile, grid.derivative(w.profile, 1)):
        nn = grid.inner(mode, mode)
        if nn > 0:
            u = u - grid.inner(u, mode) / nn * mode
    return u


def coercivity_estimate(
    w: SolitaryWave,
    trial_count: int = 500,
    seed: int = 0,
    project: bool = True,
) -> float:
    """Minimum Rayleigh quotient ``<Y u, u> / ||u||_{H^1}^2`` over random trials.

    Trials are drawn sequentially from ``seed``, so the estimate for ``n``
    trials is a running minimum over a prefix of the same sequence.
    """
    if trial_count < 1:
        raise ValueError("trial_count must be positive")
    grid = w.grid
    rng = np.random.default_rng(seed)
    best = math.inf
    for _ in range(trial_count):
        u = random_trial_field(grid, rng)
        if project:
            u = project_out_modes(w, u)
        n2 = grid.sobolev_norm(u, 1.0) ** 2
        if not n2 > 1e-24:
            raise ValueError("degenerate trial field after projection")
        best = min(best, linearized_form(w, u) / n2)
    return best


# -- limit sweeps -----------------------------------------------------------------


@dataclass
class SweepPoint:
    value: float
    h1_distance: float
    ok: bool = True
    message: str = ""
    iterations: int = 0


def limit_problem(limit: str, value: float) -> ModelParams:
    if limit == "to_kdv":
        return ModelParams(1.0, 1.0, value)
    if limit == "to_bo":
        return ModelParams(1.0, value, 1.0)
    raise ValueError(f"unknown limit {limit!r}; use 'to_kdv' or 'to_bo'")


def limit_profile(limit: str, grid: Grid) -> np.ndarray:
    return q_kdv(1.0, grid) if limit == "to_kdv" else q_bo(1.0, grid)


def default_sweep_grid(limit: str) -> Grid:
    return make_grid(4096, 200.0) if limit == "to_kdv" else make_grid(8192, 400.0)


def convergence_sweep(
    limit: str,
    values,
    grid: Grid | None = None,
    cfg: SolveConfig = SolveConfig(max_iterations=3000),
    continuation: bool = True,
) -> list[SweepPoint]:
    """Distance in H^1 from the ground state to the limiting soliton, per value.

    ``to_kdv`` sweeps ``beta`` at ``alpha = 1``; ``to_bo`` sweeps ``alpha`` at
    ``beta = 1``.  Values must approach 0 monotonically.  The first failed
    solve ends the sweep; its row is flagged and no further values are run.
    """
    values = [float(v) for v in values]
    if not values:
        raise ValueError("empty value list")
    if any(abs(b) > abs(a) for a, b in zip(values, values[1:])):
        raise ValueError("values must approach 0 monotonically")
    limit_problem(limit, values[0])
    grid = default_sweep_grid(limit) if grid is None else grid
    target = limit_profile(limit, grid)
    out, prev = [], None
    for v in values:
        try:
            wave = petviashvili(limit_problem(limit, v), grid, prev, cfg)
        except (SolverError, ValueError) as exc:
            out.append(SweepPoint(v, math.nan, ok=False, message=str(exc)))
            break
        if continuation:
            prev = wave.profile
        d, _ = shift_min_distance(wave.profile, target, grid, 1.0)
        out.append(SweepPoint(v, d, iterations=wave.iterations))
    return out


# -- decay -------------------------------------------------------------------------


class FloorNoiseError(ValueError):
    pass


@dataclass
class DecayFit:
    window: tuple
    exponent: float
    weighted_residual: float
    bound_sup: float
    kind: str
    claimed_exponent: float = 0.0

    @property
    def passes(self) -> bool:
        """Decay at least as fast as claimed: exponential, or fitted exponent not slower."""
        if self.kind == "exponential":
            return True
        return math.isfinite(self.bound_sup) and self.exponent <= -self.claimed_exponent + 0.3


EXPONENTIAL_SLOPE = -6.0


def _periodized_power(x, q, period, parity):
    a = x / period
    return zeta(q, a) + parity * zeta(q, 1.0 - a)


def decay_fit(f, grid: Grid, claimed_exponent: float, window=None, images: str | None = None) -> DecayFit:
    """Fit ``|f| ~ x^exponent`` over a far-field window on ``x > 0``.

    ``window`` defaults to ``(0.3 L, 0.5 L)`` and must lie in
    ``[0.3 L, 0.8 L]``.  With ``images=None`` the exponent is the
    least-squares slope of ``log|f|`` against ``log x``.  ``images='even'``
    (``'odd'``) instead fits a power law summed over the periodic copies of
    an even (odd) tail, which removes the bias the copies put on the slope of
    a periodic solution.  Slopes at or below -6 are reported as exponential.
    """
    L = grid.half_length
    lo, hi = (0.3 * L, 0.5 * L) if window is None else window
    if not (0.3 * L - 1e-12 <= lo < hi <= 0.8 * L + 1e-12):
        raise ValueError(f"window {(lo, hi)} must lie inside [{0.3 * L:g}, {0.8 * L:g}]")
    x = grid.x
    m = (x >= lo) & (x <= hi)
    if np.count_nonzero(m) < 4:
        raise ValueError("window holds fewer than four samples")
    xs, fs = x[m], np.abs(np.asarray(f)[m])
    if np.min(fs) < 1e-14:
        raise FloorNoiseError("samples below 1e-14 in the decay window")
    y = np.log(fs)
    lx = np.log(xs)
    slope, icpt = np.polyfit(lx, y, 1)
    resid = y - (slope * lx + icpt)
    if images is not None and slope > EXPONENTIAL_SLOPE:
        parity = {"even": 1.0, "odd": -1.0}[images]
        period = grid.length

        def misfit(q):
            S = _periodized_power(xs, q, period, parity)
            if np.any(S <= 0):
                return math.inf
            z = y - np.log(S)
            return float(np.sum((z - z.mean()) ** 2))

        r = minimize_scalar(misfit, bounds=(0.25, 12.0), method="bounded",
                            options={"xatol": 1e-10})
        slope = -float(r.x)
        S = np.log(_periodized_power(xs, r.x, period, parity))
        resid = (y - S) - np.mean(y - S)
    kind = "exponential" if slope <= EXPONENTIAL_SLOPE else "algebraic"
    return DecayFit(
        window=(float(lo), float(hi)),
        exponent=float(slope),
        weighted_residual=float(np.sqrt(np.mean(resid**2))),
        bound_sup=float(np.max(xs**claimed_exponent * fs)),
        kind=kind,
        claimed_exponent=float(claimed_exponent),
    )


# -- Green kernel ----------------------------------------------------------------


@dataclass
class KernelProfile:
    params: ModelParams
    grid: Grid
    kernel: np.ndarray
    derivative_kernel: np.ndarray
    multiplier: np.ndarray = field(repr=False, default=None)

    def convolve(self, f, derivative: bool = False) -> np.ndarray:
        """``int G(x - y) f(y) dy`` over the period, for the trigonometric interpolant of ``f``."""
        hat = self.multiplier
        if derivative:
            hat = self.grid.derivative_symbol(1) * hat
        return self.grid.apply(f, hat)


def _local_kernel(p: ModelParams, grid: Grid):
    """Periodized inverse transform of ``1/(2(c + alpha xi^2))`` and its derivative."""
    kappa = math.sqrt(p.c / p.alpha)
    amp = 1.0 / (4.0 * math.sqrt(p.c * p.alpha))
    ax = np.abs(grid.x)
    L = grid.half_length
    near = np.exp(-kappa * ax)
    far = np.exp(-kappa * (2.0 * L - ax))
    norm = -np.expm1(-2.0 * kappa * L)
    g = amp * (near + far) / norm
    dg = -np.sign(grid.x) * amp * kappa * (near - far) / norm
    return g, dg


def _aliased_remainders(p: ModelParams, grid: Grid, images: int = 64):
    """Alias-summed spectra of ``r = 1/(2p) - 1/(2(c + alpha xi^2))`` and ``i xi r``.

    Summing ``r(xi + k Omega)`` over all images ``k`` (``Omega = 2 pi / dx``)
    gives the coefficients whose inverse transform samples the continuum
    kernel exactly.  Images with ``|k| <= images`` are added directly and the
    rest through the leading large-``xi`` behaviour of ``r``, which is
    ``-beta / (2 alpha^2 |xi|^3)``, via Hurwitz zeta sums.
    """
    xi = grid.wavenumbers
    omega = 2.0 * np.pi / grid.spacing

    def r(eta):
        q = p.c + p.alpha * eta**2
        return -p.beta * np.abs(eta) / (2.0 * q * (q + p.beta * np.abs(eta)))

    base = r(xi)
    R = np.where(grid.nyquist, 0.0, base)
    D = np.where(grid.nyquist, 0.0, 1j * xi * base)
    # the Nyquist mode pairs -Omega/2 with +Omega/2 and the k = 0 term there
    R = R + np.where(grid.nyquist, base, 0.0)
    for k in range(1, images + 1):
        for eta in (xi + k * omega, xi - k * omega):
            v = r(eta)
            R = R + v
            D = D + 1j * eta * v
    a = -p.beta / (2.0 * p.alpha**2)
    up = xi / omega + images + 1.0
    down = images + 1.0 - xi / omega
    R = R + a * (zeta(3.0, up) + zeta(3.0, down)) / omega**3
    D = D + 1j * a * (zeta(2.0, up) - zeta(2.0, down)) / omega**2
    return R, D


def green_kernel(p: ModelParams, grid: Grid) -> KernelProfile:
    """Kernels ``G``, ``G'`` with ``phi = G * phi^2`` and ``phi' = G' * phi^2``.

    ``G(x) = (1/2pi) int e^{i x xi} / (2 p(xi)) d xi``, periodized over the
    grid's period and sampled at the grid points.  When ``alpha > 0`` the part
    coming from ``c + alpha xi^2`` is summed in closed form (a periodized
    exponential) and the remainder is alias-summed, so the kink at the origin
    does not leak algebraic tails into the far field.  With ``alpha = 0`` the
    kernel is the plain discrete inverse transform.  ``convolve`` applies the
    multiplier ``1/(2p)`` on the grid modes.
    """
    if not coercivity_check(p):
        raise NotCoerciveError(f"symbol of {p} is not positive")
    hat = 0.5 / grid_symbol(grid, p)
    if p.alpha > 0 and p.c > 0:
        g0, dg0 = _local_kernel(p, grid)
        R, D = _aliased_remainders(p, grid)
        kernel = g0 + grid.inverse(R)
        dkernel = dg0 + grid.inverse(D)
    else:
        kernel = grid.inverse(hat)
        dkernel = grid.inverse(grid.derivative_symbol(1) * hat)
    return KernelProfile(p, grid, kernel, dkernel, multiplier=hat)
