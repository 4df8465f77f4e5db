"""Periodic Fourier calculus on a uniform 1-D grid.

The grid samples the interval ``[-L, L)`` at ``x_m = -L + m * dx`` with
``dx = 2L / N``.  Fields are plain real ``numpy`` arrays of length ``N``;
their spectral counterparts are complex arrays in standard FFT ordering.

Transform convention
--------------------
The forward transform approximates the continuum Fourier transform about
the origin by the trapezoid rule::

    F(xi_j) = dx * sum_m f(x_m) exp(-i xi_j x_m)
            = dx * exp(i xi_j L) * fft(f)_j

and the inverse is the Fourier series on the period ``2L``::

    f(x_m) = 1/(2L) * sum_j F(xi_j) exp(i xi_j x_m)

so Parseval reads ``dx * sum |f|^2 = 1/(2L) * sum |F|^2``.  The scale factor
between ``F`` and ``numpy.fft.fft`` is ``dx`` times the phase ``exp(i xi L)``;
with it an even field has real coefficients.

Odd multipliers (``i xi``, ``(i xi)^3`` and the Hilbert symbol ``i sgn xi``)
are zeroed at the Nyquist mode, which has no partner of opposite sign.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform periodic grid on ``[-half_length, half_length)``.

    Parameters
    ----------
    n_points : int
        Number of samples; even and at least 16.
    half_length : float
        Half the period, ``L``.
    """

    n_points: int
    half_length: float
    spacing: float = field(init=False)
    x: np.ndarray = field(init=False, repr=False)
    wavenumbers: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n, L = self.n_points, self.half_length
        if int(n) != n or n < 16 or n % 2:
            raise ValueError(f"n_points must be an even integer >= 16, got {n!r}")
        if not np.isfinite(L) or L <= 0:
            raise ValueError(f"half_length must be positive, got {L!r}")
        n = int(n)
        dx = 2.0 * L / n
        x = -L + dx * np.arange(n)
        xi = np.pi / L * np.fft.fftfreq(n, d=1.0 / n)
        x.setflags(write=False)
        xi.setflags(write=False)
        object.__setattr__(self, "n_points", n)
        object.__setattr__(self, "half_length", float(L))
        object.__setattr__(self, "spacing", dx)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "wavenumbers", xi)
        phase = np.exp(1j * xi * L)
        phase.setflags(write=False)
        object.__setattr__(self, "_phase", phase)
        nyq = np.zeros(n, dtype=bool)
        nyq[n // 2] = True
        nyq.setflags(write=False)
        object.__setattr__(self, "nyquist", nyq)

    def __eq__(self, other):
        if not isinstance(other, Grid):
            return NotImplemented
        return self.n_points == other.n_points and self.half_length == other.half_length

    def __hash__(self):
        return hash((self.n_points, self.half_length))

    @property
    def length(self) -> float:
        return 2.0 * self.half_length

    @property
    def nyquist_wavenumber(self) -> float:
        return np.pi / self.spacing

    # -- transforms ---------------------------------------------------------

    def _check(self, f):
        f = np.asarray(f)
        if f.shape != (self.n_points,):
            raise ValueError(
                f"field has shape {f.shape}, grid expects ({self.n_points},)"
            )
        return f

    def forward(self, f) -> np.ndarray:
        """Spectral coefficients of the real field ``f``."""
        f = self._check(f)
        return self.spacing * self._phase * np.fft.fft(f)

    def inverse(self, F) -> np.ndarray:
        """Real field whose coefficients are ``F`` (imaginary part dropped)."""
        F = self._check(F)
        return np.fft.ifft(F / self._phase).real / self.spacing

    def apply(self, f, multiplier) -> np.ndarray:
        """Apply a Fourier multiplier sampled at ``self.wavenumbers``."""
        return self.inverse(multiplier * self.forward(f))

    # -- multipliers --------------------------------------------------------

    def derivative_symbol(self, order: int) -> np.ndarray:
        if order not in (1, 2, 3):
            raise ValueError(f"derivative order must be 1, 2 or 3, got {order!r}")
        sym = (1j * self.wavenumbers) ** order
        if order % 2:
            sym = np.where(self.nyquist, 0.0, sym)
        return sym

    def hilbert_symbol(self) -> np.ndarray:
        return np.where(self.nyquist, 0.0, 1j * np.sign(self.wavenumbers))

    def derivative(self, f, order: int = 1) -> np.ndarray:
        """``d^order f / dx^order`` for ``order`` in 1, 2, 3."""
        return self.apply(f, self.derivative_symbol(order))

    def hilbert(self, f) -> np.ndarray:
        """Hilbert transform, the multiplier ``i sgn(xi)``."""
        return self.apply(f, self.hilbert_symbol())

    def half_derivative(self, f) -> np.ndarray:
        """``D^{1/2} f``, the multiplier ``|xi|^{1/2}``."""
        return self.apply(f, np.sqrt(np.abs(self.wavenumbers)))

    def translate(self, f, shift: float) -> np.ndarray:
        """Spectral translate ``f(x - shift)``."""
        sym = np.exp(-1j * self.wavenumbers * shift)
        sym = np.where(self.nyquist, np.cos(self.wavenumbers * shift), sym)
        return self.apply(f, sym)

    def reflect(self, f) -> np.ndarray:
        """Samples of ``f(-x)``; ``x_m`` and ``x_{N-m}`` are mirror points."""
        f = self._check(f)
        return np.roll(f[::-1], 1)

    def symmetrize(self, f) -> np.ndarray:
        """Even part of ``f``."""
        return 0.5 * (f + self.reflect(f))

    # -- quadrature and norms -----------------------------------------------

    def integrate(self, f) -> float:
        """Trapezoid rule on the period, ``dx * sum f``."""
        return float(self.spacing * np.sum(self._check(f)))

    def inner(self, f, g) -> float:
        return self.integrate(np.asarray(f) * np.asarray(g))

    def l2_norm(self, f) -> float:
        f = self._check(f)
        return float(np.sqrt(self.spacing * np.sum(f * f)))

    def sobolev_norm(self, f, s: float = 1.0) -> float:
        """``(1/(2L) sum (1 + xi^2)^s |F|^2)^{1/2}``; equals ``l2_norm`` at ``s = 0``."""
        if s < 0:
            raise ValueError(f"Sobolev index must be nonnegative, got {s!r}")
        F = self.forward(f)
        w = (1.0 + self.wavenumbers**2) ** s
        return float(np.sqrt(np.sum(w * np.abs(F) ** 2) / self.length))

    def spectral_tail(self, f, fraction: float = 1.0 / 3.0) -> float:
        """Relative coefficient mass in the top ``fraction`` of wavenumbers."""
        F = np.abs(self.forward(f))
        top = np.abs(self.wavenumbers) > (1.0 - fraction) * self.nyquist_wavenumber
        total = np.max(F)
        return float(np.max(F[top]) / total) if total > 0 else 0.0


def make_grid(n_points: int, half_length: float) -> Grid:
    return Grid(n_points, half_length)
