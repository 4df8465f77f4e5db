"""Perturb a ground state and watch its distance to the orbit.

    python3 demos/stability.py
"""

import numpy as np

from benjamin.diagnostics import coercivity_estimate, stability_experiment, unit_direction
from benjamin.evolution import EvolutionConfig, evolve, measure_speed
from benjamin.functionals import ModelParams
from benjamin.grid import make_grid
from benjamin.solver import petviashvili

grid = make_grid(256, 40.0)
rng = np.random.default_rng(1)
bump = np.fft.ifft(np.fft.fft(rng.standard_normal(grid.n_points)) * np.exp(-0.5 * grid.wavenumbers**2)).real
direction = unit_direction(bump * np.exp(-0.5 * (grid.x / 5) ** 2), grid)

for beta in (0.0, 0.2, 0.5):
    w = petviashvili(ModelParams(1, 1, beta), grid)
    speed = measure_speed(evolve(w.profile, w.params, grid, EvolutionConfig(t_end=5, record_stride=500)))
    print(f"beta = {beta}: coercivity {coercivity_estimate(w, 200):.3f}, speed {speed:.6f}")
    for eps in (1e-1, 1e-2, 1e-3):
        rep = stability_experiment(w, eps, direction, EvolutionConfig(t_end=20, record_stride=400))
        print(f"    eps = {eps:g}: sup distance / eps = {rep.ratio:.3f}, growth {rep.growth_ratio():.3f}")
