"""Ground states across the KdV to Benjamin-Ono family.

Solves the profile equation for a few (c, alpha, beta), prints the
functionals, checks the dilation law, and fits the far-field decay.

    python3 demos/ground_states.py
"""

from benjamin.diagnostics import decay_fit, shift_min_distance
from benjamin.functionals import ModelParams, profile_residual
from benjamin.grid import make_grid
from benjamin.solver import SolveConfig, constrained_minimize, dilate, petviashvili, q_kdv, rescale_to_ground_state

grid = make_grid(8192, 400.0)

print(f"{'params':>16} {'iters':>6} {'residual':>10} {'I':>10} {'K':>10} {'2I-3K':>10}")
for c, a, b in [(1, 1, 0), (1, 1, 0.5), (1, 1, -1.0), (1, 0.1, 1), (1, 0, 1)]:
    w = petviashvili(ModelParams(c, a, b), grid, cfg=SolveConfig(max_iterations=3000))
    r = w.report
    print(f"{str((c, a, b)):>16} {w.iterations:>6d} {w.residual_l2:10.2e} "
          f"{r.quad_I:10.5f} {r.cubic_K:10.5f} {r.pohozaev_defect:10.1e}")

# the variational route lands on the same wave once rescaled by the multiplier
g = make_grid(2048, 40.0)
kdv = ModelParams(1, 1, 0)
phi, mu = constrained_minimize(kdv, g, SolveConfig(constraint_level=1.0))
psi = rescale_to_ground_state(phi, mu, g, kdv)
print(f"\nminimizer at K = 1: mu = {mu:.6f}, "
      f"H1 distance of mu*phi to Q_KdV = {shift_min_distance(psi.profile, q_kdv(1, g), g)[0]:.2e}")

# dilation: lam^2 phi(lam x) solves the problem with c lam^2 and beta |lam|
mixed = petviashvili(ModelParams(1, 1, 0.5), grid)
for lam in (0.5, 2.0, 3.0):
    d = dilate(mixed, lam)
    print(f"dilate by {lam}: params {d.params}, residual {profile_residual(d.profile, d.grid, d.params)[1]:.2e}")

fit = decay_fit(mixed.profile, grid, 2.0, images="even")
print(f"\n(1,1,0.5) far field ~ x^{fit.exponent:.3f}, sup x^2|phi| = {fit.bound_sup:.4f}")
print(f"(1,1,0)   far field: {decay_fit(q_kdv(1, g), g, 2.0).kind}")
