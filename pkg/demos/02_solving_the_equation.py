"""Solve s f' + tau f = h - E h and compare with the bound M ||h - E h||."""
import numpy as np

from steinpairs import GigParams, KummerParams, stein_pair
from steinpairs.stein import bound_m, builtin_family, default_grid, solve_stein_equation, solve_with_constant

grid = default_grid()
for p in (GigParams(-1.0, 2.0, 2.0), KummerParams(2.0, 1.0, 3.0)):
    pair = stein_pair(p)
    M = bound_m(pair).M
    print(p, f"M = {M:.5f}")
    for h in builtin_family(pair):
        sol = solve_stein_equation(pair, h, grid)
        sup_f = float(np.max(np.abs(sol.f_values)))
        print(f"  {h.name:14s} E h = {sol.e_h:.8f}  sup|f| = {sup_f:.4e}  "
              f"M sup|h - E h| = {M * sol.centered_sup_norm:.4e}  residual = {sol.max_residual:.1e}")

# adding C / (s g) still solves the equation but is unbounded near 0
pair = stein_pair(GigParams(-1.0, 2.0, 2.0))
h = builtin_family(pair)[1]
near0 = np.geomspace(1e-2, 1.0, 5)
for c in (0.0, 1.0):
    f = solve_with_constant(pair, h, c, near0).f_values
    print(f"C = {c}: f at {near0.round(3).tolist()} = {np.array2string(f, precision=3)}")
