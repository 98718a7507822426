"""Densities, Stein pairs and the solution bound M for a few parameter sets."""
import numpy as np

from steinpairs import GigParams, KummerParams, stein_pair
from steinpairs.stein import bound_m, check_lemma_inequalities, default_grid

SETS = [GigParams(-1.0, 2.0, 2.0), GigParams(-2.5, 0.5, 4.0), KummerParams(1.0, 1.0, 1.0), KummerParams(2.0, 1.0, 3.0)]

for p in SETS:
    pair = stein_pair(p)
    xs = np.array([0.5, 1.0, 2.0])
    dens = np.exp(pair.log_density(xs))
    r = bound_m(pair)
    lemma = check_lemma_inequalities(pair, default_grid())
    print(p)
    print(f"  s = {pair.s}, tau = {pair.tau}")
    print(f"  g(0.5, 1, 2) = {np.array2string(dens, precision=6)}")
    print(f"  alpha = {r.alpha:.6f}  left = {r.left_ratio:.6f}  right = {r.right_ratio:.6f}  M = {r.M:.6f}")
    print(f"  tail inequalities hold on the default grid: {lemma.passed}")
