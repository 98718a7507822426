"""Sample from each family and test samples against matching and wrong targets."""
from steinpairs import GigParams, KummerParams, sample, stein_pair
from steinpairs.numerics import rng_stream
from steinpairs.stein import stein_discrepancy

gig, kum = GigParams(-1.0, 2.0, 2.0), KummerParams(1.0, 1.0, 1.0)
draws = {
    "gig sample": sample(gig, 100_000, 42).values,
    "kummer sample": sample(kum, 100_000, 42).values,
    "Exp(1) sample": rng_stream(2024, 0).exponential(1.0, size=100_000),
}
for target_name, target in (("gig", gig), ("kummer", kum)):
    pair = stein_pair(target)
    for name, x in draws.items():
        rep = stein_discrepancy(x, pair)
        print(f"target {target_name:7s} {name:14s} max |z| = {rep.statistic:8.2f}")
