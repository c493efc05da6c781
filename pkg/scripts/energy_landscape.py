"""Energy over a grid of corner-angle pairs, written as CSV."""
import argparse

from cornervoid.energy import minimize_corner_angles, write_landscape_csv
from cornervoid.params import PhysicalParams

ap = argparse.ArgumentParser()
ap.add_argument("--epsilon", type=float, default=0.08)
ap.add_argument("--Lambda", type=float, default=0.15)
ap.add_argument("--N", type=int, default=32)
ap.add_argument("--grid", type=int, default=5)
ap.add_argument("--box", type=float, default=0.15)
ap.add_argument("--out", default="landscape.csv")
args = ap.parse_args()
res = minimize_corner_angles(PhysicalParams(epsilon=args.epsilon, Lambda=args.Lambda),
                             args.N, args.box, args.grid, refine=False)
write_landscape_csv(args.out, res)
print("best", res.best_angles, res.best_energy, "failures", len(res.failures))
