"""Self-convergence of the boundary stress trace for two overlapping circles."""
import argparse
import math

from cornervoid import elasticity as el
from cornervoid.geometry import preset_overlapping_circles

ap = argparse.ArgumentParser()
ap.add_argument("--alpha0", type=float, default=2 * math.pi / 3)
ap.add_argument("--chi", type=float, default=0.0)
ap.add_argument("--ladder", default="16,24,32,48,64")
args = ap.parse_args()
shape = preset_overlapping_circles(args.alpha0)
print("N,l2_diff_vs_2N,residual")
for N in (int(n) for n in args.ladder.split(",")):
    a, b = el.solve(shape, args.chi, N), el.solve(shape, args.chi, 2 * N)
    print(f"{N},{el.l2_error(a.trace, b.trace):.6e},{a.residual_norm:.2e}")
