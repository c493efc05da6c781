"""Orientation profile of a strongly stressed void and the corner slopes."""
import argparse

from cornervoid.equilibrium import EquilibriumProblem, continuation_in_lambda
from cornervoid.geometry import corner_window_slope, orientation_profile, write_profile_csv
from cornervoid.params import PhysicalParams
from cornervoid.surface_energy import wulff_corner_angle

ap = argparse.ArgumentParser()
ap.add_argument("--epsilon", type=float, default=0.08)
ap.add_argument("--Lambda", type=float, default=0.3)
ap.add_argument("--N", type=int, default=32)
ap.add_argument("--steps", type=int, default=6)
ap.add_argument("--out", default="orientation_profile.csv")
args = ap.parse_args()
a0 = wulff_corner_angle(args.epsilon)
sol = continuation_in_lambda(
    EquilibriumProblem(PhysicalParams(epsilon=args.epsilon), (a0, a0), args.N),
    args.Lambda, args.steps)
prof = orientation_profile(sol.shape)
write_profile_csv(args.out, prof)
print("jumps", prof.jumps)
print("max slope near A", corner_window_slope(sol.shape, 0))
print("max slope near B", corner_window_slope(sol.shape, 1))
