"""L2 error of the stress-free equilibrium shape against the exact Wulff shape."""
import argparse

from cornervoid.cli import wulff_l2_errors

ap = argparse.ArgumentParser()
ap.add_argument("--epsilon", type=float, default=0.08)
ap.add_argument("--ladder", default="8,16,24,32,48")
args = ap.parse_args()
print("N,l2_error,converged")
for N, err, ok in wulff_l2_errors(args.epsilon, [int(n) for n in args.ladder.split(",")]):
    print(f"{N},{err:.6e},{ok}")
