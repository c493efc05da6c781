"""Energy of the stressed equilibrium at the stress-free corner angle vs N."""
import argparse

from cornervoid.energy import betti_consistency, solution_energy
from cornervoid.equilibrium import EquilibriumProblem, continuation_in_lambda
from cornervoid.params import PhysicalParams
from cornervoid.surface_energy import wulff_corner_angle

ap = argparse.ArgumentParser()
ap.add_argument("--epsilon", type=float, default=0.08)
ap.add_argument("--chi", type=float, default=0.0)
ap.add_argument("--Lambda", type=float, default=0.15)
ap.add_argument("--ladder", default="16,24,32,48,64")
args = ap.parse_args()
a0 = wulff_corner_angle(args.epsilon)
params = PhysicalParams(epsilon=args.epsilon, chi=args.chi)
print("N,energy,surface,elastic,residual,betti")
for N in (int(n) for n in args.ladder.split(",")):
    sol = continuation_in_lambda(EquilibriumProblem(params, (a0, a0), N), args.Lambda)
    rep = solution_energy(sol)
    b = betti_consistency(sol.elastic, sol.problem.params)
    print(f"{N},{rep.total:.12f},{rep.surface:.12f},{rep.elastic:.12f},"
          f"{sol.residual_norm:.1e},{b:.1e}")
