"""Spatially homogeneous relaxation with both operators.

Runs the Maxwell-molecule benchmark to t = 2 with the linearized operator and
with the binary operator (M = 7 hemisphere points to keep this quick), then
prints the distance of each to the final Maxwellian and their relative gap.

    python demos/relaxation.py
"""
from boltzspec.homogeneous import HomogeneousRun, relative_difference, run_homogeneous

common = dict(case=1, t_end=2.0, dt=0.1, snapshot_stride=1)
lin = run_homogeneous(HomogeneousRun(operator="linearized", **common))
binary = run_homogeneous(HomogeneousRun(operator="binary", M=7, **common))
E = relative_difference(lin, binary)
print(f"{'t':>4} {'lin dist':>10} {'bin dist':>10} {'E(t)':>8}")
for i in range(0, len(lin.times), 4):
    print(f"{lin.times[i]:4.1f} {lin.l2_to_maxwellian[i]:10.3e} {binary.l2_to_maxwellian[i]:10.3e} {E[i]:8.4f}")
print(f"seconds per RK4 step: linearized {lin.seconds_per_step:.3f}, binary {binary.seconds_per_step:.3f}")
