"""Couette flow on a coarse slab at two Knudsen numbers.

With few collisions (Kn = 10) the gas barely feels the wall shear and the
velocity profile is nearly flat; at Kn = 1 collisions carry momentum inwards.
Ten cells keep the run under a minute.

    python demos/couette_knudsen.py
"""
from boltzspec.steady import SteadyProblem, newton_solve, profile_moments

for Kn in (1.0, 10.0):
    problem = SteadyProblem.couette(0.3, Kn, Nx=10)
    f, report = newton_solve(problem)
    m = profile_moments(f, problem.grid())
    print(f"Kn = {Kn:g}: {report.newton_iterations} Newton updates, residuals "
          + ", ".join(f"{r:.1e}" for r in report.residuals))
    for x, u2, theta in zip(problem.x, m.u[:, 1], m.theta):
        print(f"  x = {x:+.2f}  u2 = {u2:+.5f}  theta = {theta:.5f}")
