"""How closely the fast linearized operator tracks the quadratic one.

For the two benchmark initial data, print the L2 gap between L[f] and the
binary evaluation of Q[M,f] + Q[f,M] (pure discretization error of the fast
algorithm) and the relative gap between L[f] and Q[f,f] (the linearization
error itself, which does not shrink with resolution).

    python demos/operator_accuracy.py
"""
from boltzspec.cli import accuracy_row

print(f"{'case':>4} {'R':>4} {'N':>3} {'|L-Q_pair|':>12} {'|L-Q|/|Q|':>10}")
for case in (1, 2):
    for R in (4.0, 6.0):
        for N in (8, 16):
            diff, rel = accuracy_row(case, R, N)
            print(f"{case:>4} {R:>4g} {N:>3} {diff:12.3e} {rel:10.4f}")
