"""Why the ratio f/M needs a cut-off.

A Gaussian survives an FFT round trip to machine precision, but dividing the
result by the Gaussian turns round-off in its far tail into huge values.
Restricting the division to points where M is not negligible removes them.

    python demos/cancellation.py
"""
from boltzspec.cli import cancellation_demo

for name, value in cancellation_demo(16, 7.5).items():
    print(f"{name:>24}: {value:.6e}")
