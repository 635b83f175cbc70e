"""Solve the unit circle implicitly and tabulate values against closed form.

Run: python scripts/circle_table.py
"""

import math

from implisolve import SolverOptions, SplitPoint, build_implicit, parse


def main():
    F = parse(["x^2 + y^2 - 1"], ["x", "y"])
    sol = build_implicit(F, SplitPoint.of([0.0], [1.0]), SolverOptions(h0=0.8))
    box = sol.box
    print(f"validated box: x in [{box.x_lo[0]:+.3f}, {box.x_hi[0]:+.3f}], "
          f"y in [{box.y_lo:.3f}, {box.y_hi:.3f}], shrinks={box.shrinks}")
    print(f"{'x':>8} {'f(x)':>18} {'df/dx':>18} {'|f - sqrt(1-x^2)|':>18} {'residual':>12}")
    for i in range(-7, 8):
        x = 0.1 * i
        y = sol.solve_at((x,))
        dy = sol.gradient_at((x,))[0]
        exact = math.sqrt(1 - x * x)
        residual = abs(F.eval((x, y))[0])
        print(f"{x:8.2f} {y:18.12f} {dy:18.12f} {abs(y - exact):18.3e} {residual:12.3e}")


if __name__ == "__main__":
    main()
