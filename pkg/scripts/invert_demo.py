"""Invert the complex-square map (x1^2 - x2^2, 2 x1 x2) near (1, 1) and
report round-trip residuals over the validated target box.

Run: python scripts/invert_demo.py
"""

from implisolve import build_inverse, parse


def main():
    F = parse(["x1^2 - x2^2", "2*x1*x2"], ["x1", "x2"])
    inv = build_inverse(F, [1.0, 1.0])
    lo, hi = inv.y_box()
    print(f"seed p = (1, 1), image q = {tuple(inv.q)}")
    print(f"validated target box: [{lo[0]:+.4f}, {hi[0]:+.4f}] x [{lo[1]:+.4f}, {hi[1]:+.4f}]")
    print(f"{'y1':>8} {'y2':>8} {'G(y)':>24} {'|F(G(y)) - y|':>14}")
    worst = 0.0
    for i in range(4):
        for j in range(4):
            y = (
                lo[0] + (i + 0.5) * (hi[0] - lo[0]) / 4,
                lo[1] + (j + 0.5) * (hi[1] - lo[1]) / 4,
            )
            x = inv.invert_at(y)
            image = F.eval(x)
            err = max(abs(a - b) for a, b in zip(image, y))
            worst = max(worst, err)
            print(f"{y[0]:8.4f} {y[1]:8.4f} ({x[0]:10.6f}, {x[1]:10.6f}) {err:14.3e}")
    print(f"worst round-trip residual: {worst:.3e}")


if __name__ == "__main__":
    main()
