"""Print the fixed-v1 iteration table and a few exact values of ?(x)."""

import argparse

from fareybary.continuous import nonconvergence_demo
from fareybary.minkowski import farey_partition, question_mark


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-n", type=int, default=12)
    args = ap.parse_args()

    rep = nonconvergence_demo(max(args.n, 1))
    print(f"{'n':>3}  {'v2 coefficients':<22}{'v3 coefficients':<22}{'v2 point':<24}v3 point")
    for r in rep.rows:
        p2 = f"({float(r.p2.x):.6f}, {float(r.p2.y):.6f})"
        p3 = f"({float(r.p3.x):.6f}, {float(r.p3.y):.6f})"
        print(f"{r.n:>3}  {str(r.v2):<22}{str(r.v3):<22}{p2:<24}{p3}")
    print(f"limit ({rep.limit[0]:.6f}, {rep.limit[1]:.6f}), distance {rep.distance:.3e}, Fibonacci pattern {rep.fibonacci_ok}")
    print()
    print("x      ?(x)")
    for x in farey_partition(3):
        print(f"{str(x):<6} {question_mark(x)}")


if __name__ == "__main__":
    main()
