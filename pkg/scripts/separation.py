"""Static versus dynamic optimum on the block trace {1}^b {2}^b ... {n}^b.

Usage: python scripts/separation.py [--b 50]
"""
import argparse

from omssc.core import RequestSet, Trace
from omssc.oracles import opt_dynamic_dp, opt_static_bruteforce


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--b", type=int, default=50)
    args = parser.parse_args()
    b = args.b
    print(" n  static  dynamic  ratio  (n+1)/2")
    for n in range(2, 7):
        trace = Trace(n, 1, tuple(RequestSet((x,)) for x in range(1, n + 1) for _ in range(b)))
        static = opt_static_bruteforce(trace).cost
        dynamic = opt_dynamic_dp(trace).cost
        print(f"{n:>2} {static:>7} {dynamic:>8} {static / dynamic:6.3f} {(n + 1) / 2:8.2f}")


if __name__ == "__main__":
    main()
