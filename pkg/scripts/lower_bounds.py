"""Measured competitive ratios of each MTF variant and MAE against its lower-bound adversary.

Usage: python scripts/lower_bounds.py [--scale 100]
"""
import argparse

from omssc.adversaries import CountBad, FixedPlusLast, LastR, RelativeBad, mae_dynamic_lb
from omssc.algorithms import mae, mtf_all, mtf_count, mtf_first, mtf_last, mtf_random, mtf_relative
from omssc.harness import play


def ratio(alg, adv, m):
    ep = play(alg, adv, m)
    return ep.ledger.total / adv.offline_solution(ep.trace, ep.initial).total


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scale", type=int, default=100, help="requests per universe element")
    args = parser.parse_args()

    print("adversary         algorithm      n    ratio")
    for n in (8, 16, 32):
        m = args.scale * n
        rows = [
            ("fixed_plus_last", "mtf_last", ratio(mtf_last(n), FixedPlusLast(n), m)),
            ("fixed_plus_last", "mtf_all", ratio(mtf_all(n), FixedPlusLast(n), m)),
            ("fixed_plus_last", "mtf_random", ratio(mtf_random(n, seed=0), FixedPlusLast(n), m)),
            ("relative_bad", "mtf_relative", ratio(mtf_relative(n), RelativeBad(n), m)),
            ("last_r (r=2)", "mtf_first", ratio(mtf_first(n), LastR(n, 2), m)),
        ]
        for adv, alg, value in rows:
            print(f"{adv:<17} {alg:<13} {n:>3} {value:8.2f}")
    for n in (16, 25, 36, 49):
        adv = CountBad(n)
        print(f"{'count_bad':<17} {'mtf_count':<13} {n:>3} {ratio(mtf_count(n), adv, 40 * adv.phase_length):8.2f}")
    for r, k in ((2, 4), (3, 5), (4, 6)):
        n = r * k
        value = ratio(mae(n), LastR(n, r), args.scale * k)
        print(f"{f'last_r (r={r})':<17} {'mae':<13} {n:>3} {value:8.2f}   (r+1)(n-r+1)/k = {(r + 1) * (n - r + 1) / k:.2f}")
    for k in (3, 4, 5, 6):
        adv, schedule = mae_dynamic_lb(k, 3)
        value = ratio(mae(adv.n), adv, 50 * schedule.requests_per_phase)
        print(f"{f'mae_dynamic_lb k={k}':<17} {'mae':<13} {adv.n:>3} {value:8.2f}")


if __name__ == "__main__":
    main()
