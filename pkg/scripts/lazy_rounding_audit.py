"""Run Lazy Rounding on planted and adversarial sources and print every audit.

Usage: python scripts/lazy_rounding_audit.py [--m 1000] [--seeds 5]
"""
import argparse

from omssc.harness import RunConfig, run


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--m", type=int, default=1000)
    parser.add_argument("--seeds", type=int, default=5)
    args = parser.parse_args()

    for n in (4, 5, 6):
        for r in (1, 2, 3):
            for source in ("planted", "adv:last_r"):
                for seed in range(args.seeds if source == "planted" else 1):
                    rep = run(RunConfig("lazy_rounding", source, n=n, r=r, m=args.m, seed=seed))
                    worst = min((a for a in rep.audits if not a.name.startswith("ledger")), key=lambda a: a.worst_margin)
                    status = "ok" if rep.passed else "FAILED"
                    print(f"n={n} r={r} {source:<10} seed={seed} cost={rep.total_cost:>6} "
                          f"ratio={rep.ratios['static']:.3f} audits {status} "
                          f"(tightest: {worst.name} {worst.worst_margin:.4g})")


if __name__ == "__main__":
    main()
