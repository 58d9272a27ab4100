"""No-RIS coverage against BS density: closed form vs Monte Carlo."""

import argparse

from riscov import analytic, montecarlo
from riscov.cli import format_rows, load_config
from riscov.montecarlo import SimConfig
from riscov.params import PER_KM2


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default="configs/budget_bs_sweep.json")
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out", help="CSV path (stdout if omitted)")
    args = ap.parse_args()

    spec = load_config(args.config)
    sim = SimConfig(trials=args.trials, seed=args.seed, estimator="bernoulli")
    rows = []
    for value in spec.sweep.values:
        p = spec.params.replace(lambda_bs=value * PER_KM2)
        est = montecarlo.estimate_no_ris(p, sim)
        exact = analytic.cov_no_ris(p)
        rows.append({"bs_per_km2": value, "closed_form": exact, "mc": est.p_hat,
                     "ci95": est.ci95_halfwidth, "abs_error": abs(est.p_hat - exact)})
    text = format_rows(rows, "csv")
    if args.out:
        open(args.out, "w").write(text)
    else:
        print(text, end="")


if __name__ == "__main__":
    main()
