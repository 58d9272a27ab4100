"""Headline coverage numbers of both formula variants.

No-RIS coverage at the default parameters, total coverage at 1 and 5 RIS/km
for N_r = 16 and 100, and the outage gain at 4 RIS/km, N_r = 1, tau = -20 dB.
"""

import argparse
import json

from riscov import analytic
from riscov.analytic import AnalyticOptions
from riscov.cli import load_config


def numbers(variant):
    opts = AnalyticOptions(variant)
    base = load_config(None).params
    out = {"no_ris": analytic.cov_no_ris(base, opts)}
    for nr in (16, 100):
        lo = analytic.cov_total(base.replace(n_r=nr, mu=1e-3), opts)
        hi = analytic.cov_total(base.replace(n_r=nr, mu=5e-3), opts)
        out[f"nr{nr}_mu1"] = lo
        out[f"nr{nr}_mu5"] = hi
        out[f"nr{nr}_relative_gain"] = hi / lo - 1.0
    gain = load_config(None, ["ris_per_km=4", "n_ris_elements=1", "tau_db=-20"]).params
    out["outage_gain"] = analytic.outage_gain(gain, opts)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--json", action="store_true", help="print JSON instead of a table")
    args = ap.parse_args()
    res = {v: numbers(v) for v in analytic.VARIANTS}
    if args.json:
        print(json.dumps(res, indent=2))
        return
    print(f"{'quantity':<22}{'paper':>10}{'consistent':>12}")
    for key in res["paper"]:
        print(f"{key:<22}{res['paper'][key]:>10.4f}{res['consistent'][key]:>12.4f}")


if __name__ == "__main__":
    main()
