"""Run every harness experiment at its default size and save the JSON summaries."""

import argparse
import json
import time
from pathlib import Path

from fareybary.harness import (
    ExperimentConfig,
    collect_traces,
    run_partition_failure,
    run_ratio_experiment,
    run_salem_1d,
    run_sn_over_n,
    run_type1_runs,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results", help="output directory")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    wcfg = ExperimentConfig("weighted", (1, 1, 1), args.samples, 60, args.seed, workers=args.workers)
    ccfg = ExperimentConfig("continuous", None, args.samples, 60, args.seed, workers=args.workers)

    t0 = time.perf_counter()
    wtraces = collect_traces(wcfg)
    ctraces = collect_traces(ccfg)
    results = {
        "ratio_weighted": run_ratio_experiment(wcfg, wtraces).to_json(),
        "ratio_continuous": run_ratio_experiment(ccfg, ctraces).to_json(),
        "sn_over_n": run_sn_over_n(wcfg, (20, 40, 60), wtraces).to_json(),
        "type1_runs": run_type1_runs(ccfg, traces=ctraces).to_json(),
        "partition_failure": run_partition_failure((1, 1, 2), depth=10, seed=args.seed).to_json(),
        "salem_1d": run_salem_1d(samples=args.samples, seed=args.seed).to_json(),
    }
    for name, payload in results.items():
        (out / f"{name}.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        print(f"{name:18s} -> {out / (name + '.json')}")
    print(f"done in {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
