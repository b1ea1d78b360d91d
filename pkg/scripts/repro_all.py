"""Run every reproduction id and write results/repro_<id>.json plus a summary table."""
import argparse
import json
from pathlib import Path

from oltsp.experiments import REPRO_IDS, repro


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=500)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(exist_ok=True)
    lines = []
    for rid in REPRO_IDS:
        rep = repro(rid, args.count)
        (out / f"repro_{rid}.json").write_text(json.dumps(rep, indent=2, sort_keys=True) + "\n")
        extra = ""
        if "aggregate" in rep:
            (agg,) = rep["aggregate"].values()
            extra = f"max={agg['max_ratio_float']:.4f} violations={agg['violations']} clamps={agg['clamp_events']}"
        lines.append(f"{rid:22s} target={rep['target_float']:.4f} {'PASS' if rep['pass'] else 'FAIL'} {extra}")
        print(lines[-1], flush=True)
    (out / "repro_summary.txt").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
