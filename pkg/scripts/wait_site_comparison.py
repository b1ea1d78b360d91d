"""RNZ under both wait-site readings on the random corpus; writes results/wait_sites.json."""
import json
from pathlib import Path

from oltsp.experiments import random_corpus, sweep

MATRIX = (("rnz", "fair"), ("rnz", "general"))


def main(count: int = 300):
    corpus = random_corpus(count)
    out = {}
    for site in ("first", "last"):
        res = sweep(corpus, MATRIX, wait_site=site, minimize_failures=False)
        out[site] = res.aggregate
        for k, v in res.aggregate.items():
            print(f"site={site:5s} {k:12s} max={v['max_ratio_float']:.4f} violations={v['violations']}/{v['count']} "
                  f"clamps={v['clamp_events']}")
    Path("results").mkdir(exist_ok=True)
    Path("results/wait_sites.json").write_text(json.dumps(out, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
