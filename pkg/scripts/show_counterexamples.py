"""Print branch-by-branch traces of the smallest known upper-bound violations."""
from oltsp.evaluate import exact_expectation
from oltsp.model import Instance
from oltsp.online import RunConfig
from oltsp.scalar import fmt

CASES = [
    ("rz", "general", [("7/4", ["-11/4"]), ("17/4", ["1/4"])]),
    ("rnz", "general", [("1", ["15/4"]), ("4", ["-5/2"])]),
    ("rnz", "fair", [("1", ["15/4"]), ("4", ["-5/2"])]),
    ("rnz", "general", [("2", ["-4"]), ("23/4", ["7/2"])]),
    ("rnz", "fair", [("5/4", ["-7/2", "11/4"]), ("23/4", ["4"])]),
]


def main():
    for alg, mode, events in CASES:
        inst = Instance.from_events(events)
        rep = exact_expectation(inst, RunConfig(alg, mode))
        print(f"{rep.alg} {mode}: {events}  E={fmt(rep.expected)} OPT={fmt(rep.opt)} "
              f"ratio={fmt(rep.ratio)} ~ {float(rep.ratio):.4f}")
        for b in rep.branches:
            led = ", ".join(f"t={fmt(t)} W={fmt(w)}" for t, w, _ in b.wait_ledger)
            print(f"   {b.coin_path or '-':4s} p={fmt(b.probability):5s} C={fmt(b.completion_time):8s} {led}")


if __name__ == "__main__":
    main()
