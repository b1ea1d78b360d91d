"""``oltsp gen|opt|run|sweep|repro``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from .adversary import GeneratorParams, adaptive_thm3, adaptive_thm4, branch_runner, generate
from .evaluate import bound_check, exact_expectation, monte_carlo, theorem_for
from .experiments import REPRO_IDS, random_corpus, repro, sweep
from .model import Instance
from .offline import Mode, opt, opt_discretized
from .online import ALPHA_THM3, RunConfig
from .scalar import fmt, parse

log = logging.getLogger("oltsp")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    p = Path(path)
    try:
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text)
    except OSError as exc:
        raise SystemExit(f"cannot write {p}: {exc}") from exc


def _read_instance(path: str) -> Instance:
    try:
        return Instance.from_json(Path(path).read_text())
    except OSError as exc:
        raise SystemExit(f"cannot read {path}: {exc}") from exc


def _csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    cols = sorted({k for r in rows for k in r if not isinstance(r[k], (dict, list))})
    w = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _spec(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def cmd_gen(args) -> int:
    fam = args.family
    if fam in ("thm3", "thm4"):
        if fam == "thm3":
            cfg = RunConfig(args.alg or "rnz", Mode.FAIR, args.alpha if args.alpha else ALPHA_THM3)
            res = adaptive_thm3(branch_runner(cfg), args.x, args.y, alpha_probe=cfg.wait_factor,
                                per_branch=args.per_branch)
        else:
            cfg = RunConfig(args.alg or "rnz", Mode.GENERAL, args.alpha)
            res = adaptive_thm4(branch_runner(cfg), per_branch=args.per_branch)
        _write(res.instance.to_json() + "\n", args.output)
        tr = dict(res.transcript.to_dict(), alg=cfg.describe(), ratio=fmt(res.ratio), spec=_spec(args))
        tpath = None if args.output in (None, "-") else str(Path(args.output).with_suffix(".transcript.json"))
        _write(_dump(tr), tpath)
        return 0
    params = GeneratorParams(family=fam, x=parse(args.x), y=parse(args.y), n=args.n, seed=args.seed,
                             pos_range=parse(args.range), horizon=parse(args.horizon), grid=parse(args.grid))
    if fam == "thm2" and args.single_2x:
        from .adversary import gen_thm2

        inst = gen_thm2(params.x, params.y, params.n, pair_at_2x=False)
    else:
        inst = generate(params)
    _write(inst.to_json() + "\n", args.output)
    return 0


def cmd_opt(args) -> int:
    inst = _read_instance(args.instance)
    res = opt(inst, args.mode)
    out = res.to_dict()
    if args.oracle:
        out["oracle"] = fmt(opt_discretized(inst, args.grid, args.mode))
        out["oracle_grid"] = args.grid
        out["oracle_agrees"] = parse(out["oracle"]) == res.value
    out["spec"] = _spec(args)
    _write(_dump(out), args.output)
    return 0 if out.get("oracle_agrees", True) else 1


def cmd_run(args) -> int:
    inst = _read_instance(args.instance)
    cfg = RunConfig(args.alg, args.adversary, args.alpha, args.wait_site)
    if args.trials:
        rep = monte_carlo(inst, cfg, args.trials, args.seed)
    else:
        rep = exact_expectation(inst, cfg, audit=True)
    out = rep.to_dict()
    ok = True
    th = theorem_for(args.alg, args.adversary)
    if th is not None:
        try:
            chk = bound_check(rep, th)
        except ValueError:
            chk = None
        if chk is not None:
            out.update(bound=fmt(chk.bound), **{"pass": chk.passed})
            ok = chk.passed
    out["spec"] = _spec(args)
    if args.format == "csv":
        _write(_csv(rep.branch_rows()), args.output)
    else:
        _write(_dump(out), args.output)
    return 0 if ok else 1


def cmd_sweep(args) -> int:
    corpus = random_corpus(args.count, args.seed, args.n_min, args.n_max, pos_range=parse(args.range),
                           horizon=parse(args.horizon), grid=parse(args.grid))
    mats = [(a, Mode(m)) for a in args.algs.split(",") for m in args.modes.split(",")]
    res = sweep(corpus, mats, args.alpha, args.wait_site)
    prefix = Path(args.output)
    _write(_csv(res.rows), str(prefix.with_suffix(".csv")))
    _write(_dump({"spec": _spec(args), "aggregate": res.aggregate, "pass": res.passed}), str(prefix.with_suffix(".json")))
    if res.counterexamples:
        _write(_dump(res.counterexamples), str(prefix.with_name(prefix.stem + "_counterexamples.json")))
    if not corpus:
        log.warning("empty corpus")
    sys.stdout.write(_dump({"aggregate": res.aggregate, "pass": res.passed}))
    return 0 if res.passed else 1


def cmd_repro(args) -> int:
    if args.id not in REPRO_IDS:
        sys.stderr.write(f"unknown id {args.id!r}; valid ids: {', '.join(REPRO_IDS)}\n")
        return 2
    out = repro(args.id, args.count, args.seed)
    out["spec"] = _spec(args)
    _write(_dump(out), args.output)
    return 0 if out["pass"] else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="oltsp", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance family")
    g.add_argument("--family", required=True, choices=["thm1", "thm2", "thm3", "thm4", "random"])
    g.add_argument("--x", default="1")
    g.add_argument("--y", default="1/1000000")
    g.add_argument("--n", type=int, default=4)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--range", default="4")
    g.add_argument("--horizon", default="8")
    g.add_argument("--grid", default="1/4")
    g.add_argument("--single-2x", action="store_true", help="thm2: the time-2x event carries only 2x")
    g.add_argument("--alg", choices=["rz", "rnz", "det"], help="algorithm the adaptive families play against")
    g.add_argument("--alpha")
    g.add_argument("--per-branch", action="store_true")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    o = sub.add_parser("opt", help="offline optimum")
    o.add_argument("--mode", choices=["fair", "general"], default="general")
    o.add_argument("--instance", required=True)
    o.add_argument("--oracle", action="store_true")
    o.add_argument("--grid", default="1/8")
    o.add_argument("-o", "--output")
    o.set_defaults(func=cmd_opt)

    r = sub.add_parser("run", help="evaluate an algorithm on an instance")
    r.add_argument("--alg", choices=["rz", "rnz", "det"], default="rz")
    r.add_argument("--adversary", choices=["fair", "general"], default="fair")
    r.add_argument("--alpha")
    r.add_argument("--wait-site", choices=["first", "last"], default="first")
    r.add_argument("--instance", required=True)
    grp = r.add_mutually_exclusive_group()
    grp.add_argument("--exact", action="store_true", default=True)
    grp.add_argument("--trials", type=int)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--format", choices=["json", "csv"], default="json")
    r.add_argument("-o", "--output")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="random-corpus sweep against the upper bounds")
    s.add_argument("--count", type=int, default=200)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--n-min", type=int, default=2)
    s.add_argument("--n-max", type=int, default=5)
    s.add_argument("--range", default="4")
    s.add_argument("--horizon", default="8")
    s.add_argument("--grid", default="1/4")
    s.add_argument("--algs", default="rz,rnz")
    s.add_argument("--modes", default="fair,general")
    s.add_argument("--alpha")
    s.add_argument("--wait-site", choices=["first", "last"], default="first")
    s.add_argument("-o", "--output", default="results/sweep")
    s.set_defaults(func=cmd_sweep)

    rp = sub.add_parser("repro", help="reproduce one table entry")
    rp.add_argument("id", help=", ".join(REPRO_IDS))
    rp.add_argument("--count", type=int, default=200)
    rp.add_argument("--seed", type=int, default=0)
    rp.add_argument("-o", "--output")
    rp.set_defaults(func=cmd_repro)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ValueError, RuntimeError) as exc:  # alignment, capacity, bad parameters
        sys.stderr.write(f"oltsp {args.command}: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
