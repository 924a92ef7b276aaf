"""Command-line entry point: simulate, fit, summarize, evaluate, export-cmf, serve.

Progress goes to standard error; machine-readable output goes to files or
standard out. Every artifact records the flags and seed that produced it, so
any run is reproducible from its command line.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import data_io, simulate, summarize
from .model import ModelConfig
from .sampler import SamplerConfig, run_mcmc


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load_observations(data_path: str, ranges_path: str):
    ranges = data_io.load_ranges(ranges_path)
    return data_io.discretize(data_path, ranges)


def cmd_simulate(args) -> int:
    if args.scenario == "1":
        sim = simulate.simulate_scenario1(args.seed)
    elif args.scenario == "2":
        sim = simulate.simulate_scenario2(args.seed, t=args.t)
    else:
        sim = simulate.simulate_ehr_like(args.seed)
    paths = simulate.write_simulation(sim, args.out)
    _log(f"scenario {args.scenario} seed {args.seed}: "
         f"n={sim.obs.n} p={sim.obs.p} q={sim.obs.q} K={sim.A.shape[1]}")
    print(json.dumps(paths, indent=1))
    return 0


def _fit_one(task):
    obs, prior, model_config, sampler_config, out_path = task
    chain = run_mcmc(obs, prior, model_config, sampler_config)
    with open(out_path, "w") as f:
        data_io.write_chain(chain, f)
    return out_path, len(chain), chain.overflow_count


def cmd_fit(args) -> int:
    obs = _load_observations(args.data, args.ranges)
    prior = None
    if args.prior:
        prior = data_io.load_prior_knowledge(args.prior, obs)
    model_config = ModelConfig(m=args.m, K_cap=args.k_cap,
                               hierarchical_rho=args.hierarchical)
    burn = args.burn_in if args.burn_in is not None else args.iters // 2
    tasks = []
    for c in range(args.chains):
        out = args.out if args.chains == 1 else _chain_path(args.out, c)
        cfg = SamplerConfig(iterations=args.iters, burn_in=burn,
                            thin=args.thin, seed=args.seed + c)
        tasks.append((obs, prior, model_config, cfg, out))
    _log(f"fitting {args.chains} chain(s): n={obs.n} p={obs.p} q={obs.q} "
         f"K0={prior.K0 if prior else 0} iters={args.iters}")
    if args.chains == 1:
        results = [_fit_one(tasks[0])]
    else:
        with ProcessPoolExecutor(max_workers=args.chains) as pool:
            results = list(pool.map(_fit_one, tasks))
    for out, nsnap, overflow in results:
        _log(f"wrote {out}: {nsnap} snapshots"
             + (f" ({overflow} capped birth proposals)" if overflow else ""))
    return 0


def _chain_path(stem: str, c: int) -> str:
    if stem.endswith(".jsonl"):
        return f"{stem[:-6]}-{c + 1}.jsonl"
    return f"{stem}-{c + 1}"


def cmd_summarize(args) -> int:
    with open(args.chain) as f:
        chain = data_io.read_chain(f)
    if not chain.snapshots:
        raise data_io.SchemaError("empty chain")
    obs = None
    if args.data and args.ranges:
        obs = _load_observations(args.data, args.ranges)
    summary = summarize.build_summary(chain, obs)
    with open(args.out, "w") as f:
        data_io.write_summary(summary, f)
    _log(f"summary: K_hat={summary.K_hat} (K0={summary.K0}) -> {args.out}")
    if args.network:
        with open(args.network, "w") as f:
            json.dump(summarize.export_network(summary), f, indent=1)
        _log(f"network -> {args.network}")
    return 0


def cmd_evaluate(args) -> int:
    with open(args.summary) as f:
        summary = data_io.read_summary(f)
    truth = simulate.read_truth(args.truth)
    metrics = summarize.evaluate_against_truth(
        summary, truth["A"], truth["B"], truth["C"])
    text = json.dumps(metrics, indent=1)
    if args.out:
        with open(args.out, "w") as f:
            f.write(text + "\n")
        _log(f"metrics -> {args.out}")
    else:
        print(text)
    return 0


def cmd_export_cmf(args) -> int:
    with open(args.summary) as f:
        summary = data_io.read_summary(f)
    doc = summarize.export_cmf(summary)
    text = json.dumps({key: val.tolist() for key, val in doc.items()}, indent=1)
    if args.out:
        with open(args.out, "w") as f:
            f.write(text + "\n")
        _log(f"factorization -> {args.out}")
    else:
        print(text)
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    with open(args.summary) as f:
        summary = data_io.read_summary(f)
    _log(f"serving summary (K_hat={summary.K_hat}, {summary.n} patients) "
         f"on {args.host}:{args.port}")
    serve(summary, port=args.port, host=args.host)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dfalloc",
        description="Latent disease discovery by double feature allocation.")
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("simulate", help="generate a synthetic benchmark")
    ps.add_argument("--scenario", choices=["1", "2", "ehr"], default="1")
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--t", type=float, default=3.0,
                    help="threshold for scenario 2")
    ps.add_argument("--out", required=True, help="output directory")
    ps.set_defaults(func=cmd_simulate)

    pf = sub.add_parser("fit", help="run the MCMC sampler")
    pf.add_argument("--data", required=True, help="raw measurements CSV")
    pf.add_argument("--ranges", required=True, help="reference ranges JSON")
    pf.add_argument("--prior", help="known-disease prior JSON")
    pf.add_argument("--out", required=True, help="chain output (JSONL)")
    pf.add_argument("--iters", type=int, default=5000)
    pf.add_argument("--burn-in", type=int, default=None,
                    help="default: half the iterations")
    pf.add_argument("--thin", type=int, default=5)
    pf.add_argument("--seed", type=int, default=0)
    pf.add_argument("--chains", type=int, default=1)
    pf.add_argument("--m", type=float, default=1.0, help="buffet mass")
    pf.add_argument("--k-cap", type=int, default=50)
    pf.add_argument("--hierarchical", action="store_true",
                    help="per-symptom inclusion probabilities")
    pf.set_defaults(func=cmd_fit)

    pm = sub.add_parser("summarize", help="posterior point estimates")
    pm.add_argument("--chain", required=True)
    pm.add_argument("--out", required=True, help="summary JSON")
    pm.add_argument("--network", help="also write the network export")
    pm.add_argument("--data", help="measurements CSV (attach observations)")
    pm.add_argument("--ranges", help="reference ranges JSON")
    pm.set_defaults(func=cmd_summarize)

    pe = sub.add_parser("evaluate", help="recovery metrics against a truth")
    pe.add_argument("--summary", required=True)
    pe.add_argument("--truth", required=True)
    pe.add_argument("--out")
    pe.set_defaults(func=cmd_evaluate)

    pc = sub.add_parser("export-cmf", help="nonnegative factorization view")
    pc.add_argument("--summary", required=True)
    pc.add_argument("--out")
    pc.set_defaults(func=cmd_export_cmf)

    pv = sub.add_parser("serve", help="read-only HTTP API over a summary")
    pv.add_argument("--summary", required=True)
    pv.add_argument("--port", type=int, default=8000)
    pv.add_argument("--host", default="127.0.0.1")
    pv.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, RuntimeError) as exc:
        _log(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
