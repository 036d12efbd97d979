"""``gcl`` command line: analyze, simulate, trajectory, sweep.

Exit codes: 0 success, 1 a comparison failed, 2 usage or malformed config,
3 runtime or parse failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .degree_model import DegreeDistribution, check_conditions, read_degfile, sample_iid
from .errors import GclError
from .experiments import (
    ExperimentConfig,
    _json_safe,
    compare,
    emit_csv,
    emit_svg,
    near_critical_sweep,
    replica_rng,
    run_replicas,
)
from .exploration import explore, rescaled_near_critical_deviation, trace_deviation
from .theory import (
    GeneratingFunctions,
    Regime,
    near_critical_from_sequence,
    predict_near_critical,
    theory_report,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3
DEFAULT_TRACE_TOL = 0.01
DEFAULT_RESCALED_TOL = 0.15


class UsageError(Exception):
    """Bad flags or a malformed config (exit 2)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _resolve_seed(flag: int | None, config_seed: int | None = None) -> int:
    """--seed wins, then the config, then GCL_SEED, then 0."""
    if flag is not None:
        return flag
    if config_seed is not None:
        return int(config_seed)
    env = os.environ.get("GCL_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"GCL_SEED must be an integer, got {env!r}") from None
    return 0


def _threads(flag: int | None) -> int:
    return flag if flag else (os.cpu_count() or 1)


def _read_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed JSON ({exc})") from None
    if not isinstance(obj, dict):
        raise UsageError(f"{path}: expected a JSON object")
    return obj


def _load_config(path, seed_flag, **overrides) -> ExperimentConfig:
    raw = _read_json(path)
    raw["seed"] = _resolve_seed(seed_flag, raw.get("seed"))
    raw.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return ExperimentConfig.from_dict(raw)
    except (TypeError, ValueError, KeyError) as exc:
        raise UsageError(f"{path}: invalid config ({exc})") from None


def _out_dir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _dump(obj, path) -> None:
    Path(path).write_text(json.dumps(_json_safe(obj), indent=2, sort_keys=False) + "\n")


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return f"{0.0 if abs(v) < 5e-7 else v:.6f}"
    return str(v)


# -- analyze ----------------------------------------------------------------


def cmd_analyze(args) -> int:
    if args.dist is not None:
        try:
            dist = DegreeDistribution.from_json(args.dist)
        except (ValueError, KeyError, TypeError) as exc:
            print(f"error: cannot parse --dist: {exc}", file=sys.stderr)
            return EXIT_RUNTIME
        source, seq = dist, None
    else:
        try:
            seq = read_degfile(args.degfile)
        except (OSError, ValueError) as exc:
            print(f"error: cannot read degree file: {exc}", file=sys.stderr)
            return EXIT_RUNTIME
        source = seq

    gf = GeneratingFunctions.from_distribution(source) if seq is None else GeneratingFunctions.from_sequence(seq)
    report = theory_report(gf, full_vk=args.full_vk)
    out = {"kind": "analyze", "source": "distribution" if seq is None else "sequence",
           "theory": report.to_dict()}

    near = None
    if seq is None and args.alpha is not None:
        if report.regime is not Regime.CRITICAL:
            print(f"error: --alpha needs a critical law, regime is {report.regime}", file=sys.stderr)
            return EXIT_RUNTIME
        near = predict_near_critical(dist, args.n, args.alpha)
    elif seq is not None and seq.alpha > 0 and seq.beta > 0 and report.regime is not Regime.DEGENERATE_ALL_DEG2:
        near = near_critical_from_sequence(seq)
    if near is not None:
        out["near_critical"] = near.to_dict()
    if seq is not None:
        out["conditions"] = check_conditions(seq, args.eta).to_dict()
        out["sequence"] = {"n": seq.n, "m": seq.m, "lambda_n": seq.lam, "alpha_n": seq.alpha, "beta_n": seq.beta}

    if args.json:
        print(json.dumps(_json_safe(out), indent=2))
        return EXIT_OK

    rows = [("regime", report.regime.value), ("lambda", report.lam), ("E D(D-2)", report.edd2)]
    if report.xi is not None:
        rows += [("xi", report.xi), ("tau", report.tau), ("v_frac", report.v_frac), ("e_frac", report.e_frac)]
        rows += [(f"v_{k}_frac", v) for k, v in report.vk_frac.items()]
    elif report.v_frac is not None:
        rows += [("v_frac", report.v_frac), ("e_frac", report.e_frac)]
    if seq is not None:
        rows += [("n", seq.n), ("alpha_n", seq.alpha), ("beta_n", seq.beta)]
    if near is not None:
        rows += [("alpha_n used", near.alpha_n), ("beta", near.beta), ("2 lam / beta", near.coefficient),
                 ("v(C1) ~", near.v_c1), ("e(C1) ~", near.e_c1), ("tau / alpha_n", near.tau_scaled),
                 ("n^(1/3) alpha_n", near.n_third_alpha)]
    width = max(len(r[0]) for r in rows)
    for name, val in rows:
        print(f"{name:<{width}}  {_fmt(val)}")
    if report.note:
        print(f"note: {report.note}")
    if seq is not None and out["conditions"]["degenerate_flags"]:
        print("conditions: " + ", ".join(out["conditions"]["degenerate_flags"]))
    return EXIT_OK


# -- simulate ---------------------------------------------------------------


def _inline_config(args) -> ExperimentConfig:
    if args.dist is None and args.counts is None:
        raise UsageError("simulate needs --config, --dist or --counts")
    if args.dist is not None:
        try:
            source = {"kind": "distribution", "dist": json.loads(args.dist)}
        except json.JSONDecodeError as exc:
            raise UsageError(f"--dist: malformed JSON ({exc})") from None
    else:
        try:
            source = {"kind": "counts", "counts": json.loads(args.counts)}
        except json.JSONDecodeError as exc:
            raise UsageError(f"--counts: malformed JSON ({exc})") from None
    try:
        return ExperimentConfig(
            source=source, n=args.n, replicas=args.replicas or 1, seed=_resolve_seed(args.seed),
            graph_mode=args.graph_mode or "multigraph", mode=args.mode or "combinatorial",
        )
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def cmd_simulate(args) -> int:
    if args.config is not None:
        cfg = _load_config(args.config, args.seed, replicas=args.replicas, n=args.n,
                           graph_mode=args.graph_mode, mode=args.mode)
    else:
        cfg = _inline_config(args)
    out = _out_dir(args.out)
    result = run_replicas(cfg, _threads(args.threads))
    report = compare(result, cfg.theory())
    emit_csv(result, out / "results.csv")
    _dump({**report.to_dict(), "config": cfg.to_dict()}, out / "comparison.json")

    print(f"{'statistic':<16}{'agg':<6}{'empirical':>14}{'theory':>14}{'gap':>12}  result")
    for r in report.records:
        verdict = "diag" if r.passed is None else ("pass" if r.passed else "FAIL")
        print(f"{r.statistic:<16}{r.aggregate:<6}{r.empirical:>14.6f}{r.theoretical:>14.6f}{r.gap:>12.2e}  {verdict}")
    if report.note:
        print(f"note: {report.note}")
    return EXIT_OK if report.all_passed else EXIT_FAIL


# -- trajectory -------------------------------------------------------------


def cmd_trajectory(args) -> int:
    cfg = _load_config(args.config, args.seed)
    trace_spec = dict(cfg.trace or {})
    points = int(trace_spec.get("points", 301))
    seq = cfg.fixed_sequence()
    rng = replica_rng(cfg.seed, 0)
    if seq is None:
        seq = sample_iid(cfg.distribution(), int(cfg.n), rng)
    gf = GeneratingFunctions.from_sequence(seq)
    out = _out_dir(args.out)

    near = args.near_critical or trace_spec.get("near_critical", False)
    if near:
        t0 = float(trace_spec.get("t0", 2.0 / seq.beta if seq.beta > 0 else 1.0))
        times = np.linspace(0.0, seq.alpha * t0, points)
    else:
        times = np.linspace(0.0, float(trace_spec.get("t_max", 1.5)), points)
    _, trace, _ = explore(seq, rng, "timed", times)
    emit_csv(trace, out / "trace.csv")
    trace.c1_to_csv(out / "c1_times.csv")

    dev = trace_deviation(trace, gf, int(trace_spec.get("k_max", 5)))
    payload = {"n": seq.n, "seed": cfg.seed, "deviations": dev.to_dict()}
    if near:
        tol = float(cfg.tolerances.get("rescaled", DEFAULT_RESCALED_TOL))
        sup = rescaled_near_critical_deviation(trace, seq, t0)
        payload["rescaled"] = {"t0": t0, "alpha_n": seq.alpha, "beta_n": seq.beta, "sup": sup, "tolerance": tol}
        checked = {"rescaled": sup}
        emit_svg(trace, out / "trace.svg", seq=seq, t0=t0)
    else:
        tol = float(cfg.tolerances.get("trace", DEFAULT_TRACE_TOL))
        checked = {"L": dev.L, "V_tilde": dev.V_tilde, "S_tilde": dev.S_tilde, "A": dev.A}
        emit_svg(trace, out / "trace.svg", gf=gf)
    passed = {k: v < tol for k, v in checked.items()}
    payload.update(tolerance=tol, passed=passed, all_passed=all(passed.values()))
    _dump(payload, out / "deviations.json")
    for k, v in checked.items():
        print(f"{k:<10}{v:>12.6f}  {'pass' if passed[k] else 'FAIL'} (tol {tol})")
    return EXIT_OK if payload["all_passed"] else EXIT_FAIL


# -- sweep ------------------------------------------------------------------


def cmd_sweep(args) -> int:
    raw = _read_json(args.config)
    known = {"base", "n_list", "alpha_list", "alpha_exponents", "replicas", "seed", "threshold",
             "tolerances", "schema_version"}
    extra = set(raw) - known
    if extra or "base" not in raw or "n_list" not in raw:
        raise UsageError(f"{args.config}: sweep config needs base and n_list (unknown keys: {sorted(extra)})")
    try:
        base = DegreeDistribution.from_json(raw["base"])
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"{args.config}: bad base distribution ({exc})") from None
    rows = near_critical_sweep(
        base, raw["n_list"], raw.get("alpha_list", []), int(raw.get("replicas", 1)),
        _resolve_seed(args.seed, raw.get("seed")), alpha_exponents=raw.get("alpha_exponents", []),
        threads=_threads(args.threads), threshold=float(raw.get("threshold", 4.0)),
        tolerances=raw.get("tolerances"),
    )
    out = _out_dir(args.out)
    emit_csv(rows, out / "sweep.csv")
    emit_svg(rows, out / "sweep.svg")
    print(f"{'n':>10}{'alpha_n':>12}{'n^1/3 a':>10}{'v1/(n a)':>10}{'pred':>8}{'pred_n':>8}{'rel gap':>9}{'v2/v1':>8}  status")
    for r in rows:
        status = "outside theorem hypotheses" if not r.within_hypotheses else ("pass" if r.passed else "FAIL")
        print(f"{r.n:>10}{r.alpha_n:>12.5g}{r.n_third_alpha:>10.3f}{r.v1_scaled:>10.4f}"
              f"{r.predicted:>8.3f}{r.predicted_n:>8.3f}{r.rel_gap:>9.3f}{r.v2_over_v1:>8.4f}  {status}")
    return EXIT_FAIL if any(r.passed is False for r in rows) else EXIT_OK


# -- entry point ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gcl", description="Giant components of configuration-model random graphs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--seed", type=int, help="master seed (default: config, then $GCL_SEED, then 0)")
        sp.add_argument("--threads", type=int, help="replica worker threads (default: CPU count)")

    a = sub.add_parser("analyze", help="phase, xi and giant-component predictions")
    src = a.add_mutually_exclusive_group(required=True)
    src.add_argument("--dist", help='distribution JSON, e.g. \'{"kind":"poisson","lambda":2}\'')
    src.add_argument("--degfile", help="degree-count file (k<TAB>n_k per line)")
    a.add_argument("--alpha", type=float, help="alpha_n for a near-critical prediction (critical laws)")
    a.add_argument("--n", type=int, default=10**6, help="n for the near-critical prediction")
    a.add_argument("--eta", type=float, default=0.1, help="moment-ratio threshold for condition checks")
    a.add_argument("--full-vk", action="store_true", help="report v_k for every degree in the support")
    a.add_argument("--json", action="store_true", help="machine-readable output")
    common(a)
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("simulate", help="replicated runs compared against theory")
    s.add_argument("--config", help="experiment config JSON")
    s.add_argument("--dist", help="inline distribution JSON (with --n)")
    s.add_argument("--counts", help='inline degree counts JSON, e.g. \'{"1":500,"3":500}\'')
    s.add_argument("--n", type=int)
    s.add_argument("--replicas", type=int)
    s.add_argument("--graph-mode", choices=("multigraph", "simple"))
    s.add_argument("--mode", choices=("combinatorial", "timed"))
    s.add_argument("--out", required=True, help="output directory")
    common(s)
    s.set_defaults(func=cmd_simulate)

    t = sub.add_parser("trajectory", help="timed exploration against its fluid limits")
    t.add_argument("--config", required=True)
    t.add_argument("--out", required=True)
    t.add_argument("--near-critical", action="store_true", help="compare the rescaled near-critical curve")
    common(t)
    t.set_defaults(func=cmd_trajectory)

    w = sub.add_parser("sweep", help="near-critical sweep over n and alpha_n")
    w.add_argument("--config", required=True)
    w.add_argument("--out", required=True)
    common(w)
    w.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GclError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
