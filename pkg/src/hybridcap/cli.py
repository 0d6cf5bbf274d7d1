"""Command-line front end.

Every subcommand prints one JSON object to stdout.  Exit status is 0 on
success, 2 for usage or domain errors and 3 when a network configuration
cannot be simulated.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import montecarlo as mc
from .channel import ChannelRealization
from .protocols import end_to_end_throughput
from .scaling import (
    DomainError,
    Scheme,
    ScalingPoint,
    cbs_exponent,
    cbs_protocol_exponent,
    classify_regime,
    generalized_exponent,
    is_infrastructure_limited,
    regime_inequalities,
    throughput_exponent_infinite,
)
from .topology import ConfigurationError, NetworkConfig, generate

EXIT_USAGE = 2
EXIT_CONFIG = 3


class UsageError(Exception):
    pass


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {v}")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _exact(text: str) -> Fraction:
    """Decimal flag value kept as an exact rational."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a finite real number, got {text!r}") from None


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, ensure_ascii=False)
    sys.stdout.write("\n")


def _point(args, need_alpha=True) -> ScalingPoint:
    alpha = getattr(args, "alpha", None)
    if alpha is None and not need_alpha:
        alpha = 3.0  # placeholder: regime and backhaul results do not depend on alpha
    return ScalingPoint(alpha, args.beta, args.gamma, getattr(args, "eta", None))


def _value(v) -> dict:
    d = v.to_dict()
    d["order"] = str(v)
    return d


def _breakdown(b) -> dict:
    return {
        "scheme": str(b.scheme),
        "terms": [{"label": lab, **_value(v)} for lab, v in b.terms],
        "result": _value(b.result),
    }


# -- subcommands ------------------------------------------------------------
def cmd_regime(args) -> dict:
    p = _point(args, need_alpha=False)
    return {"regime": str(classify_regime(p)), "inequalities": regime_inequalities(p)}


def cmd_exponent(args) -> dict:
    p = _point(args)
    value, scheme = throughput_exponent_infinite(p)
    out = {
        "regime": str(classify_regime(p)),
        "infinite_backhaul": {**_value(value), "scheme": str(scheme)},
    }
    if p.eta is None:
        out.update({"exponent": float(value.exponent), "scheme": str(scheme)})
        return out
    res = generalized_exponent(p)
    out.update({
        "exponent": float(res.value.exponent),
        "scheme": str(res.scheme),
        "value": _value(res.value),
        "infrastructure_limited": is_infrastructure_limited(p),
        "breakdown": [_breakdown(res.ish), _breakdown(res.imh)],
    })
    return out


def cmd_cbs(args) -> dict:
    p = _point(args, need_alpha=False)
    label = classify_regime(p)
    per = {"imh": _value(cbs_protocol_exponent(p, Scheme.IMH))}
    if label.major == "B":
        per["ish"] = _value(cbs_protocol_exponent(p, Scheme.ISH))
    return {"regime": str(label), "cbs": _value(cbs_exponent(p)), "per_protocol": per}


def cmd_limited(args) -> dict:
    p = _point(args, need_alpha=False)
    return {
        "regime": str(classify_regime(p)),
        "eta": float(p.eta),
        "cbs": _value(cbs_exponent(p)),
        "infrastructure_limited": is_infrastructure_limited(p),
    }


def _load_json(path: str) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise UsageError(f"config {path} must hold a JSON object")
    return doc


def cmd_simulate(args) -> dict:
    fields = {}
    if args.config:
        doc = _load_json(args.config)
        fields = dict(doc.get("base", doc)) if "variable" in doc else doc
    overrides = {"n": args.n, "m": args.m, "l": args.l, "alpha": args.alpha,
                 "r_bs": args.r_bs, "seed": args.seed}
    fields.update({k: v for k, v in overrides.items() if v is not None})
    config = NetworkConfig.from_dict(fields)
    topo = generate(config)
    report = end_to_end_throughput(topo, ChannelRealization(topo, seed=config.seed), config)
    return {"config": config.to_dict(), **report.to_dict(with_traffic=args.traffic)}


def _load_experiment(source: str) -> mc.Experiment:
    if source in mc.packaged_experiments():
        return mc.load_experiment(source)
    try:
        return mc.Experiment.from_dict(_load_json(source))
    except ConfigurationError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"invalid experiment in {source}: {exc}") from exc


def _series_path(out: Path, r_bs: float) -> Path:
    return out.with_name(f"{out.stem}_rbs{r_bs:g}{out.suffix}")


def cmd_sweep(args) -> dict:
    exp = _load_experiment(args.config)
    changes = {k: v for k, v in (("seed", args.seed), ("trials", args.trials)) if v is not None}
    if changes:
        exp = dataclasses.replace(exp, spec=dataclasses.replace(exp.spec, **changes))
    out = Path(args.out)
    results = exp.run()
    summary = {"variable": exp.spec.variable, "trials": exp.spec.trials, "seed": exp.spec.seed,
               "outputs": []}
    for r_bs, result in results.items():
        path = out if r_bs is None else _series_path(out, r_bs)
        path.write_text(result.to_csv())
        entry = {"csv": str(path), "rows": [row.summary() for row in result.rows]}
        if r_bs is not None:
            entry["r_bs"] = r_bs
        if args.verbose:
            jpath = path.with_suffix(".json")
            jpath.write_text(result.to_json(per_trial=True))
            entry["json"] = str(jpath)
        if result.variable == "r_bs":
            try:
                entry["knee"] = mc.detect_knee(result)
            except mc.KneeNotDetected as exc:
                entry["knee"] = None
                entry["knee_note"] = str(exc)
            except ValueError:
                entry["knee"] = None
        summary["outputs"].append(entry)
    return summary


def cmd_verify_xki(args) -> dict:
    rep = mc.verify_xki_scaling(args.a, args.b, args.n_values, args.trials, args.seed)
    return rep.to_dict()


def cmd_verify_exponent(args) -> dict:
    p = ScalingPoint(args.alpha, args.beta, args.gamma, args.eta)
    rep = mc.verify_exponent_empirical(p, args.n_values, args.trials, args.seed)
    return rep.to_dict()


# -- parser ---------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hybridcap",
        description="Scaling laws and simulation of hybrid networks with rate-limited backhaul.",
        allow_abbrev=False,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_, description=help_, allow_abbrev=False)
        sp.set_defaults(func=func)
        return sp

    def beta_gamma(sp):
        sp.add_argument("--beta", type=_exact, required=True, help="m = n^beta")
        sp.add_argument("--gamma", type=_exact, required=True, help="l = n^gamma")

    sp = add("regime", cmd_regime, "classify an operating point")
    beta_gamma(sp)

    sp = add("exponent", cmd_exponent, "throughput scaling exponent")
    sp.add_argument("--alpha", type=_exact, required=True, help="path-loss exponent (> 2)")
    beta_gamma(sp)
    sp.add_argument("--eta", type=_exact, help="backhaul exponent, R_BS = n^eta")

    sp = add("cbs", cmd_cbs, "minimum backhaul rate exponent")
    sp.add_argument("--alpha", type=_exact, help="path-loss exponent (unused by the result)")
    beta_gamma(sp)

    sp = add("limited", cmd_limited, "infrastructure-limited test")
    sp.add_argument("--alpha", type=_exact, help="path-loss exponent (unused by the result)")
    beta_gamma(sp)
    sp.add_argument("--eta", type=_exact, required=True, help="backhaul exponent, R_BS = n^eta")

    sp = add("simulate", cmd_simulate, "simulate one network instance")
    sp.add_argument("--config", help="JSON file with NetworkConfig fields")
    sp.add_argument("--n", type=_positive_int)
    sp.add_argument("--m", type=_positive_int)
    sp.add_argument("--l", type=_positive_int)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--r-bs", type=float, help="backhaul link rate (b/s/Hz); 'inf' for unlimited")
    sp.add_argument("--seed", type=_seed)
    sp.add_argument("--traffic", action="store_true", help="include the traffic matrix")

    sp = add("sweep", cmd_sweep, "run a Monte-Carlo sweep and write CSV")
    sp.add_argument("--config", required=True,
                    help=f"experiment JSON file or packaged name ({', '.join(mc.packaged_experiments())})")
    sp.add_argument("--out", required=True, help="CSV path; series experiments add an _rbs<value> suffix")
    sp.add_argument("--seed", type=_seed)
    sp.add_argument("--trials", type=_positive_int)
    sp.add_argument("--verbose", action="store_true", help="also write JSON with per-trial data")

    sp = add("verify", None, "empirical checks of scaling predictions")
    vsub = sp.add_subparsers(dest="check", required=True)
    vx = vsub.add_parser("xki", help="growth of cross-cell pair counts", allow_abbrev=False)
    vx.set_defaults(func=cmd_verify_xki)
    vx.add_argument("--a", type=float, required=True, help="sources per cell = n^a")
    vx.add_argument("--b", type=float, required=True, help="cells = n^b")
    vx.add_argument("--n-values", type=_int_list, default=[2**k for k in range(10, 17)])
    vx.add_argument("--trials", type=int, default=200)
    vx.add_argument("--seed", type=_seed, default=0)
    ve = vsub.add_parser("exponent", help="simulated versus closed-form exponent", allow_abbrev=False)
    ve.set_defaults(func=cmd_verify_exponent)
    ve.add_argument("--alpha", type=_exact, required=True)
    beta_gamma(ve)
    ve.add_argument("--eta", type=_exact, required=True)
    ve.add_argument("--n-values", type=_int_list, default=[256, 1024, 4096, 16384])
    ve.add_argument("--trials", type=int, default=20)
    ve.add_argument("--seed", type=_seed, default=0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.func(args)
    except ConfigurationError as exc:
        print(f"hybridcap: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, UsageError, ValueError) as exc:
        print(f"hybridcap: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(result)
    return 0


if __name__ == "__main__":
    sys.exit(main())
