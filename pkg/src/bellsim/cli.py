"""Command-line front end.

Subcommands::

    chsh-sim     simulate a four-setting run and analyze S
    lhv-sim      correlation of a hidden-variable model at one settings pair
    wigner-scan  margin of the three-angle inequality over a theta2 grid
    enumerate    the 16 outcome quartets (or 8 sextets)
    analyze      ingest a trial CSV and recompute the S analysis
    maximize     search analyzer angles for the largest |S|

Angles are degrees on the command line and radians everywhere inside.
Exit codes: 0 success, 2 usage or validation error, 1 runtime failure.
The default seed is 0, overridable with --seed or the BELLSIM_SEED
environment variable.

File formats (stable):

* Trial CSV: first line ``# angles_deg: delta=<f>,delta_prime=<f>,
  gamma=<f>,gamma_prime=<f>``, then a ``pair,outcome_d,outcome_g``
  header, then one row per trial with pair in {dg, dg', d'g, d'g'} and
  outcomes written +1/-1.  UTF-8, LF line endings.
* Report JSON: flat object {name, s_mean, s_std_error, per_pair,
  bound, violated_2sigma, violated_5sigma, seed, source}.
* Scan CSV: header ``theta2_deg,lhs,rhs,margin``.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys

import numpy as np

from . import harness, inequalities, lhv, qstate
from .harness import PAIR_LABELS, SettingsPolicy

__all__ = ["main", "entry_point"]

TRIAL_CSV_COLUMNS = "pair,outcome_d,outcome_g"

_ANGLE_HEADER_RE = re.compile(
    r"^# angles_deg: delta=([^,]+),delta_prime=([^,]+),"
    r"gamma=([^,]+),gamma_prime=([^,]+)$"
)

_STATE_NAMES = {kind.value: kind for kind in qstate.StateKind}


class UsageError(Exception):
    """Invalid arguments or malformed input; exit code 2."""


def _resolve_seed(seed) -> int:
    if seed is not None:
        return int(seed)
    return int(os.environ.get("BELLSIM_SEED", "0"))


def _parse_angles_deg(text: str) -> tuple[float, float, float, float]:
    parts = text.split(",")
    if len(parts) != 4:
        raise UsageError(
            "expected four comma-separated angles: delta,delta_prime,gamma,gamma_prime"
        )
    try:
        angles = tuple(float(p) for p in parts)
    except ValueError:
        raise UsageError(f"angles must be numeric, got {text!r}") from None
    if not all(math.isfinite(a) for a in angles):
        raise UsageError("angles must be finite")
    return angles


def _state_kind(name: str) -> qstate.StateKind:
    try:
        return _STATE_NAMES[name]
    except KeyError:
        known = ", ".join(sorted(_STATE_NAMES))
        raise UsageError(f"unknown state {name!r} (available: {known})") from None


def _lhv_model(name: str) -> lhv.LhvModel:
    try:
        return lhv.get_model(name)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _report_dict(analysis, seed, source: str, name: str = "chsh_d4") -> dict:
    return {
        "name": name,
        "s_mean": analysis.s_mean,
        "s_std_error": analysis.s_std_error,
        "per_pair": [
            {"pair": p.label, "E": p.e, "std_error": p.std_error, "n": p.n}
            for p in analysis.per_pair
        ],
        "bound": 2.0,
        "violated_2sigma": analysis.violated_2sigma,
        "violated_5sigma": analysis.violated_5sigma,
        "seed": seed,
        "source": source,
    }


def _print_analysis(analysis, source: str) -> None:
    print(f"source: {source}")
    for p in analysis.per_pair:
        print(f"  E({p.label}) = {p.e:+.6f} +- {p.std_error:.6f}  (n={p.n})")
    print(
        f"S = {analysis.s_mean:+.6f} +- {analysis.s_std_error:.6f}  (bound 2)"
    )
    print(
        f"violated at 2 sigma: {analysis.violated_2sigma}, "
        f"at 5 sigma: {analysis.violated_5sigma}"
    )


def write_trials_csv(path: str, log: harness.TrialLog, angles_deg) -> None:
    delta, delta_prime, gamma, gamma_prime = angles_deg
    lines = [
        f"# angles_deg: delta={delta!r},delta_prime={delta_prime!r},"
        f"gamma={gamma!r},gamma_prime={gamma_prime!r}",
        TRIAL_CSV_COLUMNS,
    ]
    labels = PAIR_LABELS
    pair_index = log.pair_index
    d = log.outcome_d
    g = log.outcome_g
    lines.extend(
        f"{labels[pair_index[i]]},{'+1' if d[i] > 0 else '-1'},"
        f"{'+1' if g[i] > 0 else '-1'}"
        for i in range(len(log))
    )
    _write_text(path, "\n".join(lines) + "\n")


def read_trials_csv(path: str) -> harness.TrialLog:
    """Parse a trial CSV; malformed content raises UsageError citing the
    physical 1-based line number."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise UsageError("line 1: missing angles header")
    match = _ANGLE_HEADER_RE.match(lines[0])
    if match is None:
        raise UsageError(
            "line 1: expected '# angles_deg: delta=...,delta_prime=...,"
            "gamma=...,gamma_prime=...'"
        )
    try:
        delta, delta_prime, gamma, gamma_prime = (
            float(v) for v in match.groups()
        )
    except ValueError:
        raise UsageError("line 1: angles must be numeric") from None
    if len(lines) < 2 or lines[1] != TRIAL_CSV_COLUMNS:
        raise UsageError(f"line 2: expected header {TRIAL_CSV_COLUMNS!r}")

    label_index = {label: i for i, label in enumerate(PAIR_LABELS)}
    pair_index = []
    outcome_d = []
    outcome_g = []
    for offset, line in enumerate(lines[2:]):
        number = offset + 3
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise UsageError(f"line {number}: expected 3 comma-separated fields")
        label, d_text, g_text = parts
        if label not in label_index:
            raise UsageError(
                f"line {number}: unknown pair label {label!r} "
                f"(expected one of {', '.join(PAIR_LABELS)})"
            )
        outcomes = []
        for text in (d_text, g_text):
            try:
                value = int(text)
            except ValueError:
                value = 0
            if value not in (1, -1):
                raise UsageError(f"line {number}: outcome must be +1 or -1")
            outcomes.append(value)
        pair_index.append(label_index[label])
        outcome_d.append(outcomes[0])
        outcome_g.append(outcomes[1])
    if not pair_index:
        raise UsageError("no trial rows found")

    rad = tuple(
        math.radians(a) for a in (delta, delta_prime, gamma, gamma_prime)
    )
    schedule = harness.chsh_schedule(*rad)
    return harness.TrialLog(
        pairs=schedule.pairs,
        pair_index=np.asarray(pair_index, dtype=np.int64),
        outcome_d=np.asarray(outcome_d, dtype=np.int8),
        outcome_g=np.asarray(outcome_g, dtype=np.int8),
        seed=0,
        source_description=f"file:{path}",
    )


# --- subcommands -------------------------------------------------------------


def cmd_chsh_sim(args) -> int:
    angles_deg = _parse_angles_deg(args.angles)
    if args.trials < 1:
        raise UsageError("trials must be >= 1")
    seed = _resolve_seed(args.seed)
    if args.state is not None:
        source = qstate.make_state(_state_kind(args.state))
    else:
        source = _lhv_model(args.model)
    policy = (
        SettingsPolicy.ROUND_ROBIN
        if args.schedule == "round-robin"
        else SettingsPolicy.UNIFORM_RANDOM
    )
    rad = tuple(math.radians(a) for a in angles_deg)
    schedule = harness.chsh_schedule(*rad, policy=policy)
    log = harness.run_trials(source, schedule, args.trials, seed)
    if args.emit_trials:
        write_trials_csv(args.emit_trials, log, angles_deg)
    analysis = harness.analyze_chsh(harness.tabulate(log))
    report = _report_dict(analysis, seed, log.source_description)
    if args.out:
        _write_text(args.out, json.dumps(report, indent=2) + "\n")
    _print_analysis(analysis, log.source_description)
    return 0


def cmd_lhv_sim(args) -> int:
    if args.trials < 1:
        raise UsageError("trials must be >= 1")
    if args.nodes < 1000:
        raise UsageError("nodes must be >= 1000")
    model = _lhv_model(args.model)
    seed = _resolve_seed(args.seed)
    delta = math.radians(args.delta)
    gamma = math.radians(args.gamma)
    estimate = lhv.estimate_correlation(model, delta, gamma, args.trials, seed)
    result = {
        "model": model.name,
        "delta_deg": args.delta,
        "gamma_deg": args.gamma,
        "mc_mean": estimate.mean,
        "mc_std_error": estimate.std_error,
        "n": estimate.n_samples,
        "seed": seed,
    }
    print(
        f"{model.name}: E({args.delta} deg, {args.gamma} deg) = "
        f"{estimate.mean:+.6f} +- {estimate.std_error:.6f}  (n={estimate.n_samples})"
    )
    if model.support is not None:
        quad = lhv.quadrature_correlation(model, delta, gamma, args.nodes)
        result["quadrature"] = quad
        result["nodes"] = args.nodes
        print(f"quadrature ({args.nodes} nodes): {quad:+.6f}")
    if args.out:
        _write_text(args.out, json.dumps(result, indent=2) + "\n")
    return 0


def cmd_wigner_scan(args) -> int:
    if args.steps < 3:
        raise UsageError("steps must be >= 3")
    kind = _state_kind(args.state)
    source = inequalities.QuantumBornSource(qstate.make_state(kind))
    points = harness.wigner_scan(
        math.radians(args.theta1),
        math.radians(args.theta3),
        args.steps,
        source=source,
    )
    lines = ["theta2_deg,lhs,rhs,margin"]
    lines.extend(
        f"{math.degrees(p.theta2)!r},{p.lhs!r},{p.rhs!r},{p.margin!r}"
        for p in points
    )
    text = "\n".join(lines) + "\n"
    if args.out:
        _write_text(args.out, text)
        violations = sum(1 for p in points if p.margin > 1e-9)
        print(f"wrote {len(points)} rows to {args.out} ({violations} violations)")
    else:
        sys.stdout.write(text)
    return 0


def _quartet_rows():
    quartets = inequalities.enumerate_quartets()
    rows = {
        "d_delta": [q.d_delta for q in quartets],
        "g_gamma": [q.g_gamma for q in quartets],
        "d_delta_prime": [q.d_delta_prime for q in quartets],
        "g_gamma_prime": [q.g_gamma_prime for q in quartets],
        "S": [q.s_value for q in quartets],
    }
    return quartets, rows


def cmd_enumerate(args) -> int:
    sign = (
        inequalities.CorrelationSign.CORRELATED
        if args.sign == "correlated"
        else inequalities.CorrelationSign.ANTICORRELATED
    )
    if args.sextets:
        sextets = inequalities.enumerate_sextets(sign)
        if args.format == "json":
            payload = [
                {"d": list(s.d), "g": list(s.g), "sign": s.sign.value}
                for s in sextets
            ]
            print(json.dumps(payload, indent=2))
        elif args.format == "csv":
            print("d_theta1,d_theta2,d_theta3,g_theta1,g_theta2,g_theta3")
            for s in sextets:
                print(",".join(f"{v:+d}" for v in (*s.d, *s.g)))
        else:
            for name, values in (
                ("d_theta1", [s.d[0] for s in sextets]),
                ("d_theta2", [s.d[1] for s in sextets]),
                ("d_theta3", [s.d[2] for s in sextets]),
                ("g_theta1", [s.g[0] for s in sextets]),
                ("g_theta2", [s.g[1] for s in sextets]),
                ("g_theta3", [s.g[2] for s in sextets]),
            ):
                print(f"{name}: " + ",".join(f"{v:+d}" for v in values))
        return 0

    quartets, rows = _quartet_rows()
    if args.format == "json":
        payload = [
            {
                "d_delta": q.d_delta,
                "g_gamma": q.g_gamma,
                "d_delta_prime": q.d_delta_prime,
                "g_gamma_prime": q.g_gamma_prime,
                "S": q.s_value,
            }
            for q in quartets
        ]
        print(json.dumps(payload, indent=2))
    elif args.format == "csv":
        print("quartet,d_delta,g_gamma,d_delta_prime,g_gamma_prime,S")
        for i, q in enumerate(quartets, start=1):
            print(
                f"{i},{q.d_delta:+d},{q.g_gamma:+d},"
                f"{q.d_delta_prime:+d},{q.g_gamma_prime:+d},{q.s_value:+d}"
            )
    else:
        for name, values in rows.items():
            print(f"{name}: " + ",".join(f"{v:+d}" for v in values))
    return 0


def cmd_analyze(args) -> int:
    log = read_trials_csv(args.input)
    analysis = harness.analyze_chsh(harness.tabulate(log))
    report = _report_dict(analysis, None, log.source_description)
    if args.out:
        _write_text(args.out, json.dumps(report, indent=2) + "\n")
    _print_analysis(analysis, log.source_description)
    return 0


def cmd_maximize(args) -> int:
    kind = _state_kind(args.state)
    if not 0.0 < args.coarse_step <= 15.0:
        raise UsageError("coarse-step must be in (0, 15] degrees")
    angles, s_star = harness.maximize_chsh(
        kind, coarse_step_deg=args.coarse_step, refine_iters=args.refine_iters
    )
    angles_deg = [math.degrees(a) for a in angles]
    labels = ("delta", "delta_prime", "gamma", "gamma_prime")
    for label, value in zip(labels, angles_deg):
        print(f"{label} = {value:.6f} deg")
    print(f"s_star = {s_star:.9f}")
    if args.out:
        payload = {
            "state": kind.value,
            "angles_deg": dict(zip(labels, angles_deg)),
            "s_star": s_star,
        }
        _write_text(args.out, json.dumps(payload, indent=2) + "\n")
    return 0


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bellsim",
        description="Simulate and analyze two-particle correlation experiments.",
        epilog="Angles are degrees. Default seed: 0, or the BELLSIM_SEED "
        "environment variable. Exit codes: 0 ok, 2 usage error, 1 runtime failure.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    state_names = sorted(_STATE_NAMES)

    p = sub.add_parser("chsh-sim", help="simulate a four-setting run")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--state", choices=state_names, help="entangled state source")
    group.add_argument("--model", help="hidden-variable model source")
    p.add_argument(
        "--angles",
        default="0,-90,135,-135",
        help="delta,delta_prime,gamma,gamma_prime in degrees",
    )
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument(
        "--schedule",
        choices=["uniform", "round-robin"],
        default="uniform",
        help="how each trial picks its settings pair",
    )
    p.add_argument("--emit-trials", metavar="PATH", help="write the trial CSV")
    p.add_argument("--out", metavar="PATH", help="write the report JSON")
    p.set_defaults(func=cmd_chsh_sim)

    p = sub.add_parser("lhv-sim", help="single-pair correlation of an LHV model")
    p.add_argument("--model", required=True)
    p.add_argument("--delta", type=float, default=0.0, help="degrees")
    p.add_argument("--gamma", type=float, default=0.0, help="degrees")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--nodes", type=int, default=4096)
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_lhv_sim)

    p = sub.add_parser("wigner-scan", help="three-angle inequality margins")
    p.add_argument("--theta1", type=float, default=0.0, help="degrees")
    p.add_argument("--theta3", type=float, default=90.0, help="degrees")
    p.add_argument("--steps", type=int, default=19)
    p.add_argument(
        "--state", choices=state_names, default="spin-anticorrelated"
    )
    p.add_argument("--out", metavar="PATH", help="write CSV here instead of stdout")
    p.set_defaults(func=cmd_wigner_scan)

    p = sub.add_parser("enumerate", help="outcome quartets or sextets")
    p.add_argument("--sextets", action="store_true")
    p.add_argument(
        "--sign", choices=["anticorrelated", "correlated"], default="anticorrelated"
    )
    p.add_argument("--format", choices=["text", "csv", "json"], default="text")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("analyze", help="analyze a trial CSV")
    p.add_argument("input", help="trial CSV path")
    p.add_argument("--out", metavar="PATH", help="write the report JSON")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("maximize", help="search angles for the largest |S|")
    p.add_argument("--state", choices=state_names, default="spin-anticorrelated")
    p.add_argument("--coarse-step", type=float, default=15.0, help="degrees")
    p.add_argument("--refine-iters", type=int, default=200)
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_maximize)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry_point() -> None:
    sys.exit(main())
