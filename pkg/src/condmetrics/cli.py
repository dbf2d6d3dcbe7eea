"""Command-line interface: metrics, sweep, match, and synth subcommands.

Exit codes: 0 success, 2 invalid input, 3 numerical failure (non-PSD),
4 configuration error.  CONDMETRICS_THREADS caps internal parallelism;
outputs are byte-identical for any worker count.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, InvalidInputError, NotPSDError
from .evaluate import build_report, sweep_label_noise, sweep_mode_collapse
from .matching import align_discovered, average_class_probabilities
from .report import (
    assignment_to_json,
    report_to_csv,
    report_to_json,
    reports_to_csv,
    reports_to_json,
)
from .synth import (
    CollapseSchedule,
    MixtureSpec,
    dirichlet_rows,
    gen_matched_moments,
    gen_mixture,
    gen_rings,
    gen_tightness_case,
)
from .tensorfile import load_features, load_labels, load_probabilities, save_tensor


def _existing(path: str | None, flag: str) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"{flag} file not found: {p}")
    return p


def _load_inputs(args) -> dict:
    data = {}
    rf = _existing(args.real_features, "--real-features")
    gf = _existing(args.gen_features, "--gen-features")
    rl = _existing(args.real_labels, "--real-labels")
    gl = _existing(args.gen_labels, "--gen-labels")
    pp = _existing(args.probs, "--probs")
    data["real_features"] = load_features(rf) if rf else None
    data["gen_features"] = load_features(gf) if gf else None
    data["real_labels"] = load_labels(rl) if rl else None
    data["gen_labels"] = load_labels(gl) if gl else None
    data["probs"] = load_probabilities(pp) if pp else None
    if all(v is None for v in data.values()):
        raise ConfigError("no inputs given; nothing to compute")
    return data


def _write(out: str | None, text: str) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, newline="\n")


def _common_flags(sub) -> None:
    sub.add_argument("--real-features")
    sub.add_argument("--gen-features")
    sub.add_argument("--real-labels")
    sub.add_argument("--gen-labels")
    sub.add_argument("--probs")
    sub.add_argument("--k", type=int)
    sub.add_argument("--subset-size", type=int)
    sub.add_argument("--trials", type=int, default=1)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--weighting", choices=["empirical", "uniform"], default="empirical")
    sub.add_argument("--pairing", choices=["identity", "hungarian"], default="identity")
    sub.add_argument("--out")
    sub.add_argument("--format", choices=["json", "csv"])


def cmd_metrics(args) -> int:
    data = _load_inputs(args)
    report = build_report(
        **data, k=args.k, subset_size=args.subset_size, trials=args.trials,
        seed=args.seed, weighting=args.weighting, pairing=args.pairing)
    if (args.format or "json") == "json":
        _write(args.out, report_to_json(report))
    else:
        _write(args.out, report_to_csv(report))
    return 0


def _parse_grid(raw: str) -> list[float]:
    try:
        return [float(tok) for tok in raw.split(",") if tok.strip() != ""]
    except ValueError:
        raise ConfigError(f"unparseable --grid value: {raw!r}") from None


def cmd_sweep(args) -> int:
    data = _load_inputs(args)
    common = dict(
        **data, k=args.k, subset_size=args.subset_size, trials=args.trials,
        seed=args.seed, weighting=args.weighting, pairing=args.pairing)
    if args.experiment == "label_noise":
        grid = _parse_grid(args.grid) if args.grid else [i / 10 for i in range(11)]
        rows = sweep_label_noise(grid=grid, **common)
    else:
        schedule = CollapseSchedule(
            steps=args.steps,
            shrink_factor=args.shrink_factor,
            per_class_sample=args.per_class_sample,
            collapsed_classes=tuple(int(c) for c in args.collapsed_classes.split(",")),
        )
        rows = sweep_mode_collapse(schedule=schedule, **common)
    if (args.format or "csv") == "csv":
        _write(args.out, reports_to_csv(rows))
    else:
        _write(args.out, reports_to_json(rows))
    return 0


def cmd_match(args) -> int:
    probs_path = _existing(args.probs, "--probs")
    labels_path = _existing(args.gen_labels, "--gen-labels")
    if probs_path is None or labels_path is None:
        raise ConfigError("match needs --probs and --gen-labels")
    probs = load_probabilities(probs_path)
    conds = load_labels(labels_path, k=probs.shape[1])
    assignment = align_discovered(probs, conds)
    averages = average_class_probabilities(probs, conds)
    _write(args.out, assignment_to_json(assignment.mapping, assignment.score, averages))
    return 0


def _parse_floats(raw: str, flag: str) -> list[float]:
    try:
        return [float(tok) for tok in raw.split(",")]
    except ValueError:
        raise ConfigError(f"unparseable {flag} value: {raw!r}") from None


def cmd_synth(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    def emit(**arrays):
        for name, arr in arrays.items():
            save_tensor(out_dir / f"{name}.cfm", arr)

    if args.generator == "mixture":
        spec_path = _existing(args.spec, "--spec")
        if spec_path is None:
            raise ConfigError("synth mixture needs --spec")
        try:
            raw = json.loads(spec_path.read_text())
            spec = MixtureSpec(
                np.asarray(raw["means"], dtype=np.float64),
                [np.asarray(c, dtype=np.float64) for c in raw["covs"]],
                np.asarray(raw["counts"]),
                seed=args.seed,
            )
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            raise ConfigError(f"bad mixture spec {spec_path}: {exc}") from None
        features, labels = gen_mixture(spec)
        emit(features=features, labels=labels)
    elif args.generator == "rings":
        features, labels = gen_rings(
            _parse_floats(args.radii, "--radii"), args.radial_sigma,
            args.n_per_class, args.seed)
        emit(features=features, labels=labels)
    elif args.generator == "matched-moments":
        pair = gen_matched_moments(args.seed, args.n_per_class)
        emit(a_features=pair.real_features, a_labels=pair.real_labels,
             b_features=pair.gen_features, b_labels=pair.gen_labels)
    elif args.generator == "tightness":
        pair = gen_tightness_case(
            _parse_floats(args.sigma_real, "--sigma-real"),
            _parse_floats(args.sigma_gen, "--sigma-gen"),
            args.n_per_class, args.seed)
        emit(real_features=pair.real_features, real_labels=pair.real_labels,
             gen_features=pair.gen_features, gen_labels=pair.gen_labels)
    else:  # dirichlet
        probs = dirichlet_rows(
            _parse_floats(args.alpha, "--alpha"), args.n_per_class, args.seed)
        emit(probs=probs)
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="condmetrics",
        description="Conditional generation metrics over feature and probability tensors")
    subs = parser.add_subparsers(dest="command", required=True)

    metrics = subs.add_parser("metrics", help="compute one metric report")
    _common_flags(metrics)
    metrics.set_defaults(fn=cmd_metrics)

    sweep = subs.add_parser("sweep", help="metric curves over a degradation grid")
    _common_flags(sweep)
    sweep.add_argument("--experiment", choices=["label_noise", "mode_collapse"],
                       required=True)
    sweep.add_argument("--grid", help="comma-separated parameter values (label_noise)")
    sweep.add_argument("--steps", type=int, default=11)
    sweep.add_argument("--shrink-factor", type=float, default=2.0 / 3.0)
    sweep.add_argument("--per-class-sample", type=int, default=100)
    sweep.add_argument("--collapsed-classes", default="0")
    sweep.set_defaults(fn=cmd_sweep)

    match = subs.add_parser("match", help="align discovered classes to real classes")
    match.add_argument("--probs")
    match.add_argument("--gen-labels")
    match.add_argument("--out")
    match.set_defaults(fn=cmd_match)

    synth = subs.add_parser("synth", help="emit synthetic harness datasets")
    synth.add_argument("generator",
                       choices=["mixture", "rings", "matched-moments", "tightness",
                                "dirichlet"])
    synth.add_argument("--spec", help="JSON mixture spec (means, covs, counts)")
    synth.add_argument("--radii", default="1,3")
    synth.add_argument("--radial-sigma", type=float, default=0.1)
    synth.add_argument("--sigma-real", default="1,2")
    synth.add_argument("--sigma-gen", default="2,1")
    synth.add_argument("--alpha", default="1,1")
    synth.add_argument("--n-per-class", type=int, default=1000)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--out-dir", required=True)
    synth.set_defaults(fn=cmd_synth)

    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 4
    except NotPSDError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except InvalidInputError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:  # console_scripts hook
    raise SystemExit(main())
