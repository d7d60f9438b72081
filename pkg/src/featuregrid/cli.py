"""Command-line workflow: grid enumeration, single-architecture reports,
result analysis and schedule tables.

stdout carries only data; diagnostics go to stderr.  Exit codes: 0 success,
1 domain or I/O error, 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import archgen, expio, gridsearch, schedule, skewnorm

SUBDIVISIONS_ENV = "FEATUREGRID_SUBDIVISIONS"


def _env_subdivisions() -> int:
    raw = os.environ.get(SUBDIVISIONS_ENV)
    if raw is None:
        return skewnorm.DEFAULT_SUBDIVISIONS
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{SUBDIVISIONS_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"{SUBDIVISIONS_ENV} must be >= 1, got {value}")
    return value


def _template_for_layers(layers: int) -> archgen.NetworkTemplate:
    return archgen.get_template("vgg16" if layers == 16 else "vgg10")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="featuregrid",
        description="Generate and analyze feature-redistributed VGG-style architecture families.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    grid = sub.add_parser("grid", help="enumerate the parameter grid")
    grid.add_argument("--layers", type=int, choices=(16, 10), default=16)
    grid.add_argument("--budget", type=int, default=None,
                      help="feature budget (default: template reference total)")
    grid.add_argument("--tolerance", type=float, default=0.05)
    grid.add_argument("--alignment", choices=sorted(skewnorm.BIN_ALIGNMENTS),
                      default=gridsearch.DEFAULT_GRID_ALIGNMENT)
    grid.add_argument("--subdivisions", type=int, default=None)
    grid.add_argument("--allow-starved", action="store_true",
                      help="keep triples whose tail layers round to zero features")
    grid.add_argument("--dataset", choices=expio.DATASETS, default="cifar10",
                      help="dataset recipe used for written manifests")
    grid.add_argument("--out", type=Path, default=None,
                      help="directory for summary.csv and per-architecture manifests")

    arch = sub.add_parser("arch", help="report a single architecture")
    arch.add_argument("--xi", type=float, required=True)
    arch.add_argument("--omega", type=float, required=True)
    arch.add_argument("--alpha", type=float, required=True)
    arch.add_argument("--layers", type=int, choices=(16, 10), default=16)
    arch.add_argument("--budget", type=int, default=None)
    arch.add_argument("--tolerance", type=float, default=0.05)
    arch.add_argument("--alignment", choices=sorted(skewnorm.BIN_ALIGNMENTS),
                      default="centered")
    arch.add_argument("--subdivisions", type=int, default=None)

    analyze = sub.add_parser("analyze", help="aggregate training results")
    analyze.add_argument("--results", type=Path, required=True)
    analyze.add_argument("--specs", type=Path, required=True,
                         help="directory holding *.manifest.json files")
    analyze.add_argument("--mode", choices=("best-per-xi", "scatter"), required=True)

    sched = sub.add_parser("schedule", help="print the warm-restart LR table")
    sched.add_argument("--epochs", type=int, default=150)
    sched.add_argument("--eta-max", type=float, default=expio.DEFAULT_ETA_MAX)
    sched.add_argument("--eta-min", type=float, default=expio.DEFAULT_ETA_MIN)
    sched.add_argument("--first-cycle", type=int, default=expio.DEFAULT_FIRST_CYCLE)
    sched.add_argument("--cycle-mult", type=int, default=expio.DEFAULT_CYCLE_MULT)

    return parser


def _cmd_grid(args) -> int:
    template = _template_for_layers(args.layers)
    budget = args.budget if args.budget is not None else archgen.template_budget(template)
    subdivisions = args.subdivisions if args.subdivisions is not None else _env_subdivisions()
    grid = replace(
        gridsearch.default_grid(template.name),
        budget=budget,
        tolerance=args.tolerance,
        alignment=args.alignment,
        subdivisions=subdivisions,
        require_full_coverage=not args.allow_starved,
    )
    specs = gridsearch.enumerate_grid(grid)
    print(f"candidates: {gridsearch.candidate_count(grid)}")
    print(f"valid: {len(specs)}")
    if specs:
        summary = gridsearch.summarize(specs)
        tally = summary.shape_tally()
        for shape in ("increasing", "decreasing", "peaked", "flat"):
            print(f"shape {shape}: {tally.get(shape, 0)}")
        if args.out is not None:
            args.out.mkdir(parents=True, exist_ok=True)
            (args.out / "summary.csv").write_text(summary.to_csv(), encoding="utf-8")
            written = expio.write_manifests(specs, args.dataset, args.out)
            print(f"wrote: {written} manifests + summary.csv -> {args.out}", file=sys.stderr)
    return 0


def _cmd_arch(args) -> int:
    template = _template_for_layers(args.layers)
    budget = args.budget if args.budget is not None else archgen.template_budget(template)
    subdivisions = args.subdivisions if args.subdivisions is not None else _env_subdivisions()
    params = skewnorm.SkewNormalParams(args.xi, args.omega, args.alpha)
    masses = skewnorm.bin_masses(params, template.slot_count, subdivisions, args.alignment)
    allocation = archgen.allocate(masses, budget)
    spec = archgen.realize(template, allocation, params)

    print("layer,kind,mass,features,shape")
    for i, (slot, mass, count, shape) in enumerate(
        zip(template.slots, masses.masses, allocation.counts, spec.layer_shapes), start=1
    ):
        shape_text = "x".join(str(v) for v in shape)
        print(f"{i},{slot.kind},{mass!r},{count},{shape_text}")
    print(f"captured_mass: {allocation.captured_mass!r}")
    print(f"valid: {archgen.is_valid(allocation, args.tolerance)}")
    print(f"full_coverage: {archgen.has_full_coverage(allocation)}")
    print(f"shape_class: {archgen.classify_shape(allocation)}")
    print(f"parameter_count: {spec.parameter_count}")
    print(f"flop_count: {spec.flop_count}")
    print(f"arch_id: {spec.arch_id}")
    return 0


def _cmd_analyze(args) -> int:
    results = expio.ingest_results(args.results)
    manifests = expio.read_manifests(args.specs)
    if args.mode == "best-per-xi":
        print(expio.best_per_xi_csv(expio.best_per_xi(results, manifests)), end="")
    else:
        print(expio.scatter_csv(expio.scatter_data(results, manifests)), end="")
    return 0


def _cmd_schedule(args) -> int:
    params = schedule.ScheduleParams(
        eta_max=args.eta_max,
        eta_min=args.eta_min,
        first_cycle=args.first_cycle,
        cycle_mult=args.cycle_mult,
        total_epochs=args.epochs,
    )
    boundaries = schedule.restart_boundaries(params)
    print("epoch,lr_begin,lr_end")
    for epoch, begin, end in schedule.epoch_table(params):
        print(f"{epoch},{begin!r},{end!r}")
    print(f"restarts: {' '.join(str(b) for b in boundaries)}")
    return 0


_COMMANDS = {
    "grid": _cmd_grid,
    "arch": _cmd_arch,
    "analyze": _cmd_analyze,
    "schedule": _cmd_schedule,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, expio.ResultsError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
