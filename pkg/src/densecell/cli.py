"""Command-line entry point: ``densecell validate|sweep|verify|asymptote``.

Exit codes: 0 success, 1 infeasible model / failed check / numerical
failure, 2 usage or config error, 3 output I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from . import __version__, config as cfgmod, pathloss, report
from .asymptotics import ase_regime, mimo_factor, miso_sinr_limit, ratio_limit
from .errors import ConfigError, DensecellError, DivergenceError, DomainError
from .geometry import write_realizations_csv
from .montecarlo import engine
from .montecarlo.experiments import EXPERIMENTS, run_experiment

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _load(path):
    try:
        return cfgmod.load(path)
    except FileNotFoundError:
        raise ConfigError(f"no such config file: {path}") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None


def _emit(obj, as_json):
    if as_json:
        print(json.dumps(report._clean(obj), indent=2, sort_keys=True))


def _model_summary(model) -> str:
    d = pathloss.to_dict(model)
    if "gains" in d:
        r = d.pop("r")
        d.pop("gains")
        d["samples"] = f"{len(r)} points on [{r[0]:g}, {r[-1]:g}]"
    return json.dumps(d, sort_keys=True)


def cmd_validate(args) -> int:
    config = _load(args.config)
    model = config.model
    rep = pathloss.validate_feasibility(model)
    witness = pathloss.default_witness(model)
    a1 = None
    if witness is not None and rep.feasible:
        lam0 = args.lambda0 if args.lambda0 is not None else config.densities[0]
        try:
            a1 = pathloss.check_assumption1(model, witness, lam0)
            rep.assumption1 = a1.to_dict()
        except DensecellError as exc:
            rep.assumption1 = {"pass": False, "error": str(exc)}
    if args.json:
        _emit(rep.to_dict(), True)
    else:
        print(f"model: {_model_summary(model)}")
        print(f"condition (i)   L(0) finite, positive: {'ok' if rep.condition_i else 'FAILED'} (L0={rep.l0:.6g})")
        print(f"condition (ii)  L(r) <= L0:            {'ok' if rep.condition_ii else 'FAILED'}")
        g = f"{rep.gamma:.12g}" if rep.gamma is not None else "diverges"
        print(f"condition (iii) gamma finite:          {'ok' if rep.condition_iii else 'FAILED'} (gamma={g})")
        if rep.assumption1 is None:
            print("interference-tail assumption: not checked (no witness for this model)")
        else:
            print(f"interference-tail assumption: {'ok' if rep.assumption1.get('pass') else 'FAILED'} "
                  f"{json.dumps(report._clean(rep.assumption1), sort_keys=True)}")
        for m in rep.messages:
            print(f"note: {m}")
        print("feasible" if rep.feasible else "INFEASIBLE")
    return EXIT_OK if rep.feasible else EXIT_FAIL


def _prepare_dir(path: Path):
    try:
        path.mkdir(parents=True, exist_ok=True)
        probe = path / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output directory {path} is not writable: {exc}") from None


def _progress(config):
    total = config.trials
    last = [0.0]

    def tick(lam_index, done):
        now = time.monotonic()
        if done == total or now - last[0] > 2:
            last[0] = now
            print(f"  lambda={config.densities[lam_index]:g}: {done}/{total}", file=sys.stderr)
    return tick


def cmd_sweep(args) -> int:
    config = _load(args.config)
    if args.workers:
        config = config.with_(workers=args.workers)
    formats = {"csv", "json"} if args.format == "both" else {args.format}
    key = cfgmod.digest(config)
    out = Path(args.out) / key
    manifest_path = out / "manifest.json"
    if manifest_path.exists() and not args.force:
        print(f"cached: {out} (use --force to recompute)")
        return EXIT_OK
    _prepare_dir(out)

    started = datetime.now(timezone.utc).isoformat(timespec="seconds")
    result = engine.estimate(config, progress=None if args.quiet else _progress(config))
    finished = datetime.now(timezone.utc).isoformat(timespec="seconds")

    written = []
    if "csv" in formats:
        written.append(report.write_csv(result, out / "sweep.csv"))
    if "json" in formats:
        written.append(report.write_json(result, out / "sweep.json"))
    if args.plot:
        written += report.write_plots(result, out)
    if args.dump_realizations:
        for i in range(len(config.densities)):
            reals = [(t, engine.debug_realization(config, i, t))
                     for t in range(min(args.dump_realizations, config.trials))]
            p = out / f"realizations_{i}.csv"
            write_realizations_csv(p, reals)
            written.append(p)
    manifest = {
        "config_digest": key,
        "rng": result.metadata["rng"],
        "code_version": __version__,
        "kernel_backend": result.metadata["kernel_backend"],
        "started": started,
        "finished": finished,
        "outputs": sorted(p.name for p in written),
    }
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    for p in written:
        print(p)
    for w in result.metadata["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    config = _load(args.config)
    if args.workers:
        config = config.with_(workers=args.workers)
    if args.trials:
        config = config.with_(trials=args.trials)
    rep = run_experiment(args.experiment, config, edge_samples=args.edge_samples)
    if args.json:
        _emit(rep.to_dict(), True)
    else:
        for c in rep.checks:
            print(c.line())
        print(f"{args.experiment}: {'PASS' if rep.passed else 'FAIL'}")
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_asymptote(args) -> int:
    config = _load(args.config)
    model = config.model
    try:
        l0 = pathloss.evaluate(model, 0.0)
        gamma = pathloss.gamma_integral(model)
        limit = miso_sinr_limit(model)
    except DivergenceError as exc:
        print(f"error: quadrature failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    laws = []
    for law in config.t_laws:
        y = ratio_limit(config.r_law, law) if config.mode == "mimo" else 0.0
        laws.append({"law": law.label, "y": y, "mimo_factor": mimo_factor(y),
                     "regime": ase_regime(law).describe()})
    doc = {"l0": l0, "gamma": gamma, "limit": limit, "laws": laws}
    if args.json:
        _emit(doc, True)
        return EXIT_OK
    print(f"L0 = {l0:.12g}")
    print(f"gamma = {gamma:.12g}")
    print(f"L0/(2 pi gamma) = {limit:.12g}")
    for entry in laws:
        print(f"{entry['law']}: y = {entry['y']:g}, (1+sqrt(y))^2 = {entry['mimo_factor']:g}, "
              f"{entry['regime']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="densecell", description="Dense-network SINR/ASE scaling simulator.")
    p.add_argument("--version", action="version", version=f"densecell {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("validate", help="check path-loss feasibility and the interference assumption")
    v.add_argument("config")
    v.add_argument("--json", action="store_true")
    v.add_argument("--lambda0", type=float, help="density threshold for the assumption check")
    v.set_defaults(fn=cmd_validate)

    s = sub.add_parser("sweep", help="Monte Carlo sweep over the density grid")
    s.add_argument("config")
    s.add_argument("--out", default="out")
    s.add_argument("--format", choices=("csv", "json", "both"), default="both")
    s.add_argument("--plot", action="store_true", help="also write SINR and ASE SVG plots")
    s.add_argument("--force", action="store_true", help="recompute even if cached")
    s.add_argument("--workers", type=int, help=f"worker processes (env {cfgmod.WORKERS_ENV})")
    s.add_argument("--dump-realizations", type=int, default=0, metavar="K",
                   help="write base-station layouts of the first K trials per density")
    s.add_argument("--quiet", action="store_true")
    s.set_defaults(fn=cmd_sweep)

    e = sub.add_parser("verify", help="run a named verification experiment")
    e.add_argument("config")
    e.add_argument("--experiment", required=True, choices=EXPERIMENTS)
    e.add_argument("--trials", type=int, help="override simulation.trials")
    e.add_argument("--edge-samples", type=int, default=200,
                   help="draws for the 256x256 eigenvalue-edge check (0 skips it)")
    e.add_argument("--workers", type=int)
    e.add_argument("--json", action="store_true")
    e.set_defaults(fn=cmd_verify)

    a = sub.add_parser("asymptote", help="print limiting constants and regimes")
    a.add_argument("config")
    a.add_argument("--json", action="store_true")
    a.set_defaults(fn=cmd_asymptote)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DensecellError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
