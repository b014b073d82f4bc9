"""Command-line interface: `qmimo ser|landscape|single`.

Examples
--------
qmimo ser --nt 2 --nr 2 --mod 16 --snr -8:17:5 --trials 10000 \
    --detectors ml,zf,mmse,wslr-w --noise off --seed 42 --out results/
qmimo landscape --snr-db 7 --p 5 --grid 25 --seed 7 --out results/
qmimo single --snr-db 7 --dump-hamiltonian --seed 1

SNR accepts a comma list (`-8,-3,2`) or an inclusive `start:stop:step`
range. `QMIMO_OUT` and `QMIMO_WORKERS` override the output directory
and worker count.
"""

from __future__ import annotations

import argparse
import os
import sys

import yaml

from .bench import (
    ExperimentConfig,
    emit_report,
    run_landscape,
    run_ser_experiment,
    run_single,
)
from .noise import EAGLE_R3, NoiseParams


def parse_snr(text: str) -> tuple[float, ...]:
    text = text.strip()
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3:
            raise ValueError(f"SNR range must be start:stop:step, got {text!r}")
        start, stop, step = parts
        if step <= 0:
            raise ValueError("SNR step must be positive")
        out = []
        v = start
        while v <= stop + 1e-9:
            out.append(round(v, 9))
            v += step
        return tuple(out)
    return tuple(float(p) for p in text.split(","))


def _parse_noise(args) -> NoiseParams | None:
    mode = args.noise.lower()
    if mode == "off":
        return None
    if mode in ("on", "eagle-r3"):
        base = EAGLE_R3
    else:
        raise ValueError(f"--noise must be off|on|eagle-r3, got {args.noise!r}")
    overrides = {}
    for name, flag in (("p_1q", "p1q"), ("p_2q", "p2q"), ("p_ro", "pro")):
        val = getattr(args, flag, None)
        if val is not None:
            overrides[name] = val
    if overrides:
        base = NoiseParams(**{**base.as_dict(), **overrides})
    return base


def _add_common(sub: argparse.ArgumentParser):
    sub.add_argument("--nt", type=int, default=2, help="transmit antennas")
    sub.add_argument("--nr", type=int, default=2, help="receive antennas")
    sub.add_argument("--mod", type=int, default=16, help="QAM order M")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--out", default=None, help="output directory (default results/)")
    sub.add_argument("--p", type=int, default=5, help="QAOA depth")
    sub.add_argument("--shots", type=int, default=1024)
    sub.add_argument("--delta-set", default="0.25,0.75",
                     help="comma list of linear-ramp slopes")
    sub.add_argument("--temperature", type=float, default=0.2,
                     help="warm-start soft-bit temperature")
    sub.add_argument("--flat-grid", type=int, default=9,
                     help="per-instance grid resolution for flat variants")
    sub.add_argument("--workers", type=int, default=None)
    sub.add_argument("--no-figures", action="store_true",
                     help="skip PNG rendering (CSV/JSON are always written)")
    sub.add_argument("--config", default=None,
                     help="YAML file with a nested config section per experiment kind")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmimo",
        description="Hybrid quantum-classical MIMO detection benchmark suite",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    ser = subs.add_parser("ser", help="Monte-Carlo SER sweep")
    _add_common(ser)
    ser.add_argument("--snr", default="7", help="comma list or start:stop:step (dB)")
    ser.add_argument("--trials", type=int, default=None)
    ser.add_argument("--detectors", default="ml,zf,mmse,wslr-w",
                     help="comma list: ml,zf,mmse,bcd,stdqaoa,ws-rx,ws-ws,"
                          "lr-qaoa,wslr-rx,wslr-w")
    ser.add_argument("--noise", default="off", help="off | on | eagle-r3")
    ser.add_argument("--p1q", type=float, default=None, help="override 1-qubit depolarizing prob")
    ser.add_argument("--p2q", type=float, default=None, help="override 2-qubit depolarizing prob")
    ser.add_argument("--pro", type=float, default=None, help="override readout flip prob")

    land = subs.add_parser("landscape", help="expected-cost landscape grid")
    _add_common(land)
    land.add_argument("--snr-db", type=float, default=7.0)
    land.add_argument("--grid", type=int, default=25)

    single = subs.add_parser("single", help="detailed single-instance trace")
    _add_common(single)
    single.add_argument("--snr-db", type=float, default=7.0)
    single.add_argument("--detectors", default="ml,zf,mmse,wslr-w")
    single.add_argument("--dump-hamiltonian", action="store_true",
                        help="also write the serialized cost Hamiltonian")

    return parser


def _load_config_file(path: str | None, kind: str) -> dict:
    if not path:
        return {}
    with open(path) as fh:
        data = yaml.safe_load(fh) or {}
    merged = dict(data.get("common", {}))
    merged.update(data.get(kind, {}))
    return merged


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    kind = args.command
    file_cfg = _load_config_file(args.config, kind)

    out_dir = args.out or file_cfg.get("out_dir") or os.environ.get("QMIMO_OUT", "results")
    workers = args.workers
    if workers is None and "QMIMO_WORKERS" in os.environ:
        workers = int(os.environ["QMIMO_WORKERS"])
    if workers is None:
        workers = file_cfg.get("workers")

    if kind == "ser":
        snr = parse_snr(str(file_cfg.get("snr", args.snr)))
        noise = _parse_noise(args)
        detectors = tuple(args.detectors.split(","))
        trials = args.trials if args.trials is not None else file_cfg.get("trials")
    elif kind == "landscape":
        snr = (args.snr_db,)
        noise = None
        detectors = tuple(VariantOrder)
        trials = 1
    else:
        snr = (args.snr_db,)
        noise = None
        detectors = tuple(args.detectors.split(","))
        trials = 1

    cfg = ExperimentConfig(
        kind=kind,
        nt=args.nt, nr=args.nr, order=args.mod,
        snr_db=snr, trials=trials, detectors=detectors,
        noise=noise, seed=args.seed,
        p=args.p, shots=args.shots,
        delta_set=tuple(float(v) for v in args.delta_set.split(",")),
        temperature=args.temperature,
        grid_res=getattr(args, "grid", 25),
        flat_grid=args.flat_grid,
        workers=workers, out_dir=out_dir,
        figures=not args.no_figures,
        dump_hamiltonian=getattr(args, "dump_hamiltonian", False),
    )
    cfg.validate()
    return cfg


VariantOrder = ("stdqaoa", "ws-rx", "ws-ws", "lr-qaoa", "wslr-rx", "wslr-w")


def _preprocess_argv(argv: list[str]) -> list[str]:
    """Join values starting with '-' onto their flag so argparse accepts them."""
    out = []
    join_next = False
    for tok in argv:
        if join_next:
            out[-1] = out[-1] + "=" + tok
            join_next = False
            continue
        out.append(tok)
        if tok in ("--snr", "--delta-set") :
            join_next = True
    return out


def main(argv: list[str] | None = None) -> int:
    argv = _preprocess_argv(list(sys.argv[1:] if argv is None else argv))
    args = build_parser().parse_args(argv)
    config = config_from_args(args)

    if config.kind == "ser":
        report = run_ser_experiment(config)
        paths = emit_report(report, config.out_dir)
        if config.figures:
            from .plots import render_ser_figure

            paths["png"] = render_ser_figure(report, config.out_dir)
        for cell in report.cells:
            print(f"{cell.detector:>8s}  snr={cell.snr_db:+6.1f} dB  "
                  f"ser={cell.ser:.4f} +-{cell.ci95:.4f}  "
                  f"({cell.errors}/{cell.trials * config.nt})")
        if report.truncated:
            print("interrupted: partial results flushed", file=sys.stderr)
    elif config.kind == "landscape":
        report = run_landscape(config)
        paths = emit_report(report, config.out_dir)
        if config.figures:
            from .plots import render_landscape_figure

            paths["png"] = render_landscape_figure(report, config.out_dir)
        for name, st in report.stats.items():
            print(f"{name:>8s}  min={st['min']:9.3f}  max={st['max']:9.3f}  "
                  f"mean={st['mean']:9.3f}  std={st['std']:8.3f}")
    else:
        trace = run_single(config)
        paths = emit_report(trace, config.out_dir)
        if config.dump_hamiltonian:
            ham_path = os.path.join(config.out_dir, "hamiltonian.txt")
            with open(ham_path, "w") as fh:
                fh.write(trace.hamiltonian_text)
            paths["hamiltonian"] = ham_path
        for det, entry in trace.detectors.items():
            extra = f"  energy={entry['energy']:.4f}" if "energy" in entry else ""
            print(f"{det:>8s}  errors={entry['errors']}{extra}")

    print("wrote: " + "  ".join(sorted(paths.values())))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
