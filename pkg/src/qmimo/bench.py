"""Experiment engine: Monte-Carlo SER sweeps, cost landscapes, single traces.

Trials fan out over a process pool; every trial owns RNG streams
pre-derived from (seed, trial, detector), so error counts are identical
for any worker count and any detector subset. All detectors within a
trial see the same instance (paired comparison, checksummed).
"""

from __future__ import annotations

import json
import multiprocessing
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .channel import ConstellationSpec, DetectionInstance, RngStream, generate_instance
from .detectors import (
    BmBcdConfig,
    bcd_detect,
    bm_bcd_solve,
    ml_detect,
    mmse_detect,
    symbol_errors,
    zf_detect,
)
from .hubo import QubitLayout, build_cost_hamiltonian, scale_hamiltonian, serialize_hamiltonian
from .noise import NoiseParams
from .qaoa import (
    VARIANTS,
    VariantConfig,
    build_warm_start,
    flat_schedule,
    ramp_schedule,
    run_variant,
)
from .simulator import QaoaCircuit, evolve_schedules, initial_amplitudes

CLASSICAL_DETECTORS = ("ml", "zf", "mmse", "bcd")

# Fixed per-detector RNG roles; role 0 is instance generation, role 5 the
# landscape's shared warm start.
_STREAM_TAGS = {"ml": 1, "zf": 2, "mmse": 3, "bcd": 4,
                "stdqaoa": 10, "ws-rx": 11, "ws-ws": 12,
                "lr-qaoa": 13, "wslr-rx": 14, "wslr-w": 15}
_WARMSTART_ROLE = 5


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str = "ser"                      # "ser" | "landscape" | "single"
    nt: int = 2
    nr: int = 2
    order: int = 16
    snr_db: tuple[float, ...] = (7.0,)
    trials: int | None = None              # default: 10000 for Nt<=2, else 2000
    detectors: tuple[str, ...] = ("ml", "zf", "mmse", "wslr-w")
    noise: NoiseParams | None = None
    seed: int = 0
    p: int = 5
    shots: int = 1024
    delta_set: tuple[float, ...] = (0.25, 0.75)
    temperature: float = 0.2
    grid_res: int = 25
    flat_grid: int = 9
    workers: int | None = None
    out_dir: str = "results"
    figures: bool = True
    dump_hamiltonian: bool = False

    def validate(self):
        if self.kind not in ("ser", "landscape", "single"):
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.resolved_trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.snr_db:
            raise ValueError("need at least one SNR point")
        unknown = [d for d in self.detectors if d not in _STREAM_TAGS]
        if unknown:
            raise ValueError(f"unknown detectors {unknown}; known: {sorted(_STREAM_TAGS)}")
        if self.grid_res < 2:
            raise ValueError("landscape grid resolution must be >= 2")
        ConstellationSpec(self.order)   # raises on bad order

    @property
    def resolved_trials(self) -> int:
        if self.trials is not None:
            return self.trials
        return 10000 if self.nt <= 2 else 2000

    @property
    def resolved_workers(self) -> int:
        if self.workers is not None:
            return max(1, self.workers)
        return max(1, multiprocessing.cpu_count())

    def variant(self, name: str) -> VariantConfig:
        return VariantConfig.of(
            name, p=self.p, shots=self.shots, delta_set=self.delta_set,
            temperature=self.temperature, flat_grid=self.flat_grid,
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["resolved_trials"] = self.resolved_trials
        return d


@dataclass
class SerCell:
    detector: str
    snr_db: float
    trials: int
    errors: int
    ser: float
    ci95: float
    seconds: float


@dataclass
class SerReport:
    config: dict
    cells: list[SerCell]
    delta_counts: dict = field(default_factory=dict)   # detector -> snr -> param -> count
    truncated: bool = False
    paired: bool = True

    def cell(self, detector: str, snr_db: float) -> SerCell:
        for c in self.cells:
            if c.detector == detector and c.snr_db == snr_db:
                return c
        raise KeyError((detector, snr_db))

    def csv_rows(self):
        yield "detector,snr_db,trials,errors,ser,ci95"
        for c in self.cells:
            yield (f"{c.detector},{_fmt(c.snr_db)},{c.trials},{c.errors},"
                   f"{_fmt(c.ser)},{_fmt(c.ci95)}")

    def to_json_obj(self) -> dict:
        return {
            "kind": "ser",
            "config": self.config,
            "truncated": self.truncated,
            "paired": self.paired,
            "cells": [asdict(c) for c in self.cells],
            "delta_counts": self.delta_counts,
        }


@dataclass
class LandscapeReport:
    config: dict
    axis: list[float]                  # shared gamma_max / beta_max grid axis
    grids: dict[str, np.ndarray]       # variant -> (R, R), [i, j] = (gamma_i, beta_j)
    stats: dict[str, dict[str, float]]
    seconds: float = 0.0

    def csv_rows(self):
        yield "variant,gamma_max,beta_max,expected_cost"
        for name, grid in self.grids.items():
            for i, gm in enumerate(self.axis):
                for j, bm in enumerate(self.axis):
                    yield f"{name},{_fmt(gm)},{_fmt(bm)},{_fmt(grid[i, j])}"

    def to_json_obj(self) -> dict:
        return {
            "kind": "landscape",
            "config": self.config,
            "axis": self.axis,
            "grids": {k: v.tolist() for k, v in self.grids.items()},
            "stats": self.stats,
            "seconds": self.seconds,
        }


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _run_detector(name, instance, stream, config):
    """Returns (symbol errors, selected ramp/grid parameter or None)."""
    if name in CLASSICAL_DETECTORS:
        if name == "ml":
            s_hat, _ = ml_detect(instance)
        elif name == "zf":
            s_hat = zf_detect(instance)
        elif name == "mmse":
            s_hat = mmse_detect(instance)
        else:
            s_hat = bcd_detect(instance, stream.generator(_STREAM_TAGS[name]))
        return symbol_errors(s_hat, instance), None
    record = run_variant(instance, config.variant(name),
                         stream.generator(_STREAM_TAGS[name]), noise=config.noise)
    if record.instance_checksum != instance.checksum():
        raise RuntimeError("paired-instance checksum mismatch")
    return record.errors, record.selected_param


def _ser_block(args) -> dict:
    """One worker unit: trials [lo, hi) at one SNR, all detectors."""
    config, snr_db, lo, hi = args
    spec = ConstellationSpec(config.order)
    acc = {d: {"errors": 0, "seconds": 0.0, "deltas": {}} for d in config.detectors}
    for trial in range(lo, hi):
        stream = RngStream(config.seed, trial)
        instance = generate_instance(spec, config.nt, config.nr, snr_db, stream)
        for det in config.detectors:
            t0 = time.perf_counter()
            errors, param = _run_detector(det, instance, stream, config)
            slot = acc[det]
            slot["errors"] += errors
            slot["seconds"] += time.perf_counter() - t0
            if param is not None:
                key = ",".join(_fmt(v) for v in param)
                slot["deltas"][key] = slot["deltas"].get(key, 0) + 1
    return {"snr_db": snr_db, "n_trials": hi - lo, "acc": acc}


def _merge_block(totals, block):
    snr = block["snr_db"]
    for det, slot in block["acc"].items():
        tot = totals.setdefault((det, snr), {"errors": 0, "seconds": 0.0,
                                             "trials": 0, "deltas": {}})
        tot["errors"] += slot["errors"]
        tot["seconds"] += slot["seconds"]
        tot["trials"] += block["n_trials"]
        for key, cnt in slot["deltas"].items():
            tot["deltas"][key] = tot["deltas"].get(key, 0) + cnt


def run_ser_experiment(config: ExperimentConfig) -> SerReport:
    """Paired Monte-Carlo SER sweep over (detector, SNR)."""
    config.validate()
    trials = config.resolved_trials
    workers = config.resolved_workers
    totals: dict = {}
    truncated = False

    blocks = []
    chunk = max(1, min(trials, -(-trials // max(workers * 8, 1))))
    for snr in config.snr_db:
        for lo in range(0, trials, chunk):
            blocks.append((config, snr, lo, min(lo + chunk, trials)))

    try:
        if workers == 1:
            for block in blocks:
                _merge_block(totals, _ser_block(block))
        else:
            with multiprocessing.Pool(workers) as pool:
                for result in pool.imap_unordered(_ser_block, blocks):
                    _merge_block(totals, result)
    except KeyboardInterrupt:
        truncated = True

    cells = []
    delta_counts: dict = {}
    for snr in config.snr_db:
        for det in config.detectors:
            tot = totals.get((det, snr))
            if tot is None:
                continue
            n_sym = tot["trials"] * config.nt
            ser = tot["errors"] / n_sym
            ci = 1.96 * np.sqrt(max(ser * (1.0 - ser), 0.0) / n_sym)
            cells.append(SerCell(det, snr, tot["trials"], tot["errors"],
                                 ser, float(ci), tot["seconds"]))
            if tot["deltas"]:
                delta_counts.setdefault(det, {})[_fmt(snr)] = dict(
                    sorted(tot["deltas"].items()))
    return SerReport(config.to_dict(), cells, delta_counts, truncated=truncated)


def run_landscape(config: ExperimentConfig) -> LandscapeReport:
    """Exact <H_C> grids for all six variants on one seeded instance.

    Evolution runs under the max-coefficient-scaled Hamiltonian (as in
    the detection pipeline); the reported expectation uses the unscaled
    Hamiltonian, offset included. Flat kinds hold (gamma_max, beta_max)
    constant per layer; ramp kinds ramp gamma up to gamma_max and beta
    down from beta_max.
    """
    config.validate()
    t0 = time.perf_counter()
    spec = ConstellationSpec(config.order)
    stream = RngStream(config.seed, 0)
    instance = generate_instance(spec, config.nt, config.nr, config.snr_db[0], stream)
    layout = QubitLayout(2 * instance.nt, spec.bits_per_dim)
    ham = build_cost_hamiltonian(instance.g, instance.c, spec, layout)
    scaled, _ = scale_hamiltonian(ham)
    diag_full = ham.diagonal(include_offset=True)

    base = config.variant("wslr-w")
    warm = build_warm_start(instance, base, stream.generator(_WARMSTART_ROLE))

    res = config.grid_res
    axis = np.linspace(0.0, 3.0, res)
    cells = [(gm, bm) for gm in axis for bm in axis]
    grids: dict[str, np.ndarray] = {}
    stats: dict[str, dict[str, float]] = {}
    for name, (init, mixer, kind) in VARIANTS.items():
        builder = flat_schedule if kind == "flat" else ramp_schedule
        scheds = [builder(config.p, gm, bm) for gm, bm in cells]
        gammas = np.stack([s.gammas for s in scheds])
        betas = np.stack([s.betas for s in scheds])
        x_star = warm.x_star if (init == "warm" or mixer == "ws") else None
        circuit = QaoaCircuit(layout.n_qubits, init, scaled,
                              gammas[0], betas[0], mixer, x_star)
        finals = evolve_schedules(initial_amplitudes(circuit), scaled,
                                  gammas, betas, mixer, x_star)
        values = (np.abs(finals) ** 2) @ diag_full
        grid = values.reshape(res, res)
        grids[name] = grid
        stats[name] = {
            "min": float(grid.min()), "max": float(grid.max()),
            "range": float(grid.max() - grid.min()),
            "mean": float(grid.mean()), "std": float(grid.std()),
        }
    return LandscapeReport(config.to_dict(), [float(a) for a in axis],
                           grids, stats, seconds=time.perf_counter() - t0)


@dataclass
class SingleTrace:
    config: dict
    instance_summary: dict
    hamiltonian_text: str
    warm_start: dict
    detectors: dict
    checksum: int

    def to_json_obj(self) -> dict:
        return {"kind": "single", "config": self.config,
                "instance": self.instance_summary,
                "warm_start": self.warm_start, "detectors": self.detectors,
                "checksum": self.checksum}

    def render_text(self) -> str:
        obj = self.to_json_obj()
        lines = ["qmimo single-instance trace", ""]
        lines.append(json.dumps(obj, indent=2, sort_keys=True))
        lines.append("")
        lines.append("hamiltonian:")
        lines.append(self.hamiltonian_text)
        return "\n".join(lines)


def _array_repr(a: np.ndarray) -> list:
    if np.iscomplexobj(a):
        return [[float(v.real), float(v.imag)] for v in a.ravel()]
    return [float(v) for v in a.ravel()]


def run_single(config: ExperimentConfig) -> SingleTrace:
    """Full trace of one instance: matrices, Hamiltonian, warm start, detectors."""
    config.validate()
    spec = ConstellationSpec(config.order)
    stream = RngStream(config.seed, 0)
    snr = config.snr_db[0]
    instance = generate_instance(spec, config.nt, config.nr, snr, stream)
    layout = QubitLayout(2 * instance.nt, spec.bits_per_dim)
    ham = build_cost_hamiltonian(instance.g, instance.c, spec, layout)
    warm = build_warm_start(instance, config.variant("wslr-w"),
                            stream.generator(_WARMSTART_ROLE))

    detectors: dict = {}
    for det in config.detectors:
        errors, param = None, None
        if det in CLASSICAL_DETECTORS:
            errors, param = _run_detector(det, instance, stream, config)
            entry = {"errors": errors}
            if det == "ml":
                s_hat, energy = ml_detect(instance)
                entry["energy"] = energy
                entry["s_hat"] = _array_repr(s_hat)
            detectors[det] = entry
        else:
            record = run_variant(instance, config.variant(det),
                                 stream.generator(_STREAM_TAGS[det]), noise=config.noise)
            detectors[det] = {
                "errors": record.errors,
                "energy": record.energy,
                "bitstring": record.bitstring,
                "selected_param": list(record.selected_param),
                "s_hat": _array_repr(record.s_hat),
                "outcomes": [
                    {"param": list(oc.param), "bitstring": oc.bitstring,
                     "count": oc.count, "energy": oc.energy}
                    for oc in record.outcomes
                ],
            }

    summary = {
        "nt": instance.nt, "nr": instance.nr, "snr_db": snr,
        "sigma2": instance.sigma2,
        "h_real": _array_repr(instance.h.real), "h_imag": _array_repr(instance.h.imag),
        "x_true": _array_repr(instance.x_true),
        "y": _array_repr(instance.y),
        "g": _array_repr(instance.g), "c": _array_repr(instance.c),
        "s_true": _array_repr(instance.s_true),
    }
    warm_info = {
        "r_star": _array_repr(warm.r_star),
        "x_star": _array_repr(warm.x_star),
        "theta": _array_repr(warm.theta),
    }
    return SingleTrace(config.to_dict(), summary, serialize_hamiltonian(ham),
                       warm_info, detectors, instance.checksum())


def emit_report(report, out_path) -> dict[str, str]:
    """Write the delimited and JSON forms of a report side by side.

    ``out_path`` is a directory; files are named by experiment kind.
    Returns the written paths keyed by format.
    """
    import os

    os.makedirs(out_path, exist_ok=True)
    obj = report.to_json_obj()
    kind = obj["kind"]
    paths = {}
    if hasattr(report, "csv_rows"):
        csv_path = os.path.join(out_path, f"{kind}.csv")
        with open(csv_path, "w") as fh:
            for row in report.csv_rows():
                fh.write(row + "\n")
        paths["csv"] = csv_path
    json_path = os.path.join(out_path, f"{kind}.json")
    with open(json_path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
    paths["json"] = json_path
    if kind == "single":
        txt_path = os.path.join(out_path, "single.txt")
        with open(txt_path, "w") as fh:
            fh.write(report.render_text())
        paths["txt"] = txt_path
    return paths
