"""Experiment configuration, runners and result files.

A config is a flat JSON object; every key has a default (see ``ExperimentConfig``)
and unknown keys are rejected. Runs write CSV data files plus ``manifest.json``,
which echoes the resolved config and checksums every data file so a run can be
repeated from the manifest alone.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator, Mapping

import numpy as np

from semnoma import __version__
from semnoma.access import DownlinkScenario, SchemeKind
from semnoma.channel import FadingSampler, NoiseModel, sample_fading
from semnoma.errors import ConfigError
from semnoma.opportunistic import SCHEMES, UplinkScenario, silent_primary_rate, sweep_rreq
from semnoma.rates import BitEquivalence, SemanticTextModel
from semnoma.region import (
    RegionSweepConfig,
    frontier_gaps,
    grid_step,
    pareto_frontier,
    region_dominates,
    sweep_region,
)

log = logging.getLogger(__name__)

EXPERIMENTS = ("rate-region", "opportunistic")

REGION_FILE = "region_frontiers.csv"
CONTAINMENT_FILE = "region_containment.csv"
CURVES_FILE = "opportunistic_curves.csv"
MANIFEST_FILE = "manifest.json"

REGION_HEADER = ["scheme", "case", "semantic_rate_suts_per_s", "bit_rate_bits_per_s"]
CONTAINMENT_HEADER = ["case", "outer", "inner", "tol_semantic_suts_per_s", "tol_bit_bits_per_s", "dominates",
                      "max_outside_grid_steps"]
CURVES_HEADER = ["scheme", "r_req_bits_per_s", "ergodic_equiv_semantic_rate_suts_per_s", "avg_power_w",
                 "ergodic_primary_bits_per_s", "converged"]


@dataclass
class ExperimentConfig:
    experiment: str | None = None
    seed: int = 2024
    output_dir: str = "results"
    # link budget
    noise_psd_w_per_hz: float = 4e-21
    bandwidth_hz: float = 1e6
    # text source and similarity curve
    suts_per_sentence: float = 20.0
    words_per_sentence: float = 10.0
    symbols_per_word: float = 4.0
    bits_per_word: float = 40.0
    logistic_lower: float = 0.2
    logistic_upper: float = 0.98
    logistic_slope: float = 0.25
    logistic_shift: float = -2.5
    # rate region (downlink)
    total_power_w: float = 1.0
    b_user_gain: float = 1e-13
    gain_ratios: list[float] = field(default_factory=lambda: [4.0, 1.0, 0.25])
    band_grid: int = 101
    power_grid: int = 101
    max_grid_points: int = 10_000_000
    # opportunistic (uplink)
    primary_power_w: float = 1.0
    primary_mean_gain: float = 4e-11
    secondary_mean_gain: float = 4e-11
    p_avg_w: float = 0.5
    p_peak_w: float = 1.0
    n_states: int = 2000
    solver_power_grid: int = 201
    max_iters: int = 2000
    tol: float = 1e-3
    r_req_values: list[float] | None = None
    r_req_fractions: list[float] = field(default_factory=lambda: [round(0.1 * i, 1) for i in range(10)])

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ExperimentConfig":
        known = {f.name: f for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - set(known))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        kwargs = {k: _coerce(k, known[k].type, v) for k, v in data.items()}
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    def validate(self) -> None:
        if self.experiment is not None and self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}")
        if self.seed < 0:
            raise ConfigError("seed must be unsigned")
        try:
            self.noise()
            self.text_model()
            self.conversion()
            RegionSweepConfig(self.band_grid, self.power_grid, self.max_grid_points)
            if not self.gain_ratios or min(self.gain_ratios) <= 0:
                raise ValueError("gain_ratios must be a non-empty list of positive numbers")
            self.downlink(self.gain_ratios[0])
            self.uplink(0.0)
            FadingSampler(self.primary_mean_gain)
            FadingSampler(self.secondary_mean_gain)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.n_states < 1:
            raise ConfigError("n_states must be >= 1")
        if self.solver_power_grid < 2 or self.max_iters < 1:
            raise ConfigError("solver_power_grid must be >= 2 and max_iters >= 1")
        if not 0 < self.tol < 1:
            raise ConfigError("tol must lie in (0, 1)")
        reqs = self.r_req_values if self.r_req_values is not None else self.r_req_fractions
        if not reqs or min(reqs) < 0 or any(b <= a for a, b in zip(reqs, reqs[1:])):
            raise ConfigError("r_req values/fractions must be non-empty, >= 0 and strictly increasing")

    def noise(self) -> NoiseModel:
        return NoiseModel(self.noise_psd_w_per_hz)

    def text_model(self) -> SemanticTextModel:
        return SemanticTextModel(self.suts_per_sentence, self.words_per_sentence, self.symbols_per_word,
                                 self.logistic_lower, self.logistic_upper, self.logistic_slope,
                                 self.logistic_shift)

    def conversion(self) -> BitEquivalence:
        return BitEquivalence(self.bits_per_word)

    def downlink(self, ratio: float) -> DownlinkScenario:
        return DownlinkScenario(self.b_user_gain * ratio, self.b_user_gain, self.total_power_w,
                                self.bandwidth_hz, self.noise(), self.text_model())

    def uplink(self, r_req: float) -> UplinkScenario:
        return UplinkScenario(self.primary_power_w, self.bandwidth_hz, r_req, self.p_avg_w, self.p_peak_w,
                              self.noise(), self.text_model(), self.conversion())


def _coerce(key: str, annotation: str, value: Any) -> Any:
    try:
        if annotation == "int":
            if isinstance(value, bool) or float(value) != int(float(value)):
                raise ValueError
            return int(float(value))
        if annotation == "float":
            if isinstance(value, bool):
                raise ValueError
            return float(value)
        if annotation == "str":
            return str(value)
        if annotation == "str | None":
            return None if value is None else str(value)
        if annotation.startswith("list[float]"):
            if value is None and annotation.endswith("None"):
                return None
            if not isinstance(value, (list, tuple)):
                raise ValueError
            return [float(v) for v in value]
    except (TypeError, ValueError):
        raise ConfigError(f"bad value for {key}: {value!r} (expected {annotation})") from None
    raise ConfigError(f"unsupported config type {annotation} for {key}")


def parse_override(item: str) -> tuple[str, Any]:
    """Parse ``key=value``; the value is read as JSON when possible."""
    if "=" not in item:
        raise ConfigError(f"override {item!r} is not of the form key=value")
    key, raw = item.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip(), value


def load_config(path: str | os.PathLike | None, overrides: list[str] = (),
                experiment: str | None = None) -> ExperimentConfig:
    """Load a config (or a run manifest) and apply ``key=value`` overrides."""
    data: dict[str, Any] = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
        if "toolkit_version" in data and "config" in data:
            data = dict(data["config"])
    for item in overrides:
        k, v = parse_override(item)
        data[k] = v
    if experiment is not None:
        if data.get("experiment") not in (None, experiment):
            raise ConfigError(f"config is for {data['experiment']!r}, not {experiment!r}")
        data["experiment"] = experiment
    return ExperimentConfig.from_dict(data)


def thread_count() -> int:
    raw = os.environ.get("SEMNOMA_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"SEMNOMA_THREADS must be an integer, got {raw!r}") from None


@contextmanager
def _executor(threads: int) -> Iterator[ThreadPoolExecutor | None]:
    if threads <= 1:
        yield None
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            yield ex


def fmt(x: float) -> str:
    """Round-trip decimal representation."""
    return repr(float(x))


def case_label(ratio: float) -> str:
    return f"ratio_{ratio:g}"


def _csv_text(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _write_outputs(out_dir: Path, files: dict[str, str], cfg: ExperimentConfig, started: float) -> dict[str, str]:
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        sums = {}
        for name, text in files.items():
            (out_dir / name).write_text(text)
            sums[name] = hashlib.sha256(text.encode()).hexdigest()
        manifest = {
            "toolkit_version": __version__,
            "experiment": cfg.experiment,
            "config": cfg.to_dict(),
            "duration_s": time.perf_counter() - started,
            "outputs": sums,
        }
        (out_dir / MANIFEST_FILE).write_text(json.dumps(manifest, indent=2) + "\n")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write results to {out_dir}: {exc.strerror}", str(out_dir)) from exc
    return sums


@dataclass
class RegionCase:
    label: str
    ratio: float
    frontiers: dict[SchemeKind, Any]
    step: tuple[float, float]


def compute_regions(cfg: ExperimentConfig, threads: int = 1) -> list[RegionCase]:
    sweep_cfg = RegionSweepConfig(cfg.band_grid, cfg.power_grid, cfg.max_grid_points)

    def one(job):
        ratio, scheme = job
        pts = sweep_region(cfg.downlink(ratio), scheme, sweep_cfg)
        return pareto_frontier(pts, scheme)

    jobs = [(r, s) for r in cfg.gain_ratios for s in SchemeKind]
    with _executor(threads) as ex:
        fronts = list(ex.map(one, jobs)) if ex else [one(j) for j in jobs]
    cases = []
    for k, ratio in enumerate(cfg.gain_ratios):
        fr = {s: fronts[k * len(SchemeKind) + i] for i, s in enumerate(SchemeKind)}
        cases.append(RegionCase(case_label(ratio), ratio, fr, grid_step(fr.values(), cfg.power_grid)))
    return cases


def max_outside_steps(outer, inner, step: tuple[float, float]) -> float:
    """Largest min(semantic gap, bit gap) of an inner point outside ``outer``, in grid steps."""
    best = -np.inf
    for p in inner:
        gs, gb = frontier_gaps(outer, p)
        best = max(best, min(gs / step[0], gb / step[1]))
    return float(best)


def run_rate_region(cfg: ExperimentConfig, threads: int | None = None) -> dict[str, str]:
    """Sweep all schemes in every channel case; write frontiers and containment verdicts."""
    started = time.perf_counter()
    threads = thread_count() if threads is None else threads
    cases = compute_regions(cfg, threads)
    region_rows, verdict_rows = [], []
    for case in cases:
        for scheme, front in case.frontiers.items():
            region_rows += [[str(scheme), case.label, fmt(p.semantic), fmt(p.bit)] for p in front]
        semi = case.frontiers[SchemeKind.SEMI_NOMA]
        for inner in (SchemeKind.OMA, SchemeKind.NOMA):
            ok = region_dominates(semi, case.frontiers[inner], case.step)
            verdict_rows.append([case.label, str(SchemeKind.SEMI_NOMA), str(inner), fmt(case.step[0]),
                                 fmt(case.step[1]), "true" if ok else "false",
                                 fmt(max_outside_steps(case.frontiers[inner], semi, case.step))])
            log.info("%s: semi-NOMA contains %s: %s", case.label, inner, ok)
    files = {
        REGION_FILE: _csv_text(REGION_HEADER, region_rows),
        CONTAINMENT_FILE: _csv_text(CONTAINMENT_HEADER, verdict_rows),
    }
    return _write_outputs(Path(cfg.output_dir), files, cfg, started)


def resolve_r_req(cfg: ExperimentConfig, ensemble) -> list[float]:
    if cfg.r_req_values is not None:
        return list(cfg.r_req_values)
    silent = silent_primary_rate(cfg.uplink(0.0), ensemble)
    return [f * silent for f in cfg.r_req_fractions]


def compute_curves(cfg: ExperimentConfig, threads: int = 1):
    ensemble = sample_fading(FadingSampler(cfg.primary_mean_gain), FadingSampler(cfg.secondary_mean_gain),
                             cfg.n_states, cfg.seed)
    values = resolve_r_req(cfg, ensemble)
    with _executor(threads) as ex:
        sweep = sweep_rreq(cfg.uplink(0.0), ensemble, values, cfg.solver_power_grid, cfg.max_iters, cfg.tol,
                           executor=ex)
    return ensemble, sweep


def run_opportunistic(cfg: ExperimentConfig, threads: int | None = None) -> tuple[dict[str, str], int]:
    """Run the r_req sweep; returns (checksums, number of feasible points)."""
    started = time.perf_counter()
    threads = thread_count() if threads is None else threads
    _, sweep = compute_curves(cfg, threads)
    rows, feasible = [], 0
    for name in SCHEMES:
        for pt in sweep.curves[name]:
            res = pt.result
            if res is None:
                rows.append([name, fmt(pt.r_req), "", "", "", "false"])
                continue
            feasible += 1
            rows.append([name, fmt(pt.r_req), fmt(res.ergodic_secondary), fmt(res.avg_power),
                         fmt(res.ergodic_primary), "true" if res.converged else "false"])
    sums = _write_outputs(Path(cfg.output_dir), {CURVES_FILE: _csv_text(CURVES_HEADER, rows)}, cfg, started)
    return sums, feasible
