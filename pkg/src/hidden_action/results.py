"""Result files: long-form series, benchmark, comparison table, per-round
traces and a checksummed manifest.

Numbers are written with 17 significant digits, ``.`` as decimal point and
``\\n`` line endings so reruns with the same seed are byte-identical.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import tempfile
from dataclasses import asdict
from pathlib import Path
from typing import Dict, List, Sequence

import numpy as np

from . import __version__
from .config import RunConfig, to_dict
from .experiment import Comparison, ExperimentResult, ScenarioSummary
from .model import Benchmark, format_capacity, parse_capacity
from .stats import METRICS

SERIES_HEADER = ("scenario_id", "m_p", "m_a", "sigma_frac", "t", "metric", "mean", "ci_low", "ci_high")
DISTANCE_HEADER = ("environment", "comparison", "metric", "distance", "p_value")
ROUNDS_DIR = "rounds"


class OutputDirError(OSError):
    pass


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def label(x: float) -> str:
    """Shortest round-trip form, for parameter values used as keys."""
    return repr(float(x))


def preflight(out_dir) -> Path:
    """Create ``out_dir`` and prove it is writable before any simulation runs."""
    path = Path(out_dir)
    try:
        path.mkdir(parents=True, exist_ok=True)
        with tempfile.NamedTemporaryFile(dir=path, prefix=".probe-"):
            pass
    except OSError as exc:
        raise OutputDirError(f"output directory {path} is not writable: {exc}") from None
    return path


def series_rows(scenarios: Sequence[ScenarioSummary]) -> List[tuple]:
    rows = []
    for s in scenarios:
        p = s.spec.params
        series = s.series
        for t in range(p.timesteps):
            for metric in METRICS:
                ns = series[metric]
                rows.append((
                    s.spec.scenario_id, format_capacity(p.memory_principal), format_capacity(p.memory_agent),
                    label(p.sigma_frac), str(t + 1), metric, fmt(ns.values[t]), fmt(ns.ci_low[t]), fmt(ns.ci_high[t]),
                ))
    return rows


def distance_rows(comparisons: Sequence[Comparison]) -> List[tuple]:
    return [(c.environment, c.comparison, c.metric, fmt(c.distance), fmt(c.p_value)) for c in comparisons]


def _write_csv(path: Path, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    path.write_bytes(buf.getvalue().encode("utf-8"))


def _write_json(path: Path, data) -> None:
    path.write_bytes((json.dumps(data, indent=2, sort_keys=False) + "\n").encode("utf-8"))


def _write_table(path_stem: Path, fmt_name: str, header, rows) -> Path:
    if fmt_name == "csv":
        path = path_stem.with_suffix(".csv")
        _write_csv(path, header, rows)
    else:
        path = path_stem.with_suffix(".json")
        _write_json(path, [dict(zip(header, row)) for row in rows])
    return path


def sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def benchmark_record(benchmark: Benchmark, sigma_fracs: Sequence[float]) -> dict:
    rec = asdict(benchmark)
    rec["sigma"] = {label(sf): sf * benchmark.outcome_star for sf in sorted(set(sigma_fracs))}
    return rec


def emit_results(result: ExperimentResult, out_dir=None) -> Dict[str, Path]:
    """Write every artifact of ``result``; returns artifact name -> path."""
    cfg = result.config
    out = preflight(out_dir if out_dir is not None else cfg.output_dir)
    written: Dict[str, Path] = {}

    written["series"] = _write_table(out / "series", cfg.format, SERIES_HEADER, series_rows(result.scenarios))
    written["distances"] = _write_table(out / "distances", cfg.format, DISTANCE_HEADER, distance_rows(result.comparisons))

    sigma_fracs = [s.spec.params.sigma_frac for s in result.scenarios]
    written["benchmark"] = out / "benchmark.json"
    _write_json(written["benchmark"], benchmark_record(result.benchmark, sigma_fracs))

    rounds_dir = out / ROUNDS_DIR
    rounds_dir.mkdir(exist_ok=True)
    for s in result.scenarios:
        path = rounds_dir / f"{s.spec.scenario_id}.npy"
        np.save(path, np.stack([s.matrices[m] for m in METRICS]))
        written[f"{ROUNDS_DIR}/{path.name}"] = path

    manifest = {
        "version": __version__,
        "base_seed": cfg.base_seed,
        "config": to_dict(cfg),
        "metrics": list(METRICS),
        "scenarios": [
            {
                "scenario_id": s.spec.scenario_id,
                "m_p": format_capacity(s.spec.params.memory_principal),
                "m_a": format_capacity(s.spec.params.memory_agent),
                "sigma_frac": s.spec.params.sigma_frac,
                "sigma": s.spec.params.sigma,
                "rounds": s.spec.params.rounds,
                "timesteps": s.spec.params.timesteps,
                "no_contract_periods": s.rejections,
            }
            for s in result.scenarios
        ],
        "artifacts": {name: sha256(path) for name, path in sorted(written.items())},
    }
    written["manifest"] = out / "manifest.json"
    _write_json(written["manifest"], manifest)
    return written


def load_round_matrices(results_dir, metric: str = "utility_agent") -> Dict[tuple, np.ndarray]:
    """Per-round normalized traces saved by :func:`emit_results`, keyed by (m_P, m_A, sigma_frac)."""
    results_dir = Path(results_dir)
    manifest_path = results_dir / "manifest.json"
    if not manifest_path.is_file():
        raise FileNotFoundError(f"no manifest.json in {results_dir}")
    manifest = json.loads(manifest_path.read_text())
    index = manifest["metrics"].index(metric)
    out = {}
    for sc in manifest["scenarios"]:
        data = np.load(results_dir / ROUNDS_DIR / f"{sc['scenario_id']}.npy")
        key = (parse_capacity(sc["m_p"]), parse_capacity(sc["m_a"]), float(sc["sigma_frac"]))
        out[key] = data[index]
    return out


def write_distances(results_dir, comparisons: Sequence[Comparison], fmt_name: str = "csv") -> Path:
    return _write_table(Path(results_dir) / "distances", fmt_name, DISTANCE_HEADER, distance_rows(comparisons))
