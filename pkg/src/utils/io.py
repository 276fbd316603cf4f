"""CSV and JSON persistence for runs, solitons, sweeps and searches."""
import json
import platform
import re
from pathlib import Path
from typing import Iterable, List, NamedTuple, Optional

import numpy as np
import pandas as pd
import pydantic
import scipy

from src.critical.classify import SWEEP_COLUMNS, ClassifiedRun, sweep_frame
from src.critical.search import CriticalEstimate
from src.evolution.driver import EvolutionResult
from src.evolution.trace import TRACE_COLUMNS, FlowTrace, TerminationReport
from src.geometry.profile import ProfileCurve
from src.soliton.bowl import SolitonCurve
from src.utils.config import RunConfig
from src.utils.errors import MissingInputError
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

FLOAT_FORMAT = "%.17g"
TRACE_FILE = "trace.csv"
MANIFEST_FILE = "manifest.json"
CONFIG_FILE = "config.txt"
SNAPSHOT_DIR = "snapshots"
SOLITON_COLUMNS = ["x", "y", "beta", "H"]

_SNAPSHOT_RE = re.compile(r"^snap_(\d+)_t=(.+)\.csv$")


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def read_csv(path: Path, columns: Optional[Iterable[str]] = None) -> pd.DataFrame:
    path = Path(path)
    if not path.is_file():
        raise MissingInputError(f"missing input file: {path}")
    frame = pd.read_csv(path)
    if columns is not None:
        missing = [c for c in columns if c not in frame.columns]
        if missing:
            raise MissingInputError(f"{path} lacks columns {missing}")
    return frame


def write_json(data: dict, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_json(path: Path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise MissingInputError(f"missing input file: {path}")
    return json.loads(path.read_text(encoding="utf-8"))


# --- profile snapshots ----------------------------------------------------

def snapshot_name(index: int, t: float) -> str:
    return f"snap_{index:04d}_t={t:.17g}.csv"


def parse_snapshot_name(name: str) -> tuple:
    """(index, t) encoded in a snapshot file name."""
    match = _SNAPSHOT_RE.match(Path(name).name)
    if match is None:
        raise MissingInputError(f"not a snapshot file name: {name}")
    return int(match.group(1)), float(match.group(2))


def write_profile(curve: ProfileCurve, path: Path) -> Path:
    return write_csv(curve.to_frame(), path)


def read_profile(path: Path, t: Optional[float] = None) -> ProfileCurve:
    frame = read_csv(path, ["S", "R"])
    if t is None:
        t = parse_snapshot_name(path)[1]
    return ProfileCurve.from_frame(frame, t=t)


def write_snapshots(snapshots: Iterable[ProfileCurve], directory: Path) -> List[Path]:
    directory = Path(directory)
    return [write_profile(curve, directory / snapshot_name(k, curve.t)) for k, curve in enumerate(snapshots)]


def read_snapshots(directory: Path) -> List[ProfileCurve]:
    directory = Path(directory)
    if not directory.is_dir():
        raise MissingInputError(f"missing snapshot directory: {directory}")
    files = sorted(directory.glob("snap_*.csv"), key=lambda p: parse_snapshot_name(p.name)[0])
    if not files:
        raise MissingInputError(f"no snapshots in {directory}")
    return [read_profile(path) for path in files]


# --- traces, solitons, sweeps ---------------------------------------------

def write_trace(trace: FlowTrace, path: Path) -> Path:
    return write_csv(trace.to_frame(), path)


def read_trace(path: Path) -> FlowTrace:
    return FlowTrace.from_frame(read_csv(path, TRACE_COLUMNS))


def write_soliton(curve: SolitonCurve, path: Path) -> Path:
    return write_csv(curve.to_frame(), path)


def read_soliton(path: Path) -> pd.DataFrame:
    return read_csv(path, SOLITON_COLUMNS)


def write_sweep(runs: Iterable[ClassifiedRun], path: Path) -> Path:
    return write_csv(sweep_frame(runs), path)


def read_sweep(path: Path) -> List[ClassifiedRun]:
    frame = read_csv(path, SWEEP_COLUMNS)
    return [ClassifiedRun.from_row(row) for row in frame.to_dict(orient="records")]


def write_search(estimate: CriticalEstimate, path: Path) -> Path:
    """Critical-search JSON; contains no timing so reruns are byte-identical."""
    return write_json(estimate.as_dict(), path)


def read_search(path: Path) -> CriticalEstimate:
    data = read_json(path)
    return CriticalEstimate(
        lambda_lo=float(data["lambda_lo"]),
        lambda_hi=float(data["lambda_hi"]),
        iterations=int(data["iterations"]),
        n_grid=int(data["n_grid"]),
        runs=[ClassifiedRun.from_row(row) for row in data.get("runs", [])],
    )


# --- run directories ------------------------------------------------------

def module_versions() -> dict:
    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
        "pydantic": pydantic.VERSION,
    }


def run_directory(config: RunConfig) -> Path:
    return Path(config.output_dir) / f"evolve_lambda={config.lam!r}_n={config.n}"


def build_manifest(config: RunConfig, report: TerminationReport, wall_time: float) -> dict:
    return {
        "config": config.as_dict(),
        "config_hash": config.content_hash(),
        **report.as_dict(),
        "wall_time": wall_time,
        "versions": module_versions(),
        "fits": {},
    }


class RunRecord(NamedTuple):
    directory: Path
    config: RunConfig
    trace: FlowTrace
    manifest: dict

    def snapshots(self) -> List[ProfileCurve]:
        return read_snapshots(self.directory / SNAPSHOT_DIR)


def save_run(config: RunConfig, result: EvolutionResult, wall_time: float, directory: Optional[Path] = None) -> Path:
    """Write config, trace, snapshots and manifest of one evolution."""
    directory = Path(directory) if directory is not None else run_directory(config)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / CONFIG_FILE).write_text(config.to_text(), encoding="utf-8")
    write_trace(result.trace, directory / TRACE_FILE)
    write_snapshots(result.snapshots, directory / SNAPSHOT_DIR)
    write_json(build_manifest(config, result.report, wall_time), directory / MANIFEST_FILE)
    logger.info(f"Run written to {directory}")
    return directory


def load_run(directory: Path) -> RunRecord:
    directory = Path(directory)
    config_path = directory / CONFIG_FILE
    if not config_path.is_file():
        raise MissingInputError(f"missing input file: {config_path}")
    config = RunConfig.from_text(config_path.read_text(encoding="utf-8"))
    return RunRecord(
        directory=directory,
        config=config,
        trace=read_trace(directory / TRACE_FILE),
        manifest=read_json(directory / MANIFEST_FILE),
    )


def record_fit(directory: Path, name: str, fit: dict) -> dict:
    """Store ``fit`` under ``fits[name]`` of the run manifest."""
    path = Path(directory) / MANIFEST_FILE
    manifest = read_json(path)
    manifest.setdefault("fits", {})[name] = fit
    write_json(manifest, path)
    return manifest
