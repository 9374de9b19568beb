"""Batch runs: sample, isotropize, moments, direction, tails, geometry checks.

A run is described by an :class:`ExperimentConfig` (JSON with a schema
version) and writes its artifacts to one directory. ``manifest.json``
holds the config hash and artifact list; wall times go to ``timings.json``
so that the other files are byte-identical between repeated runs.
"""
import hashlib
import json
import math
import time
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from ._rng import check_seed
from .bodies import body_from_spec
from .checks import GEOM_CHECKS, run_geom_check
from .moments import default_q_grid, isotropize, max_trusted_q, moment_profile
from .sampler import LogConcaveSpec, sample_logconcave, sample_uniform, save_cloud
from .subgauss import DEFAULT_T_GRID, SearchConfig, find_direction, tail_profile

__all__ = ["SCHEMA_VERSION", "ConfigError", "StageError", "ExperimentConfig", "RunManifest", "run"]

SCHEMA_VERSION = 1
PIPELINE_CHECKS = ("isotropize", "moments", "direction", "tails")
KNOWN_CHECKS = PIPELINE_CHECKS + GEOM_CHECKS


class ConfigError(ValueError):
    pass


class StageError(RuntimeError):
    """A pipeline stage failed; ``stage`` names it and ``cause`` holds the error."""

    def __init__(self, stage, cause):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class ExperimentConfig:
    seed: int
    N: int
    body: dict = None
    logconcave: dict = None
    q_grid: list = None
    search: dict = field(default_factory=dict)
    t_grid: list = None
    out: str = "run"
    checks: list = field(default_factory=list)
    convention: str = "measure"
    sampler: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        if self.seed is None:
            raise ConfigError("seed is mandatory")
        try:
            self.seed = check_seed(self.seed)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
        if int(self.N) != self.N or self.N < 1:
            raise ConfigError("N must be a positive integer")
        self.N = int(self.N)
        if (self.body is None) == (self.logconcave is None):
            raise ConfigError("give exactly one of 'body' and 'logconcave'")
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {self.schema_version}")
        unknown = [c for c in self.checks if c not in KNOWN_CHECKS]
        if unknown:
            raise ConfigError(f"unknown checks {unknown}; choose from {list(KNOWN_CHECKS)}")
        if self.convention not in ("measure", "body"):
            raise ConfigError(f"unknown convention {self.convention!r}")
        bad = set(self.search) - set(SearchConfig.__dataclass_fields__) - {"q_max"}
        if bad:
            raise ConfigError(f"unknown search settings {sorted(bad)}")

    @property
    def untrusted_q(self):
        limit = max_trusted_q(self.N)
        return [q for q in (self.q_grid or []) if q > limit]

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d):
        extra = set(d) - set(cls.__dataclass_fields__)
        if extra:
            raise ConfigError(f"unknown config fields {sorted(extra)}")
        if "seed" not in d:
            raise ConfigError("seed is mandatory")
        if "N" not in d:
            raise ConfigError("N is mandatory")
        return cls(**d)

    @classmethod
    def from_json(cls, text):
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(d)

    @classmethod
    def load(cls, path):
        return cls.from_json(Path(path).read_text())

    def hash(self):
        """SHA-256 of the canonical JSON; insensitive to key order."""
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()

    def source(self):
        if self.body is not None:
            return body_from_spec(self.body, "$.body")
        return LogConcaveSpec.from_spec(self.logconcave)


@dataclass
class RunManifest:
    config_hash: str
    version: str
    artifacts: dict
    wall_times: dict
    flags: dict = field(default_factory=dict)

    def to_json(self):
        d = {"config_hash": self.config_hash, "version": self.version, "artifacts": self.artifacts, "flags": self.flags}
        return json.dumps(d, indent=2, sort_keys=True) + "\n"


def _write(path, text):
    path.write_text(text)
    return path.name


def run(config, workers=1):
    """Execute the stages requested by ``config`` and write the artifacts.

    Stages run in the order sample, isotropize, moments, direction, tails,
    geometry checks. Sampling always runs; the rest follow ``config.checks``
    (any check implies isotropization; ``"isotropize"`` alone stops there).

    Raises
    ------
    StageError
        Naming the failed stage.
    """
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    artifacts, times, flags = {}, {}, {}
    if config.untrusted_q:
        flags["untrusted_q"] = config.untrusted_q
    state = {}

    def stage(name, fn):
        t0 = time.perf_counter()
        try:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                result = fn()
            if caught:
                flags.setdefault("warnings", {})[name] = sorted({str(w.message) for w in caught})
        except StageError:
            raise
        except Exception as exc:
            raise StageError(name, exc) from exc
        times[name] = time.perf_counter() - t0
        return result

    def do_sample():
        src = config.source()
        if isinstance(src, LogConcaveSpec):
            cloud = sample_logconcave(src, config.N, config.seed)
        else:
            cloud = sample_uniform(src, config.N, config.seed, workers=workers, **config.sampler)
        save_cloud(out / "cloud.bin", cloud)
        artifacts["cloud"] = "cloud.bin"
        return cloud

    state["cloud"] = stage("sample", do_sample)
    checks = list(config.checks)
    if not checks:
        return _finish(out, config, artifacts, times, flags)

    if any(c in PIPELINE_CHECKS for c in checks):

        def do_isotropize():
            model, iso = isotropize(state["cloud"], config.convention)
            artifacts["isotropic_model"] = _write(out / "isotropic_model.json", model.to_json())
            return model, iso

        model, iso = stage("isotropize", do_isotropize)
        n = iso.dim
        search = {k: v for k, v in config.search.items() if k != "q_max"}
        search.setdefault("seed", config.seed)
        search.setdefault("trust", "flag")
        search["workers"] = workers
        if config.t_grid is not None:
            search["t_grid"] = tuple(config.t_grid)
        cfg = SearchConfig(**search)

        if "direction" in checks or "tails" in checks or "moments" in checks:

            def do_direction():
                rep = find_direction(iso, model.L, cfg, q_max=config.search.get("q_max"))
                if "direction" in checks:
                    artifacts["direction_report"] = _write(out / "direction_report.json", rep.to_json() + "\n")
                return rep

            report = stage("direction", do_direction)
            theta = report.theta
        if "moments" in checks:

            def do_moments():
                grid = config.q_grid or default_q_grid(n)
                prof = moment_profile(iso, theta, grid)
                artifacts["moments"] = _write(out / "moments.csv", prof.to_csv())

            stage("moments", do_moments)
        if "tails" in checks:

            def do_tails():
                prof = tail_profile(iso, theta, config.t_grid or DEFAULT_T_GRID)
                artifacts["tails"] = _write(out / "tails.csv", prof.to_csv())

            stage("tails", do_tails)

    geom = [c for c in checks if c in GEOM_CHECKS]
    if geom:
        body = None if config.body is None else config.source()

        def do_geom():
            recs = []
            for name in geom:
                recs.extend(run_geom_check(name, body, seed=config.seed))
            text = json.dumps(recs, indent=2, sort_keys=True, default=_json_default) + "\n"
            artifacts["geom_checks"] = _write(out / "geom_checks.json", text)
            return recs

        state["geom"] = stage("geom", do_geom)
        if not all(r["pass"] for r in state["geom"]):
            flags["geom_failures"] = sorted({r["check"] for r in state["geom"] if not r["pass"]})
    return _finish(out, config, artifacts, times, flags)


def _json_default(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _finish(out, config, artifacts, times, flags):
    _write(out / "config.json", config.to_json())
    artifacts["config"] = "config.json"
    artifacts["timings"] = "timings.json"
    artifacts["manifest"] = "manifest.json"
    manifest = RunManifest(config.hash(), __version__, dict(sorted(artifacts.items())), times, flags)
    _write(out / "timings.json", json.dumps(times, indent=2, sort_keys=True) + "\n")
    _write(out / "manifest.json", manifest.to_json())
    return manifest
