"""
A reproducible experiment
=========================

Run a seeded pipeline and write its artifacts to disk.
"""
import json
import tempfile
import warnings
from pathlib import Path

from lqcentroid.runner import ExperimentConfig, run

out = Path(tempfile.mkdtemp()) / "cube6"
config = ExperimentConfig.from_dict({
    "seed": 11,
    "N": 20_000,
    "body": {"kind": "cube", "dim": 6},
    "search": {"starts": 2},
    "checks": ["moments", "direction", "tails"],
    "out": str(out),
})
with warnings.catch_warnings():
    warnings.simplefilter("ignore", RuntimeWarning)
    manifest = run(config)

print("config hash:", manifest.config_hash)
for name, path in sorted(manifest.artifacts.items()):
    print(f"{name:>18}: {path}")
report = json.loads((out / "direction_report.json").read_text())
print("objective:", round(report["objective"], 4))
