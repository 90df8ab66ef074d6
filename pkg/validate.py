#!/usr/bin/env python3
"""
smcdma Validation Script

Checks the installation before a long Monte-Carlo campaign: interpreter
version, package layout, imports, the Gold family and stability limits of the
default code, and every shipped scenario configuration. No simulation is run.

Exit status is 0 when every item passes and 1 otherwise.
"""

import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List

ROOT = Path(__file__).resolve().parent

PACKAGE_FILES = [
    "src/smcdma/__init__.py",
    "src/smcdma/main.py",
    "src/smcdma/models/config.py",
    "src/smcdma/models/signal.py",
    "src/smcdma/models/filters.py",
    "src/smcdma/models/tracking.py",
    "src/smcdma/services/cdma_model.py",
    "src/smcdma/services/sm_filters.py",
    "src/smcdma/services/bounds.py",
    "src/smcdma/services/estimators.py",
    "src/smcdma/services/analysis.py",
    "src/smcdma/services/metrics.py",
    "src/smcdma/services/pipeline.py",
    "src/smcdma/services/harness.py",
    "src/smcdma/routes/cli.py",
    "src/smcdma/utils/export.py",
    "test/test_sm_filters.py",
    "test/test_bounds.py",
    "test/test_estimators.py",
    "test/test_harness.py",
    "pytest.ini",
    "requirements.txt",
    "README.md",
    "DESIGN.md",
]


@dataclass
class Item:
    """One validated item: its group, what was checked and the outcome."""

    group: str
    name: str
    ok: bool
    detail: str = ""


def interpreter_items() -> Iterator[Item]:
    version = sys.version.split()[0]
    yield Item("python", "3.11+ (tomllib)", sys.version_info >= (3, 11), version)


def layout_items() -> Iterator[Item]:
    for name in PACKAGE_FILES:
        yield Item("layout", name, (ROOT / name).exists())


def import_items() -> Iterator[Item]:
    sys.path.insert(0, str(ROOT))
    try:
        from src.smcdma.services.analysis import step_bounds
        from src.smcdma.services.cdma_model import build_convolution_matrix, gold_family
    except ImportError as e:
        yield Item("imports", "src.smcdma", False, str(e))
        return
    yield Item("imports", "src.smcdma", True)

    codes = gold_family(5)
    yield Item("codes", "degree-5 Gold family", len(codes) == 33, f"{len(codes)} codes")

    report = step_bounds(build_convolution_matrix(codes[0], 6))
    yield Item("codes", "stability limits", report.mu_h_max > 0 and report.mu_A_max > 0,
               f"mu_h < {report.mu_h_max:.4g}, mu_A < {report.mu_A_max:.4g}")


def config_items() -> Iterator[Item]:
    from src.smcdma.models.config import ExperimentConfig
    from src.smcdma.models.errors import ConfigError

    paths = sorted((ROOT / "configs").glob("*.toml"))
    if not paths:
        yield Item("configs", "configs/*.toml", False, "none found")
    for path in paths:
        try:
            config = ExperimentConfig.from_file(path)
        except ConfigError as e:
            yield Item("configs", path.name, False, str(e))
            continue
        labels = ", ".join(spec.label for spec in config.algorithm_specs())
        yield Item("configs", path.name, True, f"{config.scenario}: {labels}")


def collect() -> List[Item]:
    """Run every check; an unexpected exception fails its group instead of aborting."""
    items: List[Item] = []
    for group, source in [("python", interpreter_items), ("layout", layout_items),
                          ("imports", import_items), ("configs", config_items)]:
        try:
            items.extend(source())
        except Exception as e:
            items.append(Item(group, source.__name__, False, f"{type(e).__name__}: {e}"))
    return items


def main() -> int:
    items = collect()
    width = max(len(item.name) for item in items)
    for item in items:
        mark = "ok  " if item.ok else "FAIL"
        print(f"{mark} {item.group:<8} {item.name:<{width}} {item.detail}".rstrip())

    failed = [item for item in items if not item.ok]
    print(f"\nsmcdma: {len(items) - len(failed)} of {len(items)} items ok")
    if failed:
        print("failing groups: " + ", ".join(sorted({item.group for item in failed})))
        return 1
    print("next: pytest, then python -m src.smcdma.main --help")
    return 0


if __name__ == "__main__":
    sys.exit(main())
