"""Repository-relative resource resolution.

The repo keeps fixtures, scenario configs and JSON schemas in top-level
directories (`fixtures/`, `scenarios/`, `schemas/`).  The package is meant
to be installed editable from the checkout, so resources are resolved by
walking up from this file to the directory containing `pyproject.toml`.
"""

from __future__ import annotations

import os
from pathlib import Path

_ENV_ROOT = "RESTAKELAB_ROOT"


def repo_root() -> Path:
    override = os.environ.get(_ENV_ROOT)
    if override:
        return Path(override)
    here = Path(__file__).resolve()
    for parent in here.parents:
        if (parent / "pyproject.toml").is_file():
            return parent
    raise FileNotFoundError(
        "cannot locate repository root (no pyproject.toml above package); "
        f"set {_ENV_ROOT} to the checkout directory"
    )


def fixtures_dir() -> Path:
    return repo_root() / "fixtures"


def scenarios_dir() -> Path:
    return repo_root() / "scenarios"


def schemas_dir() -> Path:
    return repo_root() / "schemas"


def default_cache_dir() -> Path:
    override = os.environ.get("RESTAKELAB_CACHE_DIR")
    if override:
        return Path(override)
    return repo_root() / ".cache"
