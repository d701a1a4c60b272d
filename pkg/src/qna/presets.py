"""Built-in wall diagrams for ``qna scatter --preset``."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .models import DiagramModel

PRESETS_DIR = Path(__file__).parent / "presets"

BUILTIN_PRESETS: dict[str, dict[str, Any]] = {
    "pentagon": {
        "name": "Pentagon",
        "description": "Two dilogarithm walls on dx and dy over q = 1+t; "
        "scattering adds exactly one wall of slope 1",
        "expected_lines": 3,
        "file": "pentagon.json",
    },
    "squared": {
        "name": "Squared classical walls",
        "description": "Squared dilogarithm walls at q = 1; the classical "
        "factorization produces walls on many slopes",
        "expected_lines": None,
        "file": "squared.json",
    },
}


def list_presets() -> dict[str, dict[str, Any]]:
    return dict(BUILTIN_PRESETS)


def load_preset(preset_id: str) -> DiagramModel:
    """Load and validate a built-in diagram.

    Raises:
        ValueError: If the preset is unknown or its file is not valid JSON.
        FileNotFoundError: If the preset file is missing.
    """
    if preset_id not in BUILTIN_PRESETS:
        available = ", ".join(BUILTIN_PRESETS)
        raise ValueError(f"Unknown preset '{preset_id}'. Available presets: {available}")
    path = PRESETS_DIR / BUILTIN_PRESETS[preset_id]["file"]
    if not path.exists():
        raise FileNotFoundError(f"Preset file not found: {path}")
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ValueError(f"Invalid JSON in preset file {path}: {e}") from e
    return DiagramModel.model_validate(data)


def validate_all_presets() -> list[str]:
    """Return one message per preset that fails to load."""
    errors = []
    for preset_id in BUILTIN_PRESETS:
        try:
            load_preset(preset_id)
        except Exception as e:
            errors.append(f"{preset_id}: {e}")
    return errors
