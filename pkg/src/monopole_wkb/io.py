"""CSV and JSON writers with stable column order and 17 significant digits."""

from __future__ import annotations

import io
import json
import math
import os
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

OUTPUT_DIR_ENV = "MONOPOLE_WKB_OUTPUT_DIR"

SPECTRUM_COLUMNS = ("N", "j", "lambda_exact", "lambda_hat", "delta", "mult_exact", "mult_hat")
SPECTRUM_NUMERIC_COLUMNS = ("N", "j", "lambda_exact", "lambda_numeric", "abs_err", "mult_exact", "mult_numeric")
TRAJECTORY_COLUMNS = ("t", "theta", "phi", "p_theta", "p_phi", "H", "I2")
RESIDUAL_COLUMNS = ("N", "j", "k1", "global_residual", "plateau_residual")


def format_number(x: Any) -> str:
    """Integers verbatim, floats with 17 significant digits, ``None`` as empty."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, Fraction):
        x = float(x)
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (Fraction, float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def render_csv(columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row has {len(row)} fields, expected {len(columns)}")
        buf.write(",".join(format_number(v) for v in row) + "\n")
    return buf.getvalue()


def render_json(obj: Any) -> str:
    # Python's float repr is the shortest round-tripping form (at most 17 digits).
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def resolve_output(path: str | os.PathLike | None) -> Path | None:
    """Apply the output-directory override to relative paths; ``None`` or ``-`` means stdout."""
    if path is None or str(path) == "-":
        return None
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def write_text(text: str, path: str | os.PathLike | None, stream=None) -> None:
    """Write to ``path`` (creating parent directories) or to ``stream``."""
    target = resolve_output(path)
    if target is None:
        import sys

        (stream or sys.stdout).write(text)
        return
    target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
