"""Plain-text matrix files and JSON model files.

Matrix files are CSV: one row per line, comma-separated decimal numbers. A
line starting with ``#`` is a comment; if the first comment holds exactly
two integers it is treated as a declared ``rows cols`` shape and checked
against the data. Files written here carry that header and 17 significant
digits per value, which round-trips float64 exactly.
"""

import json
from pathlib import Path

import numpy as np

from .exceptions import DimMismatch, ParseError
from .network import WeightModel


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def parse_matrix(text: str, source: str = "<string>") -> np.ndarray:
    """Parse matrix CSV, reporting the offending line on failure."""
    rows = []
    declared = None
    declared_line = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if declared is None and not rows:
                fields = line[1:].split()
                if len(fields) == 2:
                    try:
                        declared = (int(fields[0]), int(fields[1]))
                        declared_line = lineno
                    except ValueError:
                        pass  # just a comment
            continue
        entries = []
        for token in line.split(","):
            token = token.strip()
            try:
                value = float(token)
            except ValueError:
                raise ParseError(f"{source}:{lineno}: not a number: {token!r}") from None
            if not np.isfinite(value):
                raise ParseError(f"{source}:{lineno}: non-finite value: {token!r}")
            entries.append(value)
        if rows and len(entries) != len(rows[0]):
            raise ParseError(
                f"{source}:{lineno}: row has {len(entries)} values, expected {len(rows[0])}"
            )
        rows.append(entries)
    if not rows:
        raise ParseError(f"{source}: no data rows")
    a = np.array(rows, dtype=float)
    if declared is not None and declared != a.shape:
        raise ParseError(
            f"{source}:{declared_line}: declared shape {declared[0]}x{declared[1]} "
            f"does not match data {a.shape[0]}x{a.shape[1]}"
        )
    return a


def read_matrix(path) -> np.ndarray:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from exc
    return parse_matrix(text, source=str(path))


def read_vector(path) -> np.ndarray:
    """Read a matrix file that must hold a single row or single column."""
    a = read_matrix(path)
    if 1 not in a.shape:
        raise DimMismatch(f"{path}: expected a vector, got shape {a.shape[0]}x{a.shape[1]}")
    return a.reshape(-1)


def matrix_to_csv(a: np.ndarray, header: bool = True) -> str:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    lines = []
    if header:
        lines.append(f"# {a.shape[0]} {a.shape[1]}")
    for row in a:
        lines.append(",".join(format_float(x) for x in row))
    return "\n".join(lines) + "\n"


def write_matrix(path, a: np.ndarray) -> None:
    Path(path).write_text(matrix_to_csv(a))


def model_to_dict(model: WeightModel) -> dict:
    doc = {
        "q": [[float(x) for x in row] for row in model.weights],
        "method_tag": model.method_tag,
    }
    if model.bias is not None:
        doc["bias"] = [float(x) for x in model.bias]
    return doc


def write_model(path, model: WeightModel) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n")


def model_from_dict(doc: dict, source: str = "<dict>") -> WeightModel:
    if not isinstance(doc, dict) or "q" not in doc:
        raise ParseError(f"{source}: model JSON must be an object with a 'q' key")
    try:
        weights = np.array(doc["q"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{source}: bad 'q' entry: {exc}") from None
    if weights.ndim != 2 or not np.all(np.isfinite(weights)):
        raise ParseError(f"{source}: 'q' must be a finite 2-d array")
    bias = None
    if doc.get("bias") is not None:
        bias = np.array(doc["bias"], dtype=float)
        if bias.ndim != 1 or bias.shape[0] != weights.shape[0] or not np.all(np.isfinite(bias)):
            raise ParseError(f"{source}: 'bias' must be a finite vector with one entry per row of 'q'")
    return WeightModel(
        weights=weights,
        bias=bias,
        method_tag=str(doc.get("method_tag", "unknown")),
        row_reports=[],
    )


def read_model(path) -> WeightModel:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from None
    return model_from_dict(doc, source=str(path))
