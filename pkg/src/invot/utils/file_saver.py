"""
Deterministic artifact files for pipeline runs.

Every CSV starts with a ``# config_hash=...`` comment line followed by the
column header; every JSON document carries a ``_header`` object with the same
hash. Numbers are written with 17 significant digits, keys sorted, and no
timestamps, so a rerun with the same config produces identical bytes.
"""

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from ..exceptions import ConfigValidationError, MisalignedSamples, ParseError
from ..transforms.gtransform import GTransformSamples
from .logging import get_logger

logger = get_logger(__name__)

CSV_FORMAT = "%.17g"


def to_builtin(value: Any) -> Any:
    """numpy scalars and arrays to plain Python for JSON."""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, tuple):
        return list(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def file_sha256(path: Union[str, Path]) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class ArtifactWriter:
    """Writes CSV and JSON artifacts of one run into ``output_directory``."""

    def __init__(self, output_directory: Union[str, Path], config_hash: str):
        self.output_directory = Path(output_directory)
        self.config_hash = config_hash
        self.written: List[str] = []
        self._ensure_directory()

    def _ensure_directory(self) -> None:
        try:
            self.output_directory.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ConfigValidationError(
                f"output directory {self.output_directory} is not writable: {e}", operation="ArtifactWriter"
            ) from e

    def _record(self, name: str) -> Path:
        if name not in self.written:
            self.written.append(name)
        return self.output_directory / name

    def write_csv(self, name: str, columns: Sequence[str], *data) -> Path:
        """One column per array in ``data``, all of equal length."""
        arrays = [np.asarray(column, dtype=float).ravel() for column in data]
        if len(arrays) != len(columns) or len({a.size for a in arrays}) > 1:
            raise MisalignedSamples(f"columns of {name} differ in length", operation="write_csv")
        path = self._record(name)
        table = np.column_stack(arrays) if arrays and arrays[0].size else np.empty((0, len(columns)))
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(f"# config_hash={self.config_hash}\n")
            f.write(",".join(columns) + "\n")
            if table.size:
                np.savetxt(f, table, fmt=CSV_FORMAT, delimiter=",")
        logger.debug("csv written", extra={"extra_data": {"artifact": name, "rows": int(table.shape[0])}})
        return path

    def write_json(self, name: str, payload: Dict[str, Any]) -> Path:
        path = self._record(name)
        document = {"_header": {"config_hash": self.config_hash}, **payload}
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(document, f, indent=2, sort_keys=True, default=to_builtin)
            f.write("\n")
        logger.debug("json written", extra={"extra_data": {"artifact": name}})
        return path

    def write_manifest(self, manifest: Dict[str, Any]) -> Path:
        """manifest.json; lists every artifact written before it."""
        return self.write_json("manifest.json", {**manifest, "artifacts": list(self.written)})


def _data_lines(path: Path) -> List[str]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}", operation="read_csv") from e
    return [line for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]


def read_csv_columns(path: Union[str, Path], required: Sequence[str]) -> Dict[str, np.ndarray]:
    """Named columns of a headed CSV; ``#`` lines are skipped.

    Raises:
        ParseError: missing columns or a malformed row, with its line number.
    """
    path = Path(path)
    lines = _data_lines(path)
    if not lines:
        raise ParseError(f"{path} has no header row", line=1, column=1, operation="read_csv")
    header = [name.strip() for name in lines[0].split(",")]
    missing = [name for name in required if name not in header]
    if missing:
        raise ParseError(f"{path} lacks columns {missing}", line=1, column=1, operation="read_csv")

    rows = []
    for number, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(header):
            raise ParseError(f"{path}: expected {len(header)} fields", line=number, column=1, operation="read_csv")
        try:
            rows.append([float(cell) for cell in cells])
        except ValueError:
            raise ParseError(f"{path}: non-numeric field", line=number, column=1, operation="read_csv") from None
    table = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return {name: table[:, header.index(name)] for name in required}


def read_surface_csv(path: Union[str, Path], family: str) -> GTransformSamples:
    """A value surface with columns a, b, alpha."""
    columns = read_csv_columns(path, ("a", "b", "alpha"))
    return GTransformSamples(columns["a"], columns["b"], columns["alpha"], family)


def write_surface_csv(writer: ArtifactWriter, samples: GTransformSamples, name: str = "surface.csv") -> Path:
    return writer.write_csv(name, ("a", "b", "alpha"), samples.a, samples.b, samples.values)


def read_observations_csv(path: Union[str, Path]) -> Dict[str, np.ndarray]:
    """Observed map and potential gradient, columns x, T, fprime."""
    return read_csv_columns(path, ("x", "T", "fprime"))


def describe_input(name: str, value: Optional[Any]) -> Optional[Dict[str, Any]]:
    """Manifest record of one input: file path with checksum, or the inline document."""
    if value is None:
        return None
    if isinstance(value, str) and (value.endswith(".json") or value.endswith(".csv")) and Path(value).is_file():
        return {"name": name, "path": value, "sha256": file_sha256(value)}
    return {"name": name, "document": value}
