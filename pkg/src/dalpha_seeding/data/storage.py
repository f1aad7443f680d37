"""
Data storage utilities for dalpha-seeding.

This module reads and writes datasets (CSV), per-trial results (CSV or
Parquet) and JSON documents (traces, reports, configurations) using Polars
and Pydantic.
"""

import math
from pathlib import Path
from typing import List, Sequence, Type, TypeVar, Union

import numpy as np
import polars as pl
from pydantic import BaseModel, ValidationError

from dalpha_seeding.constants import (
    COORDINATE_PREFIX,
    LABEL_COLUMN,
    PARQUET_COMPRESSION,
    RESULT_COLUMNS,
    RESULT_SCHEMA,
)
from dalpha_seeding.core.models import Dataset, SummaryRow, TrialResult, usage_error_from
from dalpha_seeding.exceptions import ParseError, StorageError, UsageError
from dalpha_seeding.utils.logging import get_logger

logger = get_logger(__name__)

PathLike = Union[str, Path]
ModelT = TypeVar("ModelT", bound=BaseModel)


def _ensure_parent(path: Path) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise StorageError(f"Cannot create directory for {path}: {e}", {"path": str(path)}) from e


def format_alpha(alpha: float) -> str:
    """Stable text form of an alpha value (``inf`` for the farthest-point limit)."""
    if math.isinf(alpha):
        return "inf"
    return repr(float(alpha))


# --------------------------------------------------------------------------
# Datasets
# --------------------------------------------------------------------------


def save_csv(ds: Dataset, path: PathLike) -> None:
    """
    Write a dataset as CSV with header ``x0,x1,...[,label]``.

    Raises:
        StorageError: If the file cannot be written
    """
    path = Path(path)
    _ensure_parent(path)
    columns = {f"{COORDINATE_PREFIX}{j}": ds.points[:, j] for j in range(ds.d)}
    df = pl.DataFrame(columns)
    if ds.labels is not None:
        df = df.with_columns(pl.Series(LABEL_COLUMN, ds.labels, dtype=pl.Int64))
    try:
        df.write_csv(path)
    except OSError as e:
        raise StorageError(f"Error writing dataset to {path}: {e}", {"path": str(path)}) from e
    logger.info(f"Saved dataset (n={ds.n}, d={ds.d}) to {path}")


def _scan_rows(path: Path) -> List[str]:
    """Read the file and check that every row has as many fields as the header."""
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise StorageError(f"Error reading {path}: {e}", {"path": str(path)}) from e
    except UnicodeDecodeError as e:
        raise ParseError(f"file is not UTF-8: {e}", line=None, details={"path": str(path)}) from e

    if not lines or not lines[0].strip():
        raise ParseError("missing header", line=1, details={"path": str(path)})
    header = [name.strip() for name in lines[0].split(",")]
    for number, line in enumerate(lines[1:], start=2):
        if not line.strip():
            raise ParseError("empty row", line=number, details={"path": str(path)})
        fields = line.count(",") + 1
        if fields != len(header):
            raise ParseError(
                f"expected {len(header)} fields, found {fields}",
                line=number,
                details={"path": str(path)},
            )
    if len(lines) < 2:
        raise ParseError("file has a header but no data rows", line=1, details={"path": str(path)})
    return header


def _cast_column(df: pl.DataFrame, name: str, dtype: pl.DataType, path: Path) -> pl.Series:
    raw = df[name].str.strip_chars()
    cast = raw.cast(dtype, strict=False)
    bad = cast.is_null()
    if bad.any():
        row = int(bad.arg_true()[0])
        raise ParseError(
            f"invalid value {raw[row]!r} in column '{name}'",
            line=row + 2,
            details={"path": str(path)},
        )
    return cast


def load_csv(path: PathLike) -> Dataset:
    """
    Read a dataset written by :func:`save_csv` (or any CSV of that shape).

    The last column is read as labels when its header is ``label``.

    Raises:
        StorageError: If the file cannot be read
        ParseError: On ragged rows, non-numeric fields or an empty body,
            with the offending line number
    """
    path = Path(path)
    header = _scan_rows(path)
    has_labels = header[-1] == LABEL_COLUMN
    coordinates = header[:-1] if has_labels else header
    if not coordinates:
        raise ParseError("no coordinate columns", line=1, details={"path": str(path)})

    try:
        df = pl.read_csv(path, infer_schema_length=0)
    except Exception as e:
        raise ParseError(f"cannot parse CSV: {e}", line=None, details={"path": str(path)}) from e

    columns = df.columns
    points = np.column_stack(
        [_cast_column(df, name, pl.Float64, path).to_numpy() for name in columns[: len(coordinates)]]
    )
    labels = _cast_column(df, columns[-1], pl.Int64, path).to_numpy() if has_labels else None
    try:
        ds = Dataset(points=points, labels=labels)
    except ValueError as e:
        raise ParseError(f"invalid dataset: {e}", line=None, details={"path": str(path)}) from e

    logger.info(f"Loaded dataset (n={ds.n}, d={ds.d}, k={ds.k}) from {path}")
    return ds


# --------------------------------------------------------------------------
# Results
# --------------------------------------------------------------------------


def results_frame(results: Sequence[TrialResult]) -> pl.DataFrame:
    """Trial results as a DataFrame with the result schema, in the given order."""
    rows = [
        {
            "alpha": r.alpha,
            "method": r.method.value,
            "trial": r.trial,
            "seed_cost2": r.seed_cost2,
            "seed_ratio": r.seed_ratio,
            "lloyd_cost2": r.lloyd_cost2,
            "lloyd_ratio": r.lloyd_ratio,
            "lloyd_iters": r.lloyd_iters,
            "undiscovered": r.undiscovered,
        }
        for r in results
    ]
    return pl.DataFrame(rows, schema=RESULT_SCHEMA).select(RESULT_COLUMNS)


def save_results(results: Sequence[TrialResult], path: PathLike) -> None:
    """
    Write trial results as CSV, or Parquet when the suffix is ``.parquet``.

    Raises:
        UsageError: If there are no results
        StorageError: If the file cannot be written
    """
    if not results:
        raise UsageError("no results to write")
    path = Path(path)
    _ensure_parent(path)
    df = results_frame(results)
    try:
        if path.suffix == ".parquet":
            df.write_parquet(path, compression=PARQUET_COMPRESSION)
        else:
            df = df.with_columns(
                pl.Series("alpha", [format_alpha(r.alpha) for r in results], dtype=pl.String)
            )
            df.write_csv(path)
    except OSError as e:
        raise StorageError(f"Error writing results to {path}: {e}", {"path": str(path)}) from e
    logger.info(f"Saved {len(results)} trial results to {path}")


def load_results(path: PathLike) -> List[TrialResult]:
    """
    Read trial results written by :func:`save_results`.

    Raises:
        StorageError: If the file cannot be read
        ParseError: If a row does not describe a trial result
    """
    path = Path(path)
    try:
        if path.suffix == ".parquet":
            df = pl.read_parquet(path)
        else:
            df = pl.read_csv(path, infer_schema_length=0)
    except OSError as e:
        raise StorageError(f"Error reading results from {path}: {e}", {"path": str(path)}) from e
    except Exception as e:
        raise ParseError(f"cannot parse results: {e}", details={"path": str(path)}) from e

    missing = [c for c in RESULT_COLUMNS if c not in df.columns]
    if missing:
        raise ParseError("missing result columns", line=1, details={"missing": missing})

    results = []
    for number, row in enumerate(df.select(RESULT_COLUMNS).iter_rows(named=True), start=2):
        try:
            results.append(TrialResult(**row))
        except ValueError as e:
            raise ParseError(f"invalid result row: {e}", line=number) from e
    return results


def save_summary(summary: Sequence[SummaryRow], path: PathLike) -> None:
    """Write the per-(alpha, method) summary as CSV."""
    path = Path(path)
    _ensure_parent(path)
    rows = [{**row.model_dump(mode="json"), "alpha": format_alpha(row.alpha)} for row in summary]
    try:
        pl.DataFrame(rows).write_csv(path)
    except OSError as e:
        raise StorageError(f"Error writing summary to {path}: {e}", {"path": str(path)}) from e
    logger.info(f"Saved summary ({len(rows)} rows) to {path}")


# --------------------------------------------------------------------------
# JSON documents
# --------------------------------------------------------------------------


def save_json(model: BaseModel, path: PathLike) -> None:
    """Write a Pydantic model as indented JSON."""
    path = Path(path)
    _ensure_parent(path)
    try:
        path.write_text(model.model_dump_json(indent=2) + "\n", encoding="utf-8")
    except OSError as e:
        raise StorageError(f"Error writing {path}: {e}", {"path": str(path)}) from e
    logger.debug(f"Saved {type(model).__name__} to {path}")


def load_json(path: PathLike, model: Type[ModelT]) -> ModelT:
    """
    Read a JSON document into ``model``.

    Raises:
        StorageError: If the file cannot be read
        UsageError: If the document does not match the model
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise StorageError(f"Error reading {path}: {e}", {"path": str(path)}) from e
    try:
        return model.model_validate_json(text)
    except ValidationError as e:
        raise usage_error_from(e, model.__name__) from e
