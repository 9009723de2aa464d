# Data controller for persisting equilibrium catalogs and result tables

# Import requirements
import json
import logging
from typing import Iterable, List

import pandas as pd

from models.equilibria import EquilibriumRecord
from models.errors import CatalogIOError, CatalogParseError, NBodyError

logger = logging.getLogger(__name__)

# Float format for CSV outputs: 17 significant digits round-trip a double
CSV_FLOAT_FORMAT = '%.17g'


def persist_catalog(catalog: Iterable[EquilibriumRecord], path) -> int:
    """
    Write one JSON object per record (JSONL)

    Args:
        catalog: Records to write, in order
        path: Destination file

    Returns:
        int: Number of records written
    """
    lines = [json.dumps(record.to_json_dict()) for record in catalog]
    try:
        with open(path, 'w', encoding='utf-8') as handle:
            for line in lines:
                handle.write(line + '\n')
    except OSError as e:
        raise CatalogIOError(f"cannot write catalog {path}: {e}") from e
    logger.info("Wrote %d records to %s", len(lines), path)
    return len(lines)


def load_catalog(path) -> List[EquilibriumRecord]:
    """
    Read a JSONL catalog written by persist_catalog
    Blank lines are skipped; any other malformed line is fatal

    Raises:
        CatalogParseError: with the 1-based line number of the bad line
        CatalogIOError: if the file cannot be read
    """
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            text = handle.read()
    except OSError as e:
        raise CatalogIOError(f"cannot read catalog {path}: {e}") from e

    records = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
            if not isinstance(data, dict):
                raise ValueError("expected a JSON object")
            records.append(EquilibriumRecord.from_json_dict(data))
        except (ValueError, TypeError, KeyError, NBodyError) as e:
            raise CatalogParseError(str(e), line_number) from e
    return records


def write_table_csv(frame: pd.DataFrame, path) -> None:
    """Write a table with exact headers and full-precision floats"""
    try:
        frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
    except OSError as e:
        raise CatalogIOError(f"cannot write {path}: {e}") from e
    logger.info("Wrote %d rows to %s", len(frame), path)
