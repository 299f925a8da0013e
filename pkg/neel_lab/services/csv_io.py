"""CSV output for sweeps and figure data.

One header line, comma separated, LF line endings, floats in scientific
notation with 12 significant digits.
"""
import io
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import pandas as pd

from neel_lab.core.config import settings
from neel_lab.schemas.schemas import CsvTable

logger = logging.getLogger(__name__)


def table_from_records(header: Sequence[str], records: Sequence[Dict[str, Union[float, str]]]) -> CsvTable:
    return CsvTable(header=list(header), rows=[[record[name] for name in header] for record in records])


def to_frame(table: CsvTable) -> pd.DataFrame:
    return pd.DataFrame(table.rows, columns=table.header)


def render_csv(table: CsvTable) -> str:
    buffer = io.StringIO()
    to_frame(table).to_csv(
        buffer,
        index=False,
        float_format=settings.CSV_FLOAT_FORMAT,
        lineterminator="\n",
    )
    return buffer.getvalue()


def write_csv(table: CsvTable, out: Optional[Union[str, Path]] = None) -> str:
    """Write table to out, or to stdout when out is None; returns the text written"""
    text = render_csv(table)
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="")
        logger.info(f"Wrote {len(table.rows)} rows to {path}")
    return text


def read_csv(source: Union[str, Path, io.StringIO]) -> CsvTable:
    frame = pd.read_csv(source, float_precision="round_trip")
    rows: List[List[Union[float, str]]] = []
    for record in frame.itertuples(index=False):
        rows.append([value if isinstance(value, str) else float(value) for value in record])
    return CsvTable(header=list(frame.columns), rows=rows)
