"""Frozen regression bounds for asymptote-versus-solver residuals.

The first run measures a residual and stores it together with a bound
(GOLDEN_SLACK times the measurement). Later runs pass only while the residual
stays under the stored bound.
"""
import logging
import threading
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import pandas as pd
from pydantic import ValidationError

from neel_lab.core.config import settings
from neel_lab.core.errors import GoldenFileError
from neel_lab.schemas.schemas import GoldenEntry

logger = logging.getLogger(__name__)

COLUMNS = ["name", "parameters", "value", "tolerance"]
MIN_TOLERANCE = 1e-15

Key = Tuple[str, str]


class GoldenStore:
    def __init__(self, path: Optional[Path] = None):
        self.path = Path(path) if path is not None else settings.golden_path()
        self._lock = threading.Lock()

    def __repr__(self) -> str:
        return f"GoldenStore({str(self.path)!r})"

    def load(self) -> Dict[Key, GoldenEntry]:
        if not self.path.exists():
            return {}
        try:
            frame = pd.read_csv(self.path, dtype={"name": str, "parameters": str},
                                keep_default_na=False, float_precision="round_trip")
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
            raise GoldenFileError(f"unreadable golden file {self.path}: {e}") from e
        if list(frame.columns) != COLUMNS:
            raise GoldenFileError(
                f"golden file {self.path} has columns {list(frame.columns)}, expected {COLUMNS}"
            )
        entries: Dict[Key, GoldenEntry] = {}
        for index, record in enumerate(frame.to_dict("records")):
            try:
                entry = GoldenEntry(**record)
            except ValidationError as e:
                raise GoldenFileError(f"golden file {self.path}, row {index + 1}: {e}") from e
            entries[(entry.name, entry.parameters)] = entry
        return entries

    def _save(self, entries: Dict[Key, GoldenEntry]) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        rows: List[dict] = [entry.model_dump() for _, entry in sorted(entries.items())]
        frame = pd.DataFrame(rows, columns=COLUMNS)
        frame.to_csv(self.path, index=False, float_format="%.17g", lineterminator="\n")

    def get(self, name: str, parameters: str = "") -> Optional[GoldenEntry]:
        return self.load().get((name, parameters))

    def record(self, entry: GoldenEntry) -> None:
        with self._lock:
            entries = self.load()
            entries[(entry.name, entry.parameters)] = entry
            self._save(entries)
        logger.info(f"Recorded golden bound {entry.name}[{entry.parameters}] <= {entry.tolerance:.3e}")

    def check(self, name: str, parameters: str, measured: float) -> Tuple[bool, float, bool]:
        """(passed, bound, newly_recorded) for a non-negative residual"""
        existing = self.get(name, parameters)
        if existing is None:
            bound = max(abs(measured) * settings.GOLDEN_SLACK, MIN_TOLERANCE)
            self.record(GoldenEntry(name=name, parameters=parameters, value=measured, tolerance=bound))
            return True, bound, True
        passed = abs(measured) <= existing.tolerance
        if not passed:
            logger.warning(
                f"{name}[{parameters}] drifted: {measured:.3e} > frozen bound {existing.tolerance:.3e}"
            )
        return passed, existing.tolerance, False

    def clear(self) -> None:
        if self.path.exists():
            self.path.unlink()
