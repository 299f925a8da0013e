import argparse
import logging
import sys
from pathlib import Path

from neel_lab.core.errors import NeelLabError
from neel_lab.core.logging_config import setup_logging
from neel_lab.services.figures import FIGURES, emit_figure


def emit_one(figure_id: int, out_dir: Path) -> bool:
    """Write one figure's data and report whether it succeeded"""
    path = out_dir / f"figure_{figure_id}.csv"
    logging.info(f"Starting figure {figure_id}...")
    try:
        table = emit_figure(figure_id, path)
    except NeelLabError as e:
        logging.error(f"Error during figure {figure_id}: {str(e)}")
        return False
    logging.info(f"Completed figure {figure_id}: {len(table.rows)} rows in {path}")
    return True


def main() -> int:
    parser = argparse.ArgumentParser(description="Emit the data series behind every figure")
    parser.add_argument("--out-dir", default="figures", type=Path)
    parser.add_argument("--ids", type=int, nargs="*", default=sorted(FIGURES))
    parser.add_argument("--log-level", default="INFO")
    args = parser.parse_args()
    setup_logging(args.log_level, log_file="emit_figures.log")

    args.out_dir.mkdir(parents=True, exist_ok=True)
    failed = [figure_id for figure_id in args.ids if not emit_one(figure_id, args.out_dir)]
    if failed:
        logging.error(f"Figures {failed} failed")
        return 1
    logging.info("All figures emitted successfully!")
    return 0


if __name__ == "__main__":
    sys.exit(main())
