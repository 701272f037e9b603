"""
CSV files written by training and ablation runs. Floats use 17 significant
digits so repeated runs produce byte-identical files.
"""
import csv
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

from adcrl.models.metrics import METRICS_HEADER, MetricsRow

SUMMARY_HEADER = ("variant", "env", "seed", "final_smooth_return")
REPORT_HEADER = ("variant", "env", "median_final_smooth_return", "seeds")


def format_cell(value) -> str:
    if value is None:
        return "nan"
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


class CsvWriter:
    """Header on open, one flushed line per row, so partial results survive a crash."""

    def __init__(self, path: Union[str, Path], header: Sequence[str]):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = open(self.path, "w", encoding="utf-8", newline="")
        self._writer = csv.writer(self._fh, lineterminator="\n")
        self._writer.writerow(header)
        self._fh.flush()

    def write(self, values: Iterable) -> None:
        self._writer.writerow([format_cell(v) for v in values])
        self._fh.flush()

    def close(self) -> None:
        if not self._fh.closed:
            self._fh.close()

    def __enter__(self) -> "CsvWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def write_rows(path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    with CsvWriter(path, header) as writer:
        for row in rows:
            writer.write(row)
    return Path(path)


def _parse_optional(text: str) -> Optional[float]:
    value = float(text)
    return None if value != value else value


def read_metrics(path: Union[str, Path]) -> List[MetricsRow]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != METRICS_HEADER:
            raise ValueError(f"{path}: unexpected metrics header {header}")
        rows = []
        for cells in reader:
            data = dict(zip(header, cells))
            rows.append(MetricsRow(
                step=int(data["step"]),
                return_raw=float(data["return_raw"]),
                return_smooth=float(data["return_smooth"]),
                loss_q1=_parse_optional(data["loss_q1"]),
                loss_q2=_parse_optional(data["loss_q2"]),
                director_v=_parse_optional(data["director_v"]),
                actor_j=_parse_optional(data["actor_j"]),
                gamma_d=float(data["gamma_d"]),
                buf_main=int(data["buf_main"]),
                buf_high=int(data["buf_high"]),
                buf_low=int(data["buf_low"]),
            ))
        return rows
