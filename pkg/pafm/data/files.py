"""Plain-text artifact formats.

dataset.csv::

    d,n,labels
    2,2000,0 1
    x0,x1,...,label rows

candidates.csv: one ``owner: j1,j2,...,jK`` row per owner.
samples.csv: header ``x0,...,x{d-1}`` then one point per row.

Coordinates are written with ``repr`` (shortest round-trip decimal), so
write -> read reproduces every float bit for bit.
"""
import csv
from pathlib import Path
from typing import Dict, List, Sequence, Union

import numpy as np

from pafm.errors import InvalidArgumentError, ParseError
from pafm.models.dataset import Dataset

PathLike = Union[str, Path]


def _fmt(value: float) -> str:
    return repr(float(value))


def write_dataset(dataset: Dataset, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["d", "n", "labels"])
        writer.writerow([dataset.d, dataset.n, " ".join(str(v) for v in dataset.label_set)])
        for point, label in zip(dataset.points, dataset.labels):
            writer.writerow([_fmt(v) for v in point] + [int(label)])
    return path


def _parse_float(text: str, line: int, path: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"not a number: {text!r}", line=line, path=path)
    if not np.isfinite(value):
        raise ParseError(f"non-finite coordinate {text!r}", line=line, path=path)
    return value


def read_dataset(path: PathLike, source_mean: Sequence[float], source_std: float) -> Dataset:
    """Parse dataset.csv; the file carries no source, so the caller supplies the one it was generated with."""
    path = Path(path)
    name = str(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise ParseError("missing header", line=len(rows) + 1, path=name)
    if [c.strip() for c in rows[0]] != ["d", "n", "labels"]:
        raise ParseError(f"bad header {rows[0]!r}", line=1, path=name)
    try:
        d, n = int(rows[1][0]), int(rows[1][1])
        label_set = tuple(int(v) for v in rows[1][2].split())
    except (ValueError, IndexError):
        raise ParseError(f"bad header values {rows[1]!r}", line=2, path=name)
    body = rows[2:]
    if len(body) != n:
        raise ParseError(f"header declares {n} rows, found {len(body)}", line=2, path=name)
    if n < 1 or d < 1:
        raise ParseError("dataset must have n >= 1 and d >= 1", line=2, path=name)
    points = np.empty((n, d), dtype=np.float64)
    labels = np.empty(n, dtype=np.int64)
    for r, row in enumerate(body):
        line = r + 3
        if len(row) != d + 1:
            raise ParseError(f"expected {d + 1} fields, got {len(row)}", line=line, path=name)
        points[r] = [_parse_float(v, line, name) for v in row[:d]]
        try:
            labels[r] = int(row[d])
        except ValueError:
            raise ParseError(f"bad label {row[d]!r}", line=line, path=name)
        if labels[r] not in label_set:
            raise ParseError(f"label {labels[r]} not in declared set {label_set}", line=line, path=name)
    mean = np.asarray(source_mean, dtype=np.float64)
    if mean.shape != (d,):
        raise InvalidArgumentError(f"source mean has shape {mean.shape}, dataset dimension is {d}")
    return Dataset(points, labels, label_set, mean, source_std)


def write_candidates(rows: Dict[int, List[int]], path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as fh:
        for owner in sorted(rows):
            fh.write(f"{owner}: {','.join(str(j) for j in rows[owner])}\n")
    return path


def parse_candidate_line(text: str, line: int = 1, path: str = "<candidates>"):
    owner_text, sep, rest = text.partition(":")
    if not sep:
        raise ParseError("expected 'owner: j1,j2,...'", line=line, path=path)
    try:
        owner = int(owner_text.strip())
        entries = [int(v) for v in rest.strip().split(",") if v.strip()]
    except ValueError:
        raise ParseError(f"bad candidate row {text.strip()!r}", line=line, path=path)
    if not entries:
        raise ParseError(f"owner {owner} has no candidates", line=line, path=path)
    return owner, entries


def read_candidates(path: PathLike) -> Dict[int, List[int]]:
    path = Path(path)
    rows: Dict[int, List[int]] = {}
    lines = path.read_text().splitlines()
    if not any(l.strip() for l in lines):
        raise ParseError("empty candidates file", line=1, path=str(path))
    for number, text in enumerate(lines, start=1):
        if not text.strip():
            continue
        owner, entries = parse_candidate_line(text, number, str(path))
        if owner in rows:
            raise ParseError(f"duplicate owner {owner}", line=number, path=str(path))
        rows[owner] = entries
    return rows


def write_samples(points: np.ndarray, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"x{k}" for k in range(points.shape[1])])
        for point in points:
            writer.writerow([_fmt(v) for v in point])
    return path


def read_samples(path: PathLike) -> np.ndarray:
    path = Path(path)
    name = str(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError("empty samples file", line=1, path=name)
    d = len(rows[0])
    if d < 1 or rows[0] != [f"x{k}" for k in range(d)]:
        raise ParseError(f"bad header {rows[0]!r}", line=1, path=name)
    out = np.empty((len(rows) - 1, d), dtype=np.float64)
    for r, row in enumerate(rows[1:]):
        if len(row) != d:
            raise ParseError(f"expected {d} fields, got {len(row)}", line=r + 2, path=name)
        out[r] = [_parse_float(v, r + 2, name) for v in row]
    return out


def write_table(path: PathLike, header: Sequence[str], rows: Sequence[Sequence[object]]) -> Path:
    """Generic CSV writer for reports; floats use repr, None becomes an empty field."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow(["" if v is None else (_fmt(v) if isinstance(v, float) else v) for v in row])
    return path


def read_table(path: PathLike) -> List[Dict[str, str]]:
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    return rows
