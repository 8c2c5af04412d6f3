"""In-memory value types for datasets and candidate pools."""
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from pafm.errors import InvalidArgumentError

# Label used when an experiment runs unconditionally; matches every other label.
UNCONDITIONAL = -1


@dataclass(frozen=True)
class Dataset:
    """Indexed (point, label) pairs plus the source distribution they are transported from."""
    points: np.ndarray                 # (N, d) float64
    labels: np.ndarray                 # (N,) int64
    label_set: Tuple[int, ...]
    source_mean: np.ndarray            # (d,)
    source_std: float

    def __post_init__(self):
        points = np.asarray(self.points, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        if points.ndim != 2 or points.shape[0] < 1:
            raise InvalidArgumentError(f"dataset points must be (N, d) with N >= 1, got {points.shape}")
        if labels.shape != (points.shape[0],):
            raise InvalidArgumentError(f"labels shape {labels.shape} does not match {points.shape[0]} points")
        if not np.all(np.isfinite(points)):
            raise InvalidArgumentError("dataset has non-finite coordinates")
        if not set(labels.tolist()) <= set(self.label_set):
            raise InvalidArgumentError(f"labels outside declared set {self.label_set}")
        source_mean = np.asarray(self.source_mean, dtype=np.float64)
        if source_mean.shape != (points.shape[1],):
            raise InvalidArgumentError(f"source mean shape {source_mean.shape} does not match d={points.shape[1]}")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "label_set", tuple(int(v) for v in self.label_set))
        object.__setattr__(self, "source_mean", source_mean)
        object.__setattr__(self, "source_std", float(self.source_std))

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @property
    def d(self) -> int:
        return int(self.points.shape[1])

    @property
    def n_classes(self) -> int:
        return len(self.label_set)

    def class_indices(self, label: int) -> np.ndarray:
        """Ascending indices with ``label``; every index when ``label`` is UNCONDITIONAL."""
        if label == UNCONDITIONAL:
            return np.arange(self.n, dtype=np.int64)
        return np.flatnonzero(self.labels == label).astype(np.int64)

    def conditioning_label(self, i: int, conditioned: bool) -> int:
        return int(self.labels[i]) if conditioned else UNCONDITIONAL

    def with_source(self, mean: np.ndarray, std: float) -> "Dataset":
        return Dataset(self.points, self.labels, self.label_set, mean, std)


@dataclass(frozen=True)
class CandidatePool:
    """K candidate targets for one owner index. ``indices`` is -1 for explicit (generated) points."""
    owner_index: int
    points: np.ndarray                 # (K, d)
    labels: np.ndarray                 # (K,)
    indices: np.ndarray                # (K,) dataset index or -1
    owner_position: int = 0

    def __post_init__(self):
        if self.points.ndim != 2 or self.points.shape[0] < 1:
            raise InvalidArgumentError("a candidate pool needs at least one entry")
        if not 0 <= self.owner_position < self.points.shape[0]:
            raise InvalidArgumentError(f"owner position {self.owner_position} outside pool of {self.k}")

    @property
    def k(self) -> int:
        return int(self.points.shape[0])

    @property
    def owner_point(self) -> np.ndarray:
        return self.points[self.owner_position]


@dataclass
class CandidateTable:
    """Pools for every owner, stored as rows of indices into a point bank.

    The bank starts with the dataset points; providers that generate explicit
    candidates append them. Ragged rows are padded with -1.
    """
    bank: np.ndarray                   # (M, d)
    bank_labels: np.ndarray            # (M,)
    indices: np.ndarray                # (N, K_max) int64, -1 padding
    owner_columns: np.ndarray          # (N,)
    n_dataset: int
    uniform_condition: bool = False    # condition likelihood omitted (shortlist pools)
    meta: Dict[str, object] = field(default_factory=dict)

    @property
    def n_owners(self) -> int:
        return int(self.indices.shape[0])

    @property
    def k_max(self) -> int:
        return int(self.indices.shape[1])

    def sizes(self) -> np.ndarray:
        return np.sum(self.indices >= 0, axis=1)

    def is_index_based(self) -> bool:
        """True when every entry refers to a dataset point (persistable as candidates.csv)."""
        return bool(np.all(self.indices < self.n_dataset))

    def pool(self, i: int) -> CandidatePool:
        row = self.indices[i]
        valid = row[row >= 0]
        owner_col = int(self.owner_columns[i])
        owner_position = int(np.sum(row[:owner_col] >= 0))
        dataset_indices = np.where(valid < self.n_dataset, valid, -1)
        return CandidatePool(
            owner_index=int(i),
            points=self.bank[valid],
            labels=self.bank_labels[valid],
            indices=dataset_indices,
            owner_position=owner_position,
        )

    def dataset_rows(self) -> Dict[int, list]:
        if not self.is_index_based():
            raise InvalidArgumentError("pools with generated points cannot be written as dataset indices")
        return {i: [int(j) for j in row if j >= 0] for i, row in enumerate(self.indices)}


def table_from_pools(dataset: Dataset, pools: "list[CandidatePool]", uniform_condition: bool = False) -> CandidateTable:
    """Pack per-owner pools into a CandidateTable, appending explicit points to the bank."""
    if len(pools) != dataset.n:
        raise InvalidArgumentError(f"need one pool per dataset index ({dataset.n}), got {len(pools)}")
    k_max = max(p.k for p in pools)
    extra_points = []
    extra_labels = []
    next_bank = dataset.n
    indices = np.full((dataset.n, k_max), -1, dtype=np.int64)
    owner_columns = np.zeros(dataset.n, dtype=np.int64)
    for pool in pools:
        i = pool.owner_index
        for col in range(pool.k):
            j = int(pool.indices[col])
            if j < 0:
                extra_points.append(pool.points[col])
                extra_labels.append(pool.labels[col])
                j = next_bank
                next_bank += 1
            indices[i, col] = j
        owner_columns[i] = pool.owner_position
    bank = dataset.points if not extra_points else np.vstack([dataset.points, np.asarray(extra_points)])
    bank_labels = dataset.labels if not extra_labels else np.concatenate([dataset.labels, np.asarray(extra_labels, dtype=np.int64)])
    return CandidateTable(
        bank=bank,
        bank_labels=bank_labels,
        indices=indices,
        owner_columns=owner_columns,
        n_dataset=dataset.n,
        uniform_condition=uniform_condition,
    )


def table_from_rows(dataset: Dataset, rows: Dict[int, list]) -> CandidateTable:
    """Build a table from ``owner -> [dataset indices]`` rows (the candidates.csv shape)."""
    missing = [i for i in range(dataset.n) if i not in rows]
    if missing:
        raise InvalidArgumentError(f"candidate rows missing for owners {missing[:10]}{'...' if len(missing) > 10 else ''}")
    pools = []
    for i in range(dataset.n):
        idx = np.asarray(rows[i], dtype=np.int64)
        if idx.size == 0 or np.any(idx < 0) or np.any(idx >= dataset.n):
            raise InvalidArgumentError(f"candidate row for owner {i} has out-of-range indices")
        hits = np.flatnonzero(idx == i)
        if hits.size == 0:
            raise InvalidArgumentError(f"candidate row for owner {i} does not contain its owner")
        pools.append(CandidatePool(i, dataset.points[idx], dataset.labels[idx], idx, int(hits[0])))
    return table_from_pools(dataset, pools)


def owner_only_table(dataset: Dataset) -> CandidateTable:
    """K = 1 pools: every owner supervises only itself."""
    return table_from_rows(dataset, {i: [i] for i in range(dataset.n)})
