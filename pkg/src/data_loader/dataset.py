"""In-memory labelled dataset with stable sample ids."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import FrozenSet, Iterable, Optional

import numpy as np
import polars as pl

from ..utils.errors import FormatError, InputError

NATIVE_VERSION = 1


@dataclass
class Dataset:
    """
    Feature rows, integer labels and the hidden set of corrupted ids.

    Sample ids are the row indices 0..N-1.
    """

    features: np.ndarray
    labels: np.ndarray
    num_classes: int
    noisy_ids: FrozenSet[int] = field(default_factory=frozenset)
    name: str = "dataset"

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2:
            raise InputError(f"features must be 2-D, got shape {self.features.shape}")
        if len(self.features) != len(self.labels):
            raise InputError(
                f"{len(self.features)} feature rows but {len(self.labels)} labels"
            )
        if len(self.labels) and (self.labels.min() < 0 or self.labels.max() >= self.num_classes):
            raise InputError(f"labels must lie in [0, {self.num_classes})")
        self.noisy_ids = frozenset(int(i) for i in self.noisy_ids)
        if self.noisy_ids and max(self.noisy_ids) >= len(self.labels):
            raise InputError("noisy ids reference samples outside the dataset")

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def ids(self) -> np.ndarray:
        return np.arange(len(self.labels))

    @property
    def input_dim(self) -> int:
        return self.features.shape[1]

    @property
    def one_hot(self) -> np.ndarray:
        """One-hot label rows."""
        out = np.zeros((len(self.labels), self.num_classes))
        out[np.arange(len(self.labels)), self.labels] = 1.0
        return out

    def validate_ids(self, ids: Iterable[int]) -> np.ndarray:
        """Return ids as an int array, raising InputError for unknown ids."""
        arr = np.asarray(list(ids), dtype=np.int64)
        if arr.size and (arr.min() < 0 or arr.max() >= len(self)):
            bad = arr[(arr < 0) | (arr >= len(self))]
            raise InputError(f"unknown sample ids: {bad[:5].tolist()}")
        return arr

    def subset(self, ids: Iterable[int]) -> "Dataset":
        """New dataset with the given rows, re-numbered from 0 in the given order."""
        arr = self.validate_ids(ids)
        remap = {int(old): new for new, old in enumerate(arr)}
        return Dataset(
            features=self.features[arr],
            labels=self.labels[arr],
            num_classes=self.num_classes,
            noisy_ids=frozenset(remap[i] for i in self.noisy_ids if i in remap),
            name=self.name,
        )

    def with_labels(self, labels: np.ndarray, noisy_ids: Iterable[int]) -> "Dataset":
        return Dataset(
            features=self.features,
            labels=labels,
            num_classes=self.num_classes,
            noisy_ids=frozenset(noisy_ids),
            name=self.name,
        )

    def class_counts(self) -> pl.DataFrame:
        """Samples per class."""
        return (
            pl.DataFrame({"label": self.labels})
            .group_by("label")
            .agg(pl.len().alias("samples"))
            .sort("label")
        )

    # ------------------------------------------------------------------
    # Native serialization

    def save(self, path: Path) -> Path:
        """Write the dataset, including its noisy ids, to a .npz file."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "wb") as fh:
            np.savez(
                fh,
                version=np.array(NATIVE_VERSION),
                features=self.features,
                labels=self.labels,
                num_classes=np.array(self.num_classes),
                noisy_ids=np.array(sorted(self.noisy_ids), dtype=np.int64),
                name=np.array(self.name),
            )
        return path

    @classmethod
    def load(cls, path: Path) -> "Dataset":
        """Inverse of :meth:`save`; bit-exact."""
        with np.load(Path(path), allow_pickle=False) as archive:
            if "version" not in archive.files or int(archive["version"]) != NATIVE_VERSION:
                raise FormatError(f"{path} is not a native dataset file")
            return cls(
                features=archive["features"],
                labels=archive["labels"],
                num_classes=int(archive["num_classes"]),
                noisy_ids=frozenset(int(i) for i in archive["noisy_ids"]),
                name=str(archive["name"]),
            )


@dataclass
class DataSplit:
    """Train and test partitions of one source."""

    train: Dataset
    test: Dataset
    source: Optional[str] = None
