"""Format dispatch for dataset ingestion."""

from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, model_validator

from ..utils.config import get_settings
from ..utils.errors import ConfigurationError, FormatError
from ..utils.seeding import Stream, rng_for
from .binary_loader import BinaryDatasetLoader, default_idx_labels_path
from .dataset import DataSplit, Dataset
from .synthetic_loader import SyntheticBlobLoader, SyntheticSpec

DatasetFormat = Literal["idx", "cifar10_bin", "synthetic", "native"]


class DatasetSpec(BaseModel):
    """Where the training (and optionally test) data comes from."""

    format: DatasetFormat = "synthetic"
    path: Optional[Path] = None
    labels_path: Optional[Path] = None
    test_path: Optional[Path] = None
    test_labels_path: Optional[Path] = None
    num_classes: int = 10
    synthetic: SyntheticSpec = SyntheticSpec()
    # used when a file format has no separate test file
    test_fraction: float = 0.2
    split_seed: int = 0

    @model_validator(mode="after")
    def _check_paths(self) -> "DatasetSpec":
        if self.format != "synthetic" and self.path is None:
            raise ConfigurationError(f"dataset format {self.format!r} needs a path")
        return self


def resolve_data_path(path: Union[str, Path]) -> Path:
    """Relative paths missing from the working directory are looked up under ``data_dir``."""
    path = Path(path)
    if path.is_absolute() or path.exists():
        return path
    candidate = Path(get_settings().data_dir) / path
    return candidate if candidate.exists() else path


def load_dataset(
    path: Union[str, Path, SyntheticSpec],
    format: DatasetFormat,
    labels_path: Optional[Union[str, Path]] = None,
    num_classes: int = 10,
    verbose: bool = True,
) -> Dataset:
    """
    Load one dataset file (or generate one synthetic dataset).

    Args:
        path: File path, or a SyntheticSpec when format is "synthetic".
        format: "idx", "cifar10_bin", "synthetic" or "native".
        labels_path: IDX label file; guessed from the image file name if omitted.
        num_classes: Class count for IDX data.
        verbose: Print progress lines.

    Returns:
        Dataset with ids assigned in file order.
    """
    if format == "synthetic":
        if not isinstance(path, SyntheticSpec):
            raise ConfigurationError("synthetic datasets are described by a SyntheticSpec")
        return SyntheticBlobLoader(verbose=verbose).generate(path)

    path = resolve_data_path(path)
    if not path.exists():
        raise FormatError(f"dataset file {path} does not exist")
    if format == "native":
        return Dataset.load(path)
    loader = BinaryDatasetLoader(verbose=verbose)
    if format == "cifar10_bin":
        return loader.load_cifar10(path)
    if format == "idx":
        labels = (
            resolve_data_path(labels_path)
            if labels_path is not None
            else default_idx_labels_path(path)
        )
        if labels is None:
            raise FormatError(f"no IDX label file found for {path}")
        return loader.load_idx(path, labels, num_classes=num_classes)
    raise ConfigurationError(f"unknown dataset format {format!r}")


def load_split(spec: DatasetSpec, verbose: bool = True) -> DataSplit:
    """
    Load train and test data described by ``spec``.

    Test data comes from the format's own test files when given, otherwise a
    seeded ``test_fraction`` hold-out of the training file.
    """
    if spec.format == "synthetic":
        return SyntheticBlobLoader(verbose=verbose).load_split(spec.synthetic)

    train = load_dataset(spec.path, spec.format, spec.labels_path, spec.num_classes, verbose)
    if spec.test_path is not None:
        test = load_dataset(
            spec.test_path, spec.format, spec.test_labels_path, spec.num_classes, verbose
        )
        return DataSplit(train=train, test=test, source=str(spec.path))

    order = rng_for(spec.split_seed, Stream.SPLIT).permutation(len(train))
    n_test = int(round(spec.test_fraction * len(train)))
    return DataSplit(
        train=train.subset(np.sort(order[n_test:])),
        test=train.subset(np.sort(order[:n_test])),
        source=str(spec.path),
    )
