"""Data loader package: dataset ingestion and label noise."""

from .binary_loader import BinaryDatasetLoader, parse_idx, write_idx
from .dataset import DataSplit, Dataset
from .label_noise import inject_label_noise, noisy_recall
from .loaders import DatasetSpec, load_dataset, load_split, resolve_data_path
from .synthetic_loader import SyntheticBlobLoader, SyntheticSpec

__all__ = [
    "BinaryDatasetLoader",
    "parse_idx",
    "write_idx",
    "DataSplit",
    "Dataset",
    "inject_label_noise",
    "noisy_recall",
    "DatasetSpec",
    "load_dataset",
    "load_split",
    "resolve_data_path",
    "SyntheticBlobLoader",
    "SyntheticSpec",
]
