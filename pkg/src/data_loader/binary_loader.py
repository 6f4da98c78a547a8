"""Loaders for IDX (MNIST-style) and CIFAR-10 binary files."""

import gzip
from pathlib import Path
from typing import Optional, Union

import numpy as np

from ..utils.errors import FormatError
from .dataset import Dataset

# IDX element type codes -> big-endian numpy dtypes
IDX_DTYPES = {
    0x08: np.dtype(">u1"),
    0x09: np.dtype(">i1"),
    0x0B: np.dtype(">i2"),
    0x0C: np.dtype(">i4"),
    0x0D: np.dtype(">f4"),
    0x0E: np.dtype(">f8"),
}

CIFAR10_RECORD_BYTES = 3073
CIFAR10_PIXELS = 3072
CIFAR10_CLASSES = 10


def _read_bytes(path: Path) -> bytes:
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rb") as fh:
        return fh.read()


def parse_idx(raw: bytes) -> np.ndarray:
    """
    Decode an IDX buffer.

    Header: two zero bytes, one element-type byte, one dimension-count byte,
    then one big-endian uint32 per dimension.

    Args:
        raw: Whole file contents.

    Returns:
        Array with the declared shape and native-endian dtype.
    """
    if len(raw) < 4:
        raise FormatError("IDX header is truncated", offset=len(raw))
    if raw[0] != 0 or raw[1] != 0:
        raise FormatError("IDX magic must start with two zero bytes", offset=0)
    type_code, ndims = raw[2], raw[3]
    if type_code not in IDX_DTYPES:
        raise FormatError(f"unknown IDX element type 0x{type_code:02x}", offset=2)
    if ndims == 0:
        raise FormatError("IDX file declares zero dimensions", offset=3)

    header_end = 4 + 4 * ndims
    if len(raw) < header_end:
        raise FormatError("IDX dimension block is truncated", offset=len(raw))
    dims = tuple(int(d) for d in np.frombuffer(raw, dtype=">u4", count=ndims, offset=4))

    dtype = IDX_DTYPES[type_code]
    expected = int(np.prod(dims)) * dtype.itemsize
    payload = len(raw) - header_end
    if payload < expected:
        raise FormatError(
            f"IDX payload has {payload} bytes, header declares {expected}", offset=len(raw)
        )
    if payload > expected:
        raise FormatError("IDX file has trailing bytes", offset=header_end + expected)
    data = np.frombuffer(raw, dtype=dtype, count=int(np.prod(dims)), offset=header_end)
    return data.reshape(dims).astype(dtype.newbyteorder("="))


class BinaryDatasetLoader:
    """Load image classification datasets stored in IDX or CIFAR-10 binary form."""

    def __init__(self, verbose: bool = True):
        """
        Initialize the loader.

        Args:
            verbose: Print progress lines.
        """
        self.verbose = verbose

    def _log(self, message: str) -> None:
        if self.verbose:
            print(message)

    def load_idx(
        self,
        images_path: Union[str, Path],
        labels_path: Union[str, Path],
        num_classes: int = 10,
    ) -> Dataset:
        """
        Load an IDX image file and its label file.

        Args:
            images_path: IDX file with N images (any trailing dims, flattened).
            labels_path: IDX file with N labels.
            num_classes: Class count M; labels must be < M.

        Returns:
            Dataset with pixel values scaled to [0, 1], ids in file order.
        """
        images_path, labels_path = Path(images_path), Path(labels_path)
        self._log(f"Loading IDX images from {images_path}")
        images = parse_idx(_read_bytes(images_path))
        labels = parse_idx(_read_bytes(labels_path))
        if labels.ndim != 1:
            raise FormatError(f"IDX label file must be 1-D, got shape {labels.shape}", offset=3)
        if images.shape[0] != labels.shape[0]:
            raise FormatError(
                f"{images.shape[0]} images but {labels.shape[0]} labels", offset=4
            )

        label_header = 8
        bad = np.flatnonzero((labels < 0) | (labels >= num_classes))
        if bad.size:
            raise FormatError(
                f"label {int(labels[bad[0]])} out of range for {num_classes} classes",
                offset=label_header + int(bad[0]) * labels.dtype.itemsize,
            )

        features = images.reshape(images.shape[0], -1).astype(np.float64)
        if images.dtype == np.uint8:
            features /= 255.0
        self._log(f"Loaded {len(labels):,} samples of dimension {features.shape[1]}")
        return Dataset(
            features=features,
            labels=labels.astype(np.int64),
            num_classes=num_classes,
            name=images_path.name,
        )

    def load_cifar10(self, path: Union[str, Path]) -> Dataset:
        """
        Load a CIFAR-10 binary batch: records of 1 label byte + 3072 pixel bytes.

        Args:
            path: Batch file (for example data_batch_1.bin).

        Returns:
            Dataset with 3072-dimensional features scaled to [0, 1].
        """
        path = Path(path)
        self._log(f"Loading CIFAR-10 records from {path}")
        raw = _read_bytes(path)
        if len(raw) == 0:
            raise FormatError("CIFAR-10 file is empty", offset=0)
        remainder = len(raw) % CIFAR10_RECORD_BYTES
        if remainder:
            raise FormatError(
                f"file size {len(raw)} is not a multiple of the {CIFAR10_RECORD_BYTES}-byte record",
                offset=len(raw) - remainder,
            )
        records = np.frombuffer(raw, dtype=np.uint8).reshape(-1, CIFAR10_RECORD_BYTES)
        labels = records[:, 0].astype(np.int64)
        bad = np.flatnonzero(labels >= CIFAR10_CLASSES)
        if bad.size:
            raise FormatError(
                f"label {int(labels[bad[0]])} out of range for {CIFAR10_CLASSES} classes",
                offset=int(bad[0]) * CIFAR10_RECORD_BYTES,
            )
        features = records[:, 1:].astype(np.float64) / 255.0
        self._log(f"Loaded {len(labels):,} records")
        return Dataset(
            features=features, labels=labels, num_classes=CIFAR10_CLASSES, name=path.name
        )


def default_idx_labels_path(images_path: Path) -> Optional[Path]:
    """Guess the label file next to an MNIST-style image file."""
    name = images_path.name
    for images_part, labels_part in (("images-idx3", "labels-idx1"), ("images", "labels")):
        if images_part in name:
            candidate = images_path.with_name(name.replace(images_part, labels_part))
            return candidate if candidate.exists() else None
    return None


def write_idx(path: Union[str, Path], array: np.ndarray) -> Path:
    """Write an unsigned-byte IDX file (used to build fixtures and subsets)."""
    array = np.asarray(array, dtype=np.uint8)
    path = Path(path)
    header = bytes([0, 0, 0x08, array.ndim]) + np.array(array.shape, dtype=">u4").tobytes()
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "wb") as fh:
        fh.write(header + array.tobytes())
    return path
