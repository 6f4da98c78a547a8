"""Coreset type, size law, file format and set utilities."""

import math
from pathlib import Path
from typing import Any, Iterable, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from ..utils.errors import ConfigurationError, FormatError, InputError

HEADER_PREFIX = "#coreset v1"


def coreset_size(fraction: float, n: int) -> int:
    """max(1, floor(S * N)); the tiny epsilon keeps 0.29 * 100 from flooring to 28."""
    if not 0.0 < fraction <= 1.0:
        raise ConfigurationError(f"coreset fraction must lie in (0, 1], got {fraction}")
    if n < 1:
        raise InputError(f"dataset size must be >= 1, got {n}")
    return max(1, min(n, math.floor(fraction * n + 1e-9)))


class Coreset(BaseModel):
    """Selected sample ids for the epochs following ``epoch_created``."""

    model_config = ConfigDict(frozen=True)

    epoch_created: int
    member_ids: Tuple[int, ...]
    fraction: float
    strategy: str
    seed: int = 0

    def __init__(self, **data: Any):
        try:
            super().__init__(**data)
        except ValidationError as e:
            raise InputError(f"invalid coreset: {e.errors()[0]['msg']}") from None

    @field_validator("member_ids")
    @classmethod
    def _unique_ids(cls, ids: Tuple[int, ...]) -> Tuple[int, ...]:
        if len(set(ids)) != len(ids):
            raise ValueError("coreset contains duplicate sample ids")
        return ids

    def __len__(self) -> int:
        return len(self.member_ids)

    def id_set(self) -> frozenset:
        return frozenset(self.member_ids)

    def pruned_ids(self, n: int) -> list:
        """Dataset ids left out of the coreset."""
        members = self.id_set()
        return [i for i in range(n) if i not in members]

    def training_order_ids(self) -> list:
        """Members in ascending id order, the canonical input to the epoch shuffle."""
        return sorted(self.member_ids)


def coreset_overlap(a: Coreset, b: Coreset) -> float:
    """Percentage of shared ids between two equally sized coresets."""
    if len(a) == 0 or len(a) != len(b):
        raise InputError(f"coreset overlap needs equal non-zero sizes, got {len(a)} and {len(b)}")
    return 100.0 * len(a.id_set() & b.id_set()) / len(a)


def coverage_rate(coresets: Iterable[Coreset], n: int) -> float:
    """Fraction of the n dataset ids that appear in at least one of the coresets."""
    seen = set()
    for coreset in coresets:
        seen.update(coreset.member_ids)
    return len(seen) / n


def write_coreset(path: Union[str, Path], coreset: Coreset) -> Path:
    """Write the header line and one id per line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = (
        f"{HEADER_PREFIX} strategy={coreset.strategy} S={coreset.fraction!r} "
        f"epoch={coreset.epoch_created} seed={coreset.seed}"
    )
    lines = [header, *(str(i) for i in coreset.member_ids)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_coreset(path: Union[str, Path], dataset_size: Optional[int] = None) -> Coreset:
    """
    Parse a coreset file.

    Args:
        path: File written by :func:`write_coreset`.
        dataset_size: When given, every id must lie in [0, dataset_size).

    Returns:
        The stored Coreset.
    """
    path = Path(path)
    raw = path.read_bytes()
    lines = raw.decode("utf-8").splitlines()
    if not lines or not lines[0].startswith(HEADER_PREFIX):
        raise FormatError(f"{path} does not start with a '{HEADER_PREFIX}' header", offset=0)

    fields = {}
    for token in lines[0][len(HEADER_PREFIX) :].split():
        key, sep, value = token.partition("=")
        if not sep:
            raise FormatError(f"malformed header token {token!r}", offset=0)
        fields[key] = value
    missing = {"strategy", "S", "epoch", "seed"} - fields.keys()
    if missing:
        raise FormatError(f"coreset header lacks {sorted(missing)}", offset=0)

    ids = []
    seen = set()
    offset = len(lines[0].encode("utf-8")) + 1
    for line in lines[1:]:
        stripped = line.strip()
        if stripped:
            try:
                ids.append(int(stripped))
            except ValueError:
                raise FormatError(f"invalid sample id {stripped!r}", offset=offset) from None
            if ids[-1] in seen:
                raise FormatError(f"duplicate sample id {ids[-1]}", offset=offset)
            seen.add(ids[-1])
            if dataset_size is not None and not 0 <= ids[-1] < dataset_size:
                raise InputError(f"coreset id {ids[-1]} is not in the loaded dataset")
        offset += len(line.encode("utf-8")) + 1

    return Coreset(
        epoch_created=int(fields["epoch"]),
        member_ids=tuple(ids),
        fraction=float(fields["S"]),
        strategy=fields["strategy"],
        seed=int(fields["seed"]),
    )

