"""Seeded Gaussian-blob classification data."""

import numpy as np
from pydantic import BaseModel, Field

from ..utils.seeding import Stream, rng_for
from .dataset import DataSplit, Dataset


class SyntheticSpec(BaseModel):
    """Descriptor of a Gaussian-cluster dataset."""

    classes: int = Field(4, ge=2)
    dims: int = Field(8, ge=1)
    per_class: int = Field(300, ge=1)
    spread: float = Field(0.15, gt=0)
    seed: int = 0
    test_fraction: float = Field(0.2, ge=0, lt=1)


class SyntheticBlobLoader:
    """Generate Gaussian clusters around uniformly drawn class centers."""

    def __init__(self, verbose: bool = True):
        self.verbose = verbose

    def generate(self, spec: SyntheticSpec) -> Dataset:
        """
        Draw every sample of the descriptor, class by class.

        Args:
            spec: Synthetic dataset descriptor.

        Returns:
            Dataset of classes * per_class samples (ids in generation order).
        """
        rng = np.random.default_rng(spec.seed)
        centers = rng.uniform(0.0, 1.0, size=(spec.classes, spec.dims))
        features = np.concatenate(
            [
                centers[c] + spec.spread * rng.standard_normal((spec.per_class, spec.dims))
                for c in range(spec.classes)
            ]
        )
        labels = np.repeat(np.arange(spec.classes), spec.per_class)
        if self.verbose:
            print(
                f"Generated {len(labels):,} synthetic samples "
                f"({spec.classes} classes, {spec.dims} dims)"
            )
        return Dataset(features=features, labels=labels, num_classes=spec.classes, name="synthetic")

    def load_split(self, spec: SyntheticSpec) -> DataSplit:
        """Generate, shuffle with a seeded draw and hold out ``test_fraction`` for testing."""
        full = self.generate(spec)
        order = rng_for(spec.seed, Stream.SPLIT).permutation(len(full))
        n_test = int(round(spec.test_fraction * len(full)))
        return DataSplit(
            train=full.subset(np.sort(order[n_test:])),
            test=full.subset(np.sort(order[:n_test])),
            source="synthetic",
        )
