"""Shared fixtures."""

import numpy as np
import pytest

from src.data_loader import DatasetSpec, SyntheticBlobLoader, SyntheticSpec
from src.experiment import RunConfig

SMALL_SPEC = SyntheticSpec(classes=3, dims=4, per_class=40, spread=0.1, seed=3)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def small_split():
    """96 training and 24 test samples in 3 classes."""
    return SyntheticBlobLoader(verbose=False).load_split(SMALL_SPEC)


@pytest.fixture
def small_config(tmp_path):
    """A fast ACS configuration on the small synthetic split."""
    return RunConfig.build(
        dataset=DatasetSpec(format="synthetic", synthetic=SMALL_SPEC),
        hidden_widths=[8, 8],
        bits_w=2,
        epochs=6,
        interval=2,
        fraction=0.5,
        lr=0.05,
        batch_size=16,
        teacher_epochs=3,
        seed=7,
        save_scores=True,
    )
