"""Tests for settings, the error hierarchy and seed streams."""

import numpy as np
import pytest

from src.data_loader import Dataset, load_dataset, resolve_data_path
from src.utils import (
    ACSError,
    FormatError,
    InputError,
    RunError,
    Stream,
    derive_seed,
    get_settings,
    rng_for,
)


@pytest.fixture
def fresh_settings(monkeypatch):
    get_settings.cache_clear()
    yield monkeypatch
    get_settings.cache_clear()


def test_settings_defaults_and_env_override(fresh_settings):
    fresh_settings.setenv("ACS_VERBOSE", "false")
    fresh_settings.setenv("ACS_SWEEP_WORKERS", "3")
    settings = get_settings()
    assert settings.verbose is False
    assert settings.sweep_workers == 3
    assert settings.checkpoint_suffix == ".npz"


def test_data_paths_resolve_under_data_dir(fresh_settings, tmp_path, rng):
    data = Dataset(features=rng.normal(size=(4, 2)), labels=np.array([0, 1, 0, 1]), num_classes=2)
    data.save(tmp_path / "tiny.npz")
    fresh_settings.setenv("ACS_DATA_DIR", str(tmp_path))
    fresh_settings.chdir(tmp_path.parent)
    assert resolve_data_path("tiny.npz") == tmp_path / "tiny.npz"
    assert len(load_dataset("tiny.npz", "native")) == 4


def test_errors_render_one_line():
    err = FormatError("bad\nheader", offset=12)
    assert isinstance(err, InputError) and isinstance(err, ValueError)
    assert err.one_line() == "error=FormatError message=bad header (at byte offset 12)"
    assert issubclass(RunError, ACSError)
    assert "last good checkpoint" in str(RunError("diverged", checkpoint="x.npz"))


def test_streams_are_independent_and_repeatable():
    a = rng_for(42, Stream.SHUFFLE, 3).permutation(20)
    b = rng_for(42, Stream.SHUFFLE, 3).permutation(20)
    c = rng_for(42, Stream.SHUFFLE, 4).permutation(20)
    d = rng_for(42, Stream.NOISE, 3).permutation(20)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_derive_seed_range():
    seeds = {derive_seed(7, Stream.SWEEP, i) for i in range(50)}
    assert len(seeds) == 50
    assert all(0 <= s < 2**31 - 1 for s in seeds)
