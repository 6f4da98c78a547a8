"""Run configuration for QAT experiments."""

from pathlib import Path
from typing import Any, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..data_loader import DatasetSpec
from ..scoring import AnnealingStrategy
from ..selection import SelectorStrategy
from ..utils.errors import ConfigurationError


class RunConfig(BaseModel):
    """
    Everything one QAT run depends on.

    All randomness derives from ``seed`` through the named streams in
    ``src.utils.seeding``.
    """

    model_config = ConfigDict(extra="forbid")

    dataset: DatasetSpec = DatasetSpec()
    hidden_widths: List[int] = [32, 32]

    # Quantization
    bits_w: int = Field(2, ge=1)
    bits_a: int = Field(32, ge=1)
    keep_edge_layers_fp: bool = True
    recalibrate_every: Optional[int] = Field(None, ge=1)

    # selection loop inputs
    epochs: int = Field(20, ge=1)
    interval: int = Field(5, ge=1)
    fraction: float = Field(0.3, gt=0, le=1)
    lr: float = Field(0.05, gt=0)
    batch_size: int = Field(32, ge=1)
    weight_decay: float = Field(0.0, ge=0)
    strategy: AnnealingStrategy = AnnealingStrategy.COSINE
    selector: SelectorStrategy = SelectorStrategy.ACS
    step_budget: Optional[int] = Field(None, ge=1)

    # Distillation
    kd: bool = True
    kd_mix_lambda: float = Field(0.0, ge=0, le=1)
    teacher_epochs: int = Field(30, ge=0)
    teacher_lr: float = Field(0.05, gt=0)
    teacher_checkpoint: Optional[Path] = None

    # Baselines
    early_epochs: int = Field(5, ge=1)
    coreset_path: Optional[Path] = None

    # Robustness
    noise: float = Field(0.0, ge=0, lt=1)

    seed: int = 42
    output_dir: Optional[Path] = None
    save_scores: bool = True

    @model_validator(mode="after")
    def _check_consistency(self) -> "RunConfig":
        if self.interval > self.epochs:
            raise ValueError(
                f"selection interval {self.interval} exceeds total epochs {self.epochs}"
            )
        if self.selector is SelectorStrategy.FIXED and self.coreset_path is None:
            raise ValueError("the fixed selector needs coreset_path")
        if not self.kd and self.kd_mix_lambda > 0:
            raise ValueError("kd_mix_lambda only applies when kd is enabled")
        # without distillation the teacher's soft labels, and with them DS, are off
        if not self.kd and self.strategy is not AnnealingStrategy.EVS_ONLY:
            self.strategy = AnnealingStrategy.EVS_ONLY
        return self

    @property
    def needs_teacher(self) -> bool:
        return self.kd or (
            self.selector is SelectorStrategy.ACS and self.strategy.needs_ds
        )

    def arch_for(self, input_dim: int, num_classes: int) -> List[int]:
        return [input_dim, *self.hidden_widths, num_classes]

    @classmethod
    def build(cls, **data: Any) -> "RunConfig":
        """Validate keyword data, reporting failures as ConfigurationError."""
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            raise ConfigurationError(_describe(e)) from None

    def with_overrides(self, **overrides: Any) -> "RunConfig":
        """Copy with the non-None overrides applied and re-validated."""
        data = self.model_dump()
        data.update({k: v for k, v in overrides.items() if v is not None})
        # an explicit kd=False also forces the EVS-only schedule
        if overrides.get("kd") is False and "strategy" not in overrides:
            data["strategy"] = AnnealingStrategy.EVS_ONLY
        return RunConfig.build(**data)


def _describe(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        where = ".".join(str(loc) for loc in item["loc"]) or "config"
        parts.append(f"{where}: {item['msg']}")
    return "; ".join(parts)


def load_run_config(path: Optional[Union[str, Path]] = None) -> RunConfig:
    """
    Read a JSON run configuration.

    Args:
        path: Config file; None gives the defaults.

    Returns:
        Validated RunConfig.
    """
    if path is None:
        return RunConfig.build()
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"config file {path} does not exist")
    try:
        return RunConfig.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as e:
        raise ConfigurationError(_describe(e)) from None


def save_run_config(config: RunConfig, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(config.model_dump_json(indent=2), encoding="utf-8")
    return path
