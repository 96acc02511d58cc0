"""Model and training configuration."""

from dataclasses import dataclass

from ..errors import ValidationError

UNIVERSAL_TRANSFORMER = "universal-transformer"
BILSTM = "bilstm"
BACKBONES = (UNIVERSAL_TRANSFORMER, BILSTM)

LR_SCHEDULES = ("constant", "inverse-time", "exponential")


@dataclass(frozen=True)
class ModelConfig:
    """d: embedding dimension. h: hidden size (transition layer width for the
    transformer, per-direction state size for the bilstm); 0 means the 4*d
    default. depth_steps: recurrence depth of the shared transformer block."""

    d: int
    h: int = 0
    heads: int = 4
    depth_steps: int = 4
    backbone: str = UNIVERSAL_TRANSFORMER
    seed: int = 0

    def __post_init__(self):
        if self.d < 1:
            raise ValidationError(f"d must be positive, got {self.d}")
        if self.h == 0:
            object.__setattr__(self, "h", 4 * self.d)
        if self.h < 1:
            raise ValidationError(f"h must be positive, got {self.h}")
        if self.backbone not in BACKBONES:
            raise ValidationError(f"unknown backbone {self.backbone!r}; expected {BACKBONES}")
        if self.depth_steps < 1:
            raise ValidationError(f"depth_steps must be >= 1, got {self.depth_steps}")
        if self.heads < 1:
            raise ValidationError(f"heads must be >= 1, got {self.heads}")
        if self.backbone == UNIVERSAL_TRANSFORMER:
            if self.h % self.heads != 0:
                raise ValidationError(f"h={self.h} not divisible by heads={self.heads}")
            if self.d % self.heads != 0:
                raise ValidationError(f"d={self.d} not divisible by heads={self.heads}")

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "h": self.h,
            "heads": self.heads,
            "depth_steps": self.depth_steps,
            "backbone": self.backbone,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ModelConfig":
        return cls(**{k: data[k] for k in ("d", "h", "heads", "depth_steps", "backbone", "seed")})


@dataclass(frozen=True)
class TrainingConfig:
    """Plain mini-batch gradient descent with L2 regularization and a named
    learning-rate schedule. Batch order is derived from shuffle_seed and the
    absolute epoch index, so resumed runs replay the same stream."""

    learning_rate: float = 0.5
    weight_decay: float = 1e-5
    epochs: int = 10
    batch_size: int = 32
    lr_schedule: str = "inverse-time"
    lr_decay: float = 0.05
    shuffle_seed: int = 0

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValidationError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.weight_decay < 0:
            raise ValidationError(f"weight_decay must be >= 0, got {self.weight_decay}")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValidationError("epochs and batch_size must be >= 1")
        if self.lr_schedule not in LR_SCHEDULES:
            raise ValidationError(
                f"unknown lr_schedule {self.lr_schedule!r}; expected {LR_SCHEDULES}"
            )
        if not 0 <= self.lr_decay < 1:
            raise ValidationError(f"lr_decay must be in [0, 1), got {self.lr_decay}")

    def learning_rate_at(self, epoch: int) -> float:
        if self.lr_schedule == "constant":
            return self.learning_rate
        if self.lr_schedule == "inverse-time":
            return self.learning_rate / (1.0 + self.lr_decay * epoch)
        return self.learning_rate * (1.0 - self.lr_decay) ** epoch

    def to_dict(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "weight_decay": self.weight_decay,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "lr_schedule": self.lr_schedule,
            "lr_decay": self.lr_decay,
            "shuffle_seed": self.shuffle_seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TrainingConfig":
        return cls(**{k: data[k] for k in cls.__dataclass_fields__ if k in data})
