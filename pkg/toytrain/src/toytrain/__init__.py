"""Tiny trainer for masked-corpus records.

Consumes the corpus builder's record file format and compares its own
category-prediction loss against the builder's ``loss`` command — the
two packages share no code, only those interfaces.
"""

from .data import (
    EncodedSample,
    LGMASK_TOKEN,
    MASK_TOKEN,
    N_CATEGORIES,
    PAD_TOKEN,
    Sample,
    Vocab,
    build_vocab,
    encode,
    majority_baseline,
    read_dataset,
    split_dataset,
)
from .errors import (
    ConfigError,
    DataError,
    ExportError,
    OracleError,
    ToytrainError,
    TrainingError,
)
from .model import TinyEncoder
from .train import (
    ToyModelConfig,
    cli_loss,
    composite,
    evaluate,
    export_logits,
    train,
    write_logit_file,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DataError",
    "EncodedSample",
    "ExportError",
    "LGMASK_TOKEN",
    "MASK_TOKEN",
    "N_CATEGORIES",
    "OracleError",
    "PAD_TOKEN",
    "Sample",
    "TinyEncoder",
    "ToyModelConfig",
    "ToytrainError",
    "TrainingError",
    "Vocab",
    "build_vocab",
    "cli_loss",
    "composite",
    "encode",
    "evaluate",
    "export_logits",
    "majority_baseline",
    "read_dataset",
    "split_dataset",
    "train",
    "write_logit_file",
    "__version__",
]
