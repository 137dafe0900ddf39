"""Semi-supervised, non-exemplar class-incremental learning of a prototype
classifier over fixed feature embeddings, with feature-space diagnostics
and evaluation metrics."""

from .analysis import ClassGeometryReport, SpectrumReport, class_geometry, pc_id
from .classifier import (
    ClassifierConfig,
    PrototypeSet,
    ce_loss,
    class_probabilities,
    empty_prototype_set,
    ipc_gradient,
    ipc_loss,
    pl_loss,
    predict,
    squared_distance,
)
from .data import Dataset, EmbeddingRecord, SplitPlan, TaskData, ViewBatch
from .errors import (
    ConfigurationError,
    CorruptionError,
    FormatError,
    InputError,
    LabelError,
    ProtoLearnError,
    ProtocolError,
    StateError,
)
from .experiment import ExperimentConfig, run_experiment, run_single
from .fileio import read_embedding_file, write_embedding_file
from .metrics import MetricsReport, summarize, task_accuracy
from .splits import split_dataset
from .synthetic import (
    PRESETS,
    SyntheticConfig,
    generate_synthetic,
    make_ood_dataset,
    preset_config,
)
from .trainer import (
    TaskLog,
    TrainConfig,
    TrainerState,
    estimate_radial_scale,
    init_prototypes,
    nme_prototypes,
    resample_old,
    select_confident,
    sgd_step,
    train_task,
    unsupervised_loss,
)

__version__ = "0.1.0"

__all__ = [
    "ClassGeometryReport",
    "ClassifierConfig",
    "ConfigurationError",
    "CorruptionError",
    "Dataset",
    "EmbeddingRecord",
    "ExperimentConfig",
    "FormatError",
    "InputError",
    "LabelError",
    "MetricsReport",
    "PRESETS",
    "ProtoLearnError",
    "ProtocolError",
    "PrototypeSet",
    "SpectrumReport",
    "SplitPlan",
    "StateError",
    "SyntheticConfig",
    "TaskData",
    "TaskLog",
    "TrainConfig",
    "TrainerState",
    "ViewBatch",
    "ce_loss",
    "class_geometry",
    "class_probabilities",
    "empty_prototype_set",
    "estimate_radial_scale",
    "generate_synthetic",
    "init_prototypes",
    "ipc_gradient",
    "ipc_loss",
    "make_ood_dataset",
    "nme_prototypes",
    "pc_id",
    "pl_loss",
    "predict",
    "preset_config",
    "read_embedding_file",
    "resample_old",
    "run_experiment",
    "run_single",
    "select_confident",
    "sgd_step",
    "split_dataset",
    "squared_distance",
    "summarize",
    "task_accuracy",
    "train_task",
    "unsupervised_loss",
    "write_embedding_file",
]
