"""fieldnet: time-series field encodings and a from-scratch classifier engine.

Encodes 1D series into Gramian angular fields (summation and difference)
and Markov transition fields, and classifies the resulting images — or the
raw series — with a self-contained NumPy neural-network engine (stacked
CNN, three-branch parallel CNN, LSTM, and bidirectional LSTM), evaluated by
stratified k-fold cross-validation.
"""

from .errors import (
    BinningError,
    ConfigurationError,
    DegenerateInputError,
    DomainError,
    FieldnetError,
    FormatError,
    ShapeError,
    StratificationError,
)
from .evaluation import (
    MATRIX_ROWS,
    TASKS,
    ExperimentReport,
    FoldPlan,
    accuracy,
    confusion,
    prepare_inputs,
    run_experiment,
    stratified_kfold,
)
from .fields import (
    EncodedSample,
    FieldMatrix,
    PolarSeries,
    TransitionMatrix,
    encode_sample,
    gadf,
    gasf,
    mtf,
    quantile_bins,
    to_polar,
    transition_matrix,
)
from .nn import (
    History,
    ModelSpec,
    TrainConfig,
    build_bilstm,
    build_lstm,
    build_model,
    build_parallel_cnn,
    build_single_cnn,
    predict,
    train,
)
from .series import (
    Segment,
    TimeSeries,
    detrend_linear,
    preprocess,
    resample_to_length,
    rescale_minmax,
    segment_by_label,
    zscore,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "FieldnetError", "DegenerateInputError", "DomainError", "BinningError",
    "ShapeError", "ConfigurationError", "StratificationError", "FormatError",
    "TimeSeries", "Segment", "detrend_linear", "zscore", "rescale_minmax",
    "preprocess", "segment_by_label", "resample_to_length",
    "PolarSeries", "FieldMatrix", "TransitionMatrix", "EncodedSample",
    "to_polar", "gasf", "gadf", "quantile_bins", "transition_matrix", "mtf",
    "encode_sample",
    "ModelSpec", "TrainConfig", "History", "build_single_cnn",
    "build_parallel_cnn", "build_lstm", "build_bilstm", "build_model",
    "train", "predict",
    "TASKS", "MATRIX_ROWS", "FoldPlan", "ExperimentReport",
    "stratified_kfold", "accuracy", "confusion", "prepare_inputs",
    "run_experiment",
]
