from .core import (
    BiLstm,
    LinearParams,
    LstmParams,
    Rng,
    SgdConfig,
    bce_loss,
    bilstm_forward,
    dropout,
    elu,
    linear,
    log_softmax,
    lstm_cell,
    nll_loss,
    sgd_step,
    sigmoid,
)
from .gradcheck import gradient_check, max_relative_error
from .kernels import JIT_ENABLED

__all__ = [
    "BiLstm",
    "JIT_ENABLED",
    "LinearParams",
    "LstmParams",
    "Rng",
    "SgdConfig",
    "bce_loss",
    "bilstm_forward",
    "dropout",
    "elu",
    "gradient_check",
    "linear",
    "log_softmax",
    "lstm_cell",
    "max_relative_error",
    "nll_loss",
    "sgd_step",
    "sigmoid",
]
