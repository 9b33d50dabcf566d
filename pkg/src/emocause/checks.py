"""Gradient verification at toy scale, shared by the CLI and the test suite.

Every check builds a small random instance, computes analytic gradients,
and compares them against central finite differences. Dropout is exercised
with a mask held fixed across the finite-difference evaluations.
"""

from __future__ import annotations

import numpy as np

from . import cause_model, emotion_model
from .embeddings import EmbeddingTable
from .nn import core, kernels
from .nn.gradcheck import DEFAULT_EPS, gradient_check

TOY_DIM = 6
TOY_HIDDEN = 4
TOY_MID = 5


def check_linear(seed: int, eps: float = DEFAULT_EPS) -> float:
    rng = np.random.default_rng(seed)
    p = core.LinearParams.init(4, 3, rng)
    x = rng.normal(size=4)
    r = rng.normal(size=3)

    def loss():
        return float(r @ core.linear(p, x))

    grads = [np.outer(r, x), r.copy()]
    return gradient_check(loss, p.tensors(), grads, eps=eps)


def check_linear_elu_logsoftmax_nll(seed: int, eps: float = DEFAULT_EPS) -> float:
    rng = np.random.default_rng(seed)
    p = core.LinearParams.init(4, 4, rng)
    x = rng.normal(size=4)
    target = int(rng.integers(4))

    def forward():
        z = core.linear(p, x)
        a = core.elu(z)
        return z, a, core.log_softmax(a)

    def loss():
        return core.nll_loss(forward()[2], target)

    z, a, log_probs = forward()
    da = np.exp(log_probs)
    da[target] -= 1.0
    dz = da * core.elu_grad(z)
    grads = [np.outer(dz, x), dz]
    return gradient_check(loss, p.tensors(), grads, eps=eps)


def check_linear_sigmoid_bce(seed: int, eps: float = DEFAULT_EPS) -> float:
    rng = np.random.default_rng(seed)
    p = core.LinearParams.init(4, 1, rng)
    x = rng.normal(size=4)
    y = int(rng.integers(2))

    def loss():
        return core.bce_loss(core.sigmoid(float(core.linear(p, x)[0])), y)

    prob = core.sigmoid(float(core.linear(p, x)[0]))
    dz = np.array([prob - y])
    grads = [np.outer(dz, x), dz]
    return gradient_check(loss, p.tensors(), grads, eps=eps)


def check_dropout(seed: int, eps: float = DEFAULT_EPS) -> float:
    rng = np.random.default_rng(seed)
    p = core.LinearParams.init(5, 6, rng)
    x = rng.normal(size=5)
    r = rng.normal(size=6)
    mask = core.dropout_mask(0.5, 6, rng)

    def loss():
        return float(r @ (core.linear(p, x) * mask))

    grads = [np.outer(r * mask, x), r * mask]
    return gradient_check(loss, p.tensors(), grads, eps=eps)


def check_lstm(seed: int, eps: float = DEFAULT_EPS, hidden: int = 3,
               steps: int = 4) -> float:
    """Single-direction LSTM with loss touching every timestep's output,
    so the full backpropagation through time is exercised."""
    rng = np.random.default_rng(seed)
    p = core.LstmParams.init(TOY_DIM, hidden, rng)
    xs = rng.normal(size=(steps, TOY_DIM))
    r = rng.normal(size=(steps, hidden))

    def loss():
        hs = kernels.lstm_forward_seq(p.w_x, p.w_h, p.bias, xs)[0]
        return float(np.sum(r * hs[1:]))

    fwd = kernels.lstm_forward_seq(p.w_x, p.w_h, p.bias, xs)
    grads = list(kernels.lstm_backward_seq(p.w_x, p.w_h, xs, *fwd, r))
    return gradient_check(loss, p.tensors(), grads, eps=eps)


def check_bilstm_last(seed: int, eps: float = DEFAULT_EPS) -> float:
    rng = np.random.default_rng(seed)
    m = core.BiLstm.init(TOY_DIM, TOY_HIDDEN, rng)
    xs = rng.normal(size=(5, TOY_DIM))
    r = rng.normal(size=2 * TOY_HIDDEN)

    def loss():
        return float(r @ core.bilstm_last_output(core.bilstm_run(m, xs)))

    grads = core.bilstm_backward_last(m, core.bilstm_run(m, xs), r)
    return gradient_check(loss, m.tensors(), grads, eps=eps)


def _toy_table(rng: np.random.Generator, dim: int = TOY_DIM) -> EmbeddingTable:
    words = [f"w{i}" for i in range(4)]
    return EmbeddingTable(words, rng.normal(size=(len(words), dim)))


def check_emotion_architecture(seed: int, eps: float = DEFAULT_EPS,
                               train: bool = False) -> float:
    """Full classifier stack: Bi-LSTM -> (dropout) -> linear -> ELU ->
    linear -> log-softmax -> NLL."""
    rng = np.random.default_rng(seed)
    table = _toy_table(rng)
    model = emotion_model.EmotionClassifier.init(table, rng, hidden=TOY_HIDDEN,
                                                 mid=TOY_MID)
    xs = table.vectors[rng.integers(len(table), size=5)]
    target = int(rng.integers(emotion_model.N_EMOTIONS))
    mask_seed = int(rng.integers(2 ** 31))

    def loss():
        mask_rng = np.random.default_rng(mask_seed) if train else None
        return emotion_model.loss_and_grads(model, xs, target, train, mask_rng)[0]

    mask_rng = np.random.default_rng(mask_seed) if train else None
    _, grads = emotion_model.loss_and_grads(model, xs, target, train, mask_rng)
    return gradient_check(loss, model.parameters(), grads, eps=eps)


def check_cause_architecture(seed: int, eps: float = DEFAULT_EPS,
                             train: bool = False) -> float:
    """Full scorer stack: Bi-LSTM over emotion-scaled inputs -> (dropout) ->
    linear -> ELU -> linear -> sigmoid -> BCE."""
    rng = np.random.default_rng(seed)
    table = _toy_table(rng)
    model = cause_model.CauseScorer.init(table, rng, hidden=TOY_HIDDEN, mid=TOY_MID)
    probs = rng.random(cause_model.N_EMOTIONS)
    probs /= probs.sum()
    tokens = [table.words[int(i)] for i in rng.integers(len(table), size=4)]
    xs = cause_model.emotion_scaled_inputs(tokens, probs, table)
    label = int(rng.integers(2))
    mask_seed = int(rng.integers(2 ** 31))

    def loss():
        mask_rng = np.random.default_rng(mask_seed) if train else None
        return cause_model.loss_and_grads(model, xs, label, train, mask_rng)[0]

    mask_rng = np.random.default_rng(mask_seed) if train else None
    _, grads = cause_model.loss_and_grads(model, xs, label, train, mask_rng)
    return gradient_check(loss, model.parameters(), grads, eps=eps)


LAYER_CHECKS = (
    ("linear", check_linear),
    ("linear+elu+log_softmax+nll", check_linear_elu_logsoftmax_nll),
    ("linear+sigmoid+bce", check_linear_sigmoid_bce),
    ("dropout", check_dropout),
    ("lstm", check_lstm),
    ("bilstm", check_bilstm_last),
)

ARCHITECTURE_CHECKS = (
    ("emotion architecture (eval)", lambda s, eps=DEFAULT_EPS: check_emotion_architecture(s, eps)),
    ("emotion architecture (train)", lambda s, eps=DEFAULT_EPS: check_emotion_architecture(s, eps, train=True)),
    ("cause architecture (eval)", lambda s, eps=DEFAULT_EPS: check_cause_architecture(s, eps)),
    ("cause architecture (train)", lambda s, eps=DEFAULT_EPS: check_cause_architecture(s, eps, train=True)),
)

ALL_CHECKS = LAYER_CHECKS + ARCHITECTURE_CHECKS


def run_all(seeds=range(5), eps: float = DEFAULT_EPS, report=None) -> float:
    """Max relative error over every check and seed. `report` receives one
    (name, seed, error) call per run when given."""
    worst = 0.0
    for name, check in ALL_CHECKS:
        for seed in seeds:
            err = check(int(seed), eps)
            if report is not None:
                report(name, int(seed), err)
            worst = max(worst, err)
    return worst
