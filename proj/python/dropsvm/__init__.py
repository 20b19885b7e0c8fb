"""Marginalized-corruption SVM, logistic regression and SVR."""

import json

from ._core import (
    DataError,
    Dataset,
    DomainError,
    LatentModel,
    LatentOptions,
    LinearModel,
    Loss,
    NoiseKind,
    NoiseModel,
    NumericError,
    OneVsAllModel,
    ParameterError,
    ReweightMode,
    TrainConfig,
    gamma_delta_svr,
    gamma_hinge,
    gamma_logistic,
    load_dataset,
    load_model,
    predict,
    save_dataset,
    save_model,
    train_explicit,
    train_latent,
    train_linear,
)

__all__ = [
    "DataError", "Dataset", "DomainError", "LatentModel", "LatentOptions", "LinearModel", "Loss",
    "NoiseKind", "NoiseModel", "NumericError", "OneVsAllModel", "ParameterError", "ReweightMode",
    "TrainConfig", "gamma_delta_svr", "gamma_hinge", "gamma_logistic", "load_dataset", "load_model",
    "predict", "run", "save_dataset", "save_model", "train_explicit", "train_latent", "train_linear",
]


def run(command, **config):
    """Runs a CLI command in-process and returns its result records as dicts.

    Keyword arguments are config-file keys, e.g. ``train_path``,
    ``noise_levels`` or ``c_grid``. Timing fields are omitted unless
    ``timing=True``.
    """
    from ._core import _run

    return [json.loads(line) for line in _run(command, json.dumps(config))]
