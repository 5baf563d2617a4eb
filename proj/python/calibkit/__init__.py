"""Calibration metrics (accuracy, Brier, ECE, Balance), expected scores and
the synthetic experiments behind them."""

from ._core import (
    ContractError,
    Distribution,
    LogisticModel,
    Model,
    NumericalError,
    SnapshotDataset,
    __version__,
    compute_bins,
    decompose_brier,
    default_config,
    expected_score,
    expected_score_mc,
    full_report,
    generate_batch,
    load_predictions,
    pointwise_expected,
    run_experiment,
    score_accuracy,
    score_balance,
    score_brier,
    score_ece,
    score_mce,
    train,
    true_ece,
)


def config_text(experiment, **overrides):
    """Default config for an experiment with some keys replaced."""
    lines = [default_config(experiment)]
    for key, value in overrides.items():
        if isinstance(value, (list, tuple)):
            value = " ".join(str(v) for v in value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"
