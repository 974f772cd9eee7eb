"""Evaluation metrics: relative error, success, reconstruction SNR.

The SNR convention is 20*log10(||x0||_2 / ||x_hat - x0||_2), capped at
+300 dB for exact recovery; it equals -20*log10(RelErr) whenever the error
is nonzero.
"""

from dataclasses import dataclass

import numpy as np

from .core import as_vector

SUCCESS_THRESHOLD = 1e-4
SNR_CAP_DB = 300.0


@dataclass
class TrialOutcome:
    solver_name: str
    rel_err: float
    success: bool
    snr_db: float
    wall_time_s: float = 0.0


def rel_err(x_hat, x0):
    """||x_hat - x0||_2 / ||x0||_2."""
    x_hat = as_vector(x_hat, name="x_hat")
    x0 = as_vector(x0, length=x_hat.shape[0], name="x0")
    denom = float(np.linalg.norm(x0))
    if denom == 0.0:
        raise ValueError("ground truth is the zero vector")
    return float(np.linalg.norm(x_hat - x0)) / denom


def snr_db(x_hat, x0):
    """Reconstruction SNR in dB (capped at +300 for zero error)."""
    x_hat = as_vector(x_hat, name="x_hat")
    x0 = as_vector(x0, length=x_hat.shape[0], name="x0")
    denom = float(np.linalg.norm(x0))
    if denom == 0.0:
        raise ValueError("ground truth is the zero vector")
    err = float(np.linalg.norm(x_hat - x0))
    if err == 0.0:
        return SNR_CAP_DB
    return 20.0 * np.log10(denom / err)


def success_rate(outcomes):
    """Fraction of outcomes with success = True."""
    if not outcomes:
        raise ValueError("no outcomes")
    return sum(1 for o in outcomes if o.success) / len(outcomes)


def evaluate(x_hat, x0, solver_name, wall_time_s=0.0, eps_success=SUCCESS_THRESHOLD):
    """Bundle the metrics of one solve; success means rel_err <= eps_success."""
    r = rel_err(x_hat, x0)
    return TrialOutcome(solver_name=solver_name, rel_err=r, success=r <= eps_success,
                        snr_db=snr_db(x_hat, x0), wall_time_s=wall_time_s)
