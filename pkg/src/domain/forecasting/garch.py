# Faep is a realized-volatility forecasting workbench for half-hourly
# electricity spot prices, from jump decomposition to ensemble backtests.
# Copyright (C) 2025  Pierre Giusti
# 
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
# 
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
# 
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.

import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import minimize
from scipy.signal import lfilter
from scipy.special import expit, logit

from src.config import GARCH_MAX_ITERATIONS, GARCH_MIN_OBSERVATIONS
from src.domain.errors import ModelFitError, NonConvergenceError
from src.domain.forecasting.forecasting_data_objects import GarchModel

logger = logging.getLogger(__name__)

# Bounds of the unconstrained parameters (log omega offset, persistence and share logits)
LOGIT_BOUND = 30.0
LOG_OMEGA_SPAN = (-30.0, 10.0)
# Starting (persistence, alpha share) pairs
STARTING_POINTS: Tuple[Tuple[float, float], ...] = ((0.95, 0.05 / 0.95), (0.5, 0.5))


def conditional_variances(residuals: np.ndarray, omega: float, alpha: float, beta: float, sigma2_0: float) -> np.ndarray:
    """
    GARCH(1,1) variance path sigma^2_t = omega + alpha * e^2_{t-1} + beta * sigma^2_{t-1}.

    Returns:
            np.ndarray: sigma^2_0 .. sigma^2_T, the last entry being the one-step-ahead
            variance after the final residual.
    """
    if residuals.size == 0:
        return np.array([sigma2_0])
    drive = omega + alpha * np.square(residuals)
    path, _ = lfilter([1.0], [1.0, -beta], drive, zi=[beta * sigma2_0])
    return np.concatenate(([sigma2_0], path))


def fit_garch(
    daily_returns: np.ndarray,
    max_iterations: int = GARCH_MAX_ITERATIONS,
    min_observations: int = GARCH_MIN_OBSERVATIONS,
) -> GarchModel:
    """
    Gaussian maximum likelihood of a GARCH(1,1) on demeaned returns.

    omega = exp(theta_0), alpha = p * s and beta = p * (1 - s) with the
    persistence p and the share s both logistic, which keeps every iterate
    stationary. L-BFGS-B runs from a couple of starting points and the best
    likelihood wins.
    """
    returns = np.asarray(daily_returns, dtype=float)
    if returns.size < min_observations:
        raise ModelFitError(f"GARCH needs at least {min_observations} returns, got {returns.size}")
    if not np.all(np.isfinite(returns)):
        raise ModelFitError("GARCH returns must be finite")

    mean = float(returns.mean())
    residuals = returns - mean
    variance = float(residuals.var())
    if variance <= 0:
        raise ModelFitError("GARCH returns have zero variance")

    log_variance = math.log(variance)
    bounds = [
        (log_variance + LOG_OMEGA_SPAN[0], log_variance + LOG_OMEGA_SPAN[1]),
        (-LOGIT_BOUND, LOGIT_BOUND),
        (-LOGIT_BOUND, LOGIT_BOUND),
    ]

    def negative_log_likelihood(theta: np.ndarray) -> float:
        omega, alpha, beta = _parameters(theta)
        sigma2 = conditional_variances(residuals[:-1], omega, alpha, beta, variance)
        if not np.all(np.isfinite(sigma2)) or np.any(sigma2 <= 0):
            return 1e300
        return float(0.5 * np.sum(np.log(2 * np.pi) + np.log(sigma2) + np.square(residuals) / sigma2))

    best = None
    for persistence, share in STARTING_POINTS:
        start = np.array([math.log(variance * (1 - persistence)), logit(persistence), logit(share)])
        result = minimize(
            negative_log_likelihood, start, method="L-BFGS-B", bounds=bounds, options={"maxiter": max_iterations}
        )
        if best is None or result.fun < best.fun:
            best = result

    omega, alpha, beta = _parameters(best.x)
    best_parameters = {"omega": omega, "alpha": alpha, "beta": beta}
    if not np.isfinite(best.fun) or best.fun >= 1e300:
        raise NonConvergenceError("GARCH likelihood is not finite", best_parameters)
    if best.nit >= max_iterations:
        raise NonConvergenceError(f"GARCH did not converge within {max_iterations} iterations", best_parameters)
    if not best.success:
        logger.warning("GARCH optimizer stopped early: %s", best.message)

    path = conditional_variances(residuals, omega, alpha, beta, variance)
    logger.info("GARCH fitted on %d returns: omega=%.4g alpha=%.4f beta=%.4f", returns.size, omega, alpha, beta)
    return GarchModel(
        omega=omega,
        alpha=alpha,
        beta=beta,
        mean=mean,
        initial_sigma2=variance,
        last_sigma2=float(path[-1]),
        log_likelihood=-float(best.fun),
        n_observations=int(returns.size),
    )


def forecast_variances(model: GarchModel, daily_returns: np.ndarray, sigma2_0: Optional[float] = None) -> np.ndarray:
    """
    One-step-ahead variances after each return, sigma^2_{t+1|t} for every t,
    filtering from sigma2_0 (the fit-time initial variance when None).
    """
    residuals = np.asarray(daily_returns, dtype=float) - model.mean
    start = model.initial_sigma2 if sigma2_0 is None else sigma2_0
    return conditional_variances(residuals, model.omega, model.alpha, model.beta, start)[1:]


# PRIVATE FUNCTIONS
def _parameters(theta: np.ndarray) -> Tuple[float, float, float]:
    persistence = float(expit(theta[1]))
    share = float(expit(theta[2]))
    return float(math.exp(theta[0])), persistence * share, persistence * (1 - share)
