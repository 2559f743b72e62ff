"""
Coordinate ascent variational inference for tensor robust PCA.

The observation X = L + S + E is explained by a low-tubal-rank L (nuclear
norm prior, optionally weighted), a sparse S (Laplace prior) and Gaussian
noise E, with Gamma hyperpriors on the three precisions theta.  Each sweep
updates q(S), then q(L), then q(theta); the three theta expectations are the
self-calibrated regularization weights.
"""
from dataclasses import dataclass, replace
import logging
import math
from typing import List, Literal, NamedTuple, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .exceptions import BadConfig, BadTruncation, DegenerateScale
from .laplace_approx import (
    ScalarPosterior,
    abs_posterior,
    expected_abs,
    nuclear_posterior_trace_terms,
)
from .metrics import rmse_step
from .tensor_algebra import fro_norm, l1_norm
from .tensor_types import Tensor3
from .tsvd import TSvdFactors, WeightMatrix, pstnn_weights, t_svd, t_svt, weighted_sval_sum, weighted_t_svt

logger = logging.getLogger(__name__)

Theta = Tuple[float, float, float]


class SolverConfig(BaseModel):
    """Run controls for one solver invocation"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    method: Literal['tnn', 'weighted'] = 'tnn'
    weights: Optional[WeightMatrix] = Field(None, description="Explicit weight matrix for method='weighted'")
    k_trunc: Optional[int] = Field(None, ge=0, description="PSTNN preset: zero weight for the k_trunc largest values")
    theta_init: Theta = (1.0, 1.0, 1.0)
    max_iters: int = Field(50, ge=1)
    rmse_tol: float = Field(1e-4, gt=0)
    sigma_s_convention: Literal['derivation', 'algorithm1'] = 'derivation'
    trace_enabled: bool = True

    @field_validator('theta_init')
    @classmethod
    def _positive_theta(cls, value):
        if not all(math.isfinite(t) and t > 0 for t in value):
            raise ValueError(f"theta_init entries must be positive, got {value}")
        return value

    @model_validator(mode='after')
    def _weights_match_method(self):
        if self.method == 'weighted' and self.weights is None and self.k_trunc is None:
            raise ValueError("method 'weighted' needs weights or a k_trunc preset")
        if self.method == 'tnn' and (self.weights is not None or self.k_trunc is not None):
            raise ValueError("method 'tnn' takes no weights")
        return self

    @classmethod
    def build(cls, **kwargs) -> 'SolverConfig':
        """Validated construction that reports failures as BadConfig"""
        try:
            return cls(**kwargs)
        except ValidationError as exc:
            raise BadConfig(str(exc)) from exc

    def weight_matrix(self, n1: int, n2: int, n3: int) -> WeightMatrix:
        m = min(n1, n2)
        if self.method == 'tnn':
            return WeightMatrix.ones(m, n3)
        try:
            w = self.weights if self.weights is not None else pstnn_weights(n1, n2, n3, self.k_trunc)
        except BadTruncation as exc:
            raise BadConfig(str(exc)) from exc
        if w.shape != (m, n3):
            raise BadConfig(f"Weights must be {m}x{n3} for a {n1}x{n2}x{n3} observation, got {w.shape}")
        if not w.is_monotone():
            raise BadConfig("Weight columns must be nondecreasing")
        return w


@dataclass(frozen=True, eq=False)
class PosteriorState:
    """Variational means, variance summaries and Gamma parameters after a (half-)step"""
    e_l: Tensor3
    e_s: Tensor3
    l_factors: TSvdFactors
    sigma_s: Tensor3
    e_theta: Theta
    a_theta: Theta
    b_theta: Theta
    config: SolverConfig
    weights: WeightMatrix
    iter: int = 0
    converged: bool = False


@dataclass(frozen=True)
class TraceRecord:
    iter: int
    objective: float
    rmse_l: float
    rmse_s: float
    theta: Theta
    tnn_of_l: float
    l1_of_s: float
    residual_fro: float

    def as_row(self) -> dict:
        return {
            'iter': self.iter,
            'objective': self.objective,
            'rmse_l': self.rmse_l,
            'rmse_s': self.rmse_s,
            'theta1': self.theta[0],
            'theta2': self.theta[1],
            'theta3': self.theta[2],
            'tnn_of_l': self.tnn_of_l,
            'l1_of_s': self.l1_of_s,
            'residual_fro': self.residual_fro,
        }


class SolverResult(NamedTuple):
    l: Tensor3
    s: Tensor3
    trace: List[TraceRecord]
    state: PosteriorState


def gamma_shapes(n: int) -> Theta:
    """Shape parameters of q(theta) for an observation with n entries"""
    return (n / 2 + 1, float(n + 1), float(n + 1))


def init(x: Tensor3, cfg: SolverConfig) -> PosteriorState:
    """Start from E[L] = X, E[S] = 0 and the configured theta expectations"""
    if not isinstance(cfg, SolverConfig):
        raise BadConfig(f"Expected a SolverConfig, got {type(cfg).__name__}")
    n1, n2, n3 = x.dims
    weights = cfg.weight_matrix(n1, n2, n3)
    a_theta = gamma_shapes(x.size)
    e_theta = tuple(float(t) for t in cfg.theta_init)
    return PosteriorState(
        e_l=x,
        e_s=Tensor3.zeros(n1, n2, n3),
        l_factors=t_svd(x),
        sigma_s=Tensor3.zeros(n1, n2, n3),
        e_theta=e_theta,
        a_theta=a_theta,
        b_theta=tuple(a / e for a, e in zip(a_theta, e_theta)),
        config=cfg,
        weights=weights,
    )


def update_s(state: PosteriorState, x: Tensor3) -> PosteriorState:
    """q(S): elementwise soft threshold of X - E[L] at E[theta2]/E[theta1]"""
    theta1, theta2, _ = state.e_theta
    post = abs_posterior((x - state.e_l).data, theta1, theta2, state.config.sigma_s_convention)
    return replace(state, e_s=Tensor3(post.mean), sigma_s=Tensor3(post.variance))


def update_l(state: PosteriorState, x: Tensor3) -> PosteriorState:
    """q(L): (weighted) t-SVT of X - E[S] at E[theta3]/E[theta1]"""
    theta1, _, theta3 = state.e_theta
    tau = theta3 / theta1
    target = x - state.e_s
    if state.config.method == 'tnn':
        e_l, factors = t_svt(target, tau)
    else:
        e_l, factors = weighted_t_svt(target, tau, state.weights)
    return replace(state, e_l=e_l, l_factors=factors)


def nuclear_trace_sums(state: PosteriorState) -> Tuple[float, float]:
    """Slice-summed (cov_trace, inv_prec_trace) of the current q(L)"""
    theta1, _, theta3 = state.e_theta
    svals = state.l_factors.svals
    w = state.weights.w[:svals.shape[0], :]
    cov_sum = 0.0
    inv_sum = 0.0
    for k in range(svals.shape[1]):
        cov_k, inv_k = nuclear_posterior_trace_terms(svals[:, k], theta1, theta3, w[:, k])
        cov_sum += cov_k
        inv_sum += inv_k
    return cov_sum, inv_sum


def _penalty(state: PosteriorState) -> float:
    """(Weighted) tensor nuclear norm of E[L], read off the stored factors"""
    return weighted_sval_sum(state.l_factors.svals, state.weights.w) / state.l_factors.n3


def update_theta(state: PosteriorState, x: Tensor3) -> PosteriorState:
    """q(theta): Gamma scales from the fresh q(S), q(L); E[theta_i] = a_i / b_i.

    Raises:
        DegenerateScale: some b_i is non-positive or non-finite.
    """
    n1, n2, n3 = x.dims
    theta1, theta2, _ = state.e_theta
    cov_sum, inv_sum = nuclear_trace_sums(state)

    residual = x - state.e_l - state.e_s
    b1 = (0.5 * fro_norm(residual) ** 2
          + n2 * cov_sum / (2.0 * n3)
          + 0.5 * float(np.sum(state.sigma_s.data)))
    b2 = float(np.sum(expected_abs(ScalarPosterior(state.e_s.data, state.sigma_s.data), theta1, theta2)))
    b3 = _penalty(state) + 0.5 * n2 * inv_sum

    b_theta = (b1, b2, b3)
    for i, b in enumerate(b_theta, start=1):
        if not math.isfinite(b) or b <= 0:
            raise DegenerateScale(f"Scale b_theta{i} collapsed to {b!r}", state=state)
    e_theta = tuple(a / b for a, b in zip(state.a_theta, b_theta))
    return replace(state, b_theta=b_theta, e_theta=e_theta)


def objective_from_terms(residual_fro: float, l1_of_s: float, tnn_of_l: float, theta: Theta, n: int) -> float:
    theta1, theta2, theta3 = theta
    return (0.5 * theta1 * residual_fro ** 2 + theta2 * l1_of_s + theta3 * tnn_of_l
            - 0.5 * n * math.log(theta1) - n * math.log(theta2) - n * math.log(theta3))


def _objective_terms(state: PosteriorState, x: Tensor3) -> Tuple[float, float, float]:
    residual_fro = fro_norm(x - state.e_s - state.e_l)
    return residual_fro, l1_norm(state.e_s), _penalty(state)


def objective(state: PosteriorState, x: Tensor3) -> float:
    """Negative log joint density at the variational means (up to constants)"""
    residual_fro, l1_of_s, tnn_of_l = _objective_terms(state, x)
    return objective_from_terms(residual_fro, l1_of_s, tnn_of_l, state.e_theta, x.size)


def _record(state: PosteriorState, x: Tensor3, rmse_l: float, rmse_s: float) -> TraceRecord:
    residual_fro, l1_of_s, tnn_of_l = _objective_terms(state, x)
    return TraceRecord(
        iter=state.iter,
        objective=objective_from_terms(residual_fro, l1_of_s, tnn_of_l, state.e_theta, x.size),
        rmse_l=rmse_l,
        rmse_s=rmse_s,
        theta=state.e_theta,
        tnn_of_l=tnn_of_l,
        l1_of_s=l1_of_s,
        residual_fro=residual_fro,
    )


def run(x: Tensor3, cfg: SolverConfig) -> SolverResult:
    """Iterate update_s -> update_l -> update_theta until the relative step
    change of both E[L] and E[S] drops below cfg.rmse_tol or cfg.max_iters
    sweeps have run.

    Raises:
        DegenerateScale: with the partial trace attached.
    """
    state = init(x, cfg)
    n1, n2, n3 = x.dims
    if fro_norm(x) == 0.0:
        logger.info("Zero observation; returning zero components")
        return SolverResult(x, state.e_s, [], replace(state, converged=True))

    trace: List[TraceRecord] = []
    for it in range(1, cfg.max_iters + 1):
        prev_l, prev_s = state.e_l, state.e_s
        state = update_s(state, x)
        state = update_l(state, x)
        try:
            state = update_theta(state, x)
        except DegenerateScale as exc:
            logger.warning(f"Iteration {it}: {exc}")
            raise DegenerateScale(str(exc), trace=trace, state=exc.state) from exc
        state = replace(state, iter=it)

        rmse_l = rmse_step(prev_l, state.e_l)
        rmse_s = rmse_step(prev_s, state.e_s)
        if cfg.trace_enabled:
            trace.append(_record(state, x, rmse_l, rmse_s))
        logger.debug(
            f"iter {it}: rmse_l={rmse_l:.3e} rmse_s={rmse_s:.3e} "
            f"theta=({state.e_theta[0]:.4g}, {state.e_theta[1]:.4g}, {state.e_theta[2]:.4g})"
        )
        if max(rmse_l, rmse_s) < cfg.rmse_tol:
            state = replace(state, converged=True)
            break

    logger.info(
        f"{cfg.method} solve of {n1}x{n2}x{n3} finished after {state.iter} iterations "
        f"({'converged' if state.converged else 'max iterations'}), "
        f"tubal rank {state.l_factors.r}"
    )
    return SolverResult(state.e_l, state.e_s, trace, state)
