"""Double-precision OS-ELM reference: initialization, per-sample training,
prediction, batch ELM, and a Sherman-Morrison cross-check.

This is the ground-truth implementation the static analysis is checked
against.  The hidden activation is the identity (h = x @ alpha + b); a
sigmoid option exists for experimentation but is never analyzed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg


class InitSingular(ValueError):
    """H0' H0 is not (numerically) symmetric positive-definite."""


class NotPositiveDefinite(ValueError):
    pass


@dataclass(frozen=True)
class ModelConfig:
    n: int
    n_hidden: int
    m: int
    seed: int = 0

    def __post_init__(self):
        if min(self.n, self.n_hidden, self.m) < 1:
            raise ValueError("model dimensions must be positive")


@dataclass
class ModelState:
    alpha: np.ndarray  # (n, n_hidden)
    bias: np.ndarray  # (n_hidden,)
    P: np.ndarray  # (n_hidden, n_hidden)
    beta: np.ndarray  # (n_hidden, m)


@dataclass(frozen=True)
class StepTrace:
    """All intermediates of one training step, in evaluation order."""

    e: np.ndarray
    h: np.ndarray
    gamma1: np.ndarray
    gamma2: np.ndarray
    gamma3: np.ndarray
    gamma4: float
    gamma5: float
    gamma6: np.ndarray
    gamma7: np.ndarray
    gamma8: np.ndarray
    gamma9: np.ndarray
    gamma10: np.ndarray
    P: np.ndarray
    beta: np.ndarray

    def variables(self) -> dict[str, np.ndarray]:
        return {
            "e": self.e,
            "h": self.h,
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
            "gamma3": self.gamma3,
            "gamma4": np.asarray(self.gamma4),
            "gamma5": np.asarray(self.gamma5),
            "gamma6": self.gamma6,
            "gamma7": self.gamma7,
            "gamma8": self.gamma8,
            "gamma9": self.gamma9,
            "gamma10": self.gamma10,
            "P": self.P,
            "beta": self.beta,
        }


def sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-z))


def hidden(x: np.ndarray, alpha: np.ndarray, bias: np.ndarray, activation=None) -> np.ndarray:
    h = x @ alpha + bias
    return h if activation is None else activation(h)


def _spd_cholesky(A: np.ndarray) -> np.ndarray:
    try:
        return scipy.linalg.cholesky(A, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise InitSingular(f"matrix is not SPD: {exc}") from exc


def init(H0: np.ndarray, T0: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """P0 = (H0'H0)^-1 via Cholesky, beta0 = P0 H0' T0."""
    H0 = np.atleast_2d(np.asarray(H0, dtype=float))
    T0 = np.atleast_2d(np.asarray(T0, dtype=float))
    gram = H0.T @ H0
    L = _spd_cholesky(gram)
    eye = np.eye(gram.shape[0])
    P0 = scipy.linalg.cho_solve((L, True), eye)
    P0 = 0.5 * (P0 + P0.T)  # symmetrize roundoff
    beta0 = P0 @ (H0.T @ T0)
    return P0, beta0


def train_step(state: ModelState, x: np.ndarray, t: np.ndarray) -> tuple[ModelState, StepTrace]:
    """One rank-one RLS update, decomposed into the named intermediates."""
    x = np.asarray(x, dtype=float).reshape(-1)
    t = np.asarray(t, dtype=float).reshape(-1)
    P, beta = state.P, state.beta
    e = x @ state.alpha
    h = e + state.bias
    g1 = P @ h  # column P h'
    g2 = h @ P  # row h P
    g3 = np.outer(g1, g2)
    g4 = float(g2 @ h)
    g5 = 1.0 + g4
    g6 = g3 / g5
    P_new = P - g6
    g7 = P_new @ h
    g8 = h @ beta
    g9 = t - g8
    g10 = np.outer(g7, g9)
    beta_new = beta + g10
    trace = StepTrace(e, h, g1, g2, g3, g4, g5, g6, g7, g8, g9, g10, P_new, beta_new)
    new_state = ModelState(state.alpha, state.bias, P_new, beta_new)
    return new_state, trace


def predict(state: ModelState, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    return (x @ state.alpha + state.bias) @ state.beta


def batch_elm(X: np.ndarray, T: np.ndarray, alpha: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Normal-equations pseudo-inverse solution; oracle for the sequential path."""
    H = np.asarray(X, dtype=float) @ alpha + bias
    gram = H.T @ H
    L = _spd_cholesky(gram)
    return scipy.linalg.cho_solve((L, True), H.T @ np.asarray(T, dtype=float))


def sherman_morrison_P(state: ModelState, h: np.ndarray) -> np.ndarray:
    """P update via the explicit-inverse route (P^-1 + h'h)^-1; oracle only."""
    h = np.asarray(h, dtype=float).reshape(-1)
    try:
        P_inv = scipy.linalg.inv(state.P)
        _spd_cholesky(state.P)
    except (scipy.linalg.LinAlgError, InitSingular) as exc:
        raise NotPositiveDefinite(f"P is not invertible SPD: {exc}") from exc
    return scipy.linalg.inv(P_inv + np.outer(h, h))


def is_spd(A: np.ndarray) -> bool:
    try:
        _spd_cholesky(A)
        return True
    except InitSingular:
        return False
