"""First-order Riemannian optimizers: SGD with momentum and Adam/AMSGrad.

The functional steps (:func:`rsgd_step`, :func:`radam_step`) are pure; the
:class:`RSGD` and :class:`RAdam` classes keep per-variable state and update
numpy arrays in place, mirroring the usual ``apply_gradients`` API.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Optional

import numpy as np

from .errors import ConfigurationError, ShapeError
from .manifolds import Manifold


@dataclass(frozen=True)
class RsgdConfig:
    learning_rate: float = 0.01
    momentum: float = 0.9
    maximize: bool = False

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ConfigurationError("learning_rate must be positive")
        if not 0 <= self.momentum < 1:
            raise ConfigurationError("momentum must lie in [0, 1)")


@dataclass(frozen=True)
class RadamConfig:
    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    amsgrad: bool = False
    maximize: bool = False

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ConfigurationError("learning_rate must be positive")
        for name in ("beta1", "beta2"):
            if not 0 <= getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must lie in [0, 1)")
        if not self.eps > 0:
            raise ConfigurationError("eps must be positive")


@dataclass
class OptimizerState:
    step_count: int
    momentum: np.ndarray
    second_moment: Optional[np.ndarray] = None
    second_moment_max: Optional[np.ndarray] = None


def init_state(manifold: Manifold, x: np.ndarray, adam: bool = False) -> OptimizerState:
    state = OptimizerState(0, np.zeros_like(x, dtype=np.complex128))
    if adam:
        batch = manifold.batch_shape(x)
        state.second_moment = np.zeros(batch)
        state.second_moment_max = np.zeros(batch)
    return state


def _signed(egrad, maximize):
    return -egrad if maximize else egrad


def rsgd_step(manifold: Manifold, config: RsgdConfig, state: OptimizerState, x, egrad):
    """One step of Riemannian momentum SGD; returns ``(new_x, new_state)``."""
    rgrad = manifold.egrad_to_rgrad(x, _signed(egrad, config.maximize))
    beta = config.momentum
    m = beta * state.momentum + (1 - beta) * rgrad
    step = -config.learning_rate * m
    new_x, new_m = manifold.retraction_transport(x, m, step)
    return new_x, replace(state, step_count=state.step_count + 1, momentum=new_m)


def radam_step(manifold: Manifold, config: RadamConfig, state: OptimizerState, x, egrad):
    """One step of Riemannian Adam with a per-copy scalar second moment."""
    if state.second_moment is None:
        raise ConfigurationError("state was not initialised for Adam")
    t = state.step_count + 1
    b1, b2 = config.beta1, config.beta2
    rgrad = manifold.egrad_to_rgrad(x, _signed(egrad, config.maximize))
    m = b1 * state.momentum + (1 - b1) * rgrad
    v = b2 * state.second_moment + (1 - b2) * manifold.inner(x, rgrad, rgrad)
    m_hat = m / (1 - b1**t)
    v_hat = v / (1 - b2**t)
    v_max = state.second_moment_max
    if config.amsgrad:
        v_max = np.maximum(v_max, v_hat)
        v_hat = v_max
    scale = config.learning_rate / (np.sqrt(v_hat) + config.eps)
    step = -manifold._expand(scale) * m_hat
    new_x, new_m = manifold.retraction_transport(x, m, step)
    new_state = OptimizerState(t, new_m, v, v_max)
    return new_x, new_state


class _Optimizer:
    adam = False

    def __init__(self, manifold: Manifold, config):
        self.manifold = manifold
        self.config = config
        self.iterations = 0
        self._states: dict = {}

    def state_for(self, var: np.ndarray) -> OptimizerState:
        entry = self._states.get(id(var))
        if entry is None or entry[0] is not var:
            entry = (var, init_state(self.manifold, var, self.adam))
            self._states[id(var)] = entry
        return entry[1]

    def _step(self, state, x, egrad):
        raise NotImplementedError

    def apply_gradients(self, grads_and_vars: Iterable):
        """Update each variable in place from its Euclidean gradient."""
        pairs = list(grads_and_vars)
        if not pairs:
            return
        for egrad, var in pairs:
            if not isinstance(var, np.ndarray) or var.dtype != np.complex128:
                raise ConfigurationError("variables must be complex128 numpy arrays")
            egrad = np.asarray(egrad, dtype=np.complex128)
            if egrad.shape != var.shape:
                raise ShapeError(f"gradient shape {egrad.shape} != variable shape {var.shape}")
            self.manifold.validate_shape(var.shape)
        for egrad, var in pairs:
            state = self.state_for(var)
            state.step_count = self.iterations
            new_x, new_state = self._step(state, var, np.asarray(egrad, dtype=np.complex128))
            var[...] = new_x
            self._states[id(var)] = (var, new_state)
        self.iterations += 1


class RSGD(_Optimizer):
    def __init__(self, manifold: Manifold, learning_rate: float = 0.01, momentum: float = 0.9,
                 maximize: bool = False):
        super().__init__(manifold, RsgdConfig(learning_rate, momentum, maximize))

    def _step(self, state, x, egrad):
        return rsgd_step(self.manifold, self.config, state, x, egrad)


class RAdam(_Optimizer):
    adam = True

    def __init__(self, manifold: Manifold, learning_rate: float = 0.001, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8, amsgrad: bool = False,
                 maximize: bool = False):
        super().__init__(manifold, RadamConfig(learning_rate, beta1, beta2, eps, amsgrad, maximize))

    def _step(self, state, x, egrad):
        return radam_step(self.manifold, self.config, state, x, egrad)
