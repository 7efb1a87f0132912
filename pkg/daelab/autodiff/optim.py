"""Adam optimizer, as a pure update function and as a stateful wrapper over
named parameter groups."""

from dataclasses import dataclass, replace

import numpy as np

from ..util import ContractError


__all__ = ['AdamState', 'adam_update', 'Adam']


@dataclass(frozen=True)
class AdamState:
    """Moment estimates and hyperparameters of one Adam-optimized array.

    Attributes
    ----------
    m : np.ndarray
        first-moment estimate
    v : np.ndarray
        second-moment estimate, non-negative
    t : int
        number of updates applied so far
    lr, beta1, beta2, eps : float
        hyperparameters
    """
    m: np.ndarray
    v: np.ndarray
    t: int = 0
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def zeros(cls, n, **hyper):
        """Fresh state for ``n`` parameters."""
        return cls(m=np.zeros(n), v=np.zeros(n), t=0, **hyper)

    def __post_init__(self):
        if len(self.m) != len(self.v):
            raise ContractError('m and v must have equal lengths')
        for label in ('lr', 'beta1', 'beta2', 'eps'):
            if not getattr(self, label) > 0:
                raise ContractError('{} must be positive'.format(label))


def adam_update(params, grads, state):
    """One Adam step with bias correction.

    Parameters
    ----------
    params : np.ndarray (n,)
        current parameter values
    grads : np.ndarray (n,)
        gradient of the objective at ``params``
    state : AdamState
        state before the step

    Returns
    -------
    params : np.ndarray (n,)
        updated parameter values (a new array)
    state : AdamState
        state after the step, with ``t`` advanced by one

    Raises
    ------
    ContractError
        if ``params``, ``grads`` and the state arrays differ in length
    """
    params = np.asarray(params, dtype=np.float64)
    grads = np.asarray(grads, dtype=np.float64)
    if not (len(params) == len(grads) == len(state.m)):
        raise ContractError(
            'length mismatch: params {}, grads {}, state {}'.format(
                len(params), len(grads), len(state.m)))

    t = state.t + 1
    m = state.beta1 * state.m + (1 - state.beta1) * grads
    v = state.beta2 * state.v + (1 - state.beta2) * grads * grads
    m_hat = m / (1 - state.beta1 ** t)
    v_hat = v / (1 - state.beta2 ** t)
    new_params = params - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return new_params, replace(state, m=m, v=v, t=t)


class Adam(object):
    """Adam over the parameter groups of a model.

    Parameters
    ----------
    model : :class:`~daelab.models.AutoencoderBase`
        model whose parameters are updated in place (arrays are replaced,
        never mutated)
    frozen : iterable of str
        parameter groups that never receive updates
    lr, beta1, beta2, eps : float
        hyperparameters forwarded to :class:`AdamState`
    """

    def __init__(self, model, frozen=(), lr=1e-3, beta1=0.9, beta2=0.999,
                 eps=1e-8):
        self.model = model
        self.frozen = frozenset(frozen)
        self.hyper = dict(lr=lr, beta1=beta1, beta2=beta2, eps=eps)
        self.states = dict()

    def trainable_keys(self):
        return [k for k in self.model.parameter_keys()
                if k.split('/')[0] not in self.frozen]

    def step(self, grads):
        """Apply one update.

        Parameters
        ----------
        grads : dict
            maps parameter key (``'group/name'``) to its gradient; keys of
            frozen groups are ignored
        """
        for key in self.trainable_keys():
            if key not in grads:
                continue
            value = self.model.get_parameter(key)
            state = self.states.get(key)
            if state is None:
                state = AdamState.zeros(value.size, **self.hyper)
            new_value, self.states[key] = adam_update(
                value.ravel(), grads[key].ravel(), state)
            self.model.set_parameter(key, new_value.reshape(value.shape))
