"""Central finite-difference check of reverse-mode gradients."""

import numpy as np

from .tensor import Tensor, ComputationRecord, backprop
from ..util import ContractError


__all__ = ['finite_diff_check']


def _evaluate(f, arrays, single):
    tensors = [Tensor(a) for a in arrays]
    out = f(tensors[0] if single else tensors)
    return float(np.asarray(out.data).reshape(-1)[0])


def finite_diff_check(f, params, h=1e-5, floor=1e-8):
    """Largest relative deviation between backprop and central differences.

    Parameters
    ----------
    f : callable
        maps a :class:`Tensor` (if ``params`` is a single array) or a list of
        tensors (if ``params`` is a list of arrays) to a scalar tensor. Must
        be deterministic.
    params : np.ndarray or list of np.ndarray
        point at which gradients are compared
    h : float
        finite-difference step, must be positive
    floor : float
        lower bound on the denominator of the relative error

    Returns
    -------
    max_rel_error : float
        ``max_i |(f(p + h e_i) - f(p - h e_i)) / (2h) - grad_i| /
        max(|grad_i|, floor)`` over all coordinates of all arrays

    Raises
    ------
    ContractError
        if ``h <= 0``
    """
    if not h > 0:
        raise ContractError('h must be positive, got {}'.format(h))

    single = isinstance(params, np.ndarray) or np.isscalar(params)
    arrays = [np.array(params, dtype=np.float64)] if single else \
        [np.array(p, dtype=np.float64) for p in params]

    leaves = [Tensor(a, requires_grad=True) for a in arrays]
    with ComputationRecord() as record:
        loss = f(leaves[0] if single else leaves)
    grads = backprop(loss, record)
    analytic = [grads.get(t.id, np.zeros_like(t.data)) for t in leaves]

    max_err = 0.
    for ai, a in enumerate(arrays):
        flat = a.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            f_plus = _evaluate(f, arrays, single)
            flat[i] = orig - h
            f_minus = _evaluate(f, arrays, single)
            flat[i] = orig
            numeric = (f_plus - f_minus) / (2 * h)
            g = analytic[ai].reshape(-1)[i]
            err = abs(numeric - g) / max(abs(g), floor)
            max_err = max(max_err, err)

    return max_err
