"""Primitive differentiable operations.

Every primitive computes its forward value with numpy, checks that the value
is finite, and, when any input requires gradients and a
:class:`~daelab.autodiff.tensor.ComputationRecord` is active, appends an
entry holding the saved forward values and a backward function.
"""

import numpy as np

from .tensor import Tensor, active_record
from ..util import DimensionError, NumericError, check_finite


__all__ = [
    'forward_linear', 'tanh', 'relu', 'add', 'mul', 'sub', 'neg', 'square',
    'sum', 'mean', 'squared_error', 'exp', 'log', 'gather_rows',
    'straight_through', 'detach', 'as_tensor',
]


def as_tensor(x):
    """Wrap ``x`` as a constant :class:`Tensor` unless it already is one."""
    if isinstance(x, Tensor):
        return x
    return Tensor(x)


def _emit(op, inputs, out_data, saved, backward):
    check_finite(out_data, op)
    needs_grad = any(t.requires_grad for t in inputs)
    out = Tensor(out_data, requires_grad=needs_grad)
    record = active_record()
    if needs_grad and record is not None:
        record.add(op, inputs, out, saved, backward)
    return out


def _unbroadcast(g, shape):
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for ax, n in enumerate(shape):
        if n == 1 and g.shape[ax] != 1:
            g = g.sum(axis=ax, keepdims=True)
    return g.reshape(shape)


def forward_linear(W, b, x):
    """Affine layer ``x W^T + b``.

    Parameters
    ----------
    W : Tensor (n_out, n_in)
        weights
    b : Tensor (n_out,)
        biases
    x : Tensor (batch, n_in)
        inputs

    Returns
    -------
    out : Tensor (batch, n_out)
        ``out[i, j] = sum_k x[i, k] * W[j, k] + b[j]``

    Raises
    ------
    DimensionError
        if the shapes of ``W``, ``b`` and ``x`` do not compose
    NumericError
        if any input is not finite
    """
    W, b, x = as_tensor(W), as_tensor(b), as_tensor(x)
    if W.ndim != 2 or x.ndim != 2 or b.ndim != 1 \
            or x.shape[1] != W.shape[1] or b.shape[0] != W.shape[0]:
        raise DimensionError(
            'forward_linear: W has shape {} and b has shape {}, '
            'but x has shape {}'.format(W.shape, b.shape, x.shape))
    for label, t in (('W', W), ('b', b), ('x', x)):
        check_finite(t.data, 'forward_linear input {}'.format(label))

    Wd, xd = W.data, x.data
    out = xd @ Wd.T + b.data

    def backward(g):
        return (
            g.T @ xd if W.requires_grad else None,
            g.sum(axis=0) if b.requires_grad else None,
            g @ Wd if x.requires_grad else None,
        )

    return _emit('forward_linear', (W, b, x), out, dict(W=Wd, x=xd), backward)


def tanh(x):
    x = as_tensor(x)
    out = np.tanh(x.data)

    def backward(g):
        return (g * (1. - out * out),)

    return _emit('tanh', (x,), out, dict(out=out), backward)


def relu(x):
    x = as_tensor(x)
    xd = x.data
    out = np.maximum(xd, 0.)

    def backward(g):
        return (g * (xd > 0),)

    return _emit('relu', (x,), out, dict(x=xd), backward)


def add(a, b):
    """Elementwise sum with numpy broadcasting."""
    a, b = as_tensor(a), as_tensor(b)
    out = a.data + b.data

    def backward(g):
        return (
            _unbroadcast(g, a.shape) if a.requires_grad else None,
            _unbroadcast(g, b.shape) if b.requires_grad else None,
        )

    return _emit('add', (a, b), out, dict(), backward)


def mul(a, b):
    """Elementwise product with numpy broadcasting."""
    a, b = as_tensor(a), as_tensor(b)
    ad, bd = a.data, b.data
    out = ad * bd

    def backward(g):
        return (
            _unbroadcast(g * bd, a.shape) if a.requires_grad else None,
            _unbroadcast(g * ad, b.shape) if b.requires_grad else None,
        )

    return _emit('mul', (a, b), out, dict(a=ad, b=bd), backward)


def neg(x):
    return mul(x, -1.)


def sub(a, b):
    return add(a, neg(b))


def square(x):
    x = as_tensor(x)
    return mul(x, x)


def sum(x, axis=None):
    """Sum over all entries (``axis=None``) or over one axis."""
    x = as_tensor(x)
    out = np.sum(x.data, axis=axis)
    shape = x.shape

    def backward(g):
        if axis is not None:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, shape).copy(),)

    return _emit('sum', (x,), out, dict(), backward)


def mean(x, axis=None):
    """Mean over all entries (``axis=None``) or over one axis."""
    x = as_tensor(x)
    count = x.size if axis is None else x.shape[axis]
    out = np.mean(x.data, axis=axis)
    shape = x.shape

    def backward(g):
        if axis is not None:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g / count, shape).copy(),)

    return _emit('mean', (x,), out, dict(count=count), backward)


def squared_error(a, b):
    """Elementwise ``(a - b)**2`` of two equally shaped tensors."""
    a, b = as_tensor(a), as_tensor(b)
    if a.shape != b.shape:
        raise DimensionError(
            'squared_error: shapes {} and {} differ'.format(a.shape, b.shape))
    d = a.data - b.data
    out = d * d

    def backward(g):
        return (
            2. * d * g if a.requires_grad else None,
            -2. * d * g if b.requires_grad else None,
        )

    return _emit('squared_error', (a, b), out, dict(diff=d), backward)


def exp(x):
    x = as_tensor(x)
    with np.errstate(over='ignore'):
        out = np.exp(x.data)

    def backward(g):
        return (g * out,)

    return _emit('exp', (x,), out, dict(out=out), backward)


def log(x):
    x = as_tensor(x)
    xd = x.data
    if np.any(xd <= 0):
        raise NumericError('log of a non-positive value', op='log')
    out = np.log(xd)

    def backward(g):
        return (g / xd,)

    return _emit('log', (x,), out, dict(x=xd), backward)


def gather_rows(table, indices):
    """Rows ``table[indices]``; the backward pass scatter-adds into
    ``table``."""
    table = as_tensor(table)
    indices = np.asarray(indices, dtype=np.intp)
    if table.ndim != 2 or indices.ndim != 1:
        raise DimensionError(
            'gather_rows: table has shape {}, indices have shape {}'.format(
                table.shape, indices.shape))
    out = table.data[indices]
    shape = table.shape

    def backward(g):
        gt = np.zeros(shape)
        np.add.at(gt, indices, g)
        return (gt,)

    return _emit('gather_rows', (table,), out, dict(indices=indices), backward)


def straight_through(source, value):
    """Forward value of ``value``, gradient copied to ``source`` unchanged.

    Parameters
    ----------
    source : Tensor
        tensor that receives the downstream gradient
    value : Tensor or np.ndarray
        forward value, same shape as ``source``; never receives gradients

    Returns
    -------
    out : Tensor
    """
    source = as_tensor(source)
    value = value.data if isinstance(value, Tensor) else np.asarray(value)
    if value.shape != source.shape:
        raise DimensionError(
            'straight_through: source has shape {}, value has shape {}'.format(
                source.shape, value.shape))
    out = np.array(value, dtype=np.float64)

    def backward(g):
        return (g,)

    return _emit('straight_through', (source,), out, dict(), backward)


def detach(x):
    """Copy of ``x`` that is cut from the graph."""
    x = as_tensor(x)
    return Tensor(x.data, requires_grad=False, name=x.name)
