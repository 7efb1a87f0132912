"""Dense float64 tensors and the reverse-mode computation record."""

import itertools
from collections import namedtuple

import numpy as np

from ..util import ContractError, GraphError


__all__ = ['Tensor', 'ComputationRecord', 'RecordEntry', 'backprop',
           'active_record']


_node_ids = itertools.count()
_record_stack = []


class Tensor(object):
    """Dense array of 64-bit reals with an optional gradient accumulator.

    Parameters
    ----------
    data : array-like
        values, copied and converted to ``np.float64``
    requires_grad : bool
        whether gradients with respect to this tensor are collected
    name : str or None
        label used in error messages and checkpoints

    Attributes
    ----------
    id : int
        process-wide unique node id
    grad : np.ndarray or None
        accumulated gradient, same shape as ``data``
    """

    __array_priority__ = 1000

    def __init__(self, data, requires_grad=False, name=None):
        self.data = np.array(data, dtype=np.float64)
        self.requires_grad = bool(requires_grad)
        self.grad = None
        self.name = name
        self.id = next(_node_ids)

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    def item(self):
        if self.data.size != 1:
            raise ContractError(
                'item() needs a single-element tensor, got shape {}'.format(
                    self.shape))
        return float(self.data.reshape(-1)[0])

    def numpy(self):
        return self.data.copy()

    def zero_grad(self):
        self.grad = None

    def __repr__(self):
        label = '' if self.name is None else ', name={!r}'.format(self.name)
        return 'Tensor(shape={}, requires_grad={}{})'.format(
            self.shape, self.requires_grad, label)

    def __add__(self, other):
        from .ops import add
        return add(self, other)

    def __radd__(self, other):
        from .ops import add
        return add(other, self)

    def __sub__(self, other):
        from .ops import sub
        return sub(self, other)

    def __rsub__(self, other):
        from .ops import sub
        return sub(other, self)

    def __mul__(self, other):
        from .ops import mul
        return mul(self, other)

    def __rmul__(self, other):
        from .ops import mul
        return mul(other, self)

    def __neg__(self):
        from .ops import neg
        return neg(self)


RecordEntry = namedtuple(
    'RecordEntry', ['op', 'input_ids', 'output_id', 'saved', 'backward'])


class ComputationRecord(object):
    """Ordered list of primitive-op applications.

    Used as a context manager: while the record is active, every primitive
    op with at least one input that requires gradients appends a
    :class:`RecordEntry`. Entries are appended in creation order, so inputs
    always precede their consumers.

    Examples
    --------
    >>> x = Tensor([1., 2.], requires_grad=True)
    >>> with ComputationRecord() as record:
    ...     loss = ops.sum(x * x)
    >>> grads = backprop(loss, record)
    """

    def __init__(self):
        self.entries = []
        self._outputs = dict()
        self._leaves = dict()

    def __enter__(self):
        _record_stack.append(self)
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        _record_stack.remove(self)
        return False

    def __len__(self):
        return len(self.entries)

    def __contains__(self, node_id):
        return node_id in self._outputs or node_id in self._leaves

    def add(self, op, inputs, output, saved, backward):
        for t in inputs:
            if t.id not in self._outputs and t.requires_grad:
                self._leaves.setdefault(t.id, t)
        self._outputs[output.id] = output
        self.entries.append(RecordEntry(
            op=op, input_ids=tuple(t.id for t in inputs),
            output_id=output.id, saved=saved, backward=backward
        ))

    def node(self, node_id):
        if node_id in self._outputs:
            return self._outputs[node_id]
        if node_id in self._leaves:
            return self._leaves[node_id]
        raise GraphError('node {} is not in the record'.format(node_id))

    @property
    def leaves(self):
        return dict(self._leaves)


def active_record():
    """The innermost active :class:`ComputationRecord`, or ``None``."""
    if len(_record_stack) == 0:
        return None
    return _record_stack[-1]


def backprop(loss, record):
    """Reverse-mode gradients of a scalar ``loss``.

    Gradients of leaf tensors that require them are also summed into their
    ``grad`` attribute.

    Parameters
    ----------
    loss : Tensor
        single-element tensor produced by an op recorded in ``record``
    record : ComputationRecord
        record holding the graph that produced ``loss``

    Returns
    -------
    grads : dict
        maps node id to ``d loss / d node`` for every node reachable
        backwards from ``loss``

    Raises
    ------
    ContractError
        if ``loss`` is not a scalar
    GraphError
        if ``loss`` was not produced inside ``record``
    """
    if loss.size != 1:
        raise ContractError(
            'loss must be a scalar, got shape {}'.format(loss.shape))
    if loss.id not in record._outputs:
        raise GraphError(
            'loss node {} is missing from the record'.format(loss.id))

    grads = {loss.id: np.ones_like(loss.data)}
    for entry in reversed(record.entries):
        g = grads.get(entry.output_id)
        if g is None:
            continue
        input_grads = entry.backward(g)
        for node_id, gi in zip(entry.input_ids, input_grads):
            if gi is None:
                continue
            if node_id in grads:
                grads[node_id] = grads[node_id] + gi
            else:
                grads[node_id] = gi

    for node_id, leaf in record._leaves.items():
        if node_id in grads:
            if leaf.grad is None:
                leaf.grad = grads[node_id].copy()
            else:
                leaf.grad = leaf.grad + grads[node_id]

    return grads
