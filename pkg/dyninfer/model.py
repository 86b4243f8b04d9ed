"""
MIT License

Copyright (c) 2017 Code Society

Permission is hereby granted, free of charge, to any person obtaining a copy
of this software and associated documentation files (the "Software"), to deal
in the Software without restriction, including without limitation the rights
to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
copies of the Software, and to permit persons to whom the Software is
furnished to do so, subject to the following conditions:

The above copyright notice and this permission notice shall be included in all
copies or substantial portions of the Software.

THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
SOFTWARE.
"""
import logging
import math

import numpy as np

from dyninfer.exceptions import DimensionMismatch, NotStochastic, HorizonMismatch, ModelFormatError, \
    UnknownLabel, RoundOutOfRange

log = logging.getLogger("dyninfer")

STOCHASTIC_TOLERANCE = 1e-9
KEY_SEPARATOR = "|"


def frozen_array(array):
    array = np.array(array, dtype=np.float64)
    array.flags.writeable = False
    return array


def json_number(value):
    """float of a JSON number; booleans and strings are not numbers"""
    if isinstance(value, (bool, str)) or value is None:
        raise TypeError("not a number: %r" % (value,))
    return float(value)


def normalize_row(values, where):
    """Checks a probability row and re-normalizes drift up to STOCHASTIC_TOLERANCE exactly."""
    row = np.array(values, dtype=np.float64)
    if not np.all(np.isfinite(row)):
        raise NotStochastic("non-finite probability in %s" % where)
    if np.any(row < 0):
        raise NotStochastic("negative probability in %s: %s" % (where, row.tolist()))

    total = math.fsum(row)
    if abs(total - 1.0) > STOCHASTIC_TOLERANCE:
        raise NotStochastic("row %s sums to %r, not 1" % (where, total))
    if total != 1.0:
        log.debug("re-normalizing %s (drift %.3e)" % (where, total - 1.0))
        row = row / total
    return row


class Alphabet:
    def __init__(self, labels):
        labels = tuple(str(label) for label in labels)
        if len(labels) == 0:
            raise ModelFormatError("alphabet must not be empty")
        if len(set(labels)) != len(labels):
            raise ModelFormatError("alphabet labels must be distinct: %s" % list(labels))
        for label in labels:
            if KEY_SEPARATOR in label:
                raise ModelFormatError("label %r must not contain '%s'" % (label, KEY_SEPARATOR))

        self.labels = labels
        self._index = dict((label, i) for i, label in enumerate(labels))

    def index(self, label):
        try:
            return self._index[str(label)]
        except KeyError:
            raise UnknownLabel("%r is not a label of %s" % (label, list(self.labels)))

    def label(self, index):
        return self.labels[index]

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, label):
        return str(label) in self._index

    def __eq__(self, other):
        return isinstance(other, Alphabet) and self.labels == other.labels

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self.labels)

    def __repr__(self):
        return "Alphabet(%s)" % list(self.labels)

    def __str__(self):
        return str(list(self.labels))


class Distribution:
    def __init__(self, alphabet, probs, where="distribution"):
        probs = np.asarray(probs, dtype=np.float64)
        if probs.shape != (len(alphabet),):
            raise DimensionMismatch("%s has %s entries, alphabet %s has %d" % (where, probs.shape, alphabet, len(alphabet)))
        self.alphabet = alphabet
        self.probs = frozen_array(normalize_row(probs, where))

    @classmethod
    def from_mapping(cls, alphabet, mapping, where="distribution"):
        if not isinstance(mapping, dict):
            raise ModelFormatError("%s must be an object label->probability" % where)
        keys = set(str(key) for key in mapping)
        if keys != set(alphabet.labels):
            raise DimensionMismatch("%s is keyed by %s, expected %s" % (where, sorted(keys), list(alphabet.labels)))
        values = dict((str(key), value) for key, value in mapping.items())
        try:
            probs = [json_number(values[label]) for label in alphabet.labels]
        except (TypeError, ValueError):
            raise ModelFormatError("%s has a non-numeric probability" % where)
        return cls(alphabet, probs, where)

    @classmethod
    def point_mass(cls, alphabet, label):
        probs = np.zeros(len(alphabet))
        probs[alphabet.index(label)] = 1.0
        return cls(alphabet, probs)

    @classmethod
    def uniform(cls, alphabet):
        return cls(alphabet, np.full(len(alphabet), 1.0 / len(alphabet)))

    def __getitem__(self, label):
        return float(self.probs[self.alphabet.index(label)])

    def to_mapping(self):
        return dict((label, float(p)) for label, p in zip(self.alphabet.labels, self.probs))

    def __eq__(self, other):
        return isinstance(other, Distribution) and self.alphabet == other.alphabet \
            and np.array_equal(self.probs, other.probs)

    def __ne__(self, other):
        return not self == other

    def __str__(self):
        return str(self.to_mapping())


class TransitionKernel:
    """P(X_i | X_{i-1}, Yhat_{i-1}); matrix[x_prev, yhat_prev, x]."""

    def __init__(self, round, x_space, yhat_space, matrix):
        matrix = np.asarray(matrix, dtype=np.float64)
        expected = (len(x_space), len(yhat_space), len(x_space))
        if matrix.shape != expected:
            raise DimensionMismatch("transition kernel for round %d has shape %s, expected %s" % (round, matrix.shape, expected))
        rows = np.empty(expected)
        for a in range(expected[0]):
            for b in range(expected[1]):
                rows[a, b] = normalize_row(matrix[a, b], "transition round %d (%s|%s)" % (round, x_space.label(a), yhat_space.label(b)))
        self.round = round
        self.x_space = x_space
        self.yhat_space = yhat_space
        self.matrix = frozen_array(rows)

    @classmethod
    def from_mapping(cls, round, x_space, yhat_space, mapping):
        if not isinstance(mapping, dict):
            raise ModelFormatError("transition kernel for round %d must be an object" % round)
        expected = set("%s%s%s" % (x, KEY_SEPARATOR, yhat) for x in x_space for yhat in yhat_space)
        keys = set(_composite_key(key) for key in mapping)
        if keys != expected:
            missing = sorted(expected - keys)
            extra = sorted(keys - expected)
            raise DimensionMismatch("transition kernel for round %d: missing rows %s, unknown rows %s" % (round, missing, extra))
        rows = dict((_composite_key(key), value) for key, value in mapping.items())
        matrix = np.empty((len(x_space), len(yhat_space), len(x_space)))
        for a, x_prev in enumerate(x_space):
            for b, yhat_prev in enumerate(yhat_space):
                key = "%s%s%s" % (x_prev, KEY_SEPARATOR, yhat_prev)
                where = "transition round %d (%s)" % (round, key)
                matrix[a, b] = Distribution.from_mapping(x_space, rows[key], where).probs
        return cls(round, x_space, yhat_space, matrix)

    def row(self, x_prev, yhat_prev):
        return Distribution(self.x_space, self.matrix[self.x_space.index(x_prev), self.yhat_space.index(yhat_prev)])

    def to_mapping(self):
        mapping = {}
        for a, x_prev in enumerate(self.x_space):
            for b, yhat_prev in enumerate(self.yhat_space):
                mapping["%s%s%s" % (x_prev, KEY_SEPARATOR, yhat_prev)] = \
                    dict((x, float(p)) for x, p in zip(self.x_space, self.matrix[a, b]))
        return mapping

    def relabel(self, round):
        return TransitionKernel(round, self.x_space, self.yhat_space, self.matrix)

    def __eq__(self, other):
        return isinstance(other, TransitionKernel) and self.round == other.round \
            and self.x_space == other.x_space and self.yhat_space == other.yhat_space \
            and np.array_equal(self.matrix, other.matrix)

    def __ne__(self, other):
        return not self == other

    def __str__(self):
        return str({"round": self.round, "table": self.to_mapping()})


class QuantityKernel:
    """P(Y_i | X_i); matrix[x, y]."""

    def __init__(self, round, x_space, y_space, matrix):
        matrix = np.asarray(matrix, dtype=np.float64)
        expected = (len(x_space), len(y_space))
        if matrix.shape != expected:
            raise DimensionMismatch("quantity kernel for round %d has shape %s, expected %s" % (round, matrix.shape, expected))
        rows = np.empty(expected)
        for a in range(expected[0]):
            rows[a] = normalize_row(matrix[a], "quantity round %d (x=%s)" % (round, x_space.label(a)))
        self.round = round
        self.x_space = x_space
        self.y_space = y_space
        self.matrix = frozen_array(rows)

    @classmethod
    def from_mapping(cls, round, x_space, y_space, mapping):
        if not isinstance(mapping, dict):
            raise ModelFormatError("quantity kernel for round %d must be an object" % round)
        keys = set(str(key) for key in mapping)
        if keys != set(x_space.labels):
            raise DimensionMismatch("quantity kernel for round %d is keyed by %s, expected %s" % (round, sorted(keys), list(x_space.labels)))
        rows = dict((str(key), value) for key, value in mapping.items())
        matrix = np.empty((len(x_space), len(y_space)))
        for a, x in enumerate(x_space):
            matrix[a] = Distribution.from_mapping(y_space, rows[x], "quantity round %d (x=%s)" % (round, x)).probs
        return cls(round, x_space, y_space, matrix)

    def row(self, x):
        return Distribution(self.y_space, self.matrix[self.x_space.index(x)])

    def to_mapping(self):
        return dict((x, dict((y, float(p)) for y, p in zip(self.y_space, self.matrix[a])))
                    for a, x in enumerate(self.x_space))

    def relabel(self, round):
        return QuantityKernel(round, self.x_space, self.y_space, self.matrix)

    def __eq__(self, other):
        return isinstance(other, QuantityKernel) and self.round == other.round \
            and self.x_space == other.x_space and self.y_space == other.y_space \
            and np.array_equal(self.matrix, other.matrix)

    def __ne__(self, other):
        return not self == other

    def __str__(self):
        return str({"round": self.round, "table": self.to_mapping()})


class ContextualLoss:
    """loss(x, y, yhat); values[x, y, yhat]."""

    def __init__(self, x_space, y_space, yhat_space, values):
        values = np.asarray(values, dtype=np.float64)
        expected = (len(x_space), len(y_space), len(yhat_space))
        if values.shape != expected:
            raise DimensionMismatch("loss table has shape %s, expected %s" % (values.shape, expected))
        if not np.all(np.isfinite(values)):
            raise ModelFormatError("loss table must be finite everywhere")
        self.x_space = x_space
        self.y_space = y_space
        self.yhat_space = yhat_space
        self.values = frozen_array(values)

    @classmethod
    def from_records(cls, x_space, y_space, yhat_space, records):
        if not isinstance(records, list):
            raise ModelFormatError("loss must be an array of {x, y, yhat, value} records")
        values = np.full((len(x_space), len(y_space), len(yhat_space)), np.nan)
        seen = np.zeros(values.shape, dtype=bool)
        for record in records:
            try:
                a = x_space.index(record["x"])
                b = y_space.index(record["y"])
                c = yhat_space.index(record["yhat"])
                value = json_number(record["value"])
            except (KeyError, TypeError, ValueError):
                raise ModelFormatError("malformed loss record %r" % (record,))
            except UnknownLabel as e:
                raise DimensionMismatch("loss record %r: %s" % (record, e))
            if seen[a, b, c]:
                raise ModelFormatError("duplicate loss record for %r" % (record,))
            seen[a, b, c] = True
            values[a, b, c] = value
        if not seen.all():
            missing = [(x_space.label(a), y_space.label(b), yhat_space.label(c)) for a, b, c in zip(*np.nonzero(~seen))]
            raise DimensionMismatch("loss table is missing triples %s" % missing)
        return cls(x_space, y_space, yhat_space, values)

    @classmethod
    def zero_one(cls, x_space, y_space, yhat_space):
        values = np.zeros((len(x_space), len(y_space), len(yhat_space)))
        for b, y in enumerate(y_space):
            for c, yhat in enumerate(yhat_space):
                if y != yhat:
                    values[:, b, c] = 1.0
        return cls(x_space, y_space, yhat_space, values)

    def value(self, x, y, yhat):
        return float(self.values[self.x_space.index(x), self.y_space.index(y), self.yhat_space.index(yhat)])

    def to_records(self):
        records = []
        for a, x in enumerate(self.x_space):
            for b, y in enumerate(self.y_space):
                for c, yhat in enumerate(self.yhat_space):
                    records.append({"x": x, "y": y, "yhat": yhat, "value": float(self.values[a, b, c])})
        return records

    def __eq__(self, other):
        return isinstance(other, ContextualLoss) and self.x_space == other.x_space \
            and self.y_space == other.y_space and self.yhat_space == other.yhat_space \
            and np.array_equal(self.values, other.values)

    def __ne__(self, other):
        return not self == other


class Problem:
    def __init__(self, n, x_space, y_space, yhat_space, init, transitions, quantities, loss):
        if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
            raise HorizonMismatch("horizon must be an integer >= 1, got %r" % (n,))
        if len(transitions) != n - 1:
            raise HorizonMismatch("expected %d transition kernels for n=%d, got %d" % (n - 1, n, len(transitions)))
        if len(quantities) != n:
            raise HorizonMismatch("expected %d quantity kernels for n=%d, got %d" % (n, n, len(quantities)))

        for position, kernel in enumerate(transitions):
            if kernel.round != position + 2:
                raise HorizonMismatch("transition kernel at position %d is for round %d, expected %d" % (position, kernel.round, position + 2))
            if kernel.x_space != x_space or kernel.yhat_space != yhat_space:
                raise DimensionMismatch("transition kernel for round %d uses other alphabets" % kernel.round)
        for position, kernel in enumerate(quantities):
            if kernel.round != position + 1:
                raise HorizonMismatch("quantity kernel at position %d is for round %d, expected %d" % (position, kernel.round, position + 1))
            if kernel.x_space != x_space or kernel.y_space != y_space:
                raise DimensionMismatch("quantity kernel for round %d uses other alphabets" % kernel.round)
        if init.alphabet != x_space:
            raise DimensionMismatch("initial distribution is not over the observation space")
        if loss.x_space != x_space or loss.y_space != y_space or loss.yhat_space != yhat_space:
            raise DimensionMismatch("loss table uses other alphabets")

        self.n = int(n)
        self.x_space = x_space
        self.y_space = y_space
        self.yhat_space = yhat_space
        self.init = init
        self.transitions = tuple(transitions)
        self.quantities = tuple(quantities)
        self.loss = loss

        # stacked views: transition_array[i-2] drives round i, quantity_array[i-1] is round i
        if self.transitions:
            self.transition_array = frozen_array([kernel.matrix for kernel in self.transitions])
        else:
            self.transition_array = frozen_array(np.zeros((0, len(x_space), len(yhat_space), len(x_space))))
        self.quantity_array = frozen_array([kernel.matrix for kernel in self.quantities])

    def check_round(self, i):
        if not isinstance(i, (int, np.integer)) or isinstance(i, bool) or i < 1 or i > self.n:
            raise RoundOutOfRange("round %r outside 1..%d" % (i, self.n))
        return int(i)

    def transition(self, i):
        """Kernel for P(X_i | X_{i-1}, Yhat_{i-1}), i in 2..n."""
        if not isinstance(i, (int, np.integer)) or i < 2 or i > self.n:
            raise RoundOutOfRange("no transition into round %r for n=%d" % (i, self.n))
        return self.transitions[i - 2]

    def quantity(self, i):
        return self.quantities[self.check_round(i) - 1]

    def truncate(self, n):
        if n < 1 or n > self.n:
            raise HorizonMismatch("cannot truncate a %d-round problem to %r rounds" % (self.n, n))
        return Problem(n, self.x_space, self.y_space, self.yhat_space, self.init,
                       self.transitions[:n - 1], self.quantities[:n], self.loss)

    def with_init(self, init):
        return Problem(self.n, self.x_space, self.y_space, self.yhat_space, init,
                       self.transitions, self.quantities, self.loss)

    def __eq__(self, other):
        return isinstance(other, Problem) and self.n == other.n \
            and self.x_space == other.x_space and self.y_space == other.y_space \
            and self.yhat_space == other.yhat_space and self.init == other.init \
            and self.transitions == other.transitions and self.quantities == other.quantities \
            and self.loss == other.loss

    def __ne__(self, other):
        return not self == other

    def __str__(self):
        return str({"n": self.n, "x_space": list(self.x_space), "y_space": list(self.y_space),
                    "yhat_space": list(self.yhat_space), "init": self.init.to_mapping()})


def _composite_key(key):
    if isinstance(key, tuple) and len(key) == 2:
        return "%s%s%s" % (key[0], KEY_SEPARATOR, key[1])
    return str(key)


def _alphabet_from(data, key):
    labels = data.get(key)
    if not isinstance(labels, list):
        raise ModelFormatError("'%s' must be an array of labels" % key)
    return Alphabet(labels)


def validate_problem(candidate):
    """
    Builds a Problem from raw model data (the parsed model file document).

    A `stationary: true` flag lets `transitions`/`quantities` hold a single
    table which is repeated for every round.
    """
    if isinstance(candidate, Problem):
        return candidate
    if not isinstance(candidate, dict):
        raise ModelFormatError("model document must be an object")

    for key in ("n", "x_space", "y_space", "yhat_space", "init", "transitions", "quantities", "loss"):
        if key not in candidate:
            raise ModelFormatError("model document is missing '%s'" % key)

    n = candidate["n"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise ModelFormatError("'n' must be an integer")
    if n < 1:
        raise HorizonMismatch("horizon must be >= 1, got %d" % n)

    x_space = _alphabet_from(candidate, "x_space")
    y_space = _alphabet_from(candidate, "y_space")
    yhat_space = _alphabet_from(candidate, "yhat_space")

    transitions = candidate["transitions"]
    quantities = candidate["quantities"]
    if not isinstance(transitions, list) or not isinstance(quantities, list):
        raise ModelFormatError("'transitions' and 'quantities' must be arrays")

    init = Distribution.from_mapping(x_space, candidate["init"], "init")
    loss = ContextualLoss.from_records(x_space, y_space, yhat_space, candidate["loss"])

    if candidate.get("stationary", False):
        if len(quantities) != 1 or (n > 1 and len(transitions) != 1) or (n == 1 and len(transitions) > 1):
            raise HorizonMismatch("a stationary model holds exactly one transition table and one quantity table")
        q = QuantityKernel.from_mapping(1, x_space, y_space, quantities[0])
        t = TransitionKernel.from_mapping(2, x_space, yhat_space, transitions[0]) if transitions else None
        return _stationary(n, x_space, y_space, yhat_space, init, t, q, loss)

    if len(transitions) != n - 1:
        raise HorizonMismatch("expected %d transition kernels for n=%d, got %d" % (n - 1, n, len(transitions)))
    if len(quantities) != n:
        raise HorizonMismatch("expected %d quantity kernels for n=%d, got %d" % (n, n, len(quantities)))

    t_kernels = [TransitionKernel.from_mapping(i + 2, x_space, yhat_space, table) for i, table in enumerate(transitions)]
    q_kernels = [QuantityKernel.from_mapping(i + 1, x_space, y_space, table) for i, table in enumerate(quantities)]
    problem = Problem(n, x_space, y_space, yhat_space, init, t_kernels, q_kernels, loss)
    log.debug("validated problem n=%d |X|=%d |Y|=%d |Yhat|=%d" % (n, len(x_space), len(y_space), len(yhat_space)))
    return problem


def _stationary(n, x_space, y_space, yhat_space, init, t, q, loss):
    transitions = [t.relabel(i) for i in range(2, n + 1)] if t is not None else []
    quantities = [q.relabel(i) for i in range(1, n + 1)]
    return Problem(n, x_space, y_space, yhat_space, init, transitions, quantities, loss)


def make_stationary_problem(n, init, t, q, loss):
    """
    Repeats one transition table `t` and one quantity table `q` over n rounds.

    `init` is a Distribution over the observation space and `loss` a
    ContextualLoss; both carry the alphabets. `t` maps (x_prev, yhat_prev)
    pairs (or "x_prev|yhat_prev" keys) to {x: p}; `q` maps x to {y: p}. Kernel
    objects are accepted as well.
    """
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise HorizonMismatch("horizon must be an integer >= 1, got %r" % (n,))
    x_space, y_space, yhat_space = loss.x_space, loss.y_space, loss.yhat_space

    if isinstance(q, QuantityKernel):
        q_kernel = q.relabel(1)
    else:
        q_kernel = QuantityKernel.from_mapping(1, x_space, y_space, q)

    t_kernel = None
    if isinstance(t, TransitionKernel):
        t_kernel = t.relabel(2)
    elif t is not None:
        t_kernel = TransitionKernel.from_mapping(2, x_space, yhat_space, t)
    elif n > 1:
        raise HorizonMismatch("a transition table is required for n=%d" % n)

    return _stationary(n, x_space, y_space, yhat_space, init, t_kernel, q_kernel, loss)
