"""
Model handles: the response function y(x) being decomposed.

Every handle exposes ``dimension``, ``evaluate(points)`` for an array of
shape (k, N), and a monotone ``evaluations`` counter.  Builtin polynomial
models also expose ``polynomial``, which lets the expansion code integrate
them exactly instead of numerically.

External models speak a line protocol over stdin/stdout: for each
evaluation the tool writes one line of N space-separated decimal floats
(17 significant digits) and reads back one line holding a single float.
"""

from __future__ import annotations

import logging
import queue
import shlex
import subprocess
import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import DomainError, ModelProtocolError
from .moments import Polynomial

log = logging.getLogger(__name__)


class ModelHandle:
    polynomial = None

    def __init__(self, dimension):
        self.dimension = int(dimension)
        self.evaluations = 0
        self._lock = threading.Lock()

    def _count(self, k):
        with self._lock:
            self.evaluations += k

    def _check(self, points):
        x = np.atleast_2d(np.asarray(points, dtype=float))
        if x.shape[-1] != self.dimension:
            raise DomainError(f"model expects {self.dimension} inputs, got {x.shape[-1]}")
        return x

    def evaluate(self, points):
        raise NotImplementedError

    def __call__(self, points):
        return self.evaluate(points)

    def close(self):
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class PolynomialModel(ModelHandle):
    """A builtin model given as a sparse polynomial over all N variables."""

    def __init__(self, polynomial, dimension=None):
        if dimension is None:
            dimension = (max(polynomial.subset) + 1) if polynomial.subset else 1
        super().__init__(dimension)
        if polynomial.subset and polynomial.subset[-1] >= self.dimension:
            raise DomainError("polynomial uses a variable beyond the model dimension")
        self.polynomial = polynomial.embed(tuple(range(self.dimension)))

    def evaluate(self, points):
        x = self._check(points)
        self._count(len(x))
        return np.asarray(self.polynomial(x), dtype=float).reshape(len(x))


class CallableModel(ModelHandle):
    """Wraps a Python function; ``func`` receives one point of shape (N,)
    unless ``vectorized`` is set, in which case it receives (k, N)."""

    def __init__(self, func, dimension, vectorized=False):
        super().__init__(dimension)
        self.func = func
        self.vectorized = vectorized

    def evaluate(self, points):
        x = self._check(points)
        self._count(len(x))
        if self.vectorized:
            return np.asarray(self.func(x), dtype=float).reshape(len(x))
        return np.array([float(self.func(p)) for p in x])


def quadratic_symmetric(a0=2.0, a1=1.0, b0=2.0, b1=1.0, c0=2.0, c1=1.0):
    """(a0 + a1 x1)(b0 + b1 x2) + (a0 + a1 x1)(c0 + c1 x3) + (b0 + b1 x2)(c0 + c1 x3)"""
    A = Polynomial((0,), {(0,): a0, (1,): a1})
    B = Polynomial((1,), {(0,): b0, (1,): b1})
    C = Polynomial((2,), {(0,): c0, (1,): c1})
    return A * B + A * C + B * C


def additive_linear(coefficients, constant=0.0):
    """constant + sum_i coefficients[i] * x_i"""
    n = len(coefficients)
    terms = {tuple(int(k == i) for k in range(n)): c for i, c in enumerate(coefficients)}
    terms[(0,) * n] = terms.get((0,) * n, 0.0) + constant
    return Polynomial(tuple(range(n)), terms)


def polynomial_from_terms(dimension, terms):
    """Sparse polynomial from ``[(exponents, coefficient), ...]`` over N variables."""
    n = int(dimension)
    out = {}
    for exps, c in terms:
        exps = tuple(int(e) for e in exps)
        if len(exps) != n:
            raise DomainError(f"term exponents {exps} do not have length {n}")
        out[exps] = out.get(exps, 0.0) + float(c)
    return Polynomial(tuple(range(n)), out)


class _BadAnswer(ModelProtocolError):
    """The process answered, but not with one finite float (never retried)."""


class _Worker:
    """One external process plus a reader thread feeding a line queue."""

    def __init__(self, argv, timeout):
        self.argv = argv
        self.timeout = timeout
        try:
            self.proc = subprocess.Popen(
                argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                text=True, bufsize=1,
            )
        except OSError as exc:
            raise ModelProtocolError(f"cannot start external model {argv[0]!r}: {exc}") from exc
        self.lines = queue.Queue()
        self.reader = threading.Thread(target=self._pump, daemon=True)
        self.reader.start()

    def _pump(self):
        for line in self.proc.stdout:
            self.lines.put(line)
        self.lines.put(None)

    def ask(self, point):
        msg = " ".join(format(float(v), ".17g") for v in point)
        try:
            self.proc.stdin.write(msg + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise ModelProtocolError(f"external model {self.argv[0]!r} is not accepting input: {exc}") from exc
        try:
            line = self.lines.get(timeout=self.timeout)
        except queue.Empty:
            # a late answer would desynchronize the protocol, so the process goes
            self.proc.kill()
            raise ModelProtocolError(
                f"external model {self.argv[0]!r} did not answer within {self.timeout} s") from None
        if line is None:
            raise ModelProtocolError(
                f"external model {self.argv[0]!r} exited (code {self.proc.poll()}) before answering")
        text = line.strip()
        parts = text.split()
        if len(parts) != 1:
            raise _BadAnswer(f"malformed line from external model: {line.rstrip()!r}")
        try:
            value = float(parts[0])
        except ValueError:
            raise _BadAnswer(f"malformed line from external model: {line.rstrip()!r}") from None
        if not np.isfinite(value):
            raise _BadAnswer(f"non-finite value from external model: {line.rstrip()!r}")
        return value

    def close(self):
        if self.proc.poll() is None:
            try:
                self.proc.stdin.close()
            except OSError:
                pass
            try:
                self.proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self.proc.kill()
                self.proc.wait()


class ExternalModel(ModelHandle):
    """Black-box model run as one or more child processes.

    Parameters
    ----------
    command : str or list of str
        Command line; a string is split with shell rules.
    dimension : int
    timeout : float
        Seconds to wait for each answer.
    restarts : int
        How many times a dead or stuck process may be restarted (the failing
        evaluation is retried once per restart).
    width : int
        Number of independent processes.  A batch is split into ``width``
        contiguous chunks, one per process.
    """

    def __init__(self, command, dimension, timeout=30.0, restarts=0, width=1):
        super().__init__(dimension)
        self.argv = shlex.split(command) if isinstance(command, str) else list(command)
        if not self.argv:
            raise DomainError("empty external model command")
        self.timeout = float(timeout)
        self.restarts = int(restarts)
        self.width = max(1, int(width))
        self._workers = [None] * self.width
        self._restarts_used = [0] * self.width
        self._started = False

    def start(self):
        """Spawn the processes and run the handshake evaluation at the origin."""
        if self._started:
            return
        for k in range(self.width):
            self._workers[k] = _Worker(self.argv, self.timeout)
        self._started = True
        origin = np.zeros(self.dimension)
        for k in range(self.width):
            self._ask(k, origin)
        self._count(self.width)

    def _ask(self, k, point):
        while True:
            try:
                return self._workers[k].ask(point)
            except ModelProtocolError as exc:
                if isinstance(exc, _BadAnswer) or self._restarts_used[k] >= self.restarts:
                    raise
                self._restarts_used[k] += 1
                log.warning("restarting external model process %d: %s", k, exc)
                self._workers[k].proc.kill()
                self._workers[k] = _Worker(self.argv, self.timeout)

    def evaluate(self, points):
        x = self._check(points)
        self.start()
        chunks = np.array_split(np.arange(len(x)), self.width)
        out = np.empty(len(x))

        def run(k):
            for i in chunks[k]:
                out[i] = self._ask(k, x[i])

        if self.width == 1:
            run(0)
        else:
            with ThreadPoolExecutor(self.width) as pool:
                list(pool.map(run, range(self.width)))
        self._count(len(x))
        return out

    def close(self):
        for w in self._workers:
            if w is not None:
                w.close()
        self._workers = [None] * self.width
        self._started = False
