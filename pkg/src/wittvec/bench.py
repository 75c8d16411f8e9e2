"""Verification and timing harness behind the ``wittvec`` command.

:func:`run_verify` checks that the three backends agree and that the ring
axioms hold on a grid of parameter points. :func:`run_bench` times the
backends along one swept parameter and yields CSV rows.
"""

import contextlib
import csv
import dataclasses
import itertools
import random
import signal
import statistics
import threading
import time
import tracemalloc

from . import naive
from .errors import InvalidParameter
from .field import is_prime
from .witt import (Backend, WittContext, random_witt, witt_add, witt_mul, witt_neg, witt_one,
                   witt_op, witt_sub, witt_zero)

OPS = ("add", "sub", "mul")
SWEEP_VARS = ("d", "n", "p", "q", "m")
CSV_COLUMNS = ["sweep_var", "value", "backend", "op", "median_seconds", "trials"]


# --- verification -------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class GridPoint:
    p: int
    d: int
    n: int
    m: int

    def __str__(self):
        return f"p={self.p} d={self.d} n={self.n} m={self.m}"


def make_grid(ps, ds, ns, ms):
    for name, values in (("p", ps), ("d", ds), ("n", ns), ("m", ms)):
        if not values:
            raise InvalidParameter(f"grid has no values for {name}")
    for p in ps:
        if not is_prime(p):
            raise InvalidParameter(f"p={p} is not prime")
    if min(ds) < 1 or min(ns) < 1 or min(ms) < 0:
        raise InvalidParameter("grid needs d >= 1, n >= 1 and m >= 0")
    return [GridPoint(*t) for t in itertools.product(ps, ds, ns, ms)]


@dataclasses.dataclass
class Failure:
    point: GridPoint
    seed: int
    sample: int
    check: str
    detail: str

    def __str__(self):
        return (f"{self.check} failed at {self.point} seed={self.seed} sample={self.sample}: "
                f"{self.detail}")


@dataclasses.dataclass
class VerifyReport:
    passed: int = 0
    failed: int = 0
    failures: list = dataclasses.field(default_factory=list)

    @property
    def ok(self):
        return self.failed == 0

    def summary(self):
        return f"verify: {self.passed} checks passed, {self.failed} failed"


def _sample_seed(seed, point, k):
    return f"{seed}:{point.p}:{point.d}:{point.n}:{point.m}:{k}"


def _axiom_checks(a, b, c):
    """(name, lhs, rhs) for the ring axioms on one triple, Illusie backend."""
    ctx = a.ctx
    zero, one = witt_zero(ctx), witt_one(ctx)
    return [
        ("add-commutative", witt_add(a, b), witt_add(b, a)),
        ("mul-commutative", witt_mul(a, b), witt_mul(b, a)),
        ("add-associative", witt_add(witt_add(a, b), c), witt_add(a, witt_add(b, c))),
        ("mul-associative", witt_mul(witt_mul(a, b), c), witt_mul(a, witt_mul(b, c))),
        ("distributive", witt_mul(a, witt_add(b, c)), witt_add(witt_mul(a, b), witt_mul(a, c))),
        ("add-identity", witt_add(a, zero), a),
        ("mul-identity", witt_mul(a, one), a),
        ("additive-inverse", witt_add(a, witt_neg(a)), zero),
        ("sub-is-add-neg", witt_sub(a, b), witt_add(a, witt_neg(b))),
    ]


def run_verify(grid, samples=3, seed=0, degree=2, bound_kind="total", fault=None, log=None):
    """Backend agreement on add/sub/mul for every backend pair, plus ring axioms.

    ``fault`` is a test hook: a callable applied to every naive-backend result
    before comparison. Returns a :class:`VerifyReport`.
    """
    if not grid:
        raise InvalidParameter("empty verification grid")
    if samples < 1:
        raise InvalidParameter("samples must be >= 1")
    report = VerifyReport()

    def record(ok, point, k, check, detail):
        if ok:
            report.passed += 1
        else:
            report.failed += 1
            failure = Failure(point, seed, k, check, detail)
            report.failures.append(failure)
            if log is not None:
                log(str(failure))

    for point in grid:
        ctx = WittContext(point.p, point.d, point.n, point.m)
        for k in range(samples):
            rng = random.Random(_sample_seed(seed, point, k))
            a, b, c = (random_witt(ctx, degree, bound_kind, rng) for _ in range(3))
            for op in OPS:
                results = {}
                for backend in Backend:
                    r = witt_op(op, a, b, backend)
                    if backend is Backend.NAIVE and fault is not None:
                        r = fault(r)
                    results[backend] = r
                for x, y in itertools.combinations(Backend, 2):
                    same = results[x] == results[y]
                    detail = "" if same else (f"{x.value} gave {results[x]!r}, "
                                              f"{y.value} gave {results[y]!r}")
                    record(same, point, k, f"{op} {x.value}={y.value}", detail)
            for name, lhs, rhs in _axiom_checks(a, b, c):
                record(lhs == rhs, point, k, name, "" if lhs == rhs else f"{lhs!r} != {rhs!r}")
    return report


def flip_one_coefficient(w):
    """Fault-injection hook: add 1 to the constant coefficient of coordinate 0."""
    ctx = w.ctx
    coords = list(w.coords)
    coords[0] = coords[0] + 1
    return ctx.vector(coords)


# --- benchmarking -----------------------------------------------------------------


@dataclasses.dataclass
class BenchSpec:
    sweep: str
    values: list
    p: int = 3
    d: int = 1
    n: int = 2
    m: int = 1
    degree: int = 2
    bound_kind: str = "per-var"
    ops: tuple = ("add", "mul")
    backends: tuple = tuple(Backend)
    trials: int = 5
    seed: int = 0
    timeout: float = 60.0
    memory: bool = False

    def validate(self):
        if self.sweep not in SWEEP_VARS:
            raise InvalidParameter(f"sweep variable must be one of {', '.join(SWEEP_VARS)}")
        if not self.values:
            raise InvalidParameter("sweep value list is empty")
        if self.trials < 1:
            raise InvalidParameter("trials must be >= 1")
        if self.timeout <= 0:
            raise InvalidParameter("timeout must be positive")
        for op in self.ops:
            if op not in OPS:
                raise InvalidParameter(f"unknown operation {op!r}")
        if not self.ops or not self.backends:
            raise InvalidParameter("need at least one operation and one backend")
        for v in self.values:
            self.point(v)

    def point(self, value):
        """(context, degree bound) at one sweep value."""
        p, d, n, m, deg = self.p, self.d, self.n, self.m, self.degree
        if self.sweep == "d":
            deg = value
        elif self.sweep == "n":
            n = value
        elif self.sweep == "p":
            p = value
        elif self.sweep == "m":
            m = value
        else:
            p, d = prime_power(value)
        if deg < 0:
            raise InvalidParameter(f"degree bound must be >= 0, got {deg}")
        return WittContext(p, d, n, m), deg


def prime_power(q):
    """(p, k) with q = p^k, p prime."""
    if q < 2:
        raise InvalidParameter(f"q={q} is not a prime power")
    p = next(k for k in range(2, q + 1) if q % k == 0)
    rest, k = q, 0
    while rest % p == 0:
        rest //= p
        k += 1
    if rest != 1:
        raise InvalidParameter(f"q={q} is not a prime power")
    return p, k


class Timeout(Exception):
    pass


@contextlib.contextmanager
def _deadline(seconds):
    """Raise :class:`Timeout` in the main thread once ``seconds`` have elapsed."""
    usable = hasattr(signal, "setitimer") and threading.current_thread() is threading.main_thread()
    if not usable:
        yield
        return

    def handler(signum, frame):
        raise Timeout()

    old = signal.signal(signal.SIGALRM, handler)
    signal.setitimer(signal.ITIMER_REAL, seconds)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, old)


def _measure(spec, ctx, a, b, backend, op):
    """Return (median seconds, peak bytes or None); raises Timeout."""
    budget = spec.timeout
    start = time.perf_counter()
    with _deadline(budget):
        if backend is Backend.NAIVE:
            naive.build_table(ctx.p, ctx.n)
        # untimed warm-up
        witt_op(op, a, b, backend)
        times = []
        for _ in range(spec.trials):
            t0 = time.perf_counter()
            witt_op(op, a, b, backend)
            times.append(time.perf_counter() - t0)
        peak = None
        if spec.memory:
            tracemalloc.start()
            try:
                witt_op(op, a, b, backend)
                peak = tracemalloc.get_traced_memory()[1]
            finally:
                tracemalloc.stop()
    if time.perf_counter() - start > budget:
        raise Timeout()
    return statistics.median(times), peak


def run_bench(spec):
    """Yield one CSV row (a dict) per (value, backend, op), sequentially."""
    spec.validate()
    for value in spec.values:
        ctx, deg = spec.point(value)
        rng = random.Random(f"{spec.seed}:{spec.sweep}:{value}")
        a = random_witt(ctx, deg, spec.bound_kind, rng)
        b = random_witt(ctx, deg, spec.bound_kind, rng)
        for backend in spec.backends:
            for op in spec.ops:
                row = {"sweep_var": spec.sweep, "value": value, "backend": backend.value,
                       "op": op, "trials": spec.trials}
                try:
                    seconds, peak = _measure(spec, ctx, a, b, backend, op)
                    row["median_seconds"] = f"{seconds:.6f}"
                    row["peak_bytes"] = "" if peak is None else peak
                except Timeout:
                    row["median_seconds"] = "timeout"
                    row["peak_bytes"] = ""
                yield row


def write_csv(rows, stream, memory=False):
    columns = CSV_COLUMNS + (["peak_bytes"] if memory else [])
    writer = csv.DictWriter(stream, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
        stream.flush()
