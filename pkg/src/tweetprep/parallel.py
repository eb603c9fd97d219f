"""Barrier-synchronized worker pool for stage-3 dedup.

A master thread hands out the items of one wave to a fixed set of worker
slots, pre-marks the slots it has nothing for, and waits on a barrier until
every slot reports completion. Only then does it apply the results and start
the next wave.

Two backends share the wave plan and the barrier:

``thread``
    Workers run :func:`remove_inter_class_duplicates` and
    :func:`remove_class_duplicates` on the shared object list. Exact, simple,
    GIL-bound.
``process``
    Forked workers keep a replica of the label -> vector-set state. Items are
    index-only, results are small deltas (shared vectors, per-label
    removals), and the master broadcasts every delta so replicas stay in
    lockstep. Large data never crosses a process boundary.
"""

from __future__ import annotations

import logging
import multiprocessing
import os
import pickle
import queue
import threading
import time
import traceback
from dataclasses import dataclass, field

from .dedup import (
    ClassObject,
    _check_labels,
    pair_indices,
    remove_class_duplicates,
    remove_inter_class_duplicates,
)
from .errors import BarrierError, DedupWorkerFailure, WaveTimeout

log = logging.getLogger(__name__)

WORKERS_ENV = "TWEETPREP_WORKERS"
DEFAULT_WAVE_TIMEOUT = 600.0


def default_workers() -> int:
    """Twice the physical core count, unless overridden through the environment."""
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    try:
        import psutil

        cores = psutil.cpu_count(logical=False)
    except ImportError:  # pragma: no cover
        cores = None
    return 2 * (cores or os.cpu_count() or 1)


class Barrier:
    """Completion flags, one per worker slot, awaited by a single master.

    ``poll_interval`` switches :meth:`await_all` from condition signaling to a
    sleep-and-check loop over the flags.
    """

    def __init__(self, n_slots: int, ctx=None, poll_interval: float | None = None):
        if n_slots < 1:
            raise ValueError("n_slots must be >= 1")
        self.n_slots = n_slots
        self.poll_interval = poll_interval
        if ctx is None:
            self._cond = threading.Condition()
            self._flags = [False] * n_slots
        else:
            self._cond = ctx.Condition()
            self._flags = ctx.Array("b", n_slots, lock=False)

    @property
    def components(self) -> list[bool]:
        with self._cond:
            return [bool(f) for f in self._flags]

    def mark(self, slot: int):
        with self._cond:
            if self._flags[slot]:
                raise BarrierError(f"slot {slot} marked twice in one wave")
            self._flags[slot] = True
            self._cond.notify_all()

    def _all_set(self):
        return all(self._flags)

    def _reset(self):
        for i in range(self.n_slots):
            self._flags[i] = False

    def await_all(self, timeout: float | None = None, alive=None):
        """Block until every flag is set, then clear them all.

        ``alive`` is an optional callable checked about once a second; if it
        raises, waiting stops with that error.
        """
        deadline = None if timeout is None else time.monotonic() + timeout
        step = self.poll_interval if self.poll_interval is not None else 1.0
        while True:
            with self._cond:
                if self.poll_interval is None:
                    wait = step if deadline is None else min(step, deadline - time.monotonic())
                    self._cond.wait_for(self._all_set, timeout=max(wait, 0.0))
                if self._all_set():
                    self._reset()
                    return
            if deadline is not None and time.monotonic() >= deadline:
                raise WaveTimeout(f"barrier not complete after {timeout}s: {self.components}")
            if alive is not None:
                alive()
            if self.poll_interval is not None:
                time.sleep(self.poll_interval)


def barrier_await(b: Barrier, timeout: float | None = None):
    b.await_all(timeout)


@dataclass
class RoundPlan:
    n_objects: int
    pair_waves: list[list[tuple[int, int]]]
    middle: int | None
    sweep_waves: list[list[int]]

    @property
    def n_out(self) -> int:
        return sum(len(w) for w in self.pair_waves) + (self.middle is not None)


@dataclass
class WavePlan:
    n_workers: int
    rounds: list[RoundPlan] = field(default_factory=list)

    def waves(self):
        """Yield ``(round, phase, wave_no, items)`` in execution order."""
        for r, rnd in enumerate(self.rounds):
            for w, items in enumerate(rnd.pair_waves):
                yield r, "pair", w, items
            for w, items in enumerate(rnd.sweep_waves):
                yield r, "sweep", w, items

    def tasks(self):
        """Flattened task sequence, comparable with the sequential engine's trace."""
        out = []
        for r, phase, _, items in self.waves():
            for item in items:
                out.append((r, phase, *item) if phase == "pair" else (r, phase, item))
        return out

    def padding(self, items) -> int:
        return self.n_workers - len(items)


def _chunks(seq, size):
    return [seq[i : i + size] for i in range(0, len(seq), size)]


def plan_waves(n_objects: int, n_workers: int) -> WavePlan:
    if n_workers < 1:
        raise ValueError("n_workers must be >= 1")
    plan = WavePlan(n_workers)
    n = n_objects
    while n > 1:
        pairs, middle = pair_indices(n)
        n_out = len(pairs) + (middle is not None)
        sweeps = list(range(n_out)) if n_out > 1 else []
        plan.rounds.append(RoundPlan(n, _chunks(pairs, n_workers), middle, _chunks(sweeps, n_workers)))
        n = n_out
    return plan


@dataclass
class TraceRecord:
    round: int
    phase: str
    wave: int
    item: tuple
    slot: int
    start: float
    end: float

    @property
    def duration(self):
        return self.end - self.start


# -- thread backend ---------------------------------------------------------


class _LockingThread(threading.Thread):
    def __init__(self, slot: int, barrier: Barrier):
        super().__init__(name=f"dedup-worker-{slot}", daemon=True)
        self.slot = slot
        self.barrier = barrier
        self.inbox: queue.Queue = queue.Queue()

    def run(self):
        while True:
            job = self.inbox.get()
            if job is None:
                return
            fn, sink = job
            start = time.perf_counter()
            try:
                sink[self.slot] = ("ok", fn(), start, time.perf_counter())
            except BaseException:
                sink[self.slot] = ("error", traceback.format_exc(), start, time.perf_counter())
            finally:
                self.barrier.mark(self.slot)


def _sweep(b, i):
    temp = b[i]
    for j, other in enumerate(b):
        if i != j:
            temp = remove_class_duplicates(temp, other)
    return temp


def _run_threads(objects, plan, barrier, timeout, on_wave):
    workers = [_LockingThread(s, barrier) for s in range(plan.n_workers)]
    for w in workers:
        w.start()
    try:
        a = list(objects)
        for r, rnd in enumerate(plan.rounds):
            b = [None] * rnd.n_out
            for w_no, items in enumerate(rnd.pair_waves):
                jobs = [(lambda i=i, j=j: remove_inter_class_duplicates(a[i], a[j])) for i, j in items]
                results = _thread_wave(workers, barrier, jobs, timeout)
                on_wave(r, "pair", w_no, items, results)
                for (i, _), (_, res, *_rest) in zip(items, results):
                    b[i] = res
            if rnd.middle is not None:
                b[-1] = a[rnd.middle]
            c = list(b)
            for w_no, items in enumerate(rnd.sweep_waves):
                jobs = [(lambda i=i: _sweep(b, i)) for i in items]
                results = _thread_wave(workers, barrier, jobs, timeout)
                on_wave(r, "sweep", w_no, [(i,) for i in items], results)
                for i, (_, res, *_rest) in zip(items, results):
                    c[i] = res
            a = c
        return a[0]
    finally:
        for w in workers:
            w.inbox.put(None)
        for w in workers:
            w.join(timeout=5)


def _thread_wave(workers, barrier, jobs, timeout):
    sink: dict[int, tuple] = {}
    for slot, fn in enumerate(jobs):
        workers[slot].inbox.put((fn, sink))
    for slot in range(len(jobs), len(workers)):
        barrier.mark(slot)
    barrier.await_all(timeout)
    return [(*sink[s], s) for s in range(len(jobs))]


# -- process backend --------------------------------------------------------


class KeyState:
    """Label -> vector-set replica of a list of class objects.

    Workers compute deltas against it; :meth:`apply` replays a delta so that
    every replica (and the master's copy) evolves identically.
    """

    def __init__(self, objects):
        self.sets = {label: set(p) for obj in objects for label, p in obj.partitions.items()}
        self.objs = [(tuple(obj.partitions), set(obj.duplicates)) for obj in objects]
        self.next = None

    # computations, read-only
    def pair_delta(self, p, i, j):
        la, da = self.objs[i]
        lb, db = self.objs[j]
        cross = set()
        for x in la:
            sx = self.sets[x]
            for y in lb:
                cross |= sx & self.sets[y]
        removals = {}
        for labels, other_dups in ((la, db), (lb, da)):
            for x in labels:
                s = self.sets[x]
                rem = s & cross
                rem |= s & other_dups
                if rem:
                    removals[x] = rem
        return ("pair", p, i, j, cross, removals)

    def sweep_delta(self, i):
        labels, _ = self.objs[i]
        removals = {}
        for x in labels:
            s = self.sets[x]
            rem = set()
            for j, (_, dups) in enumerate(self.objs):
                if j != i:
                    rem |= s & dups
            if rem:
                removals[x] = rem
        return ("sweep", i, removals)

    # mutations
    def apply(self, delta):
        kind = delta[0]
        if kind == "begin":
            self.next = [None] * delta[1]
        elif kind == "pair":
            _, p, i, j, cross, removals = delta
            la, da = self.objs[i]
            lb, db = self.objs[j]
            for x, rem in removals.items():
                self.sets[x] -= rem
            if len(da) < len(db):
                da, db = db, da
            da |= db
            da |= cross
            self.next[p] = (la + lb, da)
        elif kind == "end_pairs":
            if delta[1] is not None:
                self.next[-1] = self.objs[delta[1]]
            self.objs, self.next = self.next, None
        elif kind == "sweep":
            for x, rem in delta[2].items():
                self.sets[x] -= rem
        else:  # pragma: no cover
            raise ValueError(f"unknown delta {kind!r}")


def _process_worker(slot, inbox, outbox, barrier, state):
    if isinstance(state, bytes):
        state = pickle.loads(state)
    while True:
        msg = inbox.get()
        if msg is None:
            return
        blobs, item = msg
        start = time.perf_counter()
        try:
            for blob in blobs:
                state.apply(pickle.loads(blob))
            if item[0] == "pair":
                delta = state.pair_delta(*item[1:])
            else:
                delta = state.sweep_delta(item[1])
            payload = ("ok", pickle.dumps(delta, pickle.HIGHEST_PROTOCOL))
        except BaseException:
            payload = ("error", traceback.format_exc())
        outbox.put((slot, *payload, start, time.perf_counter()))
        barrier.mark(slot)


def _mp_context():
    methods = multiprocessing.get_all_start_methods()
    return multiprocessing.get_context("fork" if "fork" in methods else "spawn")


def _run_processes(objects, plan, poll_interval, timeout, on_wave):
    ctx = _mp_context()
    barrier = Barrier(plan.n_workers, ctx=ctx, poll_interval=poll_interval)
    state = KeyState(objects)
    # forked children inherit the master's replica; spawned ones get a copy
    seed = state if ctx.get_start_method() == "fork" else pickle.dumps(state)
    outbox = ctx.Queue()
    inboxes = [ctx.Queue() for _ in range(plan.n_workers)]
    procs = [
        ctx.Process(target=_process_worker, args=(s, inboxes[s], outbox, barrier, seed), daemon=True)
        for s in range(plan.n_workers)
    ]
    for p in procs:
        p.start()
    pending = [[] for _ in procs]

    def alive():
        dead = [s for s, p in enumerate(procs) if not p.is_alive()]
        if dead:
            raise DedupWorkerFailure(-1, "-", -1, (), f"worker slot(s) {dead} exited")

    def broadcast(delta):
        state.apply(delta)
        blob = pickle.dumps(delta, pickle.HIGHEST_PROTOCOL)
        for lst in pending:
            lst.append(blob)

    try:
        for r, rnd in enumerate(plan.rounds):
            broadcast(("begin", rnd.n_out))
            for w_no, items in enumerate(rnd.pair_waves):
                tasks = [("pair", i, i, j) for i, j in items]
                results = _process_wave(r, "pair", w_no, tasks, inboxes, outbox, barrier, pending, timeout, alive)
                on_wave(r, "pair", w_no, items, results)
                for _, delta, *_rest in results:
                    broadcast(pickle.loads(delta))
            broadcast(("end_pairs", rnd.middle))
            for w_no, items in enumerate(rnd.sweep_waves):
                tasks = [("sweep", i) for i in items]
                results = _process_wave(r, "sweep", w_no, tasks, inboxes, outbox, barrier, pending, timeout, alive)
                on_wave(r, "sweep", w_no, [(i,) for i in items], results)
                for _, delta, *_rest in results:
                    broadcast(pickle.loads(delta))
    finally:
        for q in inboxes:
            q.put(None)
        for p in procs:
            p.join(timeout=5)
            if p.is_alive():
                p.terminate()

    return _assemble(objects, state)


def _process_wave(r, phase, w_no, tasks, inboxes, outbox, barrier, pending, timeout, alive):
    for slot, task in enumerate(tasks):
        inboxes[slot].put((pending[slot], task))
        pending[slot] = []
    for slot in range(len(tasks), len(inboxes)):
        barrier.mark(slot)
    try:
        barrier.await_all(timeout, alive=alive)
    except DedupWorkerFailure as exc:
        raise DedupWorkerFailure(r, phase, w_no, tuple(tasks), exc.detail) from None
    got = {}
    for _ in tasks:
        slot, status, payload, start, end = outbox.get(timeout=timeout)
        got[slot] = (status, payload, start, end, slot)
    return [got[s] for s in range(len(tasks))]


def _assemble(objects, state: KeyState) -> ClassObject:
    (labels, dups), = state.objs
    records = {label: p for obj in objects for label, p in obj.partitions.items()}
    partitions = {}
    for label in labels:
        keep = state.sets[label]
        partitions[label] = {v: rec for v, rec in records[label].items() if v in keep}
    return ClassObject(partitions, frozenset(dups))


# -- entry point ------------------------------------------------------------


def parallel_dedup(
    objects,
    n_workers: int | None = None,
    backend: str = "thread",
    poll_interval: float | None = None,
    timeout: float | None = DEFAULT_WAVE_TIMEOUT,
    trace: list | None = None,
) -> ClassObject:
    """Stage-3 dedup on a worker pool; same result as the sequential engine.

    ``trace`` collects one :class:`TraceRecord` per executed item.
    """
    objects = list(objects)
    if not objects:
        raise ValueError("at least one class object is required")
    _check_labels(objects)
    if len(objects) == 1:
        return objects[0]
    n_workers = n_workers or default_workers()
    plan = plan_waves(len(objects), n_workers)

    def on_wave(r, phase, w_no, items, results):
        for item, (status, payload, start, end, slot) in zip(items, results):
            if status != "ok":
                raise DedupWorkerFailure(r, phase, w_no, item, payload)
            log.debug(
                "round=%d phase=%s wave=%d item=%s slot=%d duration=%.6f",
                r, phase, w_no, item, slot, end - start,
            )
            if trace is not None:
                trace.append(TraceRecord(r, phase, w_no, tuple(item), slot, start, end))

    if backend == "thread":
        barrier = Barrier(n_workers, poll_interval=poll_interval)
        return _run_threads(objects, plan, barrier, timeout, on_wave)
    if backend == "process":
        return _run_processes(objects, plan, poll_interval, timeout, on_wave)
    raise ValueError(f"unknown backend {backend!r}")
