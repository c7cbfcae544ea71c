"""Message-passing FFT over ``2**l`` workers.

Worker ``k`` owns the samples ``k, k + nproc, k + 2*nproc, ...`` (in
bit-reversed order) and builds the branch polynomial ``P_k`` up to level
``m1 = m - l`` on its own. After that the active set halves every round:
worker ``j + nproc_sup`` ships its coefficients to worker ``j`` packed as two
real columns, and the receiver performs the next butterfly level. Worker 0
(the master) finishes the last level and applies the ``1/N`` scaling.

Workers are threads that only talk through ordered point-to-point channels.
"""

from __future__ import annotations

import logging
import queue
import threading
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .core_math import (
    TwiddleTable,
    bit_reverse_order,
    butterfly_level,
    combine,
    is_power_of_two,
    join_complex,
    log2_exact,
    split_complex,
    twiddle_table,
)
from .errors import CorruptMessageError, InvalidInputError, InvalidTopologyError, RunError
from .fft_seq import as_complex_vector, normalize

__all__ = [
    "WorkerPlan",
    "Round",
    "ReductionSchedule",
    "Topology",
    "PackedMessage",
    "Transport",
    "QueueTransport",
    "ParallelRun",
    "plan_topology",
    "local_branch_fft",
    "pack_message",
    "unpack_message",
    "run_parallel",
    "parallel_fft",
]

log = logging.getLogger(__name__)

MASTER = 0


@dataclass(frozen=True)
class WorkerPlan:
    nproc: int
    idproc: int
    N: int
    m: int
    m1: int
    leaf_indices: tuple[int, ...]


@dataclass(frozen=True)
class Round:
    level: int
    nproc_sup: int
    transfers: tuple[tuple[int, int], ...]  # (sender, receiver)


@dataclass(frozen=True)
class ReductionSchedule:
    rounds: tuple[Round, ...]

    def senders(self) -> list[int]:
        return [s for r in self.rounds for s, _ in r.transfers]


@dataclass(frozen=True)
class Topology:
    plans: tuple[WorkerPlan, ...]
    schedule: ReductionSchedule

    @property
    def nproc(self) -> int:
        return len(self.plans)


def plan_topology(N: int, nproc: int) -> Topology:
    """Lay out ``nproc`` workers over ``N`` samples.

    >>> t = plan_topology(8, 4)
    >>> [p.leaf_indices for p in t.plans]
    [(0, 4), (1, 5), (2, 6), (3, 7)]
    >>> [r.transfers for r in t.schedule.rounds]
    [((2, 0), (3, 1)), ((1, 0),)]
    """
    if not is_power_of_two(N):
        raise InvalidTopologyError(f"data length must be a power of two, got {N!r}")
    if not is_power_of_two(nproc):
        raise InvalidTopologyError(f"worker count must be a power of two, got {nproc!r}")
    if nproc > N:
        raise InvalidTopologyError(f"more workers ({nproc}) than samples ({N})")
    m = log2_exact(N)
    l = log2_exact(nproc)
    m1 = m - l
    branch_order = bit_reverse_order(N // nproc)
    plans = tuple(
        WorkerPlan(
            nproc=nproc,
            idproc=k,
            N=N,
            m=m,
            m1=m1,
            leaf_indices=tuple(int(i) for i in k + nproc * branch_order),
        )
        for k in range(nproc)
    )
    rounds = []
    sup = nproc // 2
    level = m1 + 1
    while sup >= 1:
        rounds.append(Round(level, sup, tuple((j + sup, j) for j in range(sup))))
        sup //= 2
        level += 1
    return Topology(plans, ReductionSchedule(tuple(rounds)))


@dataclass(frozen=True)
class PackedMessage:
    """Coefficients as two real columns: real parts first, imaginary parts second.

    Batched transforms put the coefficient index on the last axis.
    """

    rows: int
    col_re: np.ndarray
    col_im: np.ndarray

    def as_matrix(self) -> np.ndarray:
        """The ``rows x 2`` wire matrix (1-D messages only)."""
        return np.column_stack((self.col_re, self.col_im))


def pack_message(coeffs) -> PackedMessage:
    z = np.asarray(coeffs)
    if z.size == 0:
        raise InvalidInputError("cannot pack an empty coefficient vector")
    re, im = split_complex(z)
    return PackedMessage(re.shape[-1], re, im)


def _pack_pair(re, im) -> PackedMessage:
    return PackedMessage(re.shape[-1], np.array(re, copy=True), np.array(im, copy=True))


def _unpack_pair(msg: PackedMessage):
    re = np.asarray(msg.col_re, dtype=np.float64)
    im = np.asarray(msg.col_im, dtype=np.float64)
    if re.shape != im.shape or re.ndim == 0 or re.shape[-1] != msg.rows:
        raise CorruptMessageError(
            f"column shapes {re.shape} / {im.shape} do not match rows={msg.rows}"
        )
    return re, im


def unpack_message(msg: PackedMessage) -> np.ndarray:
    return join_complex(*_unpack_pair(msg))


class Transport:
    """Ordered, reliable point-to-point delivery between workers.

    ``send`` and ``receive`` block and preserve order per (sender, receiver)
    channel. Subclass to put a different backend behind the engine.
    """

    def send(self, src: int, dst: int, msg: PackedMessage) -> None:
        raise NotImplementedError

    def receive(self, src: int, dst: int) -> PackedMessage:
        raise NotImplementedError

    def abort(self) -> None:
        """Wake every blocked receiver; called when a worker fails."""

    def endpoint(self, idproc: int) -> Endpoint:
        return Endpoint(self, idproc)


class Endpoint:
    """One worker's view of the transport."""

    def __init__(self, transport: Transport, idproc: int):
        self.transport = transport
        self.idproc = idproc

    def send(self, to: int, msg: PackedMessage) -> None:
        self.transport.send(self.idproc, to, msg)

    def receive(self, from_: int) -> PackedMessage:
        return self.transport.receive(from_, self.idproc)


class _Aborted(Exception):
    pass


class QueueTransport(Transport):
    """In-process transport with one FIFO queue per channel."""

    def __init__(self, poll: float = 0.05):
        self._channels: dict[tuple[int, int], queue.Queue] = {}
        self._lock = threading.Lock()
        self._aborted = threading.Event()
        self._poll = poll
        self.log: list[tuple[int, int, int]] = []  # (src, dst, rows), in send order

    def _channel(self, src: int, dst: int) -> queue.Queue:
        with self._lock:
            ch = self._channels.get((src, dst))
            if ch is None:
                ch = self._channels[(src, dst)] = queue.Queue()
            return ch

    def send(self, src, dst, msg):
        with self._lock:
            self.log.append((src, dst, msg.rows))
        self._channel(src, dst).put(msg)

    def receive(self, src, dst):
        ch = self._channel(src, dst)
        while True:
            try:
                return ch.get(timeout=self._poll)
            except queue.Empty:
                if self._aborted.is_set():
                    raise _Aborted from None

    def abort(self):
        self._aborted.set()

    @property
    def message_count(self) -> int:
        return len(self.log)


def _branch(plan: WorkerPlan, re, im, table: TwiddleTable, counts: Counter):
    idx = np.asarray(plan.leaf_indices)
    re = re[..., idx]
    im = im[..., idx]
    size = 2
    for level in range(1, plan.m1 + 1):
        re, im = butterfly_level(re, im, size, table)
        counts[level] += re.shape[-1]
        size *= 2
    return re, im


def local_branch_fft(plan: WorkerPlan, samples) -> np.ndarray:
    """Unnormalized coefficients of this worker's branch polynomial at level ``m1``."""
    z = as_complex_vector(samples, allow_nd=True)
    if z.shape[-1] != plan.N:
        raise InvalidInputError(f"expected {plan.N} samples, got {z.shape[-1]}")
    re, im = split_complex(z)
    re, im = _branch(plan, re, im, twiddle_table(plan.N), Counter())
    return join_complex(re, im)


@dataclass
class ParallelRun:
    """Outcome of one parallel transform."""

    coeffs: np.ndarray
    messages: int
    # per worker: {level: complex products computed at that level}
    mult_counts: list[dict[int, int]] = field(default_factory=list)
    transport_log: list[tuple[int, int, int]] = field(default_factory=list)

    def critical_path_mults(self) -> int:
        """Sum over levels of the busiest worker's product count."""
        levels: dict[int, int] = {}
        for counts in self.mult_counts:
            for level, c in counts.items():
                levels[level] = max(levels.get(level, 0), c)
        return sum(levels.values())


def _worker(plan, schedule, re, im, table, endpoint, counts, result):
    own_re, own_im = _branch(plan, re, im, table, counts)
    me = plan.idproc
    for rnd in schedule.rounds:
        for sender, receiver in rnd.transfers:
            if sender == me:
                endpoint.send(receiver, _pack_pair(own_re, own_im))
                return
            if receiver == me:
                odd_re, odd_im = _unpack_pair(endpoint.receive(sender))
                w_re, w_im = table.stride(2 ** rnd.level)
                own_re, own_im = combine(own_re, own_im, odd_re, odd_im, w_re, w_im)
                counts[rnd.level] += own_re.shape[-1]
                break
    if me == MASTER:
        result.append(normalize(own_re, own_im, plan.N))


def run_parallel(samples, nproc: int, transport: Transport | None = None, axis: int = -1) -> ParallelRun:
    """Run the distributed transform along ``axis`` and report what happened."""
    z = np.moveaxis(as_complex_vector(samples, allow_nd=True), axis, -1)
    topo = plan_topology(z.shape[-1], nproc)
    log.debug("parallel fft: N=%d nproc=%d m1=%d rounds=%d", z.shape[-1], nproc, topo.plans[0].m1, len(topo.schedule.rounds))
    transport = transport if transport is not None else QueueTransport()
    re, im = split_complex(z)
    table = twiddle_table(z.shape[-1])

    counts = [Counter() for _ in range(nproc)]
    errors: list[BaseException] = []
    result: list = []

    def target(plan):
        try:
            _worker(plan, topo.schedule, re, im, table, transport.endpoint(plan.idproc), counts[plan.idproc], result)
        except _Aborted:
            pass
        except BaseException as exc:  # surfaced to the caller below
            errors.append(exc)
            transport.abort()

    threads = [
        threading.Thread(target=target, args=(plan,), name=f"fft-worker-{plan.idproc}", daemon=True)
        for plan in topo.plans
    ]
    for t in threads:
        t.start()
    for t in threads:
        t.join()

    if errors:
        raise RunError(f"worker failed: {errors[0]!r}") from errors[0]
    if not result:
        raise RunError("master produced no result")

    sent = list(getattr(transport, "log", []))
    coeffs = np.moveaxis(join_complex(*result[0]), -1, axis)
    return ParallelRun(
        coeffs=coeffs,
        messages=len(sent) if hasattr(transport, "log") else len(topo.schedule.senders()),
        mult_counts=[dict(c) for c in counts],
        transport_log=sent,
    )


def parallel_fft(samples, nproc: int, axis: int = -1) -> np.ndarray:
    """Normalized FFT computed by ``nproc`` message-passing workers."""
    return run_parallel(samples, nproc, axis=axis).coeffs
