import threading

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from parfft.core_math import bit_reverse_order
from parfft.errors import CorruptMessageError, InvalidInputError, InvalidTopologyError, RunError
from parfft.fft_seq import dft_oracle, fft
from parfft.parallel_engine import (
    PackedMessage,
    QueueTransport,
    local_branch_fft,
    pack_message,
    parallel_fft,
    plan_topology,
    run_parallel,
    unpack_message,
)

from conftest import random_complex


class TestTopology:
    def test_eight_on_four(self):
        t = plan_topology(8, 4)
        p = t.plans[0]
        assert (p.N, p.m, p.m1, p.nproc) == (8, 3, 1, 4)
        rounds = t.schedule.rounds
        assert [r.nproc_sup for r in rounds] == [2, 1]
        assert [r.level for r in rounds] == [2, 3]
        assert rounds[0].transfers == ((2, 0), (3, 1))
        assert rounds[1].transfers == ((1, 0),)

    def test_branch_assignment_matches_tree(self):
        t = plan_topology(8, 4)
        leaves = {p.idproc: p.leaf_indices for p in t.plans}
        assert leaves == {0: (0, 4), 2: (2, 6), 1: (1, 5), 3: (3, 7)}

    def test_single_worker(self):
        t = plan_topology(8, 1)
        assert t.plans[0].m1 == 3
        assert t.schedule.rounds == ()
        assert t.plans[0].leaf_indices == (0, 4, 2, 6, 1, 5, 3, 7)

    def test_sixteen_on_two(self):
        t = plan_topology(16, 2)
        assert (t.plans[0].m, t.plans[0].m1) == (4, 3)
        assert [r.transfers for r in t.schedule.rounds] == [((1, 0),)]

    @pytest.mark.parametrize("N", [1, 2, 8, 64, 256])
    def test_leaves_partition_and_are_contiguous_tree_blocks(self, N):
        rev = bit_reverse_order(N)
        for nproc in [2**k for k in range(N.bit_length())]:
            t = plan_topology(N, nproc)
            all_leaves = sorted(i for p in t.plans for i in p.leaf_indices)
            assert all_leaves == list(range(N))
            width = N // nproc
            for p in t.plans:
                assert len(p.leaf_indices) == width
                # the block sits where branch P_idproc appears in the tree's left-to-right layout
                pos = int(np.flatnonzero(rev[::width] == p.idproc)[0]) if nproc > 1 else 0
                assert p.leaf_indices == tuple(rev[pos * width : (pos + 1) * width])

    @pytest.mark.parametrize("N,nproc", [(8, 16), (6, 2), (8, 3), (0, 1)])
    def test_invalid(self, N, nproc):
        with pytest.raises(InvalidTopologyError):
            plan_topology(N, nproc)

    @pytest.mark.parametrize("nproc", [2, 4, 8, 16, 32])
    def test_schedule_halves(self, nproc):
        rounds = plan_topology(64, nproc).schedule.rounds
        sups = [r.nproc_sup for r in rounds]
        assert sups[0] == nproc // 2 and sups[-1] == 1
        assert all(a == 2 * b for a, b in zip(sups, sups[1:]))
        for r in rounds:
            assert sorted(dst for _, dst in r.transfers) == list(range(r.nproc_sup))
            assert all(src - dst == r.nproc_sup for src, dst in r.transfers)


class TestLocalBranch:
    def test_impulse_master_branch(self):
        plan = plan_topology(8, 4).plans[0]
        x = np.zeros(8)
        x[0] = 1
        np.testing.assert_array_equal(local_branch_fft(plan, x), [1, 1])

    def test_single_leaf_branches(self, rng):
        x = random_complex(rng, 8)
        for plan in plan_topology(8, 8).plans:
            np.testing.assert_array_equal(local_branch_fft(plan, x), [x[plan.idproc]])

    def test_branch_is_subsequence_transform(self, rng):
        x = random_complex(rng, 16)
        for plan in plan_topology(16, 4).plans:
            expected = 4 * dft_oracle(x[plan.idproc :: 4])
            assert np.max(np.abs(local_branch_fft(plan, x) - expected)) <= 1e-12

    def test_length_mismatch(self):
        with pytest.raises(InvalidInputError):
            local_branch_fft(plan_topology(8, 2).plans[0], np.ones(4))


class TestPacking:
    def test_column_convention(self):
        msg = pack_message([1 + 2j])
        assert msg.rows == 1
        assert msg.col_re.tolist() == [1.0] and msg.col_im.tolist() == [2.0]
        assert msg.as_matrix().tolist() == [[1.0, 2.0]]

    def test_zero_columns(self):
        msg = pack_message([0, 0])
        assert msg.rows == 2
        assert msg.col_re.tolist() == [0, 0] and msg.col_im.tolist() == [0, 0]

    def test_unpack_column_convention(self):
        assert unpack_message(PackedMessage(1, np.array([1.0]), np.array([2.0]))).tolist() == [1 + 2j]

    def test_unpack_zero(self):
        assert unpack_message(PackedMessage(2, np.zeros(2), np.zeros(2))).tolist() == [0, 0]

    def test_round_trip_bit_identical(self, rng):
        z = random_complex(rng, 64)
        back = unpack_message(pack_message(z))
        assert back.tobytes() == z.tobytes()

    def test_round_trip_special_values(self):
        z = np.array([-0.0 + 5e-324j, 1e308 - 1e-308j])
        assert unpack_message(pack_message(z)).tobytes() == z.tobytes()

    def test_empty(self):
        with pytest.raises(InvalidInputError):
            pack_message([])

    @pytest.mark.parametrize("re,im,rows", [([1.0, 2.0], [1.0], 2), ([1.0], [1.0], 2)])
    def test_corrupt(self, re, im, rows):
        with pytest.raises(CorruptMessageError):
            unpack_message(PackedMessage(rows, np.array(re), np.array(im)))


class TestParallelFFT:
    def test_constant(self):
        out = parallel_fft(np.ones(8), 4)
        np.testing.assert_allclose(out, [1, 0, 0, 0, 0, 0, 0, 0], atol=1e-15)

    def test_impulse(self):
        x = np.zeros(8)
        x[0] = 1
        np.testing.assert_allclose(parallel_fft(x, 4), [0.125] * 8, atol=1e-15)

    def test_matches_sequential(self, rng):
        x = random_complex(rng, 64)
        ref = fft(x)
        for nproc in (1, 2, 4, 8):
            assert np.max(np.abs(parallel_fft(x, nproc) - ref)) <= 1e-12

    def test_worker_count_invariance_bitwise(self, rng):
        x = random_complex(rng, 128)
        outs = [parallel_fft(x, 2**k).tobytes() for k in range(8)]
        assert len(set(outs)) == 1
        assert outs[0] == fft(x).tobytes()

    def test_repeatable(self, rng):
        x = random_complex(rng, 256)
        first = parallel_fft(x, 8).tobytes()
        assert all(parallel_fft(x, 8).tobytes() == first for _ in range(10))

    @pytest.mark.parametrize("nproc", [1, 2, 4, 8, 16])
    def test_message_count(self, rng, nproc):
        run = run_parallel(random_complex(rng, 64), nproc)
        assert run.messages == nproc - 1

    def test_narrated_transfers(self):
        run = run_parallel(np.ones(8), 4)
        assert sorted((s, d) for s, d, _ in run.transport_log) == [(1, 0), (2, 0), (3, 1)]
        # (1, 0) is the last round, so it must come after both first-round sends reached worker 1/0
        order = [(s, d) for s, d, _ in run.transport_log]
        assert order.index((1, 0)) > order.index((3, 1))

    @pytest.mark.parametrize("nproc", [2, 4, 8, 16])
    def test_idle_workers_send_once_and_then_stop(self, rng, nproc):
        run = run_parallel(random_complex(rng, 64), nproc)
        senders = [s for s, _, _ in run.transport_log]
        assert sorted(senders) == list(range(1, nproc))
        receivers_after = {}
        for i, (s, d, _) in enumerate(run.transport_log):
            receivers_after.setdefault(s, i)
        # nobody sends to a worker that has already sent its branch away
        for i, (s, d, _) in enumerate(run.transport_log):
            assert receivers_after.get(d, len(run.transport_log)) > i

    def test_message_sizes_grow_per_round(self):
        run = run_parallel(np.ones(64), 8)
        sizes = {(s, d): rows for s, d, rows in run.transport_log}
        assert sizes[(4, 0)] == 8 and sizes[(2, 0)] == 16 and sizes[(1, 0)] == 32

    def test_batched_axis0(self, rng):
        g = random_complex(rng, 16, 5)
        np.testing.assert_array_equal(parallel_fft(g, 4, axis=0), fft(g, axis=0))

    def test_too_many_workers(self):
        with pytest.raises(InvalidTopologyError):
            parallel_fft(np.ones(4), 8)

    def test_worker_failure_is_run_error(self, rng):
        class FlakyTransport(QueueTransport):
            def send(self, src, dst, msg):
                if src == 3:
                    raise OSError("link down")
                super().send(src, dst, msg)

        with pytest.raises(RunError, match="link down"):
            run_parallel(random_complex(rng, 32), 4, transport=FlakyTransport())

    def test_corrupt_wire_message_is_run_error(self, rng):
        class Mangler(QueueTransport):
            def send(self, src, dst, msg):
                super().send(src, dst, PackedMessage(msg.rows, msg.col_re, msg.col_im[:-1]))

        with pytest.raises(RunError):
            run_parallel(random_complex(rng, 16), 2, transport=Mangler())

    def test_concurrent_callers(self, rng):
        xs = [random_complex(rng, 128) for _ in range(6)]
        refs = [fft(x).tobytes() for x in xs]
        got = [None] * len(xs)

        def go(i):
            got[i] = parallel_fft(xs[i], 2 ** (i % 4)).tobytes()

        threads = [threading.Thread(target=go, args=(i,)) for i in range(len(xs))]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert got == refs

    def test_random_interleaving(self, rng):
        import random
        import time

        class Jitter(QueueTransport):
            def __init__(self, seed):
                super().__init__()
                self._rand = random.Random(seed)

            def send(self, src, dst, msg):
                time.sleep(self._rand.random() * 0.002)
                super().send(src, dst, msg)

        x = random_complex(rng, 64)
        ref = fft(x).tobytes()
        for seed in range(5):
            assert run_parallel(x, 8, transport=Jitter(seed)).coeffs.tobytes() == ref


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 8), st.data())
def test_invariance_property(m, data):
    l = data.draw(st.integers(0, m))
    seed = data.draw(st.integers(0, 2**32 - 1))
    r = np.random.default_rng(seed)
    x = r.standard_normal(2**m) + 1j * r.standard_normal(2**m)
    assert parallel_fft(x, 2**l).tobytes() == fft(x).tobytes()
