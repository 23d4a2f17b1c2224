"""Two-amplitude engine: step arithmetic, expansion, entropy, runs."""
from __future__ import annotations

import math
import tracemalloc

import numpy as np
import pytest

from groversim.compressed import (
    entropy_compressed,
    expand,
    h_block,
    measure_compressed,
    run_compressed,
    ud_step,
)
from groversim.core import (
    CompressedState,
    DimensionMismatch,
    InvalidMarkedCount,
    OracleMismatch,
    QubitCountOutOfRange,
    compressed_norm,
    half_power,
    make_oracle,
    table_constants,
)
from groversim.dense import (
    build_entanglement,
    build_interference,
    run_dense,
    state_entropy_dense,
)
from groversim import kernels
from groversim.termination import parse_policy, theoretical_iterations
from conftest import sine_amplitudes


class TestHBlock:
    def test_two_qubits(self):
        s = h_block(2, 1)
        assert s.vx == s.va == table_constants(2).hc
        assert s.vx == pytest.approx(0.35355, abs=5e-6)
        assert s.vi == 0

    def test_one_qubit(self):
        assert h_block(1, 1).vx == 0.5

    def test_thousand_qubits(self):
        s = h_block(1000, 1)
        assert s.vx == half_power(1001)
        assert 0.0 < s.vx < 1e-150
        assert math.isfinite(s.vx)

    def test_errors(self):
        with pytest.raises(InvalidMarkedCount):
            h_block(2, 4)
        with pytest.raises(QubitCountOutOfRange):
            h_block(0, 1)
        with pytest.raises(QubitCountOutOfRange):
            h_block(2041, 1)


class TestUdStep:
    def test_two_qubit_step_is_exact(self):
        s = ud_step(h_block(2, 1), table_constants(2))
        assert s.vx == 2 * table_constants(2).hc
        assert s.va == 0.0
        assert s.vi == 1
        assert 2 * s.vx * s.vx == pytest.approx(1.0, abs=1e-12)

    def test_five_qubit_optimum(self):
        s = h_block(5, 1)
        consts = table_constants(5)
        for _ in range(4):
            s = ud_step(s, consts)
        assert 2 * s.vx * s.vx == pytest.approx(0.999182315543294, abs=1e-12)
        assert s.vi == 4

    @pytest.mark.parametrize("n,m", [(2, 1), (3, 2), (5, 1), (6, 3), (8, 2)])
    def test_norm_preserved(self, n, m):
        s = h_block(n, m)
        consts = table_constants(n)
        for _ in range(3 * max(1, theoretical_iterations(n, m))):
            s = ud_step(s, consts)
            assert compressed_norm(s) == pytest.approx(1.0, abs=1e-12)

    def test_conjugate_to_dense_step(self):
        # expanding, applying the dense oracle+diffusion, and re-reading
        # must equal stepping in the compressed picture
        rng = np.random.default_rng(11)
        for n in range(1, 9):
            size = 1 << n
            for m in sorted({1, 2, 3, size // 2, size - 1} - {0, size}):
                if m >= size:
                    continue
                oracle = make_oracle(n, rng.choice(size, size=m, replace=False).tolist())
                step = build_interference(n).entries @ build_entanglement(oracle).entries
                s = h_block(n, m)
                consts = table_constants(n)
                for _ in range(4):
                    via_dense = step @ expand(s, oracle).amps
                    s = ud_step(s, consts)
                    assert np.max(np.abs(expand(s, oracle).amps - via_dense)) <= 1e-12

    def test_matches_closed_form(self):
        s = h_block(7, 2)
        consts = table_constants(7)
        for k in range(1, 20):
            s = ud_step(s, consts)
            vx, va = sine_amplitudes(7, 2, k)
            assert s.vx == pytest.approx(vx, abs=1e-12)
            assert s.va == pytest.approx(va, abs=1e-12)

    def test_consts_must_match(self):
        with pytest.raises(DimensionMismatch):
            ud_step(h_block(3, 1), table_constants(4))


class TestExpand:
    def test_uniform_pattern(self):
        oracle = make_oracle(2, [1])
        amps = expand(h_block(2, 1), oracle).amps
        hc = table_constants(2).hc
        assert np.all(amps[1::2] == hc)
        assert np.all(amps[0::2] == -hc)

    def test_after_one_step_concentrated(self):
        oracle = make_oracle(2, [1])
        s = ud_step(h_block(2, 1), table_constants(2))
        amps = expand(s, oracle).amps
        assert amps[3] == pytest.approx(0.70711, abs=5e-6)
        assert amps[2] == -amps[3]
        assert np.all(amps[[0, 1, 4, 5, 6, 7]] == amps[1])
        assert abs(amps[1]) < 1e-15

    def test_round_trip_bit_for_bit(self):
        oracle = make_oracle(6, [3, 17, 40])
        s = h_block(6, 3)
        consts = table_constants(6)
        for _ in range(5):
            s = ud_step(s, consts)
            amps = expand(s, oracle).amps
            assert amps[2 * 3 + 1] == s.vx
            assert amps[2 * 0 + 1] == s.va
            assert amps[2 * 3] == -s.vx

    def test_oracle_mismatch(self):
        with pytest.raises(OracleMismatch):
            expand(h_block(3, 1), make_oracle(3, [1, 2]))
        with pytest.raises(OracleMismatch):
            expand(h_block(3, 1), make_oracle(4, [1]))


class TestEntropyCompressed:
    @pytest.mark.parametrize("n,m", [(1, 1), (2, 1), (2, 3), (5, 1), (9, 3), (60, 2)])
    def test_uniform_is_full_register_entropy(self, n, m):
        assert entropy_compressed(h_block(n, m)) == pytest.approx(n + 1, abs=1e-10)

    def test_one_bit_after_full_amplification(self):
        s = ud_step(h_block(2, 1), table_constants(2))
        assert entropy_compressed(s) == pytest.approx(1.0, abs=1e-12)

    def test_matches_dense_entropy(self):
        rng = np.random.default_rng(3)
        for n in (3, 5, 7):
            size = 1 << n
            m = int(rng.integers(1, 4))
            oracle = make_oracle(n, rng.choice(size, size=m, replace=False).tolist())
            s = h_block(n, m)
            consts = table_constants(n)
            for _ in range(6):
                s = ud_step(s, consts)
                dense_h = state_entropy_dense(expand(s, oracle))
                assert entropy_compressed(s) == pytest.approx(dense_h, abs=1e-10)

    def test_five_qubit_minimum_at_four(self):
        s = h_block(5, 1)
        consts = table_constants(5)
        ents = [entropy_compressed(s)]
        for _ in range(8):
            s = ud_step(s, consts)
            ents.append(entropy_compressed(s))
        assert ents[0] == pytest.approx(6.0, abs=1e-12)
        assert min(range(9), key=lambda i: ents[i]) == 4
        assert all(e > ents[4] for e in ents[5:])

    def test_thousand_qubit_entropy_finite(self):
        assert entropy_compressed(h_block(1000, 1)) == pytest.approx(1001, abs=1e-6)


class TestMeasure:
    def test_success_after_full_amplification(self):
        out = measure_compressed(CompressedState(n=2, m=1, vx=0.7071067811865476, va=0.0, vi=1))
        assert out.success
        assert out.p_success == pytest.approx(1.0, abs=1e-12)
        assert out.iterations == 1

    def test_tie_is_failure(self):
        out = measure_compressed(h_block(4, 1))
        assert not out.success

    def test_five_qubit_optimum(self):
        s = h_block(5, 1)
        consts = table_constants(5)
        for _ in range(4):
            s = ud_step(s, consts)
        out = measure_compressed(s)
        assert out.success
        assert out.p_success == pytest.approx(0.999, abs=1e-3)


class TestRunCompressed:
    def test_published_iteration_counts(self):
        for n, want in [(32, 51471), (40, 823549)]:
            outcome, _ = run_compressed(
                make_oracle(n, [123]), parse_policy("m2"), trace_stride=None
            )
            assert outcome.iterations == want

    def test_matches_dense_outcome(self):
        oracle = make_oracle(2, [1])
        ours, _ = run_compressed(oracle, parse_policy("m1:max=1"))
        dense_out, _ = run_dense(oracle, parse_policy("m1:max=1"))
        assert ours.iterations == dense_out.iterations
        assert ours.success == dense_out.success
        assert ours.p_success == pytest.approx(dense_out.p_success, abs=1e-12)

    def test_traced_and_untraced_m2_agree(self):
        oracle = make_oracle(9, [100])
        traced, rows = run_compressed(oracle, parse_policy("m2"), trace_stride=1)
        plain, _ = run_compressed(oracle, parse_policy("m2"), trace_stride=None)
        assert traced == plain
        # one extra live step past the optimum to detect the turnover
        assert rows[-1].iter == traced.iterations + 1

    def test_m1_chunked_rows_match_generic_loop(self):
        oracle = make_oracle(6, [9])
        _, rows_k = run_compressed(oracle, parse_policy("m1:max=13"), trace_stride=5)
        # reference rows from single steps
        s = h_block(6, 1)
        consts = table_constants(6)
        expected = {0: s}
        for k in range(1, 14):
            s = ud_step(s, consts)
            expected[k] = s
        assert [r.iter for r in rows_k] == [0, 5, 10, 13]
        for row in rows_k:
            assert row.vx == expected[row.iter].vx
            assert row.va == expected[row.iter].va

    def test_two_category_theorem_in_dense_states(self):
        # at every iteration the dense engine's state shows at most two
        # distinct odd-component values, exactly mirrored by the evens
        oracle = make_oracle(5, [4, 20])
        uf = build_entanglement(oracle).entries
        intf = build_interference(5).entries
        amps = np.where(np.arange(64) & 1, -table_constants(5).hc, table_constants(5).hc)
        marked = set(oracle.marked)
        for _ in range(10):
            amps = intf @ (uf @ amps)
            odd = amps[1::2]
            marked_vals = {odd[x] for x in range(32) if x in marked}
            unmarked_vals = {odd[x] for x in range(32) if x not in marked}
            assert len(marked_vals) == 1
            assert len(unmarked_vals) == 1
            assert np.array_equal(amps[0::2], -odd)

    def test_amplitude_unimodal_until_turnover(self):
        for n, m in [(5, 1), (7, 2), (8, 3), (10, 1)]:
            oracle = make_oracle(n, list(range(m)))
            outcome, rows = run_compressed(oracle, parse_policy("m2"), trace_stride=1)
            mags = [abs(r.vx) for r in rows]
            peak = outcome.iterations
            for k in range(peak):
                assert mags[k] < mags[k + 1]
            assert mags[peak + 1] <= mags[peak]

    def test_constant_memory(self):
        oracle = make_oracle(64, [7])
        policy = parse_policy("m1:max=200000")
        run_compressed(oracle, policy, trace_stride=None)  # warm up
        tracemalloc.start()
        before = tracemalloc.take_snapshot()
        run_compressed(oracle, policy, trace_stride=None)
        after = tracemalloc.take_snapshot()
        tracemalloc.stop()
        growth = sum(d.size_diff for d in after.compare_to(before, "filename"))
        assert growth < (1 << 16)

    def test_norm_drift_bounded(self):
        vx = va = half_power(65)
        vx, va = kernels.ud_steps(64, 1, vx, va, 100_000)
        s = CompressedState(n=64, m=1, vx=vx, va=va, vi=100_000)
        assert abs(compressed_norm(s) - 1.0) <= 1e-11

    def test_trace_stride_validation(self):
        with pytest.raises(Exception):
            run_compressed(make_oracle(3, [1]), parse_policy("m2"), trace_stride=0)
