import io
import math

import pytest

from qafactor.anneal import (
    GEOMETRIC,
    LINEAR,
    RunSummary,
    Schedule,
    anneal_shot,
    format_counts_table,
    metropolis_accept,
    rekey_histogram,
    run_shots,
    write_shot_csv,
)
from qafactor.gates import nor_gate
from qafactor.ising import IsingModel, brute_force_ground, clamp_fold, energy
from qafactor.seeds import shot_seed, splitmix64

NOR = nor_gate().model


class TestSchedule:
    def test_geometric_endpoints(self):
        temps = Schedule(GEOMETRIC, 3.0, 0.05, 100).temperatures()
        assert temps[0] == pytest.approx(3.0)
        assert temps[-1] == pytest.approx(0.05)
        assert all(t1 > t2 for t1, t2 in zip(temps, temps[1:]))

    def test_linear_endpoints(self):
        temps = Schedule(LINEAR, 2.0, 1.0, 5).temperatures()
        assert temps == pytest.approx([2.0, 1.75, 1.5, 1.25, 1.0])

    def test_single_sweep(self):
        assert Schedule(GEOMETRIC, 3.0, 0.05, 1).temperatures() == [0.05]

    def test_validation(self):
        with pytest.raises(ValueError):
            Schedule("cosine", 3.0, 0.05, 10)
        with pytest.raises(ValueError):
            Schedule(GEOMETRIC, 0.04, 0.05, 10)
        with pytest.raises(ValueError):
            Schedule(GEOMETRIC, 3.0, 0.0, 10)
        with pytest.raises(ValueError):
            Schedule(GEOMETRIC, 3.0, 0.05, 0)


class TestMetropolisAccept:
    def test_downhill_always_accepted(self):
        assert metropolis_accept(-0.5, 0.01, 0.999999)
        assert metropolis_accept(0.0, 0.01, 0.999999)

    @pytest.mark.parametrize("delta_e,temperature", [(1.0, 1.0), (2.0, 1.0), (0.5, 2.0)])
    def test_uphill_threshold_is_boltzmann(self, delta_e, temperature):
        p = math.exp(-delta_e / temperature)
        assert metropolis_accept(delta_e, temperature, p - 1e-12)
        assert not metropolis_accept(delta_e, temperature, p + 1e-12)


class TestAnnealShot:
    def test_single_spin_finds_minimum(self):
        model = IsingModel(1, (1.0,), {})
        for seed in range(5):
            result = anneal_shot(model, Schedule(), seed)
            assert result.state == (-1,)
            assert result.energy == -1.0

    def test_nor_always_reaches_valid_set(self):
        valid = set(brute_force_ground(NOR).states)
        schedule = Schedule(GEOMETRIC, 3.0, 0.05, 2000)
        for k in range(100):
            result = anneal_shot(NOR, schedule, shot_seed(7, k), index=k)
            assert result.energy == -1.5
            assert result.state in valid

    def test_clamped_nor_unique_ground(self):
        reduced, _ = clamp_fold(NOR, {2: 1})
        for k in range(20):
            result = anneal_shot(reduced, Schedule(), shot_seed(3, k))
            assert result.state == (-1, -1)

    def test_energy_field_is_exact(self):
        result = anneal_shot(NOR, Schedule(sweeps=50), seed=11)
        assert result.energy == energy(NOR, result.state)

    def test_empty_model_rejected(self):
        with pytest.raises(ValueError):
            anneal_shot(IsingModel(0, (), {}), Schedule(), 1)


class TestRunShots:
    def test_repeat_runs_byte_identical(self):
        a = run_shots(NOR, Schedule(), 50, master_seed=42, reference_e0=-1.5)
        b = run_shots(NOR, Schedule(), 50, master_seed=42, reference_e0=-1.5)
        assert a.to_text() == b.to_text()

    def test_worker_count_independence(self):
        kwargs = dict(n_shots=40, master_seed=9, reference_e0=-1.5)
        serial = run_shots(NOR, Schedule(sweeps=200), **kwargs)
        four = run_shots(NOR, Schedule(sweeps=200), workers=4, **kwargs)
        assert serial.to_text() == four.to_text()

    def test_inverse_nor_histogram_support(self):
        reduced, _ = clamp_fold(NOR, {2: 0})
        summary = run_shots(reduced, Schedule(), 200, master_seed=5,
                            reference_e0=brute_force_ground(reduced).e0)
        assert summary.ground_hits == 200
        assert set(summary.histogram) == {"01", "10", "11"}

    def test_never_below_ground(self):
        e0 = brute_force_ground(NOR).e0
        for sweeps in (20, 200):
            summary = run_shots(NOR, Schedule(sweeps=sweeps), 100, master_seed=13,
                                reference_e0=e0)
            assert summary.best_energy >= e0

    def test_more_sweeps_do_not_hurt_hit_rate(self):
        e0 = brute_force_ground(NOR).e0
        quick = run_shots(NOR, Schedule(sweeps=20), 200, master_seed=21, reference_e0=e0)
        slow = run_shots(NOR, Schedule(sweeps=2000), 200, master_seed=21, reference_e0=e0)
        assert slow.ground_hits >= quick.ground_hits

    def test_histogram_counts_sum_to_shots(self):
        summary = run_shots(NOR, Schedule(sweeps=50), 37, master_seed=2)
        assert sum(summary.histogram.values()) == 37
        assert summary.ground_hits is None
        assert summary.ground_hit_rate is None

    def test_keep_shots_returns_ordered_results(self):
        summary, shots = run_shots(NOR, Schedule(sweeps=50), 10, master_seed=3,
                                   keep_shots=True)
        assert [r.index for r in shots] == list(range(10))
        assert all(r.seed == shot_seed(3, r.index) for r in shots)
        assert summary.shots == 10

    def test_shot_count_validation(self):
        with pytest.raises(ValueError):
            run_shots(NOR, Schedule(), 0, master_seed=1)


class TestSeeds:
    def test_splitmix_is_64_bit_and_deterministic(self):
        assert splitmix64(0) == splitmix64(0)
        values = {splitmix64(k) for k in range(100)}
        assert len(values) == 100
        assert all(0 <= v < (1 << 64) for v in values)

    def test_shot_seeds_distinct_across_indices_and_masters(self):
        seeds = {shot_seed(m, k) for m in range(10) for k in range(100)}
        assert len(seeds) == 1000

    def test_negative_index_rejected(self):
        with pytest.raises(ValueError):
            shot_seed(1, -1)


class TestReporting:
    def test_summary_text_layout(self):
        summary = RunSummary(3, -1.5, -1.5, 2, {"01": 2, "10": 1})
        text = summary.to_text()
        assert text.splitlines() == [
            "shots 3",
            "best_energy -1.5",
            "reference_e0 -1.5",
            "ground_hits 2",
            "ground_hit_rate 0.6666666666666666",
            "outcomes 2",
            "count 01 2",
            "count 10 1",
        ]

    def test_rekey_histogram_merges(self):
        hist = {"01": 2, "10": 3, "11": 5}
        merged = rekey_histogram(hist, lambda k: "one" if "1" in k else "zero")
        assert merged == {"one": 10}

    def test_counts_table_layout(self):
        text = format_counts_table(
            ["(-1,-1)", "(-1,+1)"], ["clamp0", "clamp1"], [[0, 100], [33, 0]]
        )
        lines = text.splitlines()
        assert len(lines) == 3
        assert lines[0].split() == ["state", "clamp0", "clamp1"]
        assert lines[1].split() == ["(-1,-1)", "0", "100"]

    def test_counts_table_empty(self):
        text = format_counts_table([], ["clamp0"], [])
        assert text.splitlines() == ["state  clamp0"]

    def test_csv_format(self):
        _, shots = run_shots(NOR, Schedule(sweeps=50), 3, master_seed=1,
                             keep_shots=True)
        buf = io.StringIO()
        write_shot_csv(buf, shots, reference_e0=-1.5,
                       decoder=lambda s: (1, 2, 3))
        lines = buf.getvalue().splitlines()
        assert lines[0] == "shot,energy,ground_hit,state_bits,M,N,P"
        assert len(lines) == 4
        first = lines[1].split(",")
        assert first[0] == "0"
        assert first[2] in ("0", "1")
        assert set(first[3]) <= {"0", "1"}
        assert first[4:] == ["1", "2", "3"]
