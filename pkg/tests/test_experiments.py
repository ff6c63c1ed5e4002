import math

import numpy as np
import pytest

from dlmnet import oracle
from dlmnet.dlm import Message
from dlmnet.errors import ValidationError
from dlmnet.experiments import (
    BASIS_INPUTS,
    ExperimentConfig,
    FrequencyReport,
    compare,
    default_seed,
    mzi_phases,
    run_beam_splitter,
    run_cnot_circuit,
    run_mzi,
)
from dlmnet.network import build_beam_splitter


def rows(reports, mode, events):
    return [r for r in reports if r.params["mode"] == mode and r.params["events"] == events]


def unit(psi):
    return np.array([math.cos(math.radians(psi)), math.sin(math.radians(psi))])


class TestCompare:
    def test_exact_pass(self):
        assert compare(FrequencyReport((10, 0, 0, 0), (1.0, 0, 0, 0)), 0.01)

    def test_off_by_two_percent_fails(self):
        assert not compare(FrequencyReport((98, 0, 0, 2), (1.0, 0, 0, 0)), 0.01)

    def test_boundary_inclusive(self):
        assert compare(FrequencyReport((99, 1), (1.0, 0.0)), 0.01)

    def test_needs_oracle(self):
        r = FrequencyReport((1, 2), None)
        assert math.isnan(r.deviation)
        with pytest.raises(ValidationError):
            compare(r, 0.1)


class TestFrequencyReport:
    def test_groups_normalize_separately(self):
        r = FrequencyReport((1, 3, 5, 5), (0.25, 0.75, 0.5, 0.5), groups=((0, 1), (2, 3)))
        assert r.frequencies == (0.25, 0.75, 0.5, 0.5)
        assert r.deviation == 0.0

    def test_sum_to_one(self):
        r = FrequencyReport((3, 4, 5), None)
        assert sum(r.frequencies) == pytest.approx(1.0)

    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            FrequencyReport((1, 2), (1.0,))


class TestConfig:
    @pytest.mark.parametrize("kw", [{"alpha": 1.0}, {"alpha": 0.0}, {"events_per_point": 0},
                                    {"discard_fraction": 1.0}])
    def test_invalid(self, kw):
        with pytest.raises(ValidationError):
            ExperimentConfig(**kw)

    def test_env_seed(self, monkeypatch):
        monkeypatch.setenv("DLMNET_SEED", "17")
        assert default_seed() == 17 and ExperimentConfig().seed == 17

    def test_default_seed(self, monkeypatch):
        monkeypatch.delenv("DLMNET_SEED", raising=False)
        assert ExperimentConfig().seed == 0


class TestBeamSplitter:
    def test_single_input_is_half(self):
        pts = run_beam_splitter(ExperimentConfig(seed=1), 1.0, 4)
        for pt in pts:
            assert pt.report.frequencies[0] == pytest.approx(0.5, abs=0.02)

    def test_quarter_phase_fixed_pair(self):
        net = build_beam_splitter(0.99, rng=3)
        rng = np.random.default_rng(4)
        inputs = (Message(0, unit(90)), Message(1, unit(0)))
        for c in (rng.random(10000) >= 0.5).astype(int):
            net.route(inputs[c], "in")
        f0 = net.counters["N0"] / 10000
        assert f0 == pytest.approx(oracle.beam_splitter_probability(0.5, 90, 0), abs=0.02)

    @pytest.mark.parametrize("p0", [0.5, 0.25])
    def test_tracks_oracle(self, p0):
        for pt in run_beam_splitter(ExperimentConfig(seed=2), p0, 4):
            assert pt.report.deviation <= 0.02

    def test_quarter_amplitude(self):
        pts = run_beam_splitter(ExperimentConfig(seed=5, events_per_point=4000), 0.25, 12)
        spread = max(abs(pt.report.frequencies[0] - 0.5) for pt in pts)
        assert spread <= math.sqrt(0.25 * 0.75) + 0.03

    def test_input_order_irrelevant(self):
        pairs = [(10.0, 200.0), (300.0, 40.0), (90.0, 0.0), (180.0, 170.0)]

        def freqs(order):
            net = build_beam_splitter(0.99, rng=7)
            rng = np.random.default_rng(8)
            out = {}
            for k in order:
                psi0, psi1 = pairs[k]
                inputs = (Message(0, unit(psi0)), Message(1, unit(psi1)))
                net.reset_counters()
                for c in (rng.random(10000) >= 0.5).astype(int):
                    net.route(inputs[c], "in")
                out[k] = net.counters["N0"] / 10000
            return out

        a, b = freqs([0, 1, 2, 3]), freqs([3, 1, 0, 2])
        for k in range(4):
            assert a[k] == pytest.approx(b[k], abs=0.02)

    def test_modes_share_phases(self):
        det = run_beam_splitter(ExperimentConfig(seed=9, events_per_point=200), 0.5, 3)
        slm = run_beam_splitter(ExperimentConfig(seed=9, events_per_point=200, mode="stochastic"),
                                0.5, 3)
        assert [(p.psi0, p.psi1) for p in det] == [(p.psi0, p.psi1) for p in slm]

    def test_reinit_keeps_phases(self):
        a = run_beam_splitter(ExperimentConfig(seed=9, events_per_point=200), 0.5, 3)
        b = run_beam_splitter(ExperimentConfig(seed=9, events_per_point=200, reinit_per_point=True),
                              0.5, 3)
        assert [(p.psi0, p.psi1) for p in a] == [(p.psi0, p.psi1) for p in b]

    def test_discard(self):
        pts = run_beam_splitter(ExperimentConfig(events_per_point=101, discard_fraction=0.5), 1.0, 2)
        assert all(sum(p.report.counts) == 51 for p in pts)

    def test_bad_p0(self):
        with pytest.raises(ValidationError):
            run_beam_splitter(ExperimentConfig(), 1.5, 1)


class TestMzi:
    def test_phases(self):
        assert len(mzi_phases(10)) == 36 and mzi_phases(10)[-1] == 350

    def test_bright_port(self):
        (pt,) = run_mzi(ExperimentConfig(seed=1), 0.0, 10, phi0_start=180, phi0_stop=190)
        assert pt.output == pytest.approx(1.0, abs=0.02)
        assert pt.first_splitter == pytest.approx(0.5, abs=0.02)

    def test_phi1_240_curve(self):
        pts = run_mzi(ExperimentConfig(seed=2), 240.0, 10, phi0_start=200, phi0_stop=260)
        for pt in pts:
            expected = math.sin(math.radians(pt.phi0 - 240) / 2) ** 2
            assert pt.output == pytest.approx(expected, abs=0.02)
            assert pt.report.oracle[2] == pytest.approx(expected, abs=1e-12)

    def test_counts(self):
        pts = run_mzi(ExperimentConfig(events_per_point=50), 0.0, 90)
        assert len(pts) == 4
        for pt in pts:
            c = pt.report.counts
            assert c[0] + c[1] == 50 and c[2] + c[3] == 50


class TestCnot:
    def test_200_event_row_10(self, coarse_reports):
        (r,) = [r for r in rows(coarse_reports, "deterministic", 200) if r.params["qubit1"] == 1
                and r.params["qubit2"] == 0]
        assert r.frequencies == pytest.approx((0.0, 1.0, 0.0, 0.0), abs=0.005)

    def test_stochastic_20000_row_11(self, fine_reports):
        (r,) = [r for r in rows(fine_reports, "stochastic", 20000) if r.params["qubit1"] == 1
                and r.params["qubit2"] == 1]
        assert r.frequencies[2] == pytest.approx(0.997, abs=0.003)

    def test_error_shrinks_with_alpha(self, coarse_reports, fine_reports):
        coarse = np.mean([r.deviation for r in rows(coarse_reports, "stochastic", 2000)])
        fine = np.mean([r.deviation for r in rows(fine_reports, "stochastic", 20000)])
        # a tenfold step in N and in 1 - alpha; at least the 1/sqrt(N) reduction
        assert coarse / fine >= math.sqrt(10)

    def test_fresh_network_200(self):
        cfg = ExperimentConfig(events_per_point=200, discard_fraction=0.5, seed=3)
        for q1, q2 in BASIS_INPUTS:
            r = run_cnot_circuit(cfg, q1, q2)
            assert sum(r.counts) == 100
            assert r.oracle == tuple(float(v) for v in oracle.cnot_circuit_output(q1, q2))

    def test_bad_qubit(self):
        with pytest.raises(ValidationError):
            run_cnot_circuit(ExperimentConfig(events_per_point=1), 2, 0)


def test_determinism():
    cfg = ExperimentConfig(seed=4, events_per_point=500, mode="stochastic")
    a = [p.report for p in run_beam_splitter(cfg, 0.3, 3)]
    b = [p.report for p in run_beam_splitter(cfg, 0.3, 3)]
    assert a == b
