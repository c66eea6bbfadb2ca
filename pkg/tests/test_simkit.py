from dataclasses import replace

import numpy as np
import pytest

from chaoslink.core import BasinEscapeError
from chaoslink.simkit import (
    ConfigError,
    DivergenceError,
    Metrics,
    ScenarioConfig,
    SessionTrace,
    export_csv,
    export_hops_csv,
    load_config,
    load_trace_csv,
    parse_config_text,
    run_digital_session,
    run_hop_session,
    run_sync_session,
    run_transmit_session,
)

SYNC_CFG = ScenarioConfig()  # the idle-sync experiment defaults
TRANSMIT_CFG = ScenarioConfig(
    source="bernoulli", seed=1, steps=2000, threshold=5.0
)
DIGITAL_CFG = ScenarioConfig(
    mode="fixed", k=1024, x0=122, y0=-1024, steps=16000,
    source="bernoulli", seed=3,
)
HOP_CFG = ScenarioConfig(source="bernoulli", seed=5, sessions=20, active_steps=40)


class TestConfig:
    def test_parse_round_trip(self):
        cfg = parse_config_text(
            "mu = 3.7\nk=1.0\nrho=0.5  # gain\n\n# comment\nsteps=100\n"
        )
        assert cfg.mu == 3.7
        assert cfg.steps == 100

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config_text("bogus = 1\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config_text("mu=3.7\nmu=3.6\n")

    def test_bad_value_rejected(self):
        with pytest.raises(ConfigError, match="bad value"):
            parse_config_text("steps = soon\n")

    def test_missing_equals_rejected(self):
        with pytest.raises(ConfigError, match="key=value"):
            parse_config_text("just a line\n")

    def test_bernoulli_requires_seed(self):
        with pytest.raises(ConfigError, match="seed"):
            ScenarioConfig(source="bernoulli", seed=None)

    def test_x0_basin_enforced(self):
        with pytest.raises(ConfigError):
            ScenarioConfig(x0=1.5)

    def test_settle_before_steps(self):
        with pytest.raises(ConfigError):
            ScenarioConfig(steps=10, settle=25)

    def test_load_config(self, tmp_path):
        path = tmp_path / "s.cfg"
        path.write_text("mu=3.7\nsteps=60\n")
        assert load_config(path).steps == 60


class TestSyncSession:
    def test_reference_run(self):
        trace, metrics = run_sync_session(SYNC_CFG)
        assert len(trace) == 51
        assert metrics.sync_step == 25
        assert abs(trace.column("e")[50]) < 1e-14
        # error follows the closed form rho^n * e0
        for n, e in enumerate(trace.column("e")):
            assert abs(e - 0.5**n * -1.1) <= 1e-9 * max(n, 1)

    def test_equal_start(self):
        trace, metrics = run_sync_session(replace(SYNC_CFG, y0=0.1))
        assert all(e == 0.0 for e in trace.column("e"))
        assert metrics.sync_step == SYNC_CFG.sync_window - 1

    def test_unstable_gain(self):
        trace, metrics = run_sync_session(replace(SYNC_CFG, rho=1.2, steps=30))
        errs = np.abs(trace.array("e"))
        assert np.all(np.diff(errs) > 0)
        assert metrics.sync_step is None

    def test_source_must_be_off(self):
        with pytest.raises(ConfigError):
            run_sync_session(replace(SYNC_CFG, source="pattern", pattern="1"))

    def test_final_record_has_no_control(self):
        trace, _ = run_sync_session(SYNC_CFG)
        assert trace.column("u")[-1] is None
        assert trace.column("u")[0] is not None


class TestTransmitSession:
    def test_frozen_scenario_recovers_exactly(self):
        trace, metrics = run_transmit_session(TRANSMIT_CFG)
        assert metrics.ber == 0.0
        assert metrics.bits_total == 246

    def test_ber_zero_across_seeds(self):
        for seed in range(10):
            _, metrics = run_transmit_session(replace(TRANSMIT_CFG, seed=seed))
            assert metrics.ber == 0.0

    def test_all_zero_source_degenerates_to_sync(self):
        cfg = replace(TRANSMIT_CFG, source="pattern", pattern="0", steps=2000,
                      settle=25)
        t_tx, _ = run_transmit_session(cfg)
        t_sync, _ = run_sync_session(
            replace(cfg, source="off", pattern="")
        )
        for col in ("x", "y", "e"):
            assert t_tx.column(col) == t_sync.column(col)
        assert t_tx.column("u")[:-1] == t_sync.column("u")[:-1]
        # line signal is the bare drive state and epsilon equals e
        assert t_tx.column("z")[:-1] == t_sync.column("x")[:-1]
        assert t_tx.column("epsilon")[:-1] == t_sync.column("e")[:-1]

    def test_early_window_fringes(self):
        # decisions inside the settle window may disagree with the source
        cfg = replace(TRANSMIT_CFG, threshold=0.5)
        trace, _ = run_transmit_session(cfg)
        early = [b for n, b in zip(trace.column("n"), trace.column("bit"))
                 if b is not None and n < cfg.settle]
        assert early  # fringe decisions exist and are recorded

    def test_requires_source(self):
        with pytest.raises(ConfigError):
            run_transmit_session(replace(TRANSMIT_CFG, source="off"))

    def test_steps_multiple_of_hold(self):
        with pytest.raises(ConfigError):
            run_transmit_session(replace(TRANSMIT_CFG, steps=2001))

    def test_divergence_guard(self):
        with pytest.raises(DivergenceError):
            run_transmit_session(
                replace(TRANSMIT_CFG, rho=1.6, steps=2000, guard=100.0)
            )

    def test_multiplicative_operator_runs(self):
        cfg = replace(TRANSMIT_CFG, operator="multiplicative", amplitude=0.2,
                      threshold=None)
        trace, metrics = run_transmit_session(cfg)
        assert len(trace) == cfg.steps + 1

    def test_disturbance_zero_equals_ideal(self):
        ideal, _ = run_transmit_session(TRANSMIT_CFG)
        dist, _ = run_transmit_session(
            replace(TRANSMIT_CFG, channel="disturbance", disturbance=0.0)
        )
        assert ideal.column("z") == dist.column("z")
        assert ideal.column("y") == dist.column("y")


class TestDigitalSession:
    def test_frozen_scenario(self):
        trace, metrics = run_digital_session(DIGITAL_CFG)
        assert metrics.sync_step is not None and metrics.sync_step <= 64
        assert metrics.ber == 0.0
        assert metrics.bits_total >= 1000 * 4 - 4 * 4  # ~1000 post-sync frames

    def test_all_zero_word_recovers(self):
        cfg = replace(DIGITAL_CFG, source="pattern", pattern="0", steps=1600)
        trace, metrics = run_digital_session(cfg)
        assert metrics.ber == 0.0
        decided = [b for b in trace.column("bit") if b is not None]
        post = decided[metrics.sync_step // 4:]
        assert all(b == 0 for b in post)

    def test_presync_frames_show_fringes(self):
        # before exact sync the receiver carrier differs, so some line
        # bits descramble incorrectly
        trace, metrics = run_digital_session(replace(DIGITAL_CFG, seed=9))
        n0 = metrics.sync_step
        i = trace.array("i")
        ihat = trace.array("i_hat")
        pre = slice(0, n0)
        mism = np.nansum(np.abs(ihat[pre] - i[pre]))
        assert mism > 0

    def test_requires_fixed_mode(self):
        with pytest.raises(ConfigError):
            run_digital_session(replace(DIGITAL_CFG, mode="float"))

    def test_steps_multiple_of_frame(self):
        with pytest.raises(ConfigError):
            run_digital_session(replace(DIGITAL_CFG, steps=16001, settle=25))


class TestHopSession:
    def test_frozen_scenario(self):
        trace, metrics = run_hop_session(HOP_CFG)
        assert len(metrics.hops) == 20
        assert metrics.channel_error_count == 0
        assert len({h.j_tx for h in metrics.hops}) >= 10

    def test_channel_column_marks_hops(self):
        trace, metrics = run_hop_session(HOP_CFG)
        marked = [c for c in trace.column("channel") if c is not None]
        assert len(marked) == 20
        assert [int(c) for c in marked] == [h.j_tx for h in metrics.hops]

    def test_deterministic(self):
        a, ma = run_hop_session(HOP_CFG)
        b, mb = run_hop_session(HOP_CFG)
        assert ma.hops == mb.hops
        assert a.column("x") == b.column("x")

    def test_hops_csv(self, tmp_path):
        _, metrics = run_hop_session(HOP_CFG)
        path = tmp_path / "hops.csv"
        export_hops_csv(metrics.hops, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "session,step,j_tx,j_rx,error"
        assert len(lines) == 21


class TestTraceCsv:
    def test_round_trip_exact(self, tmp_path):
        trace, _ = run_transmit_session(TRANSMIT_CFG)
        p1 = tmp_path / "a.csv"
        p2 = tmp_path / "b.csv"
        export_csv(trace, p1)
        export_csv(load_trace_csv(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_absent_fields_are_empty_cells(self, tmp_path):
        trace, _ = run_sync_session(SYNC_CFG)
        path = tmp_path / "t.csv"
        export_csv(trace, path)
        header, first = path.read_text().splitlines()[:2]
        assert header == "n,x,y,z,e,epsilon,u,i,i_hat,bit,channel"
        cells = dict(zip(header.split(","), first.split(",")))
        assert cells["z"] == ""
        assert cells["i"] == ""

    def test_header_validation(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError):
            load_trace_csv(path)


class TestMetricsConsistency:
    def test_ber_zero_iff_all_bits_match(self):
        _, metrics = run_transmit_session(TRANSMIT_CFG)
        assert metrics.ber == 0.0
        assert metrics.bit_errors == 0
        bad, metrics_bad = run_transmit_session(
            replace(TRANSMIT_CFG, threshold=0.5)
        )
        assert (metrics_bad.ber == 0.0) == (metrics_bad.bit_errors == 0)

    def test_summary_lines(self):
        _, metrics = run_hop_session(HOP_CFG)
        lines = metrics.summary_lines()
        assert any(line.startswith("channel_error_count:") for line in lines)
        assert any(line.startswith("distinct_channels:") for line in lines)
