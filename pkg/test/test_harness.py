"""
Integration Tests for the Monte-Carlo Harness

Small configurations (few runs, short packets) exercise every scenario end to
end. The full-size acceptance runs are marked slow and deselected by default.
"""

from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from src.smcdma.models.config import ExperimentConfig
from src.smcdma.models.errors import ConfigError
from src.smcdma.services.harness import effective_workers, run_scenario, scenario_points
from src.smcdma.services.pipeline import simulate_run


CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"
SINR_SLACK_DB = 0.2


def small_config(**values):
    base = {"runs": 2, "packet": 60, "training": 20, "K": 4, "seed": 3}
    base.update(values)
    return ExperimentConfig.build(base)


def summary_value(summary, label, key):
    """Read ``key=value`` from a summary line, e.g. ur or capacity."""
    text = summary[label].split(f"{key}=")[1].split()[0]
    return float(text.removesuffix("dB"))


class TestSimulateRun:
    """Test cases for a single Monte-Carlo run."""

    def test_layout(self):
        """Test the shapes and counters of one run."""
        config = small_config(algorithms=["nlms", "sm-nlms:pidb"])
        result = simulate_run(config, 0)

        assert result.labels == ["NLMS", "SM-NLMS-PIDB"]
        assert result.signal_power.shape == (2, 60)
        assert result.bits == 40
        assert result.updates[0] == 60
        assert 0 <= result.updates[1] <= 60
        assert np.all(result.interference_power > 0)
        assert np.all(result.gamma[1] >= 0)

    def test_same_run_index_same_data(self):
        """Test that a run is reproducible from the seed and run index alone."""
        config = small_config(algorithms=["sm-ap:pdb"])
        first = simulate_run(config, 1)
        second = simulate_run(config, 1)
        other = simulate_run(config, 2)

        assert np.array_equal(first.signal_power, second.signal_power)
        assert not np.array_equal(first.signal_power, other.signal_power)

    def test_traces(self):
        """Test that run traces hold one filter row per symbol and lane."""
        config = small_config(algorithms=["nlms", "beacon:pidb"])
        result = simulate_run(config, 0, keep_traces=True)

        assert len(result.traces["filter"]) == 2 * 60
        assert result.traces["channel"].shape == (60, 3)
        assert result.traces["d_power"].shape == (2, 60)

    def test_tracking_configuration_stays_finite(self):
        """Test that the joint estimator and the PIDB bound stay finite over full packets."""
        config = ExperimentConfig.from_file(CONFIG_DIR / "interference_tracking.toml", {"runs": 6})
        for index in range(config.runs):
            result = simulate_run(config, index)

            assert np.all(np.isfinite(result.A_hat))
            assert np.all(result.A_hat >= 0)
            assert np.all(np.isfinite(result.v_hat))
            assert np.all(np.isfinite(result.gamma))


class TestScenarios:
    """Test cases for scenario execution and outputs."""

    def test_sinr_convergence_outputs(self, tmp_path):
        """Test the tables written by the SINR scenario."""
        artifact = run_scenario(small_config(scenario="sinr-convergence", family="ap"), tmp_path)

        names = sorted(path.name for path in artifact.files)
        assert names == ["bounds.csv", "manifest.txt", "sinr.csv"]
        sinr = pd.read_csv(tmp_path / "sinr.csv")
        assert list(sinr.columns) == ["iteration", "algorithm", "mean_sinr_db"]
        assert set(sinr["algorithm"]) == {"AP", "SM-AP-FIXED", "SM-AP-PDB", "SM-AP-PIDB"}
        assert len(sinr) == 4 * 60
        assert "SM-AP-PIDB" in artifact.summary

    def test_interference_tracking_outputs(self, tmp_path):
        """Test the interference table and tracking error summary."""
        artifact = run_scenario(small_config(scenario="interference-tracking"), tmp_path)

        frame = pd.read_csv(tmp_path / "interference.csv")
        assert list(frame.columns) == ["iteration", "v_hat", "genie_power"]
        assert len(frame) == 60
        assert (frame["genie_power"] > 0).all()
        assert "tracking_error" in artifact.summary

    def test_ber_sweep_outputs(self, tmp_path):
        """Test one BER row per sweep point and algorithm."""
        config = small_config(scenario="ber-vs-snr", ebn0_grid=[5.0, 10.0],
                              algorithms=["ap", "sm-ap:pidb"])
        run_scenario(config, tmp_path)

        frame = pd.read_csv(tmp_path / "ber.csv")
        assert list(frame.columns) == ["x_value", "algorithm", "ber", "ur"]
        assert len(frame) == 4
        assert frame["ber"].between(0, 1).all()
        assert (frame.loc[frame["algorithm"] == "AP", "ur"] == 1.0).all()

    def test_users_sweep_reports_capacity(self, tmp_path):
        """Test that the users sweep adds the capacity to summary and manifest."""
        config = small_config(scenario="ber-vs-users", K_grid=[2, 4], algorithms=["sm-ap:fixed"])
        artifact = run_scenario(config, tmp_path)

        assert "capacity=" in artifact.summary["SM-AP-FIXED"]
        assert "capacity[SM-AP-FIXED]" in (tmp_path / "manifest.txt").read_text()

    def test_sweep_points(self):
        """Test that sweeps expand into one configuration per grid value."""
        config = small_config(scenario="ber-vs-doppler", fdT_grid=[1e-4, 1e-3])
        points = scenario_points(config)

        assert [x for x, _ in points] == [1e-4, 1e-3]
        assert points[1][1].fdT == 1e-3

    def test_trace_files(self, tmp_path):
        """Test that tracing writes the run-0 trace tables."""
        config = small_config(algorithms=["sm-nlms:pdb"], trace=True)
        artifact = run_scenario(config, tmp_path)
        names = {path.name for path in artifact.files}

        assert {"filter_trace.csv", "channel_trace.csv", "estimator_trace.csv"} <= names
        estimator = pd.read_csv(tmp_path / "estimator_trace.csv")
        assert list(estimator.columns) == ["symbol", "channel_error", "A_hat", "d_power", "genie_power"]


class TestReproducibility:
    """Test cases for deterministic output."""

    def test_same_seed_same_bytes(self, tmp_path):
        """Test that repeating a run produces byte-identical tables."""
        config = small_config(scenario="sinr-convergence", family="nlms")
        run_scenario(config, tmp_path / "a")
        run_scenario(config, tmp_path / "b")

        for name in ("sinr.csv", "bounds.csv", "manifest.txt"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_workers_do_not_change_results(self, tmp_path):
        """Test that a process pool reproduces the inline results."""
        run_scenario(small_config(workers=1), tmp_path / "inline")
        run_scenario(small_config(workers=2), tmp_path / "pool")

        for name in ("sinr.csv", "bounds.csv"):
            assert (tmp_path / "inline" / name).read_bytes() == (tmp_path / "pool" / name).read_bytes()

    def test_manifest_echoes_parameters(self, tmp_path):
        """Test that the manifest lists the seed, scenario and algorithm costs."""
        run_scenario(small_config(), tmp_path)
        manifest = (tmp_path / "manifest.txt").read_text()

        assert 'scenario = "sinr-convergence"' in manifest
        assert "seed = 3" in manifest
        assert "packet = 60" in manifest
        assert "complexity[NLMS]" in manifest

    def test_workers_from_environment(self, monkeypatch):
        """Test that SMCDMA_WORKERS applies when the configuration leaves workers unset."""
        monkeypatch.setenv("SMCDMA_WORKERS", "3")

        assert effective_workers(small_config()) == 3
        assert effective_workers(small_config(workers=1)) == 1


class TestConfigErrors:
    """Test cases for configuration failures."""

    def test_invalid_algorithm_before_any_run(self, tmp_path):
        """Test that a bad algorithm list fails before the output directory is created."""
        config = ExperimentConfig(algorithms=["sm-nlms"])
        out_dir = tmp_path / "never"

        with pytest.raises(ConfigError):
            run_scenario(config, out_dir)
        assert not out_dir.exists()

    def test_duplicate_algorithms(self):
        """Test that the same algorithm may not appear twice."""
        with pytest.raises(ConfigError):
            small_config(algorithms=["nlms", "nlms"])

    def test_invalid_sweep_point(self, tmp_path):
        """Test that a grid value invalid for the configuration fails before the output directory is created."""
        config = small_config(scenario="ber-vs-users", desired_user=3, K_grid=[2, 4])
        out_dir = tmp_path / "never"

        with pytest.raises(ConfigError):
            run_scenario(config, out_dir)
        assert not out_dir.exists()


@pytest.mark.slow
class TestAcceptance:
    """Full-size runs of the shipped scenarios."""

    def test_pidb_tracks_interference(self, tmp_path):
        """Test that the tracked power stays within 10% of the genie power after settling."""
        artifact = run_scenario(ExperimentConfig.from_file(CONFIG_DIR / "interference_tracking.toml"), tmp_path)

        assert float(artifact.summary["tracking_error"]) <= 0.10

    @pytest.mark.parametrize("name, plain, prefix", [
        ("sinr_nlms.toml", "NLMS", "SM-NLMS"),
        ("sinr_ap.toml", "AP", "SM-AP"),
        ("sinr_beacon.toml", "RLS", "BEACON"),
    ])
    def test_sinr_ordering(self, tmp_path, name, plain, prefix):
        """Test PIDB >= PDB >= fixed >= plain SINR at symbol 200, and PIDB updating least."""
        artifact = run_scenario(ExperimentConfig.from_file(CONFIG_DIR / name), tmp_path)
        sinr = pd.read_csv(tmp_path / "sinr.csv")
        at = sinr[sinr["iteration"] == 200].set_index("algorithm")["mean_sinr_db"]
        ordered = [f"{prefix}-PIDB", f"{prefix}-PDB", f"{prefix}-FIXED", plain]

        for better, worse in zip(ordered, ordered[1:]):
            assert at[better] >= at[worse] - SINR_SLACK_DB, f"{better} vs {worse}"
        assert summary_value(artifact.summary, plain, "ur") == 1.0
        assert (summary_value(artifact.summary, f"{prefix}-PIDB", "ur")
                < summary_value(artifact.summary, f"{prefix}-FIXED", "ur") < 1.0)

    def test_doppler_sweep(self, tmp_path):
        """Test the BER ordering at most fdT points and the lower update rate of adaptive bounds everywhere."""
        run_scenario(ExperimentConfig.from_file(CONFIG_DIR / "ber_doppler.toml"), tmp_path)
        frame = pd.read_csv(tmp_path / "ber.csv")
        ber = frame.pivot(index="x_value", columns="algorithm", values="ber")
        ur = frame.pivot(index="x_value", columns="algorithm", values="ur")

        ordered = (ber["BEACON-PIDB"] <= ber["BEACON-FIXED"]) & (ber["BEACON-FIXED"] <= ber["RLS"])
        assert len(ber) == 5
        assert ordered.sum() >= 4
        assert (ur["BEACON-PDB"] < ur["BEACON-FIXED"]).all()
        assert (ur["BEACON-PIDB"] < ur["BEACON-FIXED"]).all()

    def test_users_sweep_capacity(self, tmp_path):
        """Test that PIDB supports at least two more users than the fixed bound."""
        artifact = run_scenario(ExperimentConfig.from_file(CONFIG_DIR / "ber_users.toml"), tmp_path)

        pidb = summary_value(artifact.summary, "SM-AP-PIDB", "capacity")
        fixed = summary_value(artifact.summary, "SM-AP-FIXED", "capacity")
        assert pidb >= fixed + 2
