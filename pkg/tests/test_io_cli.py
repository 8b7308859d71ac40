import json
import subprocess
import sys
import textwrap

import numpy as np
import pytest

from steinlab import ConfigError, SampleBatch, cli, io, ksd, make_gaussian
from steinlab.kernels import KernelSpec

IMQ = KernelSpec("imq", beta=-0.5)


class TestSampleCsv:
    def test_round_trip_bitwise(self, tmp_path):
        rng = np.random.default_rng(1)
        batch = SampleBatch(rng.standard_normal((17, 3)))
        path = tmp_path / "s.csv"
        io.write_samples_csv(path, batch, meta={"seed": 5})
        loaded = io.read_samples_csv(path)
        assert np.array_equal(loaded.points, batch.points)

    def test_header_validation(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ConfigError, match="expected header x1,x2"):
            io.read_samples_csv(path)

    def test_bad_cell_reports_row_and_column(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x1,x2\n1.0,2.0\n1.0,oops\n")
        with pytest.raises(ConfigError, match=r"bad.csv:3: column 2"):
            io.read_samples_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            io.read_samples_csv(tmp_path / "absent.csv")

    def test_ragged_row(self, tmp_path):
        path = tmp_path / "ragged.csv"
        path.write_text("x1,x2\n1.0\n")
        with pytest.raises(ConfigError, match="expected 2 columns"):
            io.read_samples_csv(path)


class TestDatasetCsv:
    def test_observations_single_column(self, tmp_path):
        path = tmp_path / "obs.csv"
        path.write_text("y\n0.5\n-1.25\n")
        assert np.array_equal(io.read_observations_csv(path), [0.5, -1.25])
        wide = tmp_path / "wide.csv"
        wide.write_text("a,b\n1,2\n")
        with pytest.raises(ConfigError, match="single observation column"):
            io.read_observations_csv(wide)

    def test_labeled_final_column(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("f1,f2,label\n0.1,0.2,1\n-0.3,0.4,0\n")
        X, y = io.read_labeled_csv(path)
        assert np.array_equal(X, [[0.1, 0.2], [-0.3, 0.4]])
        assert np.array_equal(y, [1.0, 0.0])

    def test_labeled_rejects_bad_label(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("f1,label\n0.1,2\n")
        with pytest.raises(ConfigError, match="not 0 or 1"):
            io.read_labeled_csv(path)


class TestConfigFiles:
    def test_sections_and_inline_comments(self, tmp_path):
        path = tmp_path / "c.ini"
        path.write_text("[kernel]\nfamily = imq  # the unscaled default\nbeta = -0.5\n")
        cfg = io.load_config(path)
        assert cfg["kernel"]["family"] == "imq"
        assert cfg["kernel"]["beta"] == "-0.5"

    def test_missing_and_malformed(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            io.load_config(tmp_path / "none.ini")
        bad = tmp_path / "bad.ini"
        bad.write_text("key_without_section = 1\n")
        with pytest.raises(ConfigError, match="parse error"):
            io.load_config(bad)


def _write(path, text):
    path.write_text(textwrap.dedent(text))
    return path


@pytest.fixture
def mode_fixture(tmp_path, monkeypatch):
    """Single sample point at the mode of N(0, I_2), L = 10 equal factors."""
    monkeypatch.chdir(tmp_path)
    io.write_samples_csv(tmp_path / "samples.csv", SampleBatch(np.zeros((1, 2))))
    config = _write(
        tmp_path / "score.ini",
        """\
        [target]
        kind = gaussian
        dim = 2
        mu = 0
        sigma_sq = 1
        L = 10

        [kernel]
        family = imq
        beta = -0.5

        [score]
        samples = samples.csv
        m = 1
        seed = 7
        """,
    )
    return tmp_path, config


class TestCliScore:
    def test_mode_point_value(self, mode_fixture):
        tmp_path, config = mode_fixture
        assert cli.main(["score", "--config", str(config)]) == 0
        doc = json.loads((tmp_path / "result.json").read_text())
        assert doc["result"]["value"] == pytest.approx(np.sqrt(2.0), rel=1e-15)
        assert doc["result"]["w_sq"] == [1.0, 1.0]
        assert doc["config"]["seed"] == "7"

    def test_full_batch_matches_exact(self, mode_fixture):
        tmp_path, config = mode_fixture
        full = _write(tmp_path / "full.ini",
                      config.read_text().replace("m = 1", "m = 10"))
        exact = _write(tmp_path / "exact.ini",
                       config.read_text().replace("m = 1\n", ""))
        cli.main(["score", "--config", str(full), "--out", "full.json"])
        cli.main(["score", "--config", str(exact), "--out", "exact.json"])
        v_full = json.loads((tmp_path / "full.json").read_text())["result"]
        v_exact = json.loads((tmp_path / "exact.json").read_text())["result"]
        assert v_full["value"] == v_exact["value"]
        assert v_full["w_sq"] == v_exact["w_sq"]
        assert v_exact["seed"] is None and v_exact["m"] == 10

    def test_missing_samples_no_partial_output(self, mode_fixture, capsys):
        tmp_path, config = mode_fixture
        (tmp_path / "samples.csv").unlink()
        code = cli.main(["score", "--config", str(config), "--out", "res.json"])
        assert code != 0
        assert not (tmp_path / "res.json").exists()
        assert "samples.csv" in capsys.readouterr().err

    def test_reruns_are_byte_identical(self, mode_fixture):
        tmp_path, config = mode_fixture
        cli.main(["score", "--config", str(config), "--out", "a.json"])
        cli.main(["score", "--config", str(config), "--out", "b.json"])
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    def test_thread_count_does_not_change_bytes(self, mode_fixture):
        tmp_path, config = mode_fixture
        cli.main(["score", "--config", str(config), "--out", "t1.json",
                  "--threads", "1"])
        cli.main(["score", "--config", str(config), "--out", "t8.json",
                  "--threads", "8"])
        assert (tmp_path / "t1.json").read_bytes() == (tmp_path / "t8.json").read_bytes()

    def test_malformed_config_exit_code(self, tmp_path, monkeypatch, capsys):
        monkeypatch.chdir(tmp_path)
        bad = _write(tmp_path / "bad.ini", "no section here = 1\n")
        assert cli.main(["score", "--config", str(bad)]) == 2
        assert "config error" in capsys.readouterr().err


def _tune_config(tmp_path, *, grid="5e-3", trials=2, extra=""):
    return _write(
        tmp_path / "tune.ini",
        f"""\
        [target]
        kind = gaussian
        dim = 1
        mu = 0
        sigma_sq = 1
        L = 6

        [kernel]
        family = imq
        beta = -0.5

        [tune]
        eps_grid = {grid}
        trials = {trials}
        chain_steps = 80
        sgld_batch = 2
        init = 0
        m_list = 2,full
        seed = 3
        {extra}
        """,
    )


class TestCliTune:
    def test_degenerate_grid_argmin(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        config = _tune_config(tmp_path)
        assert cli.main(["tune-sgld", "--config", str(config), "--out", "t.csv"]) == 0
        summary = (tmp_path / "t.summary.csv").read_text()
        assert "# argmin_epsilon.m=2 = 0.005" in summary
        assert "# argmin_epsilon.m=6 = 0.005" in summary

    def test_trial_rows_stable_when_extending_trials(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        short = _tune_config(tmp_path, trials=2)
        cli.main(["tune-sgld", "--config", str(short), "--out", "short.csv"])
        longer = _write(tmp_path / "tune6.ini",
                        short.read_text().replace("trials = 2", "trials = 4"))
        cli.main(["tune-sgld", "--config", str(longer), "--out", "long.csv"])

        def rows(name):
            lines = [l for l in (tmp_path / name).read_text().splitlines()
                     if l and not l.startswith("#")]
            return lines[1:]

        assert set(rows("short.csv")) <= set(rows("long.csv"))

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_divergent_cells_are_flagged_and_excluded(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        config = _tune_config(tmp_path, grid="5e-3,1e308")
        assert cli.main(["tune-sgld", "--config", str(config), "--out", "d.csv"]) == 0
        body = [l for l in (tmp_path / "d.csv").read_text().splitlines()
                if l and not l.startswith("#")]
        diverged = [l for l in body[1:] if l.split(",")[5] == "1"]
        assert diverged and all(l.split(",")[3] == "" for l in diverged)
        summary = (tmp_path / "d.summary.csv").read_text()
        assert "# argmin_epsilon.m=2 = 0.005" in summary
        assert "1e+308" not in summary.split("m,epsilon")[1]


def _rank_config(tmp_path, step_b="0.5"):
    # modest true weights keep the small-step chain inside the posterior
    # bulk at this horizon, so the large step loses clearly
    return _write(
        tmp_path / "rank.ini",
        f"""\
        [target]
        kind = logreg
        n = 40
        d = 2
        w_true = 0.3,-0.2
        data_seed = 5

        [kernel]
        family = imq
        beta = -0.5

        [sampler_a]
        step = 5e-3
        batch = 4
        init = 0

        [sampler_b]
        step = {step_b}
        batch = 4
        init = 0

        [rank]
        n_grid = 300,600
        m_list = 4,full
        seed = 9
        """,
    )


class TestCliRank:
    def test_identical_samplers_tie(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        config = _rank_config(tmp_path, step_b="5e-3")
        assert cli.main(["rank-samplers", "--config", str(config),
                         "--out", "r.csv"]) == 0
        body = [l for l in (tmp_path / "r.csv").read_text().splitlines()
                if l and not l.startswith("#")]
        assert all(line.endswith(",tie") for line in body[1:])

    def test_small_step_preferred_everywhere(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        config = _rank_config(tmp_path)
        cli.main(["rank-samplers", "--config", str(config), "--out", "r.csv"])
        body = [l for l in (tmp_path / "r.csv").read_text().splitlines()
                if l and not l.startswith("#")]
        assert len(body) == 1 + 4
        assert all(line.endswith(",a") for line in body[1:])


def _svgd_config(tmp_path, *, rounds, batch, init_lines, extra_lines=()):
    text = textwrap.dedent(
        """\
        [target]
        kind = gaussian
        dim = 1
        mu = 0
        sigma_sq = 1
        L = 20

        [kernel]
        family = rbf
        bandwidth = 1.0

        [svgd]
        rounds = {rounds}
        batch = {batch}
        step = 0.05
        schedule = adagrad
        bandwidth_policy = median_per_round
        seed = 5
        """
    ).format(rounds=rounds, batch=batch)
    text += "".join(f"{line}\n" for line in (*init_lines, *extra_lines))
    path = tmp_path / "svgd.ini"
    path.write_text(text)
    return path


class TestCliSsvgd:
    def test_zero_rounds_returns_init(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        rng = np.random.default_rng(0)
        init = SampleBatch(rng.standard_normal((12, 1)))
        io.write_samples_csv(tmp_path / "init.csv", init)
        config = _svgd_config(tmp_path, rounds=0, batch=5,
                              init_lines=["init = init.csv"])
        assert cli.main(["ssvgd", "--config", str(config), "--out", "p.csv"]) == 0
        out = io.read_samples_csv(tmp_path / "p.csv")
        assert np.array_equal(out.points, init.points)

    def test_term_eval_ratio_quarter_batch(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)

        def run(batch, out):
            config = _svgd_config(
                tmp_path, rounds=8, batch=batch,
                init_lines=["init_n = 10", "init_mu = 0.5", "init_sigma = 0.5"],
            )
            cli.main(["ssvgd", "--config", str(config), "--out", out])
            lines = [l for l in (tmp_path / out.replace(".csv", ".diagnostics.jsonl"))
                     .read_text().splitlines() if l and not l.startswith("#")]
            return json.loads(lines[-1])["term_evals"]

        quarter = run(5, "quarter.csv")
        full = run(20, "full.csv")
        assert full == 4 * quarter == 8 * 10 * 20

    def test_diagnostics_report_ksd_and_trajectory(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        config = _svgd_config(
            tmp_path, rounds=6, batch=5,
            init_lines=["init_n = 8", "init_mu = 0.5", "init_sigma = 0.5"],
            extra_lines=["checkpoint_every = 3", "report_ksd = true",
                         "save_trajectory = true"],
        )
        cli.main(["ssvgd", "--config", str(config), "--out", "p.csv"])
        records = [json.loads(l) for l in
                   (tmp_path / "p.diagnostics.jsonl").read_text().splitlines()
                   if l and not l.startswith("#")]
        assert [r["round"] for r in records] == [3, 6]
        assert all("ksd" in r and r["ksd"] >= 0 for r in records)
        for round_no in (3, 6):
            snap = io.read_samples_csv(tmp_path / f"p.round-{round_no}.csv")
            assert snap.points.shape == (8, 1)
        final = io.read_samples_csv(tmp_path / "p.csv")
        assert np.array_equal(
            final.points,
            io.read_samples_csv(tmp_path / "p.round-6.csv").points,
        )


class TestCliCurve:
    def test_rows_and_reproducibility(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        config = _write(
            tmp_path / "curve.ini",
            """\
            [target]
            kind = gaussian
            dim = 2
            mu = 0
            sigma_sq = 1
            L = 4

            [kernel]
            family = imq
            beta = -0.5

            [curve]
            n_grid = 50
            m = 1
            seeds = 3
            mu = 0,0
            sigma = 1.0
            seed = 2
            """,
        )
        assert cli.main(["curve", "--config", str(config), "--out", "c.csv"]) == 0
        body = [l for l in (tmp_path / "c.csv").read_text().splitlines()
                if l and not l.startswith("#")]
        assert len(body) == 1 + 3
        cli.main(["curve", "--config", str(config), "--out", "c2.csv"])
        assert (tmp_path / "c.csv").read_bytes() == (tmp_path / "c2.csv").read_bytes()


class TestEntryPoint:
    def test_console_script_help(self):
        proc = subprocess.run(
            [sys.executable, "-m", "steinlab.cli", "--help"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "tune-sgld" in proc.stdout


class TestLibraryJsonRoundTrip:
    def test_result_document_survives_json(self, tmp_path):
        target = make_gaussian(0.0, 1.0, 3, dim=2)
        batch = SampleBatch(np.array([[0.2, -0.4], [1.0, 0.5]]))
        result = ksd(batch, target, IMQ)
        path = tmp_path / "r.json"
        io.write_json(path, result.to_dict())
        loaded = json.loads(path.read_text())
        assert loaded["value"] == result.value
        assert loaded["w_sq"] == [float(v) for v in result.w_sq]
