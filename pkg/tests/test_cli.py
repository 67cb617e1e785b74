"""End-to-end tests of the command-line front end."""

from __future__ import annotations

import json
import os

import numpy as np
import pandas as pd
import pytest

from survgc.cli import RunConfig, _parse_items, build_parser, resolve_config, run

FAST = [
    "--chains", "2", "--keep", "2", "--burn", "10", "--trees", "5",
    "--pseudo", "200", "--blocks", "2",
]


def _simulate(tmp_path, name="cohort", dgp="linear", n=60, seed=3) -> str:
    out = str(tmp_path / name)
    code = run(["simulate", "--dgp", dgp, "--n", str(n), "--seed", str(seed), "--out", out])
    assert code == 0
    return out


# ---------------------------------------------------------------------------
# Configuration handling


def test_runconfig_roundtrip_through_text():
    cfg = RunConfig(
        command="estimate",
        data="cohort.csv",
        out="results",
        seed=11,
        chains=3,
        keep=7,
        xi=(0.5,),
        gamma=(-0.25, -0.5),
        methods=("bsp", "iptw-sw"),
        trees_y=120,
    )
    assert RunConfig.from_text(cfg.to_text()) == cfg
    assert RunConfig.from_text(RunConfig().to_text()) == RunConfig()


def test_runconfig_rejects_bad_values():
    with pytest.raises(ValueError, match="chains"):
        RunConfig(chains=0)
    with pytest.raises(ValueError, match="chi_variant"):
        RunConfig(chi_variant="A9")
    with pytest.raises(ValueError, match="unknown methods"):
        RunConfig(methods=("bsp", "tmle"))
    with pytest.raises(ValueError, match="bootstrap"):
        RunConfig(bootstrap=-1)


def test_parse_items_rejects_malformed_lines():
    assert _parse_items("# comment\n\nchains = 4\n") == {"chains": "4"}
    with pytest.raises(ValueError, match="expected 'key = value'"):
        _parse_items("chains 4\n")
    with pytest.raises(ValueError, match="unknown configuration key"):
        RunConfig.from_text("cheese = 4\n")


def test_config_file_flag_precedence(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("chains = 5\nkeep = 9\n")
    parser = build_parser()
    args = parser.parse_args(
        ["estimate", "--config", str(path), "--keep", "2", "--data", "d.csv"]
    )
    cfg, explicit = resolve_config(args)
    assert cfg.chains == 5  # from file
    assert cfg.keep == 2  # flag wins
    assert cfg.data == "d.csv"
    assert "keep" in explicit and "chains" not in explicit


def test_workers_env_override(monkeypatch):
    parser = build_parser()
    monkeypatch.setenv("SURVGC_WORKERS", "6")
    cfg, _ = resolve_config(parser.parse_args(["estimate", "--data", "d.csv"]))
    assert cfg.workers == 6
    cfg, _ = resolve_config(
        parser.parse_args(["estimate", "--data", "d.csv", "--workers", "2"])
    )
    assert cfg.workers == 2  # flag beats environment


# ---------------------------------------------------------------------------
# Exit codes


def test_exit_codes_for_bad_invocations(tmp_path):
    assert run([]) == 2  # no command
    assert run(["--help"]) == 0
    assert run(["estimate", "--bogus", "x"]) == 2  # unknown flag
    assert run(["estimate", "--data", str(tmp_path / "nope.csv"),
                "--out", str(tmp_path / "o")]) == 2  # missing file
    assert run(["estimate", "--data", "d.csv", "--out", "o", "--chains", "0"]) == 2
    assert run(["simulate", "--dgp", "no-such-preset", "--n", "10",
                "--out", str(tmp_path / "o")]) == 2


# ---------------------------------------------------------------------------
# validate


def test_validate_accepts_simulated_cohort(tmp_path, capsys):
    out = _simulate(tmp_path)
    assert run(["validate", os.path.join(out, "cohort.csv")]) == 0
    assert "no violations" in capsys.readouterr().out


def test_validate_rejects_corrupted_cohort(tmp_path, capsys):
    out = _simulate(tmp_path)
    path = os.path.join(out, "cohort.csv")
    frame = pd.read_csv(path)
    frame.loc[(frame["id"] == 0) & (frame["wave"] == 0), "z"] = 1  # exposure at wave 0
    bad = str(tmp_path / "bad.csv")
    frame.to_csv(bad, index=False)
    assert run(["validate", bad]) == 1
    assert "violation" in capsys.readouterr().out


# ---------------------------------------------------------------------------
# simulate


def test_simulate_is_byte_identical_across_reruns(tmp_path):
    a = _simulate(tmp_path, "a", dgp="confounded-exposure", n=50, seed=7)
    b = _simulate(tmp_path, "b", dgp="confounded-exposure", n=50, seed=7)
    for name in ("cohort.csv", "truth.json"):
        with open(os.path.join(a, name), "rb") as fa, open(os.path.join(b, name), "rb") as fb:
            assert fa.read() == fb.read(), name
    truth = json.load(open(os.path.join(a, "truth.json")))
    assert truth["method"] == "exact-enumeration"
    assert truth["tau"] == pytest.approx(1.25, abs=1e-12)
    manifest = json.load(open(os.path.join(a, "manifest.json")))
    assert manifest["command"] == "simulate"
    assert manifest["master_seed"] == 7
    assert "survgc" in manifest["versions"]


def test_simulate_accepts_design_file(tmp_path):
    design = tmp_path / "toy.cfg"
    design.write_text("# toy design\npreset = linear\n")
    out = str(tmp_path / "sim")
    assert run(["simulate", "--dgp", str(design), "--n", "30", "--seed", "1",
                "--out", out]) == 0
    manifest = json.load(open(os.path.join(out, "manifest.json")))
    assert "design" in manifest["inputs"]
    truth = json.load(open(os.path.join(out, "truth.json")))
    assert truth["method"] == "monte-carlo"
    design.write_text("flavor = mild\n")
    assert run(["simulate", "--dgp", str(design), "--n", "30", "--out",
                str(tmp_path / "sim2")]) == 2


# ---------------------------------------------------------------------------
# estimate, fit, and stage separation


def test_estimate_outputs_with_fixed_sensitivity(tmp_path):
    sim = _simulate(tmp_path)
    out = str(tmp_path / "est")
    code = run(["estimate", "--data", os.path.join(sim, "cohort.csv"), "--out", out,
                "--seed", "9", *FAST,
                "--xi", "0", "--gamma", "0", "--delta", "0", "--nu", "0"])
    assert code == 0
    taus = pd.read_csv(os.path.join(out, "tau_samples.csv"))
    assert list(taus.columns) == ["draw", "chain", "tau"]
    assert len(taus) == 4  # 2 chains x 2 kept draws
    assert sorted(taus["chain"].unique()) == [0, 1]
    per_wave = pd.read_csv(os.path.join(out, "per_wave.csv"))
    waves = sorted(per_wave["wave"].unique())
    assert waves[0] == 1
    assert len(per_wave) == 4 * len(waves)
    sens = pd.read_csv(os.path.join(out, "sensitivity_draws.csv"))
    assert np.all(sens[["xi", "gamma", "delta", "nu"]].to_numpy() == 0.0)
    summary = json.load(open(os.path.join(out, "summary.json")))
    assert summary["sensitivity"]["fixed"] is True
    assert summary["n_draws"] == 4
    assert summary["tau"]["q2_5"] <= summary["tau"]["mean"] <= summary["tau"]["q97_5"]
    manifest = json.load(open(os.path.join(out, "manifest.json")))
    assert manifest["inputs"]["data"]["sha256"]
    assert manifest["config"]["keep"] == 2


def test_fit_then_estimate_matches_one_shot(tmp_path):
    sim = _simulate(tmp_path)
    data = os.path.join(sim, "cohort.csv")
    one = str(tmp_path / "one")
    assert run(["estimate", "--data", data, "--out", one, "--seed", "5", *FAST]) == 0

    fit_dir = str(tmp_path / "fit")
    assert run(["fit", "--data", data, "--out", fit_dir, "--seed", "5",
                "--chains", "2", "--keep", "2", "--burn", "10", "--trees", "5"]) == 0
    staged = str(tmp_path / "staged")
    assert run(["estimate", "--data", data, "--out", staged, "--from-fit", fit_dir,
                "--pseudo", "200", "--blocks", "2"]) == 0

    for name in ("tau_samples.csv", "per_wave.csv"):
        a = pd.read_csv(os.path.join(one, name)).to_numpy(dtype=float)
        b = pd.read_csv(os.path.join(staged, name)).to_numpy(dtype=float)
        assert np.allclose(a, b, rtol=0.0, atol=1e-12), name


def test_from_fit_refuses_other_dataset(tmp_path, capsys):
    sim_a = _simulate(tmp_path, "a", seed=3)
    sim_b = _simulate(tmp_path, "b", seed=4)
    fit_dir = str(tmp_path / "fit")
    assert run(["fit", "--data", os.path.join(sim_a, "cohort.csv"), "--out", fit_dir,
                "--chains", "1", "--keep", "2", "--burn", "5", "--trees", "5"]) == 0
    code = run(["estimate", "--data", os.path.join(sim_b, "cohort.csv"),
                "--out", str(tmp_path / "est"), "--from-fit", fit_dir,
                "--pseudo", "100"])
    assert code == 2
    assert "mismatch" in capsys.readouterr().err


def test_from_fit_refuses_conflicting_seed(tmp_path, capsys):
    sim = _simulate(tmp_path)
    data = os.path.join(sim, "cohort.csv")
    fit_dir = str(tmp_path / "fit")
    assert run(["fit", "--data", data, "--out", fit_dir, "--seed", "5",
                "--chains", "1", "--keep", "2", "--burn", "5", "--trees", "5"]) == 0
    code = run(["estimate", "--data", data, "--out", str(tmp_path / "est"),
                "--from-fit", fit_dir, "--seed", "6", "--pseudo", "100"])
    assert code == 2
    assert "differs from the fit stage" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# compare, lpml, summary


def test_compare_writes_method_table(tmp_path):
    sim = _simulate(tmp_path)
    out = str(tmp_path / "cmp")
    code = run(["compare", "--data", os.path.join(sim, "cohort.csv"), "--out", out,
                "--methods", "bsp,bp,iptw-sw", "--bootstrap", "10", *FAST])
    assert code == 0
    table = pd.read_csv(os.path.join(out, "compare.csv"))
    assert list(table.columns) == ["method", "estimate", "lo", "hi"]
    assert list(table["method"]) == ["BSP-GC", "BP-GC", "IPTW-SW"]
    assert np.all(np.isfinite(table["estimate"]))
    assert np.all(table["lo"] <= table["hi"])


def test_lpml_reports_both_model_families(tmp_path):
    sim = _simulate(tmp_path, n=40)
    out = str(tmp_path / "lpml")
    code = run(["lpml", "--data", os.path.join(sim, "cohort.csv"), "--out", out,
                "--keep", "3", "--burn", "10", "--trees", "5"])
    assert code == 0
    payload = json.load(open(os.path.join(out, "lpml.json")))
    assert set(payload) == {"bsp", "bp", "difference"}
    assert payload["difference"] == pytest.approx(
        payload["bsp"]["lpml"] - payload["bp"]["lpml"], rel=1e-12
    )
    cpo = pd.read_csv(os.path.join(out, "cpo.csv"))
    assert len(cpo) == 40
    assert np.all(np.isfinite(cpo["log_cpo_bsp"]))
    assert run(["lpml", "--data", os.path.join(sim, "cohort.csv"),
                "--out", out, "--keep", "1"]) == 2


def test_summary_recomputes_estimate_statistics(tmp_path, capsys):
    sim = _simulate(tmp_path)
    est = str(tmp_path / "est")
    assert run(["estimate", "--data", os.path.join(sim, "cohort.csv"),
                "--out", est, *FAST]) == 0
    capsys.readouterr()
    out = str(tmp_path / "sum")
    assert run(["summary", os.path.join(est, "tau_samples.csv"), "--out", out]) == 0
    assert "effect mean" in capsys.readouterr().out
    summary = json.load(open(os.path.join(out, "summary.json")))
    original = json.load(open(os.path.join(est, "summary.json")))
    assert summary["tau"]["mean"] == pytest.approx(original["tau"]["mean"], rel=1e-12)
    assert run(["summary", os.path.join(est, "per_wave.csv")]) == 2  # no tau column
