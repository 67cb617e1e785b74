"""Tests for the cohort data model, pattern table, subsets, and I/O."""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from survgc.cohort import (
    CohortDataset,
    PatternError,
    UnfittableFactorError,
    admissible_patterns,
    classify_pattern,
    feature_layout,
    model_subset,
    read_cohort_csv,
    read_schema,
    validate_cohort,
    write_cohort_csv,
    write_schema,
)

# Hand-enumerated admissible (retention, survival) pairs for waves 0..3
# with their per-wave statuses.  A monotone start-at-1 vector is fixed by
# its drop index; admissibility is drop(r) <= drop(s).
PATTERN_TABLE_J3 = {
    ((1, 0, 0, 0), (1, 0, 0, 0)): ["O", "nd", "nd", "nd"],
    ((1, 0, 0, 0), (1, 1, 0, 0)): ["O", "M*", "nd", "nd"],
    ((1, 1, 0, 0), (1, 1, 0, 0)): ["O", "O", "nd", "nd"],
    ((1, 0, 0, 0), (1, 1, 1, 0)): ["O", "M*", "M", "nd"],
    ((1, 1, 0, 0), (1, 1, 1, 0)): ["O", "O", "M*", "nd"],
    ((1, 1, 1, 0), (1, 1, 1, 0)): ["O", "O", "O", "nd"],
    ((1, 0, 0, 0), (1, 1, 1, 1)): ["O", "M*", "M", "M"],
    ((1, 1, 0, 0), (1, 1, 1, 1)): ["O", "O", "M*", "M"],
    ((1, 1, 1, 0), (1, 1, 1, 1)): ["O", "O", "O", "M*"],
    ((1, 1, 1, 1), (1, 1, 1, 1)): ["O", "O", "O", "O"],
}


def _tiny_dataset() -> CohortDataset:
    """Four individuals, waves 0..2: full, dropout, death, drop-then-death."""
    nan = np.nan
    y = np.array(
        [
            [1.0, 2.0, 3.0],
            [0.5, 1.5, nan],
            [0.2, nan, nan],
            [0.9, 1.1, nan],
        ]
    )
    z = np.array(
        [
            [0.0, 0.0, 1.0],
            [0.0, 1.0, nan],
            [0.0, nan, nan],
            [0.0, 0.0, nan],
        ]
    )
    w = np.array(
        [
            [0.0, 1.0, 1.0],
            [1.0, 0.0, nan],
            [0.0, nan, nan],
            [1.0, 1.0, nan],
        ]
    )
    r = np.array([[1, 1, 1], [1, 1, 0], [1, 0, 0], [1, 1, 0]])
    s = np.array([[1, 1, 1], [1, 1, 1], [1, 0, 0], [1, 1, 0]])
    x0 = np.array([0, 1, 1, 0])
    return CohortDataset(y=y, z=z, w=w, r=r, s=s, x0=x0, n_levels=2)


def test_admissible_pattern_count_four_waves() -> None:
    pairs = admissible_patterns(4)
    assert len(pairs) == 10
    assert set(pairs) == set(PATTERN_TABLE_J3)


def test_classify_pattern_matches_frozen_table() -> None:
    for (r_vec, s_vec), expected in PATTERN_TABLE_J3.items():
        assert classify_pattern(r_vec, s_vec) == expected


def test_classify_pattern_rejects_everything_else() -> None:
    admissible = set(PATTERN_TABLE_J3)
    n_rejected = 0
    for r_vec in itertools.product((0, 1), repeat=4):
        for s_vec in itertools.product((0, 1), repeat=4):
            if (r_vec, s_vec) in admissible:
                continue
            with pytest.raises(PatternError):
                classify_pattern(r_vec, s_vec)
            n_rejected += 1
    assert n_rejected == 256 - 10


def test_classify_pattern_examples() -> None:
    assert classify_pattern((1, 0, 0, 0), (1, 1, 1, 0)) == ["O", "M*", "M", "nd"]
    assert classify_pattern((1, 1, 1, 1), (1, 1, 1, 1)) == ["O", "O", "O", "O"]
    assert classify_pattern((1, 1, 0, 0), (1, 1, 0, 0)) == ["O", "O", "nd", "nd"]


def test_validate_accepts_admissible_dataset() -> None:
    report = validate_cohort(_tiny_dataset())
    assert report.ok, report.as_lines()


def test_validate_flags_non_monotone_retention() -> None:
    ds = _tiny_dataset()
    ds.r[1] = [1, 0, 1]
    ds.y[1, 1] = np.nan
    ds.z[1, 1] = np.nan
    ds.w[1, 1] = np.nan
    ds.y[1, 2], ds.z[1, 2], ds.w[1, 2] = 3.0, 1.0, 0.0
    rules = {v.rule for v in validate_cohort(ds).violations}
    assert "non-monotone retention" in rules


def test_validate_flags_participation_after_death() -> None:
    ds = _tiny_dataset()
    ds.s[0] = [1, 1, 0]
    rules = {v.rule for v in validate_cohort(ds).violations}
    assert "participation after death" in rules


def test_validate_flags_presence_absence_mismatches() -> None:
    ds = _tiny_dataset()
    ds.y[2, 1] = 4.0  # present while dropped/dead
    ds.w[0, 2] = np.nan  # absent while observed
    rules = {v.rule for v in validate_cohort(ds).violations}
    assert "y present while unobserved" in rules
    assert "w absent while observed" in rules


def test_validate_flags_non_monotone_exposure_and_wave0() -> None:
    ds = _tiny_dataset()
    ds.z[0] = [0.0, 1.0, 0.0]
    rules = {v.rule for v in validate_cohort(ds).violations}
    assert "non-monotone exposure" in rules

    ds2 = _tiny_dataset()
    ds2.z[0, 0] = 1.0
    rules2 = {v.rule for v in validate_cohort(ds2).violations}
    assert "exposure at wave 0" in rules2

    ds3 = _tiny_dataset()
    ds3.r[3, 0] = 0
    ds3.y[3, 0] = np.nan
    ds3.z[3, 0] = np.nan
    ds3.w[3, 0] = np.nan
    rules3 = {v.rule for v in validate_cohort(ds3).violations}
    assert "wave-0 incomplete" in rules3


def test_validate_reports_locations() -> None:
    ds = _tiny_dataset()
    ds.s[0] = [1, 1, 0]
    report = validate_cohort(ds)
    lines = report.as_lines()
    assert any(line.startswith("0,2,") for line in lines)


def test_model_subset_rows_and_features() -> None:
    ds = _tiny_dataset()

    y2 = model_subset(ds, "Y", 2)
    assert y2.rows.tolist() == [0]
    assert y2.feature_names == ["y0", "y1", "z0", "z1", "z2", "w0", "w1", "w2", "x0_0", "x0_1"]
    assert y2.response.tolist() == [3.0]
    np.testing.assert_allclose(y2.X[0], [1.0, 2.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0])

    # survival at wave 1: everyone retained at wave 0 contributes, dead
    # individual included with response 0
    s1 = model_subset(ds, "S", 1)
    assert s1.rows.tolist() == [0, 1, 2, 3]
    assert s1.response.tolist() == [1.0, 1.0, 0.0, 1.0]
    assert s1.feature_names == ["y0", "z0", "w0", "x0_0", "x0_1"]

    # retention at wave 1: only the alive-at-1 contribute
    r1 = model_subset(ds, "R", 1)
    assert r1.rows.tolist() == [0, 1, 3]
    assert r1.response.tolist() == [1.0, 1.0, 1.0]

    # retention at wave 2: retained through 1 and alive at 2
    r2 = model_subset(ds, "R", 2)
    assert r2.rows.tolist() == [0, 1]
    assert r2.response.tolist() == [1.0, 0.0]

    z1 = model_subset(ds, "Z", 1)
    assert z1.feature_names == ["y0", "z0", "w0", "w1", "x0_0", "x0_1"]
    assert z1.rows.tolist() == [0, 1, 3]

    w0 = model_subset(ds, "W", 0)
    assert w0.feature_names == ["x0_0", "x0_1"]
    assert w0.rows.tolist() == [0, 1, 2, 3]


def test_model_subset_counts_monotone_in_wave() -> None:
    ds = _tiny_dataset()
    for kind in ("Y", "Z", "W", "R", "S"):
        start = 0 if kind in ("Y", "W") else 1
        counts = [model_subset(ds, kind, j).rows.size for j in range(start, ds.n_waves)]
        assert all(a >= b for a, b in zip(counts, counts[1:]))


def test_model_subset_errors() -> None:
    ds = _tiny_dataset()
    with pytest.raises(ValueError):
        model_subset(ds, "Q", 1)
    with pytest.raises(ValueError):
        model_subset(ds, "S", 0)
    all_dead = _tiny_dataset()
    all_dead.s[:, 1:] = 0
    all_dead.r[:, 1:] = 0
    all_dead.y[:, 1:] = np.nan
    all_dead.z[:, 1:] = np.nan
    all_dead.w[:, 1:] = np.nan
    with pytest.raises(UnfittableFactorError):
        model_subset(all_dead, "Y", 1)


def test_feature_layout_wave0_has_no_lags() -> None:
    assert feature_layout("Y", 0, 3) == ["z0", "w0", "x0_0", "x0_1", "x0_2"]
    assert feature_layout("W", 0, 2) == ["x0_0", "x0_1"]


def test_csv_round_trip(tmp_path) -> None:
    ds = _tiny_dataset()
    path = tmp_path / "cohort.csv"
    write_cohort_csv(ds, str(path))
    back = read_cohort_csv(str(path), n_levels=2)
    assert validate_cohort(back).ok
    np.testing.assert_array_equal(back.r, ds.r)
    np.testing.assert_array_equal(back.s, ds.s)
    np.testing.assert_array_equal(back.x0, ds.x0)
    np.testing.assert_array_equal(np.isnan(back.y), np.isnan(ds.y))
    np.testing.assert_allclose(back.y[~np.isnan(ds.y)], ds.y[~np.isnan(ds.y)])
    np.testing.assert_allclose(back.z[~np.isnan(ds.z)], ds.z[~np.isnan(ds.z)])
    np.testing.assert_allclose(back.w[~np.isnan(ds.w)], ds.w[~np.isnan(ds.w)])


def test_schema_round_trip(tmp_path) -> None:
    path = tmp_path / "schema.json"
    write_schema(str(path), 4, {0: "a", 3: "d"})
    schema = read_schema(str(path))
    assert schema["n_levels"] == 4
    assert schema["labels"] == {0: "a", 3: "d"}
