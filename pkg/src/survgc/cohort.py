"""Longitudinal cohort data model with truncation by death and monotone dropout.

A cohort records ``n`` individuals over waves ``0..J``.  At each wave an
individual has a survival indicator ``s`` (death is absorbing), a
retention indicator ``r`` (dropout is absorbing and requires being
alive), and — whenever retained and alive — an outcome ``y``, a binary
exposure ``z`` (monotone: once exposed, always exposed), and a binary
time-varying covariate ``w``.  A saturated baseline covariate is stored
as a single cell index ``x0`` in ``0..L-1``.

The module provides validation against the admissibility rules, the
classification of each individual's wave-by-wave outcome status
(observed / missing / first-missing / dead), the per-factor fitting
subsets and conditioning feature layouts used by the observed-data
models, and long-format CSV round-tripping with a sidecar schema for
the baseline cells.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

__all__ = [
    "CohortDataset",
    "ModelData",
    "PatternError",
    "UnfittableFactorError",
    "ValidationReport",
    "Violation",
    "admissible_patterns",
    "classify_pattern",
    "model_subset",
    "read_cohort_csv",
    "read_schema",
    "validate_cohort",
    "write_cohort_csv",
    "write_schema",
]

#: Wave-level outcome statuses: observed, missing (first wave after
#: dropout, still alive), missing (later waves while alive), dead.
STATUS_OBSERVED = "O"
STATUS_FIRST_MISSING = "M*"
STATUS_MISSING = "M"
STATUS_DEAD = "nd"

MODEL_KINDS = ("Y", "Z", "W", "R", "S")


class PatternError(ValueError):
    """Raised for a retention/survival pattern outside the admissible set."""


class UnfittableFactorError(ValueError):
    """Raised when a model factor has no rows to fit on at some wave."""


@dataclass
class CohortDataset:
    """Arrays of shape ``(n, J+1)`` describing one cohort.

    Parameters
    ----------
    y, z, w : numpy.ndarray
        Float arrays with ``nan`` wherever the value is unobserved
        (``z`` and ``w`` are 0/1 when present).
    r, s : numpy.ndarray
        Integer 0/1 retention and survival indicators, defined at every
        wave for every individual.
    x0 : numpy.ndarray
        Baseline cell index per individual, in ``0..n_levels-1``.
    n_levels : int
        Number of saturated baseline cells ``L``.
    ids : numpy.ndarray, optional
        Individual identifiers; defaults to ``0..n-1``.
    """

    y: np.ndarray
    z: np.ndarray
    w: np.ndarray
    r: np.ndarray
    s: np.ndarray
    x0: np.ndarray
    n_levels: int
    ids: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        self.y = np.asarray(self.y, dtype=float)
        self.z = np.asarray(self.z, dtype=float)
        self.w = np.asarray(self.w, dtype=float)
        self.r = np.asarray(self.r)
        self.s = np.asarray(self.s)
        self.x0 = np.asarray(self.x0)
        if self.ids is None:
            self.ids = np.arange(self.y.shape[0])
        else:
            self.ids = np.asarray(self.ids)

    @property
    def n_individuals(self) -> int:
        return self.y.shape[0]

    @property
    def n_waves(self) -> int:
        """Number of waves ``J + 1`` (wave indices ``0..J``)."""
        return self.y.shape[1]

    @property
    def last_wave(self) -> int:
        """Index ``J`` of the final wave."""
        return self.y.shape[1] - 1


@dataclass
class Violation:
    """One validation failure, locatable by individual and wave."""

    individual: object
    wave: int
    rule: str

    def as_line(self) -> str:
        return f"{self.individual},{self.wave},{self.rule}"


@dataclass
class ValidationReport:
    """Collection of admissibility violations; empty means admissible."""

    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_lines(self) -> list[str]:
        return [v.as_line() for v in self.violations]

    def __len__(self) -> int:
        return len(self.violations)


def _is_binary(a: np.ndarray) -> np.ndarray:
    """Elementwise check that values are 0 or 1 (nan allowed)."""
    return np.isnan(a) | (a == 0) | (a == 1)


def validate_cohort(dataset: CohortDataset) -> ValidationReport:
    """Check every admissibility rule and report all violations.

    Nothing is repaired: a malformed record produces one violation per
    broken rule, identified by individual id, wave, and rule name.

    Parameters
    ----------
    dataset : CohortDataset

    Returns
    -------
    ValidationReport
        Empty if and only if the dataset is admissible.
    """
    report = ValidationReport()
    n, m = dataset.y.shape
    ids = dataset.ids

    def flag(i: int, wave: int, rule: str) -> None:
        report.violations.append(Violation(ids[i], wave, rule))

    shapes = {
        "y": dataset.y,
        "z": dataset.z,
        "w": dataset.w,
        "r": dataset.r,
        "s": dataset.s,
    }
    for name, arr in shapes.items():
        if arr.shape != (n, m):
            raise ValueError(f"array {name!r} has shape {arr.shape}, expected {(n, m)}")

    r = np.asarray(dataset.r, dtype=float)
    s = np.asarray(dataset.s, dtype=float)

    for i in range(n):
        ri, si = r[i], s[i]
        for j in range(m):
            if not (ri[j] == 0 or ri[j] == 1):
                flag(i, j, "non-binary retention")
            if not (si[j] == 0 or si[j] == 1):
                flag(i, j, "non-binary survival")
        if ri[0] != 1 or si[0] != 1:
            flag(i, 0, "wave-0 incomplete")
        for j in range(1, m):
            if ri[j] > ri[j - 1]:
                flag(i, j, "non-monotone retention")
            if si[j] > si[j - 1]:
                flag(i, j, "non-monotone survival")
        for j in range(m):
            if ri[j] == 1 and si[j] == 0:
                flag(i, j, "participation after death")

        observed = (ri == 1) & (si == 1)
        for name, arr in (("y", dataset.y), ("z", dataset.z), ("w", dataset.w)):
            vals = arr[i]
            for j in range(m):
                if observed[j] and np.isnan(vals[j]):
                    flag(i, j, f"{name} absent while observed")
                if not observed[j] and not np.isnan(vals[j]):
                    flag(i, j, f"{name} present while unobserved")

        zi = dataset.z[i]
        for j in range(m):
            if not np.isnan(zi[j]) and zi[j] not in (0.0, 1.0):
                flag(i, j, "non-binary exposure")
            wi = dataset.w[i, j]
            if not np.isnan(wi) and wi not in (0.0, 1.0):
                flag(i, j, "non-binary covariate")
        if not np.isnan(zi[0]) and zi[0] != 0:
            flag(i, 0, "exposure at wave 0")
        prev = 0.0
        for j in range(m):
            if np.isnan(zi[j]):
                continue
            if zi[j] < prev:
                flag(i, j, "non-monotone exposure")
            prev = max(prev, zi[j])

        cell = dataset.x0[i]
        if not (0 <= int(cell) < dataset.n_levels) or int(cell) != cell:
            flag(i, 0, "baseline cell out of range")

    return report


def classify_pattern(r_bar: np.ndarray, s_bar: np.ndarray) -> list[str]:
    """Classify per-wave outcome status from a retention/survival pair.

    Statuses are ``"O"`` (observed), ``"M*"`` (first unobserved wave
    after dropout, individual alive), ``"M"`` (later unobserved waves
    while alive), and ``"nd"`` (dead, outcome undefined).  Death takes
    precedence over missingness.

    Parameters
    ----------
    r_bar, s_bar : array-like of 0/1
        Retention and survival vectors over waves ``0..J``.

    Returns
    -------
    list of str
        One status per wave.

    Raises
    ------
    PatternError
        If the pair is not in the admissible set (non-monotone, wave 0
        incomplete, or retention of a dead individual).
    """
    r_vec = np.asarray(r_bar, dtype=int)
    s_vec = np.asarray(s_bar, dtype=int)
    if r_vec.shape != s_vec.shape or r_vec.ndim != 1:
        raise PatternError("retention and survival vectors must be 1-d of equal length")
    if not (set(np.unique(r_vec)) <= {0, 1} and set(np.unique(s_vec)) <= {0, 1}):
        raise PatternError("inadmissible retention/survival pattern")
    if r_vec[0] != 1 or s_vec[0] != 1:
        raise PatternError("inadmissible retention/survival pattern")
    if np.any(np.diff(r_vec) > 0) or np.any(np.diff(s_vec) > 0):
        raise PatternError("inadmissible retention/survival pattern")
    if np.any(r_vec > s_vec):
        raise PatternError("inadmissible retention/survival pattern")

    statuses = []
    for j in range(len(r_vec)):
        if s_vec[j] == 0:
            statuses.append(STATUS_DEAD)
        elif r_vec[j] == 1:
            statuses.append(STATUS_OBSERVED)
        elif j >= 1 and r_vec[j - 1] == 1:
            statuses.append(STATUS_FIRST_MISSING)
        else:
            statuses.append(STATUS_MISSING)
    return statuses


def admissible_patterns(n_waves: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Enumerate all admissible ``(r_bar, s_bar)`` pattern pairs.

    A pair is admissible when both vectors are monotone non-increasing,
    start at 1, and satisfy ``r <= s`` componentwise.  For four waves
    there are exactly ten such pairs.

    Parameters
    ----------
    n_waves : int
        Number of waves ``J + 1``.

    Returns
    -------
    list of (tuple, tuple)
        Admissible pairs in lexicographic order.
    """
    pairs = []
    # A monotone vector starting at 1 is determined by its drop index
    # (first wave equal to 0), ranging over 1..n_waves with n_waves
    # meaning "never drops".
    for death in range(1, n_waves + 1):
        for drop in range(1, death + 1):
            r_vec = tuple(1 if j < drop else 0 for j in range(n_waves))
            s_vec = tuple(1 if j < death else 0 for j in range(n_waves))
            pairs.append((r_vec, s_vec))
    return sorted(pairs)


@dataclass
class ModelData:
    """Design matrix and response for one factor at one wave."""

    X: np.ndarray
    response: np.ndarray
    feature_names: list[str]
    rows: np.ndarray  # indices into the cohort


def feature_layout(model: str, wave: int, n_levels: int) -> list[str]:
    """Conditioning feature names for a factor at a wave.

    The outcome factor at wave ``j`` conditions on lagged outcomes
    ``y_0..y_{j-1}``, exposures through the current wave
    ``z_0..z_j``, covariates through the current wave ``w_0..w_j``, and
    the baseline cell.  The exposure factor conditions on lagged
    exposures but the current covariate; the covariate, retention, and
    survival factors condition on strictly lagged history.  The
    baseline cell enters as one-hot columns ``x0_0..x0_{L-1}``.
    """
    if model not in MODEL_KINDS:
        raise ValueError(f"unknown model kind {model!r}")
    j = wave
    y_hi = j  # y_0 .. y_{j-1}
    if model == "Y":
        z_hi, w_hi = j + 1, j + 1
    elif model == "Z":
        z_hi, w_hi = j, j + 1
    else:  # W, R, S: strictly lagged history
        z_hi, w_hi = j, j
    names = [f"y{k}" for k in range(y_hi)]
    names += [f"z{k}" for k in range(z_hi)]
    names += [f"w{k}" for k in range(w_hi)]
    names += [f"x0_{c}" for c in range(n_levels)]
    return names


def _history_matrix(dataset: CohortDataset, model: str, wave: int, rows: np.ndarray) -> np.ndarray:
    j = wave
    if model == "Y":
        blocks = [dataset.y[rows, :j], dataset.z[rows, : j + 1], dataset.w[rows, : j + 1]]
    elif model == "Z":
        blocks = [dataset.y[rows, :j], dataset.z[rows, :j], dataset.w[rows, : j + 1]]
    else:
        blocks = [dataset.y[rows, :j], dataset.z[rows, :j], dataset.w[rows, :j]]
    onehot = np.zeros((rows.size, dataset.n_levels))
    onehot[np.arange(rows.size), dataset.x0[rows].astype(int)] = 1.0
    blocks.append(onehot)
    return np.hstack([np.asarray(b, dtype=float) for b in blocks])


def model_subset(dataset: CohortDataset, model: str, wave: int) -> ModelData:
    """Rows, features, and response for fitting one factor at one wave.

    The subsets implement the factorized observed-data likelihood: the
    outcome, exposure, and covariate factors are fit among individuals
    retained (hence alive) through the wave; the survival factor among
    those retained through the previous wave; the retention factor
    among those retained through the previous wave and alive at the
    current one.

    Parameters
    ----------
    dataset : CohortDataset
        A validated cohort.
    model : {"Y", "Z", "W", "R", "S"}
    wave : int
        Wave index ``j``; ``Y`` and ``W`` allow ``j >= 0``, the others
        ``j >= 1`` (survival, retention, and exposure are degenerate at
        wave 0).

    Returns
    -------
    ModelData

    Raises
    ------
    UnfittableFactorError
        If no rows satisfy the subset condition.
    ValueError
        For an unknown model kind or an out-of-range wave.
    """
    if model not in MODEL_KINDS:
        raise ValueError(f"unknown model kind {model!r}")
    j = wave
    max_j = dataset.last_wave
    min_j = 0 if model in ("Y", "W") else 1
    if not (min_j <= j <= max_j):
        raise ValueError(f"wave {j} out of range for model {model!r}")

    r = np.asarray(dataset.r, dtype=int)
    s = np.asarray(dataset.s, dtype=int)
    retained_through = np.cumprod(r, axis=1)
    if model in ("Y", "Z", "W"):
        mask = retained_through[:, j] == 1
        response = {"Y": dataset.y, "Z": dataset.z, "W": dataset.w}[model][:, j]
    elif model == "S":
        mask = retained_through[:, j - 1] == 1
        response = s[:, j].astype(float)
    else:  # R
        mask = (retained_through[:, j - 1] == 1) & (s[:, j] == 1)
        response = r[:, j].astype(float)

    rows = np.flatnonzero(mask)
    if rows.size == 0:
        raise UnfittableFactorError(f"unfittable factor: model {model} at wave {j}")
    X = _history_matrix(dataset, model, j, rows)
    names = feature_layout(model, j, dataset.n_levels)
    return ModelData(X=X, response=np.asarray(response, dtype=float)[rows], feature_names=names, rows=rows)


# ---------------------------------------------------------------------------
# Long-format CSV and sidecar schema


def write_cohort_csv(dataset: CohortDataset, path: str) -> None:
    """Write one row per (individual, wave); absent values are empty fields."""
    n, m = dataset.y.shape
    records = []
    for i in range(n):
        for j in range(m):
            records.append(
                {
                    "id": dataset.ids[i],
                    "wave": j,
                    "y": dataset.y[i, j],
                    "z": dataset.z[i, j],
                    "w": dataset.w[i, j],
                    "r": int(dataset.r[i, j]),
                    "s": int(dataset.s[i, j]),
                    "x0": int(dataset.x0[i]),
                }
            )
    frame = pd.DataFrame.from_records(records)
    for col in ("z", "w"):
        frame[col] = frame[col].map(lambda v: "" if pd.isna(v) else str(int(v)))
    frame["y"] = frame["y"].map(lambda v: "" if pd.isna(v) else repr(float(v)))
    frame.to_csv(path, index=False)


def read_cohort_csv(path: str, n_levels: int | None = None) -> CohortDataset:
    """Read a long-format cohort CSV written by :func:`write_cohort_csv`.

    Parameters
    ----------
    path : str
    n_levels : int, optional
        Number of baseline cells; defaults to ``max(x0) + 1``.
    """
    frame = pd.read_csv(path)
    required = {"id", "wave", "y", "z", "w", "r", "s", "x0"}
    missing = required - set(frame.columns)
    if missing:
        raise ValueError(f"cohort CSV missing columns: {sorted(missing)}")
    frame = frame.sort_values(["id", "wave"], kind="stable")
    uids, first_pos = np.unique(frame["id"].to_numpy(), return_index=True)
    # preserve file order of individuals
    uids = uids[np.argsort(first_pos, kind="stable")]
    waves = np.sort(frame["wave"].unique())
    m = len(waves)
    if not np.array_equal(waves, np.arange(m)):
        raise ValueError("waves must be 0..J for every individual")
    n = len(uids)
    y = np.full((n, m), np.nan)
    z = np.full((n, m), np.nan)
    w = np.full((n, m), np.nan)
    r = np.zeros((n, m), dtype=int)
    s = np.zeros((n, m), dtype=int)
    x0 = np.zeros(n, dtype=int)
    index = {uid: i for i, uid in enumerate(uids)}
    counts = np.zeros(n, dtype=int)
    for row in frame.itertuples(index=False):
        i = index[row.id]
        j = int(row.wave)
        y[i, j] = float(row.y) if not pd.isna(row.y) else np.nan
        z[i, j] = float(row.z) if not pd.isna(row.z) else np.nan
        w[i, j] = float(row.w) if not pd.isna(row.w) else np.nan
        r[i, j] = int(row.r)
        s[i, j] = int(row.s)
        x0[i] = int(row.x0)
        counts[i] += 1
    if np.any(counts != m):
        bad = uids[counts != m]
        raise ValueError(f"individuals with incomplete wave records: {bad[:5].tolist()}")
    levels = int(n_levels) if n_levels is not None else int(x0.max()) + 1
    return CohortDataset(y=y, z=z, w=w, r=r, s=s, x0=x0, n_levels=levels, ids=uids)


def write_schema(path: str, n_levels: int, labels: dict[int, str] | None = None) -> None:
    """Write the sidecar schema mapping baseline cell index to labels."""
    payload = {
        "n_levels": int(n_levels),
        "labels": {str(k): v for k, v in (labels or {}).items()},
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)


def read_schema(path: str) -> dict:
    """Read a sidecar schema; returns ``{"n_levels": L, "labels": {...}}``."""
    with open(path, encoding="utf-8") as handle:
        payload = json.load(handle)
    if "n_levels" not in payload:
        raise ValueError("schema missing 'n_levels'")
    return {
        "n_levels": int(payload["n_levels"]),
        "labels": {int(k): v for k, v in payload.get("labels", {}).items()},
    }
