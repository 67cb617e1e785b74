"""Command-line front end: simulate, validate, fit, estimate, compare.

Every run is driven by a :class:`RunConfig`, assembled from (in
increasing precedence) built-in defaults, an optional ``key = value``
configuration file, the ``SURVGC_WORKERS`` environment variable (worker
pool size only), and command-line flags.  Each command that writes
files also writes a ``manifest.json`` beside them recording the
resolved configuration, the master seed, SHA-256 hashes of every input
file, and package versions, so any output directory is traceable to
its inputs.

Exit codes: 0 on success, 1 when a cohort fails admissibility
validation, 2 on usage or runtime errors (unknown flags, missing
files, stage mismatches).
"""

from __future__ import annotations

import hashlib
import json
import os
import sys
from argparse import ArgumentParser
from collections.abc import Sequence
from dataclasses import dataclass, fields, replace

import numpy as np
import pandas as pd

from . import bart
from .baselines import GlmConfig, bpgc_estimate, fit_glm_stack, iptw_estimate
from .cohort import (
    CohortDataset,
    read_cohort_csv,
    read_schema,
    validate_cohort,
    write_cohort_csv,
    write_schema,
)
from .dgp import PRESETS, generate_cohort, oracle_sace, oracle_sace_exact, preset
from .diagnostics import lpml, summarize, trace_stats
from .gcomp import EstimateConfig, SaceResult, _effective_bart_config, estimate_sace
from .obsmodels import dataset_fingerprint, fit_stack, load_stack, save_stack
from .sensitivity import point_mass

__all__ = [
    "RunConfig",
    "build_parser",
    "main",
    "run",
]

_METHODS = ("bsp", "bp", "iptw-sw", "iptw-w")
_METHOD_LABELS = {"bsp": "BSP-GC", "bp": "BP-GC", "iptw-sw": "IPTW-SW", "iptw-w": "IPTW-W"}
_WORKERS_ENV = "SURVGC_WORKERS"
_MANIFEST_NAME = "manifest.json"

# value parsers per configuration key
_INT_KEYS = frozenset(
    {
        "seed",
        "chains",
        "burn",
        "keep",
        "pseudo",
        "blocks",
        "workers",
        "bootstrap",
        "n",
        "trees",
        "trees_y",
        "trees_z",
        "trees_w",
        "trees_r",
        "trees_s",
    }
)
_FLOATS_KEYS = frozenset({"xi", "gamma", "delta", "nu"})
_STRS_KEYS = frozenset({"methods"})


class _UsageError(Exception):
    """Bad invocation or inconsistent stages; maps to exit code 2."""


class _ValidationFailure(Exception):
    """Cohort admissibility violations; maps to exit code 1."""


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings for one command invocation.

    The same object round-trips losslessly through the ``key = value``
    text format (:meth:`to_text` / :meth:`from_text`), so a run can be
    reproduced from the configuration echoed into its manifest.

    Parameters
    ----------
    command : str
        Subcommand name.
    data, out, schema : str, optional
        Cohort CSV path, output directory, and sidecar schema path.
    dgp : str, optional
        Generating-design preset name, or a file containing
        ``preset = <name>``.
    n : int, optional
        Cohort size for ``simulate``.
    from_fit : str, optional
        Directory written by ``fit``; ``estimate`` reuses its stacks.
    samples : str, optional
        Effect-sample CSV read by ``summary``.
    seed, chains, burn, keep, pseudo, blocks : int
        Sampling schedule: master seed, chain count, burn-in sweeps,
        kept draws per chain, pseudo-sample rows, and integration
        blocks.
    workers : int, optional
        Worker processes for chain fitting; defaults to the available
        parallelism.  Chains beyond the pool size are queued.
    chi_variant, gamma_mode : str
        Dropout-resolution variant (``A3`` or ``FirstPrinciples``) and
        outcome-shift mode (``first`` or ``all``).
    xi, gamma, delta, nu : tuple of float, optional
        Fixed sensitivity values (one value, or one per wave ``1..J``).
        Leaving all four unset samples them from their priors.
    trees, trees_y, trees_z, trees_w, trees_r, trees_s : int, optional
        Ensemble sizes: a global override plus per-factor overrides.
    methods : tuple of str
        Estimators run by ``compare``.
    bootstrap : int
        Resample count for the weighting estimators' intervals.
    """

    command: str = ""
    data: str | None = None
    out: str | None = None
    schema: str | None = None
    dgp: str | None = None
    n: int | None = None
    from_fit: str | None = None
    samples: str | None = None
    seed: int = 0
    chains: int = 4
    burn: int = 250
    keep: int = 25
    pseudo: int = 5000
    blocks: int = 25
    workers: int | None = None
    chi_variant: str = "A3"
    gamma_mode: str = "first"
    xi: tuple[float, ...] | None = None
    gamma: tuple[float, ...] | None = None
    delta: tuple[float, ...] | None = None
    nu: tuple[float, ...] | None = None
    trees: int | None = None
    trees_y: int | None = None
    trees_z: int | None = None
    trees_w: int | None = None
    trees_r: int | None = None
    trees_s: int | None = None
    methods: tuple[str, ...] = _METHODS
    bootstrap: int = 5000

    def __post_init__(self) -> None:
        for name in ("chains", "keep", "pseudo", "blocks"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.workers is not None and self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.burn < 0:
            raise ValueError("burn must be >= 0")
        if self.bootstrap < 0:
            raise ValueError("bootstrap must be >= 0")
        if self.n is not None and self.n < 1:
            raise ValueError("n must be >= 1")
        if self.chi_variant not in ("A3", "FirstPrinciples"):
            raise ValueError("chi_variant must be 'A3' or 'FirstPrinciples'")
        if self.gamma_mode not in ("first", "all"):
            raise ValueError("gamma_mode must be 'first' or 'all'")
        for name in ("trees", "trees_y", "trees_z", "trees_w", "trees_r", "trees_s"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ValueError(f"{name} must be >= 1")
        unknown = set(self.methods) - set(_METHODS)
        if unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}")
        if not self.methods:
            raise ValueError("methods must not be empty")

    def to_text(self) -> str:
        """Serialize as ``key = value`` lines; ``None`` fields are omitted."""
        lines = []
        for field in fields(self):
            value = getattr(self, field.name)
            if value is None:
                continue
            if isinstance(value, tuple):
                value = ",".join(repr(v) if isinstance(v, float) else str(v) for v in value)
            lines.append(f"{field.name} = {value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> RunConfig:
        """Parse the format written by :meth:`to_text`."""
        return cls(**_coerce_mapping(_parse_items(text)))


def _parse_items(text: str) -> dict[str, str]:
    """Split ``key = value`` lines; ``#`` comments and blanks are skipped."""
    items: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if not key:
            raise ValueError(f"line {lineno}: empty key")
        items[key] = value.strip()
    return items


_FIELD_NAMES = frozenset(f.name for f in fields(RunConfig))


def _coerce_value(key: str, value: str):
    """Convert one raw string to the typed value of a configuration key."""
    if key not in _FIELD_NAMES:
        raise ValueError(f"unknown configuration key {key!r}")
    if key in _INT_KEYS:
        return int(value)
    if key in _FLOATS_KEYS:
        parts = [p.strip() for p in value.split(",") if p.strip()]
        if not parts:
            raise ValueError(f"{key} needs at least one value")
        return tuple(float(p) for p in parts)
    if key in _STRS_KEYS:
        parts = [p.strip() for p in value.split(",") if p.strip()]
        return tuple(parts)
    return value


def _coerce_mapping(raw: dict[str, str]) -> dict:
    return {key: _coerce_value(key, value) for key, value in raw.items()}


# ---------------------------------------------------------------------------
# Argument parsing and configuration resolution


def build_parser() -> ArgumentParser:
    """Build the argument parser with one subparser per command."""
    parser = ArgumentParser(
        prog="survgc",
        description="Survivor-stratum effects of a monotone longitudinal exposure.",
    )
    sub = parser.add_subparsers(dest="command")

    def add(name: str, help_text: str, *keys: str, positional: str | None = None):
        p = sub.add_parser(name, help=help_text)
        if positional is not None:
            p.add_argument(positional, type=str)
        p.add_argument("--config", type=str, default=None, help="key = value configuration file")
        for key in keys:
            flag = "--" + key.replace("_", "-")
            p.add_argument(flag, type=str, default=None, dest=key)
        return p

    sampling = ("seed", "chains", "burn", "keep")
    trees = ("trees", "trees_y", "trees_z", "trees_w", "trees_r", "trees_s")
    integrate = ("pseudo", "blocks", "chi_variant", "gamma_mode", "workers")
    sens = ("xi", "gamma", "delta", "nu")

    add("validate", "check a cohort CSV against the admissibility rules",
        "schema", positional="data")
    add("simulate", "draw a synthetic cohort and its true effect",
        "dgp", "n", "seed", "out")
    add("fit", "fit the observed-data models and save the posterior stacks",
        "data", "schema", "out", *sampling, *trees)
    add("estimate", "posterior effect samples, one-shot or from a saved fit",
        "data", "schema", "out", "from_fit", *sampling, *trees, *integrate, *sens)
    add("compare", "run the estimators side by side on one cohort",
        "data", "schema", "out", "methods", "bootstrap", *sampling, *trees, *integrate)
    add("lpml", "pseudo marginal likelihood of the tree and parametric fits",
        "data", "schema", "out", "seed", "burn", "keep", *trees)
    add("summary", "summarize previously written effect samples",
        "out", positional="samples")
    return parser


def resolve_config(args) -> tuple[RunConfig, frozenset[str]]:
    """Merge defaults, config file, environment, and flags (flags win).

    Returns the resolved configuration and the set of keys given
    explicitly on the command line.
    """
    merged: dict = {}
    config_path = getattr(args, "config", None)
    if config_path is not None:
        with open(config_path, encoding="utf-8") as handle:
            file_items = _parse_items(handle.read())
        file_items.pop("command", None)
        merged.update(_coerce_mapping(file_items))
    explicit = frozenset(
        key for key in _FIELD_NAMES if key != "command" and getattr(args, key, None) is not None
    )
    if "workers" not in explicit and _WORKERS_ENV in os.environ:
        merged["workers"] = int(os.environ[_WORKERS_ENV])
    for key in explicit:
        merged[key] = _coerce_value(key, getattr(args, key))
    merged["command"] = args.command
    return RunConfig(**merged), explicit


# ---------------------------------------------------------------------------
# Shared helpers


def _require(cfg: RunConfig, *names: str) -> None:
    for name in names:
        if getattr(cfg, name) is None:
            raise _UsageError(f"missing required option '--{name.replace('_', '-')}'")


def _schema_path_for(data: str) -> str:
    base = data[:-4] if data.endswith(".csv") else data
    return base + ".schema.json"


def _read_dataset(cfg: RunConfig) -> CohortDataset:
    _require(cfg, "data")
    if not os.path.exists(cfg.data):
        raise FileNotFoundError(f"no such file: {cfg.data}")
    schema_path = cfg.schema or _schema_path_for(cfg.data)
    n_levels = None
    if os.path.exists(schema_path):
        n_levels = read_schema(schema_path)["n_levels"]
    elif cfg.schema is not None:
        raise FileNotFoundError(f"no such file: {cfg.schema}")
    return read_cohort_csv(cfg.data, n_levels=n_levels)


def _check_admissible(dataset: CohortDataset) -> None:
    report = validate_cohort(dataset)
    if not report.ok:
        lines = "\n".join(report.as_lines())
        raise _ValidationFailure(f"cohort fails validation ({len(report)} violations):\n{lines}")


def _sensitivity_values(values: tuple[float, ...] | None, last_wave: int, name: str):
    if values is None:
        return 0.0
    if len(values) == 1:
        return values[0]
    if len(values) == last_wave:
        return np.asarray(values, dtype=float)
    raise _UsageError(f"--{name} expects 1 or {last_wave} values, got {len(values)}")


def _bart_config(cfg: RunConfig):
    """Per-factor ensemble sizes, or ``None`` for the built-in default."""
    per_factor = {
        "Y": cfg.trees_y,
        "Z": cfg.trees_z,
        "W": cfg.trees_w,
        "R": cfg.trees_r,
        "S": cfg.trees_s,
    }
    if cfg.trees is None and all(v is None for v in per_factor.values()):
        return None
    default = bart.BartConfig()
    return {
        factor: bart.BartConfig(n_trees=override or cfg.trees or default.n_trees)
        for factor, override in per_factor.items()
    }


def _estimate_config(cfg: RunConfig, last_wave: int) -> EstimateConfig:
    """Translate a run configuration into engine settings."""
    sens = None
    if any(getattr(cfg, name) is not None for name in ("xi", "gamma", "delta", "nu")):
        sens = point_mass(
            last_wave,
            xi=_sensitivity_values(cfg.xi, last_wave, "xi"),
            gamma=_sensitivity_values(cfg.gamma, last_wave, "gamma"),
            delta=_sensitivity_values(cfg.delta, last_wave, "delta"),
            nu=_sensitivity_values(cfg.nu, last_wave, "nu"),
        )
    workers = cfg.workers if cfg.workers is not None else (os.cpu_count() or 1)
    return EstimateConfig(
        master_seed=cfg.seed,
        n_chains=cfg.chains,
        n_keep_per_chain=cfg.keep,
        n_burn=cfg.burn,
        n_pseudo=cfg.pseudo,
        n_blocks=cfg.blocks,
        chi_variant=cfg.chi_variant,
        gamma_mode=cfg.gamma_mode,
        sensitivity=sens,
        bart_config=_bart_config(cfg),
        validate=False,
        n_workers=workers,
    )


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(_jsonable(payload), handle, indent=2, sort_keys=True)
        handle.write("\n")


def _versions() -> dict[str, str]:
    from importlib.metadata import PackageNotFoundError, version

    import platform

    out = {"python": platform.python_version()}
    for name in ("survgc", "numpy", "scipy", "pandas"):
        try:
            out[name] = version(name)
        except PackageNotFoundError:
            out[name] = "unknown"
    return out


def _write_manifest(
    out_dir: str,
    cfg: RunConfig,
    inputs: dict[str, str],
    outputs: Sequence[str],
    extra: dict | None = None,
) -> str:
    """Write the traceability record beside a command's outputs."""
    config_map = {}
    for field in fields(cfg):
        value = getattr(cfg, field.name)
        if value is not None:
            config_map[field.name] = list(value) if isinstance(value, tuple) else value
    manifest = {
        "command": cfg.command,
        "config": config_map,
        "master_seed": cfg.seed,
        "inputs": {
            label: {"path": path, "sha256": _sha256(path)} for label, path in inputs.items()
        },
        "outputs": sorted(outputs),
        "versions": _versions(),
    }
    if extra:
        manifest.update(extra)
    path = os.path.join(out_dir, _MANIFEST_NAME)
    _write_json(path, manifest)
    return path


def _ensure_out(cfg: RunConfig) -> str:
    _require(cfg, "out")
    os.makedirs(cfg.out, exist_ok=True)
    return cfg.out


# ---------------------------------------------------------------------------
# Commands


def _cmd_validate(cfg: RunConfig, explicit: frozenset[str]) -> int:
    try:
        dataset = _read_dataset(cfg)
    except ValueError as exc:
        print(f"unreadable cohort: {exc}")
        return 1
    report = validate_cohort(dataset)
    if report.ok:
        print(
            f"ok: {dataset.y.shape[0]} individuals, waves 0..{dataset.last_wave}, "
            "no violations"
        )
        return 0
    for line in report.as_lines():
        print(line)
    print(f"{len(report)} violations")
    return 1


def _resolve_dgp(cfg: RunConfig) -> tuple:
    """Return the generating design and the config file path, if any."""
    _require(cfg, "dgp")
    if cfg.dgp in PRESETS:
        return preset(cfg.dgp), None
    if os.path.exists(cfg.dgp):
        with open(cfg.dgp, encoding="utf-8") as handle:
            items = _parse_items(handle.read())
        name = items.pop("preset", None)
        if name is None:
            raise _UsageError(f"{cfg.dgp}: design file must set 'preset = <name>'")
        if items:
            raise _UsageError(f"{cfg.dgp}: unknown design keys {sorted(items)}")
        return preset(name), cfg.dgp
    known = ", ".join(sorted(PRESETS))
    raise _UsageError(f"--dgp {cfg.dgp!r} is neither a preset ({known}) nor a file")


def _cmd_simulate(cfg: RunConfig, explicit: frozenset[str]) -> int:
    _require(cfg, "n")
    design, design_path = _resolve_dgp(cfg)
    out = _ensure_out(cfg)
    dataset, _ = generate_cohort(design, cfg.n, cfg.seed)
    cohort_path = os.path.join(out, "cohort.csv")
    schema_path = os.path.join(out, "cohort.schema.json")
    truth_path = os.path.join(out, "truth.json")
    write_cohort_csv(dataset, cohort_path)
    write_schema(schema_path, dataset.n_levels)
    if design.discrete:
        exact = oracle_sace_exact(design)
        truth = {
            "method": "exact-enumeration",
            "tau": float(exact["tau"]),
            "contrasts": np.asarray(exact["contrasts"])[1:],
            "weights": np.asarray(exact["weights"])[1:],
            "p_exposed": np.asarray(exact["p_exposed"])[1:],
        }
    else:
        tau, se = oracle_sace(design, master_seed=cfg.seed)
        truth = {"method": "monte-carlo", "tau": float(tau), "se": float(se)}
    _write_json(truth_path, truth)
    inputs = {"design": design_path} if design_path else {}
    _write_manifest(
        out,
        cfg,
        inputs,
        ["cohort.csv", "cohort.schema.json", "truth.json"],
        extra={"dataset_sha256": dataset_fingerprint(dataset)},
    )
    print(f"wrote {cohort_path}: n={cfg.n}, waves 0..{dataset.last_wave}, "
          f"true effect {truth['tau']:.6g}")
    return 0


def _stack_dir(out: str, chain: int) -> str:
    return os.path.join(out, "stacks", f"chain_{chain:03d}")


def _cmd_fit(cfg: RunConfig, explicit: frozenset[str]) -> int:
    dataset = _read_dataset(cfg)
    _check_admissible(dataset)
    out = _ensure_out(cfg)
    est = _estimate_config(cfg, dataset.last_wave)
    eff = _effective_bart_config(est)
    stack_dirs = []
    for chain in range(cfg.chains):
        draws = fit_stack(dataset, eff, cfg.seed, chain=chain, validate=False)
        directory = _stack_dir(out, chain)
        save_stack(directory, draws, meta={"chain": chain})
        stack_dirs.append(os.path.relpath(directory, out))
    _write_manifest(
        out,
        cfg,
        {"data": cfg.data},
        stack_dirs,
        extra={
            "dataset_sha256": dataset_fingerprint(dataset),
            "n_chains": cfg.chains,
            "n_keep_per_chain": cfg.keep,
            "n_burn": cfg.burn,
        },
    )
    print(f"fitted {cfg.chains} chains x {cfg.keep} draws; stacks under {out}/stacks")
    return 0


def _load_fit_manifest(from_fit: str) -> dict:
    path = os.path.join(from_fit, _MANIFEST_NAME)
    if not os.path.exists(path):
        raise _UsageError(f"no fit manifest at {path}")
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


def _adopt_fit_settings(
    cfg: RunConfig, explicit: frozenset[str], manifest: dict, fingerprint: str
) -> RunConfig:
    """Align estimate-stage settings with a saved fit, or refuse."""
    if manifest.get("dataset_sha256") != fingerprint:
        raise _UsageError("dataset hash mismatch between the fit and estimate stages")
    adopted = {
        "seed": manifest["master_seed"],
        "chains": manifest["n_chains"],
        "keep": manifest["n_keep_per_chain"],
        "burn": manifest["n_burn"],
    }
    for key, value in adopted.items():
        if key in explicit and getattr(cfg, key) != value:
            raise _UsageError(
                f"--{key} {getattr(cfg, key)} differs from the fit stage value {value}"
            )
    return replace(cfg, **adopted)


def _summarize_result(result: SaceResult, n_chains: int, keep: int) -> dict:
    stats = summarize(result.tau)
    payload = {
        "tau": {
            "mean": stats.mean,
            "sd": stats.sd,
            "q2_5": stats.q2_5,
            "q97_5": stats.q97_5,
        },
        "n_draws": result.n_draws,
        "n_chains": n_chains,
        "waves": result.contrasts.shape[1] - 1,
        "per_wave": {
            "contrast_mean": result.contrasts[:, 1:].mean(axis=0),
            "weight_mean": result.weights[:, 1:].mean(axis=0),
        },
        "psr": None,
    }
    if n_chains >= 2 and keep >= 4:
        trace = trace_stats(result.tau.reshape(n_chains, keep))
        payload["psr"] = {"tau": trace.psr, "flagged": bool(trace.flagged)}
    return payload


def _write_estimate_outputs(out: str, result: SaceResult) -> list[str]:
    n_draws = result.n_draws
    waves = np.arange(1, result.contrasts.shape[1])
    draw_idx = np.arange(n_draws)
    pd.DataFrame(
        {"draw": draw_idx, "chain": result.chain_index, "tau": result.tau}
    ).to_csv(os.path.join(out, "tau_samples.csv"), index=False)

    rep_draw = np.repeat(draw_idx, waves.size)
    rep_chain = np.repeat(result.chain_index, waves.size)
    rep_wave = np.tile(waves, n_draws)
    pd.DataFrame(
        {
            "draw": rep_draw,
            "chain": rep_chain,
            "wave": rep_wave,
            "contrast": result.contrasts[:, 1:].ravel(),
            "weight": result.weights[:, 1:].ravel(),
            "p_z": result.p_z[:, 1:].ravel(),
            "p_zp": result.p_zp[:, 1:].ravel(),
            "mu_z": result.mu_z[:, 1:].ravel(),
            "mu_zp": result.mu_zp[:, 1:].ravel(),
        }
    ).to_csv(os.path.join(out, "per_wave.csv"), index=False)

    pd.DataFrame(
        {
            "draw": rep_draw,
            "chain": rep_chain,
            "wave": rep_wave,
            "xi": result.sens_xi[:, 1:].ravel(),
            "gamma": result.sens_gamma[:, 1:].ravel(),
            "delta": result.sens_delta[:, 1:].ravel(),
            "nu": result.sens_nu[:, 1:].ravel(),
        }
    ).to_csv(os.path.join(out, "sensitivity_draws.csv"), index=False)
    return ["tau_samples.csv", "per_wave.csv", "sensitivity_draws.csv", "summary.json"]


def _cmd_estimate(cfg: RunConfig, explicit: frozenset[str]) -> int:
    dataset = _read_dataset(cfg)
    _check_admissible(dataset)
    out = _ensure_out(cfg)
    inputs = {"data": cfg.data}
    fit_chain = None
    if cfg.from_fit is not None:
        manifest = _load_fit_manifest(cfg.from_fit)
        cfg = _adopt_fit_settings(cfg, explicit, manifest, dataset_fingerprint(dataset))
        from_fit = cfg.from_fit
        fit_chain = lambda chain: load_stack(_stack_dir(from_fit, chain))[0]  # noqa: E731
        inputs["fit_manifest"] = os.path.join(from_fit, _MANIFEST_NAME)
    est = _estimate_config(cfg, dataset.last_wave)
    result = estimate_sace(dataset, est, fit_chain=fit_chain)
    summary = _summarize_result(result, cfg.chains, cfg.keep)
    summary["sensitivity"] = {"fixed": est.sensitivity is not None}
    outputs = _write_estimate_outputs(out, result)
    _write_json(os.path.join(out, "summary.json"), summary)
    _write_manifest(out, cfg, inputs, outputs,
                    extra={"dataset_sha256": dataset_fingerprint(dataset)})
    tau = summary["tau"]
    print(
        f"effect mean {tau['mean']:.6g} sd {tau['sd']:.6g} "
        f"95% interval [{tau['q2_5']:.6g}, {tau['q97_5']:.6g}] "
        f"({result.n_draws} draws)"
    )
    return 0


def _cmd_compare(cfg: RunConfig, explicit: frozenset[str]) -> int:
    dataset = _read_dataset(cfg)
    _check_admissible(dataset)
    out = _ensure_out(cfg)
    J = dataset.last_wave
    zero = replace(_estimate_config(cfg, J), sensitivity=point_mass(J))
    rows = []
    for method in cfg.methods:
        if method == "bsp":
            result = estimate_sace(dataset, zero)
            stats = summarize(result.tau)
            est, lo, hi = stats.mean, stats.q2_5, stats.q97_5
        elif method == "bp":
            result = bpgc_estimate(dataset, zero, simplified=True)
            stats = summarize(result.tau)
            est, lo, hi = stats.mean, stats.q2_5, stats.q97_5
        else:
            fit = iptw_estimate(
                dataset,
                stabilized=(method == "iptw-sw"),
                bootstrap_B=cfg.bootstrap,
                master_seed=cfg.seed,
                validate=False,
            )
            est = fit.tau
            lo, hi = fit.ci if fit.ci is not None else (np.nan, np.nan)
        label = _METHOD_LABELS[method]
        rows.append({"method": label, "estimate": est, "lo": lo, "hi": hi})
        print(f"{label}: {est:.6g} [{lo:.6g}, {hi:.6g}]")
    table_path = os.path.join(out, "compare.csv")
    pd.DataFrame(rows, columns=["method", "estimate", "lo", "hi"]).to_csv(
        table_path, index=False
    )
    _write_manifest(out, cfg, {"data": cfg.data}, ["compare.csv"],
                    extra={"dataset_sha256": dataset_fingerprint(dataset)})
    return 0


def _cmd_lpml(cfg: RunConfig, explicit: frozenset[str]) -> int:
    if cfg.keep < 2:
        raise _UsageError("lpml needs --keep >= 2 draws")
    dataset = _read_dataset(cfg)
    _check_admissible(dataset)
    out = _ensure_out(cfg)
    est = _estimate_config(cfg, dataset.last_wave)
    tree_stacks = fit_stack(
        dataset, _effective_bart_config(est), cfg.seed, chain=0, validate=False
    )
    glm_cfg = GlmConfig(n_burn=cfg.burn, n_keep=cfg.keep)
    glm_stacks = fit_glm_stack(dataset, glm_cfg, cfg.seed, chain=0, validate=False)
    tree_report = lpml(tree_stacks, dataset)
    glm_report = lpml(glm_stacks, dataset)
    payload = {
        "bsp": {
            "lpml": tree_report.total,
            "factors": tree_report.factor_totals,
            "n_draws": tree_report.n_draws,
        },
        "bp": {
            "lpml": glm_report.total,
            "factors": glm_report.factor_totals,
            "n_draws": glm_report.n_draws,
        },
        "difference": tree_report.total - glm_report.total,
    }
    _write_json(os.path.join(out, "lpml.json"), payload)
    pd.DataFrame(
        {
            "id": dataset.ids,
            "log_cpo_bsp": tree_report.log_cpo,
            "log_cpo_bp": glm_report.log_cpo,
        }
    ).to_csv(os.path.join(out, "cpo.csv"), index=False)
    _write_manifest(out, cfg, {"data": cfg.data}, ["lpml.json", "cpo.csv"],
                    extra={"dataset_sha256": dataset_fingerprint(dataset)})
    print(
        f"LPML sum-of-trees {tree_report.total:.3f}, parametric {glm_report.total:.3f}, "
        f"difference {payload['difference']:.3f}"
    )
    return 0


def _cmd_summary(cfg: RunConfig, explicit: frozenset[str]) -> int:
    _require(cfg, "samples")
    if not os.path.exists(cfg.samples):
        raise FileNotFoundError(f"no such file: {cfg.samples}")
    frame = pd.read_csv(cfg.samples)
    if "tau" not in frame.columns:
        raise _UsageError(f"{cfg.samples}: missing 'tau' column")
    tau = frame["tau"].to_numpy(dtype=float)
    stats = summarize(tau)
    payload = {
        "tau": {
            "mean": stats.mean,
            "sd": stats.sd,
            "q2_5": stats.q2_5,
            "q97_5": stats.q97_5,
        },
        "n_draws": tau.size,
        "psr": None,
    }
    if "chain" in frame.columns:
        chains = frame["chain"].to_numpy()
        labels, counts = np.unique(chains, return_counts=True)
        if labels.size >= 2 and counts.min() == counts.max() and counts.min() >= 4:
            per_chain = np.stack([tau[chains == c] for c in labels])
            trace = trace_stats(per_chain)
            payload["psr"] = {"tau": trace.psr, "flagged": bool(trace.flagged)}
    print(
        f"effect mean {stats.mean:.6g} sd {stats.sd:.6g} "
        f"95% interval [{stats.q2_5:.6g}, {stats.q97_5:.6g}] ({tau.size} draws)"
    )
    if payload["psr"] is not None:
        flag = " (flagged)" if payload["psr"]["flagged"] else ""
        print(f"scale reduction {payload['psr']['tau']:.4f}{flag}")
    if cfg.out is not None:
        out = _ensure_out(cfg)
        _write_json(os.path.join(out, "summary.json"), payload)
        _write_manifest(out, cfg, {"samples": cfg.samples}, ["summary.json"])
    return 0


_HANDLERS = {
    "validate": _cmd_validate,
    "simulate": _cmd_simulate,
    "fit": _cmd_fit,
    "estimate": _cmd_estimate,
    "compare": _cmd_compare,
    "lpml": _cmd_lpml,
    "summary": _cmd_summary,
}


def run(argv: Sequence[str] | None = None) -> int:
    """Execute one command; returns the process exit code (0, 1, or 2)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 2
        return 0 if code == 0 else 2
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        cfg, explicit = resolve_config(args)
        return _HANDLERS[cfg.command](cfg, explicit)
    except _ValidationFailure as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (_UsageError, FileNotFoundError, KeyError, ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main(argv: Sequence[str] | None = None) -> int:
    """Console entry point."""
    return run(argv)
