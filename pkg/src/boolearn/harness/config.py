"""Experiment specifications and their INI-style config files."""

from __future__ import annotations

import configparser
import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from ..encoders import LEVELS
from ..learner import MlpConfig
from ..solver import SamplerBudget

PROTOCOLS = ("cop", "phase", "ingest")
COP_FAMILIES = ("flat3gcp", "morphed5gcp", "clique3")
DEFAULT_FORMULAS = {"cop": 10, "phase": 20, "ingest": 1}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentSpec:
    protocol: str
    output_dir: str = "results"
    master_seed: int = 0
    formulas_per_set: int = 0  # 0: protocol default
    positives: int = 500
    negatives: int = 500
    folds: int = 5
    workers: int = 0  # 0: all available cores
    save_datasets: bool = False  # also write each formula and dataset under output_dir/datasets
    # cop
    family: str = "flat3gcp"
    nodes: tuple[int, ...] = ()
    edges: tuple[int, ...] = ()
    morph_ratios: tuple[float, ...] = (1.0,)
    lattice_degree: int = 8
    expected_cliques: float = 500.0
    # phase
    variables: tuple[int, ...] = (10, 20, 30)
    levels: tuple[int, ...] = tuple(LEVELS)
    activations: tuple[str, ...] = ("relu",)
    # ingest
    cnf_files: tuple[str, ...] = ()
    sample_files: tuple[str, ...] = ()  # "" or "-" where the sampler supplies positives
    mlp: dict = field(default_factory=dict)
    sampler: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ConfigError(f"protocol must be one of {PROTOCOLS}, got {self.protocol!r}")
        if self.formulas_per_set == 0:
            object.__setattr__(self, "formulas_per_set", DEFAULT_FORMULAS[self.protocol])
        if self.formulas_per_set < 1:
            raise ConfigError("formulas_per_set must be >= 1")
        if min(self.positives, self.negatives) < 1 or self.folds < 2 or self.workers < 0:
            raise ConfigError("positives and negatives must be >= 1, folds >= 2, workers >= 0")
        if self.protocol == "cop":
            if self.family not in COP_FAMILIES:
                raise ConfigError(f"family must be one of {COP_FAMILIES}")
            if self.family == "flat3gcp" and len(self.nodes) != len(self.edges):
                raise ConfigError("flat3gcp needs one edges value per nodes value")
            if self.family != "morphed5gcp" and not self.nodes:
                raise ConfigError(f"{self.family} needs at least one nodes value")
            if any(not 0.0 <= r <= 1.0 for r in self.morph_ratios):
                raise ConfigError("morph ratios must lie in [0, 1]")
        if self.protocol == "phase":
            if not self.variables or any(v < 3 for v in self.variables):
                raise ConfigError("phase variables must be >= 3")
            if any(l not in LEVELS for l in self.levels):
                raise ConfigError("levels must lie in -5..5")
            if any(a not in ("relu", "logistic") for a in self.activations) or not self.activations:
                raise ConfigError("activations must be relu and/or logistic")
        if self.protocol == "ingest":
            if not self.cnf_files:
                raise ConfigError("ingest needs at least one cnf file")
            if self.sample_files and len(self.sample_files) != len(self.cnf_files):
                raise ConfigError("samples must list one entry per cnf file")
        self.mlp_config()
        self.sampler_budget()

    def mlp_config(self, **extra) -> MlpConfig:
        try:
            return MlpConfig(**{**self.mlp, **extra})
        except (TypeError, ValueError) as e:
            raise ConfigError(f"[mlp]: {e}") from None

    def sampler_budget(self) -> SamplerBudget:
        try:
            return SamplerBudget(**self.sampler)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"[sampler]: {e}") from None

    def with_(self, **kw) -> "ExperimentSpec":
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d.update(kw)
        return ExperimentSpec(**d)

    def fingerprint(self) -> str:
        """Hash of everything that affects results (not workers or where files go)."""
        d = asdict(self)
        for k in ("workers", "output_dir", "save_datasets"):
            d.pop(k)
        blob = json.dumps(d, sort_keys=True, default=list).encode()
        return hashlib.blake2b(blob, digest_size=12).hexdigest()


def _ints(s: str) -> tuple[int, ...]:
    return tuple(int(x) for x in s.replace(",", " ").split())


def _floats(s: str) -> tuple[float, ...]:
    out = []
    for x in s.replace(",", " ").split():
        if x.startswith("2^"):  # e.g. 2^-4
            out.append(2.0 ** int(x[2:]))
        else:
            out.append(float(x))
    return tuple(out)


def _bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(s)


def _strs(s: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in s.split(",") if x.strip())


# section -> key -> (spec field, parser)
KEYS = {
    "experiment": {
        "protocol": ("protocol", str),
        "output": ("output_dir", str),
        "master_seed": ("master_seed", int),
        "formulas_per_set": ("formulas_per_set", int),
        "positives": ("positives", int),
        "negatives": ("negatives", int),
        "folds": ("folds", int),
        "workers": ("workers", int),
        "save_datasets": ("save_datasets", _bool),
    },
    "cop": {
        "family": ("family", str),
        "nodes": ("nodes", _ints),
        "edges": ("edges", _ints),
        "morph_ratios": ("morph_ratios", _floats),
        "lattice_degree": ("lattice_degree", int),
        "expected_cliques": ("expected_cliques", float),
    },
    "phase": {
        "variables": ("variables", _ints),
        "levels": ("levels", _ints),
        "activations": ("activations", _strs),
    },
    "ingest": {
        "cnf": ("cnf_files", _strs),
        "samples": ("sample_files", _strs),
    },
}
MLP_KEYS = {"hidden_layers": _ints, "activation": str, "learning_rate": float, "beta1": float,
            "beta2": float, "epsilon": float, "epochs": int, "l2": float, "batch_size": int}
SAMPLER_KEYS = {"max_decisions": int, "max_models_per_cell": int, "cell_target": int,
                "xor_density": float, "max_cell_rounds": int}


def parse_config(text: str, base_dir: str | Path | None = None) -> ExperimentSpec:
    """Build a spec from ``key = value`` sections.

    Relative file paths in [ingest] and the output directory resolve against
    ``base_dir`` when given.
    """
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise ConfigError(str(e).splitlines()[0]) from None
    known = set(KEYS) | {"mlp", "sampler"}
    for sec in cp.sections():
        if sec not in known:
            raise ConfigError(f"unknown section [{sec}]")
    kw: dict = {}
    for sec, keys in KEYS.items():
        if not cp.has_section(sec):
            continue
        for k, raw in cp.items(sec):
            if k not in keys:
                raise ConfigError(f"unknown key {k!r} in [{sec}]")
            name, conv = keys[k]
            try:
                kw[name] = conv(raw)
            except ValueError:
                raise ConfigError(f"[{sec}] {k}: cannot parse {raw!r}") from None
    for sec, table in (("mlp", MLP_KEYS), ("sampler", SAMPLER_KEYS)):
        if not cp.has_section(sec):
            continue
        d = {}
        for k, raw in cp.items(sec):
            if k not in table:
                raise ConfigError(f"unknown key {k!r} in [{sec}]")
            try:
                d[k] = table[k](raw)
            except ValueError:
                raise ConfigError(f"[{sec}] {k}: cannot parse {raw!r}") from None
        kw[sec] = d
    if "protocol" not in kw:
        raise ConfigError("[experiment] protocol is required")
    if base_dir is not None:
        base = Path(base_dir)
        if "output_dir" in kw:
            kw["output_dir"] = str(base / kw["output_dir"])
        for name in ("cnf_files", "sample_files"):
            if name in kw:
                kw[name] = tuple(p if p in ("", "-") else str(base / p) for p in kw[name])
    return ExperimentSpec(**kw)


def load_config(path: str | Path) -> ExperimentSpec:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {p}: {e.strerror}") from None
    return parse_config(text, p.parent)
