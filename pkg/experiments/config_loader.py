# experiments/config_loader.py
"""
YAML experiment and sweep files.

Every key is checked against a schema: unknown keys, wrong types and out-of-range values
fail with a ConfigError that names the file and the line of the offending node.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import yaml

import config as settings
from learning.datagen import ScenarioConfig
from learning.models import Hyperparams, ModelSpec
from protocols.registry import registry
from simulation.engine import ExperimentConfig
from utils.exceptions import ConfigError, UsageError

KeyPath = Tuple[str, ...]

INT, FLOAT, STR, PAIRS, MAPPING, LIST = "int", "float", "str", "pairs", "mapping", "list"

EXPERIMENT_SCHEMA: Dict[str, Any] = {
    "paradigm": STR,
    "seed": INT,
    "rounds": INT,
    "reliability": FLOAT,
    "schedule": STR,
    "experience_mode": STR,
    "scenario": {
        "kind": STR, "n_clients": INT, "n_groups": INT, "samples_mean": INT, "samples_spread": FLOAT,
        "input_dim": INT, "n_classes": INT, "output_dim": INT, "swap_pairs": PAIRS,
        "group_shift": FLOAT, "noise": FLOAT, "blob_std": FLOAT, "eval_fraction": FLOAT, "label_skew": FLOAT,
    },
    "model": {"kind": STR, "hidden_dim": INT, "head": STR, "input_dim": INT, "output_dim": INT},
    "hyper": {"learning_rate": FLOAT, "batch_size": INT, "epochs": INT},
    "topology": {"connectivity": FLOAT, "rewire_prob": FLOAT},
}

SWEEP_SCHEMA: Dict[str, Any] = {
    "base": MAPPING,
    "paradigms": LIST,
    "seeds": LIST,
    "conditions": LIST,
    "out": STR,
    "loss_threshold": FLOAT,
    "jobs": INT,
}


@dataclass
class SweepSpec:
    base: ExperimentConfig
    paradigms: List[str]
    seeds: List[int]
    conditions: List[Tuple[float, float]]     # (connectivity, reliability)
    out: str = field(default_factory=lambda: settings.OUT_DIR)
    loss_threshold: float = field(default_factory=lambda: settings.LOSS_THRESHOLD)
    jobs: int = field(default_factory=lambda: settings.JOBS)


class _Document:
    """Parsed YAML data plus the 1-based line of every key path."""

    def __init__(self, text: str, path: str):
        self.path = path
        try:
            root = yaml.compose(text, Loader=yaml.SafeLoader)
            self.data = yaml.safe_load(text)
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            raise ConfigError(f"invalid YAML: {getattr(e, 'problem', None) or e}", path,
                              mark.line + 1 if mark is not None else None)
        self.lines: Dict[KeyPath, int] = {}
        if root is not None:
            self.lines[()] = root.start_mark.line + 1
            self._index(root, ())
        if self.data is None:
            self.data = {}

    def _index(self, node, prefix: KeyPath):
        if isinstance(node, yaml.MappingNode):
            for key_node, value_node in node.value:
                key_path = prefix + (str(key_node.value),)
                self.lines[key_path] = key_node.start_mark.line + 1
                self._index(value_node, key_path)
        elif isinstance(node, yaml.SequenceNode):
            for i, item in enumerate(node.value):
                item_path = prefix + (str(i),)
                self.lines[item_path] = item.start_mark.line + 1
                self._index(item, item_path)

    def line(self, key_path: KeyPath) -> Optional[int]:
        while key_path not in self.lines and key_path:
            key_path = key_path[:-1]
        return self.lines.get(key_path)

    def error(self, message: str, key_path: KeyPath) -> ConfigError:
        return ConfigError(message, self.path, self.line(key_path))


def _dotted(key_path: KeyPath) -> str:
    return ".".join(key_path) or "<root>"


def _check_type(doc: _Document, value, kind: str, key_path: KeyPath):
    if kind == INT:
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif kind == FLOAT:
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    elif kind == STR:
        ok = isinstance(value, str)
    elif kind == MAPPING:
        ok = isinstance(value, dict)
    elif kind == LIST:
        ok = isinstance(value, list)
    elif kind == PAIRS:
        ok = value is None or (isinstance(value, list) and all(
            isinstance(group, list) and all(
                isinstance(pair, list) and all(isinstance(c, int) and not isinstance(c, bool) for c in pair)
                for pair in group)
            for group in value))
    else:
        ok = False
    if not ok:
        expected = "a list of per-group lists of label pairs" if kind == PAIRS else f"a {kind}"
        raise doc.error(f"'{_dotted(key_path)}' must be {expected}, got {value!r}", key_path)


def _validate(doc: _Document, data, schema: Dict[str, Any], prefix: KeyPath) -> Dict[str, Any]:
    if not isinstance(data, dict):
        raise doc.error(f"'{_dotted(prefix)}' must be a mapping", prefix)
    for key, value in data.items():
        key_path = prefix + (str(key),)
        if key not in schema:
            raise doc.error(f"unknown key '{_dotted(key_path)}' (allowed: {', '.join(schema)})", key_path)
        kind = schema[key]
        if isinstance(kind, dict):
            _validate(doc, value, kind, key_path)
        else:
            _check_type(doc, value, kind, key_path)
    return data


def _build(doc: _Document, key_path: KeyPath, factory, **kwargs):
    try:
        return factory(**kwargs)
    except UsageError as e:
        raise doc.error(str(e), key_path)


def _experiment_from_mapping(doc: _Document, data: Dict[str, Any], prefix: KeyPath) -> ExperimentConfig:
    _validate(doc, data, EXPERIMENT_SCHEMA, prefix)
    paradigm = data.get("paradigm", "chisme")
    if not registry.is_supported(paradigm):
        raise doc.error(f"unknown paradigm '{paradigm}' (expected one of: {', '.join(registry.names())})",
                        prefix + ("paradigm",))
    seed = data.get("seed", 3)

    scenario_data = dict(data.get("scenario") or {})
    scenario = _build(doc, prefix + ("scenario",), ScenarioConfig, seed=seed, **scenario_data)

    model_data = dict(data.get("model") or {})
    model_data.setdefault("kind", "softmax-classifier")
    model_data.setdefault("input_dim", scenario.input_dim)
    model_data.setdefault("output_dim", scenario.model_output_dim)
    model = _build(doc, prefix + ("model",), ModelSpec, **model_data)

    hyper_data = dict(data.get("hyper") or {})
    if "learning_rate" in hyper_data and not hyper_data["learning_rate"] > 0:
        raise doc.error("'hyper.learning_rate' must be positive", prefix + ("hyper", "learning_rate"))
    hyper = _build(doc, prefix + ("hyper",), Hyperparams, **hyper_data)

    topology = dict(data.get("topology") or {})
    return _build(
        doc, prefix, ExperimentConfig,
        paradigm=paradigm,
        scenario=scenario,
        model=model,
        hyper=hyper,
        connectivity=float(topology.get("connectivity", 1.0)),
        rewire_prob=float(topology.get("rewire_prob", settings.DEFAULT_REWIRE_PROB)),
        reliability=float(data.get("reliability", 1.0)),
        rounds=data.get("rounds", 30),
        seed=seed,
        schedule=data.get("schedule", "permuted"),
        experience_mode=data.get("experience_mode", "epochs"),
    )


def _read(path: str) -> _Document:
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"cannot read config file: {e.strerror or e}", path)
    return _Document(text, path)


def parse_experiment_config(text: str, path: str = "<config>") -> ExperimentConfig:
    doc = _Document(text, path)
    return _experiment_from_mapping(doc, doc.data, ())


def load_experiment_config(path: str) -> ExperimentConfig:
    doc = _read(path)
    return _experiment_from_mapping(doc, doc.data, ())


def _sweep_from_document(doc: _Document) -> SweepSpec:
    data = _validate(doc, doc.data, SWEEP_SCHEMA, ())
    base = _experiment_from_mapping(doc, data.get("base") or {}, ("base",))

    paradigms = data.get("paradigms", [base.paradigm])
    seeds = data.get("seeds", [base.seed])
    raw_conditions = data.get("conditions", [{"connectivity": base.connectivity, "reliability": base.reliability}])
    for name, values in (("paradigms", paradigms), ("seeds", seeds), ("conditions", raw_conditions)):
        if not values:
            raise doc.error(f"'{name}' must not be empty", (name,))
    for i, paradigm in enumerate(paradigms):
        if not isinstance(paradigm, str) or not registry.is_supported(paradigm):
            raise doc.error(f"unknown paradigm {paradigm!r} (expected one of: {', '.join(registry.names())})",
                            ("paradigms", str(i)))
    for i, seed in enumerate(seeds):
        _check_type(doc, seed, INT, ("seeds", str(i)))
    conditions = []
    for i, condition in enumerate(raw_conditions):
        key_path = ("conditions", str(i))
        _validate(doc, condition, {"connectivity": FLOAT, "reliability": FLOAT}, key_path)
        pair = (float(condition.get("connectivity", base.connectivity)),
                float(condition.get("reliability", base.reliability)))
        if not all(0.0 <= v <= 1.0 for v in pair):
            raise doc.error("connectivity and reliability must lie in [0, 1]", key_path)
        conditions.append(pair)

    jobs = data.get("jobs", settings.JOBS)
    if jobs < 1:
        raise doc.error("'jobs' must be at least 1", ("jobs",))
    return SweepSpec(
        base=base,
        paradigms=list(paradigms),
        seeds=list(seeds),
        conditions=conditions,
        out=data.get("out", settings.OUT_DIR),
        loss_threshold=float(data.get("loss_threshold", settings.LOSS_THRESHOLD)),
        jobs=jobs,
    )


def parse_sweep_spec(text: str, path: str = "<sweep>") -> SweepSpec:
    return _sweep_from_document(_Document(text, path))


def load_sweep_spec(path: str) -> SweepSpec:
    return _sweep_from_document(_read(path))
