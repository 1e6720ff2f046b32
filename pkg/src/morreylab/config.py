"""Experiment configuration: one TOML file with nested sections.

Parsing is strict: unknown sections or keys, wrong types and inadmissible
values raise :class:`ConfigError` naming the field and, when it can be
located, the line.  The config hash is taken over canonical JSON, so it does
not depend on key order.
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
import re
import sys
from dataclasses import dataclass
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .embeddings.corpus import SPATIAL_GENERATORS, TEMPORAL_GENERATORS, CorpusSpec
from .errors import ConfigError, MorreyLabError
from .grid import GridSpec, RadiusSet
from .norms import MixedParams, MorreyParams

__all__ = ["COMMANDS", "ExperimentConfig", "RadiusPolicy", "Gates", "load_config", "parse_config", "config_hash"]

COMMANDS = ("norms", "verify-embedding", "verify-operator", "epsilon-limit", "pde-check", "kernel-validate")

_NUM = (int, float)
_LIST = list

# section -> key -> accepted types; "" is the top level
_SCHEMA: dict = {
    "": {"command": str, "seed": int, "output_dir": str, "theorem_id": str},
    "grid": {"n": int, "box": _LIST, "resolutions": _LIST, "steps": _LIST, "T": _NUM},
    "radii": {"base": _NUM, "min": _NUM, "max": _NUM},
    "corpus": {"count": int, "generators": _LIST, "temporal": _LIST, "p": _NUM, "lam": _NUM, "q": _NUM, "mu": _NUM, "box": _LIST},
    "exponents": {"norm": dict, "source": dict, "target": dict},
    "operator": {"name": str, "kernel": str, "method": str, "params": dict, "radii": _LIST, "center": _LIST},
    "kernels": {"names": _LIST, "order": int, "scales": _LIST},
    "epsilon": {"largest": _NUM, "terms": int, "kernel": str, "method": str},
    "pde": {"coefficients": _LIST, "solutions": _LIST, "count": int, "radii": _LIST},
    "gates": {
        "drift_factor": _NUM,
        "slack": _NUM,
        "zero_mean_tol": _NUM,
        "homogeneity_tol": _NUM,
        "epsilon_tol": _NUM,
        "residual_tol": _NUM,
    },
}

_EXPONENT_KEYS = {"p", "lam", "q", "mu", "relaxed"}


def _line_of(text: str, section: str, key: str | None) -> int | None:
    """1-based line of ``key`` inside ``[section]`` (or of the header), if found."""
    if not text:
        return None
    lines = text.splitlines()
    current = ""
    header = None
    for i, line in enumerate(lines, 1):
        m = re.match(r"\s*\[([^\]]+)\]", line)
        if m:
            current = m.group(1).strip()
            if current == section:
                header = i
            continue
        if key and current == section and re.match(rf"\s*{re.escape(key)}\s*=", line):
            return i
    return header


class _Ctx:
    def __init__(self, text: str, source: str):
        self.text, self.source = text, source

    def fail(self, section: str, key: str | None, msg: str):
        field = ".".join(x for x in (section, key) if x) or "<root>"
        line = _line_of(self.text, section, key)
        where = f"{self.source}:{line}: " if line else f"{self.source}: "
        raise ConfigError(f"{where}field '{field}': {msg}")


def _typecheck(ctx: _Ctx, section: str, key: str, value, kind):
    if kind is _NUM:
        ok = isinstance(value, _NUM) and not isinstance(value, bool) and math.isfinite(value)
        expect = "a finite number"
    elif kind is int:
        ok = isinstance(value, int) and not isinstance(value, bool)
        expect = "an integer"
    else:
        ok = isinstance(value, kind)
        expect = {str: "a string", list: "an array", dict: "a table"}.get(kind, str(kind))
    if not ok:
        ctx.fail(section, key, f"expected {expect}, got {value!r}")


def _validate_keys(ctx: _Ctx, raw: dict):
    for key, value in raw.items():
        if isinstance(value, dict) and key in _SCHEMA and key != "":
            for k, v in value.items():
                if k not in _SCHEMA[key]:
                    ctx.fail(key, k, f"unknown key; allowed: {sorted(_SCHEMA[key])}")
                _typecheck(ctx, key, k, v, _SCHEMA[key][k])
        elif key in _SCHEMA:
            ctx.fail(key, None, "expected a table")
        elif key in _SCHEMA[""]:
            _typecheck(ctx, "", key, value, _SCHEMA[""][key])
        else:
            allowed = sorted(set(_SCHEMA[""]) | set(_SCHEMA) - {""})
            ctx.fail("", key, f"unknown section or key; allowed: {allowed}")


@dataclass(frozen=True)
class RadiusPolicy:
    """Dyadic radii ``min * base**k`` up to ``max``; ``None`` means grid spacing / diameter."""

    base: float = 2.0
    min: float | None = None
    max: float | None = None

    def for_grid(self, grid: GridSpec) -> RadiusSet:
        lo = grid.h if self.min is None else self.min
        hi = grid.diameter if self.max is None else self.max
        return RadiusSet.dyadic(lo, hi, self.base).check_for(grid.h, grid.diameter)

    @property
    def is_default(self) -> bool:
        return self.base == 2.0 and self.min is None and self.max is None


@dataclass(frozen=True)
class Gates:
    drift_factor: float = 1.25
    slack: float = 0.10
    zero_mean_tol: float = 1e-8
    homogeneity_tol: float = 1e-10
    epsilon_tol: float = math.inf
    residual_tol: float = 1e-12


@dataclass(frozen=True)
class ExperimentConfig:
    """A parsed, validated experiment.  ``raw`` keeps the TOML tree for hashing."""

    command: str | None
    seed: int
    output_dir: str
    theorem_id: str | None
    n: int
    box: tuple
    resolutions: tuple
    steps: tuple | None
    T: float
    radii: RadiusPolicy
    corpus: CorpusSpec
    corpus_box: tuple
    exponents: dict
    operator: dict
    kernels: dict
    epsilon: dict
    pde: dict
    gates: Gates
    raw: dict

    @property
    def timed(self) -> bool:
        return self.steps is not None

    @property
    def hash(self) -> str:
        # where the reports go is not part of the experiment
        return config_hash({k: v for k, v in self.raw.items() if k != "output_dir"})


def config_hash(raw: dict) -> str:
    text = json.dumps(raw, sort_keys=True, separators=(",", ":"), allow_nan=False)
    return hashlib.sha256(text.encode()).hexdigest()


def _box(ctx, section, value, n):
    if value is None:
        return None
    if len(value) != 2:
        ctx.fail(section, "box", "expected [lower, upper]")
    lo, hi = value
    lo = [lo] * n if isinstance(lo, _NUM) else list(lo)
    hi = [hi] * n if isinstance(hi, _NUM) else list(hi)
    if len(lo) != n or len(hi) != n:
        ctx.fail(section, "box", f"bounds must have {n} entries")
    if not all(isinstance(v, _NUM) and not isinstance(v, bool) for v in lo + hi):
        ctx.fail(section, "box", "bounds must be numbers")
    if any(b <= a for a, b in zip(lo, hi)):
        ctx.fail(section, "box", "upper bound must exceed lower bound on every axis")
    return (tuple(float(v) for v in lo), tuple(float(v) for v in hi))


def _int_list(ctx, section, key, value, positive=True):
    if not value or not all(isinstance(v, int) and not isinstance(v, bool) and (v > 0 or not positive) for v in value):
        ctx.fail(section, key, "expected a non-empty array of positive integers")
    return tuple(value)


def _num_list(ctx, section, key, value):
    if not value or not all(isinstance(v, _NUM) and not isinstance(v, bool) for v in value):
        ctx.fail(section, key, "expected a non-empty array of numbers")
    return tuple(float(v) for v in value)


def _str_list(ctx, section, key, value, allowed=None):
    if not value or not all(isinstance(v, str) for v in value):
        ctx.fail(section, key, "expected a non-empty array of strings")
    if allowed is not None:
        for v in value:
            if v not in allowed:
                ctx.fail(section, key, f"unknown entry {v!r}; allowed: {sorted(allowed)}")
    return tuple(value)


def exponent_params(ctx, name: str, table: dict, n: int):
    """``{p, lam}`` gives Morrey exponents; adding ``q, mu`` gives mixed exponents."""
    for k in table:
        if k not in _EXPONENT_KEYS:
            ctx.fail("exponents", name, f"unknown exponent {k!r}; allowed: {sorted(_EXPONENT_KEYS)}")
    if "p" not in table or "lam" not in table:
        ctx.fail("exponents", name, "needs p and lam")
    relaxed = bool(table.get("relaxed", False))
    try:
        if "q" in table or "mu" in table:
            if "q" not in table or "mu" not in table:
                ctx.fail("exponents", name, "mixed exponents need both q and mu")
            return MixedParams.of(table["q"], table["mu"], table["p"], table["lam"], n, relaxed=relaxed)
        return MorreyParams(table["p"], table["lam"], n, relaxed=relaxed)
    except MorreyLabError as e:
        if isinstance(e, ConfigError):
            raise
        ctx.fail("exponents", name, str(e))


def parse_config(text: str, source: str = "<config>", overrides: dict | None = None) -> ExperimentConfig:
    """Parse TOML text; ``overrides`` maps dotted keys (``"seed"``, ``"grid.resolutions"``) to values."""
    ctx = _Ctx(text, source)
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{source}: {e}") from None
    raw = copy.deepcopy(raw)
    for dotted, value in (overrides or {}).items():
        *path, last = dotted.split(".")
        node = raw
        for part in path:
            node = node.setdefault(part, {})
        node[last] = value
    _validate_keys(ctx, raw)

    command = raw.get("command")
    if command is not None and command not in COMMANDS:
        ctx.fail("", "command", f"unknown command {command!r}; allowed: {list(COMMANDS)}")
    seed = raw.get("seed", 0)
    if not 0 <= seed < 2**64:
        ctx.fail("", "seed", "seed must be an unsigned 64-bit integer")

    g = raw.get("grid", {})
    n = g.get("n", 2)
    if n < 1:
        ctx.fail("grid", "n", "dimension must be positive")
    box = _box(ctx, "grid", g.get("box", [-1.0, 1.0]), n)
    resolutions = _int_list(ctx, "grid", "resolutions", g.get("resolutions", [32]))
    steps = g.get("steps")
    if steps is not None:
        steps = _int_list(ctx, "grid", "steps", steps)
        if len(steps) == 1 and len(resolutions) > 1:
            steps = steps * len(resolutions)
        if len(steps) != len(resolutions):
            ctx.fail("grid", "steps", "needs one entry per resolution (or a single entry)")
    T = float(g.get("T", 1.0))
    if T <= 0:
        ctx.fail("grid", "T", "time horizon must be positive")

    r = raw.get("radii", {})
    policy = RadiusPolicy(float(r.get("base", 2.0)), r.get("min"), r.get("max"))
    if policy.base <= 1:
        ctx.fail("radii", "base", "dyadic base must exceed 1")
    for key in ("min", "max"):
        v = getattr(policy, key)
        if v is not None and v <= 0:
            ctx.fail("radii", key, "radius must be positive")

    c = raw.get("corpus", {})
    try:
        corpus = CorpusSpec(
            generators=_str_list(ctx, "corpus", "generators", c.get("generators", list(SPATIAL_GENERATORS)), SPATIAL_GENERATORS),
            count=c.get("count", 20),
            seed=seed,
            p=float(c.get("p", 2.0)),
            lam=None if c.get("lam") is None else float(c["lam"]),
            q=float(c.get("q", 2.0)),
            mu=float(c.get("mu", 0.5)),
            temporal=_str_list(ctx, "corpus", "temporal", c.get("temporal", list(TEMPORAL_GENERATORS)), TEMPORAL_GENERATORS),
        )
    except ConfigError:
        raise
    except MorreyLabError as e:
        ctx.fail("corpus", None, str(e))
    corpus_box = _box(ctx, "corpus", c["box"], n) if "box" in c else box

    e = raw.get("exponents", {})
    exponents = {name: exponent_params(ctx, name, table, n) for name, table in e.items()}

    op = dict(raw.get("operator", {}))
    if "radii" in op:
        op["radii"] = _num_list(ctx, "operator", "radii", op["radii"])
    if "center" in op:
        op["center"] = _num_list(ctx, "operator", "center", op["center"])
        if len(op["center"]) != n:
            ctx.fail("operator", "center", f"needs {n} coordinates")
    op["params"] = dict(op.get("params", {}))

    k = dict(raw.get("kernels", {}))
    if "names" in k:
        k["names"] = _str_list(ctx, "kernels", "names", k["names"])
    if "scales" in k:
        k["scales"] = _num_list(ctx, "kernels", "scales", k["scales"])

    eps = dict(raw.get("epsilon", {}))
    if eps.get("largest", 1.0) <= 0:
        ctx.fail("epsilon", "largest", "must be positive")
    if eps.get("terms", 4) < 3:
        ctx.fail("epsilon", "terms", "the epsilon limit needs at least 3 terms")

    pde = dict(raw.get("pde", {}))
    for key in ("coefficients", "solutions"):
        if key in pde:
            pde[key] = _str_list(ctx, "pde", key, pde[key])
    if "radii" in pde:
        pde["radii"] = _num_list(ctx, "pde", "radii", pde["radii"])

    gt = raw.get("gates", {})
    gates = Gates(**{key: float(v) for key, v in gt.items()})
    if gates.drift_factor <= 1:
        ctx.fail("gates", "drift_factor", "must exceed 1")

    return ExperimentConfig(
        command=command,
        seed=int(seed),
        output_dir=raw.get("output_dir", "out"),
        theorem_id=raw.get("theorem_id"),
        n=int(n),
        box=box,
        resolutions=resolutions,
        steps=steps,
        T=T,
        radii=policy,
        corpus=corpus,
        corpus_box=corpus_box,
        exponents=exponents,
        operator=op,
        kernels=k,
        epsilon=eps,
        pde=pde,
        gates=gates,
        raw=raw,
    )


def load_config(path, overrides: dict | None = None) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"{path}: cannot read config ({e.strerror})") from None
    return parse_config(text, str(path), overrides)
