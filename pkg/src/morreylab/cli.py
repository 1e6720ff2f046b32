"""Configuration-driven experiment runner.

    morreylab <command> --config <path> [--out <dir>] [--seed <u64>] [--resolution <int>]

Each command writes CSV and JSON reports plus ``manifest.json`` into the
output directory.  Exit code 0 when every gate passes, 1 on a gate failure
(the failing reports are named on stderr), 2 on usage or config errors.
CSV contents depend only on the config, so reruns are byte-identical; wall
times go to the manifest only.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import COMMANDS, ExperimentConfig, load_config
from .embeddings import Discretization, build_corpus, commutator_small_ball, sample_corpus, verify_embedding, verify_operator_bound
from .embeddings.reports import RatioReport, fmt
from .errors import ConfigError, MorreyLabError
from .norms import MixedParams, mixed_morrey_norm, morrey_norm
from .operators import EpsilonSchedule, epsilon_limit, get_kernel, kernel_validate, truncated_singular_integral

__all__ = ["RunManifest", "Gate", "run", "main"]

log = logging.getLogger("morreylab")


@dataclass(frozen=True)
class Gate:
    report: str
    passed: bool
    detail: str = ""


@dataclass
class RunManifest:
    """What a run did: config hash, version, stage wall times, files written, gates."""

    command: str
    config_hash: str
    version: str = __version__
    stages: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)
    gates: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(g.passed for g in self.gates)

    @property
    def failed(self) -> list[str]:
        return [g.report for g in self.gates if not g.passed]

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "config_hash": self.config_hash,
            "version": self.version,
            "stages": {k: round(v, 6) for k, v in self.stages.items()},
            "outputs": sorted(self.outputs),
            "gates": [{"report": g.report, "pass": g.passed, "detail": g.detail} for g in self.gates],
            "pass": self.passed,
        }


class _Run:
    def __init__(self, cfg: ExperimentConfig, out: Path):
        self.cfg, self.out = cfg, out
        self.manifest = RunManifest(cfg.command or "", cfg.hash)
        self._t = time.perf_counter()

    def stage(self, name: str):
        now = time.perf_counter()
        self.manifest.stages[name] = self.manifest.stages.get(name, 0.0) + now - self._t
        self._t = now

    def write_text(self, name: str, text: str):
        self.out.mkdir(parents=True, exist_ok=True)
        (self.out / name).write_text(text)
        self.manifest.outputs.append(name)

    def write_json(self, name: str, obj):
        self.write_text(name, json.dumps(obj, indent=2, sort_keys=True) + "\n")

    def write_rows(self, name: str, header: list, rows: list):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
        self.write_text(name, buf.getvalue())

    def report(self, rep: RatioReport, stem: str | None = None):
        stem = stem or rep.theorem_id
        self.write_text(f"{stem}.csv", rep.csv_text())
        self.write_json(f"{stem}.json", rep.summary())
        self.gate(stem, rep.passed, f"max_ratio={rep.max_ratio!r} history={[v for _, v in rep.history]}")

    def gate(self, report: str, passed: bool, detail: str = ""):
        self.manifest.gates.append(Gate(report, bool(passed), detail))

    # -- shared setup -------------------------------------------------------

    def disc(self) -> Discretization:
        c = self.cfg
        return Discretization(c.n, c.box, c.resolutions, c.steps, c.T)

    def corpus(self):
        c = self.cfg
        return build_corpus(c.corpus, c.n, c.corpus_box, c.T if c.timed else None)

    def exponents(self, *names):
        out = []
        for name in names:
            if name not in self.cfg.exponents:
                raise ConfigError(f"field 'exponents.{name}': required by command {self.cfg.command!r}")
            out.append(self.cfg.exponents[name])
        return out

    def theorem_id(self, default: str) -> str:
        return self.cfg.theorem_id or default


# ---------------------------------------------------------------------------
# commands


def _norms(run: _Run):
    (params,) = run.exponents("norm")
    cfg = run.cfg
    if isinstance(params, MixedParams) != cfg.timed:
        raise ConfigError("field 'exponents.norm': mixed exponents need grid.steps and Morrey exponents forbid them")
    corpus = run.corpus()
    run.stage("setup")
    tid = run.theorem_id("norms")
    rows, history = [], {}
    for res, grid, tm in run.disc().levels():
        radii = cfg.radii.for_grid(grid)
        for fid, f in sample_corpus(corpus, grid, tm):
            rep = mixed_morrey_norm(f, params, radii=radii) if cfg.timed else morrey_norm(f, params, radii=radii)
            rows.append([tid, fid, res, tm.steps if tm else None] + rep.csv_row())
            history[res] = max(history.get(res, 0.0), rep.value)
    run.stage("compute")
    header = ["theorem_id", "function_id", "resolution", "steps"] + rep.csv_header()
    run.write_rows(f"{tid}.csv", header, rows)
    ok = all(math.isfinite(float(r[6])) for r in rows)
    run.write_json(f"{tid}.json", {"theorem_id": tid, "history": [{"resolution": k, "max_norm": v} for k, v in sorted(history.items())], "pass": ok})
    run.gate(tid, ok, "all norms finite")


def _verify_embedding(run: _Run):
    source, target = run.exponents("source", "target")
    corpus = run.corpus()
    run.stage("setup")
    rep = verify_embedding(corpus, source, target, run.disc(), run.theorem_id("embedding"), run.cfg.gates.drift_factor)
    run.stage("compute")
    run.report(rep)


def _verify_operator(run: _Run):
    cfg = run.cfg
    op = cfg.operator
    name = op.get("name")
    if not name:
        raise ConfigError("field 'operator.name': required by command 'verify-operator'")
    params = dict(op["params"])
    for key in ("kernel", "method"):
        if key in op:
            params[key] = op[key]
    corpus = run.corpus()
    run.stage("setup")
    if name == "commutator-small-ball":
        (norm,) = run.exponents("norm")
        if "radii" not in op:
            raise ConfigError("field 'operator.radii': the small-ball sweep needs radii")
        rep = commutator_small_ball(
            corpus,
            norm,
            op["radii"],
            run.disc(),
            a=params.get("a", "mollified-jump"),
            kernel=params.get("kernel", "riesz-transform-1d"),
            eps_fraction=float(params.get("eps_fraction", 1 / 8)),
            center=op.get("center"),
            method=params.get("method", "direct"),
            slack=cfg.gates.slack,
            theorem_id=run.theorem_id(name),
        )
    else:
        source, target = run.exponents("source", "target")
        if not cfg.radii.is_default:
            params["radii"] = lambda f: cfg.radii.for_grid(f.grid)
        rep = verify_operator_bound(corpus, name, source, target, run.disc(), run.theorem_id(name), params, cfg.gates.drift_factor)
    run.stage("compute")
    run.report(rep)


def _epsilon_limit(run: _Run):
    cfg = run.cfg
    (norm,) = run.exponents("norm")
    e = cfg.epsilon
    kernel = e.get("kernel", "riesz-transform" if cfg.n == 2 else "riesz-transform-1d")
    method = e.get("method", "fft")
    schedule = EpsilonSchedule.dyadic(float(e.get("largest", 0.5)), int(e.get("terms", 4)))
    corpus = run.corpus()
    run.stage("setup")
    tid = run.theorem_id("epsilon-limit")
    rows, ok = [], True
    for res, grid, tm in run.disc().levels():
        schedule.check_for(grid.h)
        for fid, f in sample_corpus(corpus, grid, tm):
            _, rep = epsilon_limit(lambda eps: truncated_singular_integral(f, kernel, eps, method), schedule, norm, cfg.gates.epsilon_tol)
            ok &= rep.converged
            for k, dist in enumerate(rep.distances):
                rows.append([tid, fid, res, rep.epsilons[k], rep.epsilons[k + 1], dist, rep.monotone])
    run.stage("compute")
    run.write_rows(f"{tid}.csv", ["theorem_id", "function_id", "resolution", "eps_from", "eps_to", "distance", "monotone"], rows)
    run.write_json(f"{tid}.json", {"theorem_id": tid, "kernel": kernel, "epsilons": list(schedule.epsilons), "pass": ok})
    run.gate(tid, ok, "distances decrease monotonically")


def _pde_check(run: _Run):
    from .parabolic import StrongSolutionSample, apriori_check, coefficient_family, manufactured_solutions, time_derivative_residual
    from .grid import sample

    cfg = run.cfg
    if not cfg.timed:
        raise ConfigError("field 'grid.steps': pde-check needs a time axis")
    (norm,) = run.exponents("norm")
    if not isinstance(norm, MixedParams):
        raise ConfigError("field 'exponents.norm': pde-check needs mixed exponents (q, mu, p, lam)")
    p = cfg.pde
    names = p.get("solutions", ("separable-bump", "tensor-bump", "moving-bump"))
    family = manufactured_solutions(names, count=int(p.get("count", 10)), seed=cfg.seed, d=cfg.n, radius=1.0, T=cfg.T)
    radii = p.get("radii", (0.75, 0.5, 0.25))
    tid = run.theorem_id("apriori")
    run.stage("setup")
    for coef in p.get("coefficients", ("identity", "smooth-perturbation")):
        res = apriori_check(family, coef, norm, radii, run.disc(), drift_factor=cfg.gates.drift_factor, theorem_id=f"{tid}-{coef}")
        run.stage("compute")
        run.report(res.hessian)
        run.report(res.time)
        rows = [[f"{tid}-{coef}", fid, r_, rad, lhs, bound, lhs <= bound * (1 + 1e-12)] for fid, r_, rad, lhs, bound in res.consistency]
        run.write_rows(f"{tid}-{coef}-consistency.csv", ["theorem_id", "function_id", "resolution", "radius", "ut_norm", "bound", "pass"], rows)
        run.gate(f"{tid}-{coef}-consistency", res.consistency_ok)
        run.gate(f"{tid}-{coef}-tail", res.tail_stable(), "smallest-radius ratio within the drift factor of the previous one")
        # u_t = Lu + a_ij D_ij u on the finest level
        lvl = list(run.disc().levels())[-1]
        _, grid, tm = lvl
        a = coefficient_family(coef)(grid, tm)
        rrows, worst = [], 0.0
        r = min(radii)
        for fid, U in family:
            s = StrongSolutionSample.from_field(sample(lambda x, t, U=U: U(x / r, t), grid, tm))
            scale = float(np.max(np.abs(s.ut.values))) or 1.0
            rel = time_derivative_residual(a, s) / scale
            worst = max(worst, rel)
            rrows.append([f"{tid}-{coef}-residual", fid, grid.extent[0], rel])
        run.write_rows(f"{tid}-{coef}-residual.csv", ["theorem_id", "function_id", "resolution", "relative_residual"], rrows)
        run.gate(f"{tid}-{coef}-residual", worst <= cfg.gates.residual_tol, f"max relative residual {worst!r}")
        run.stage("compute")


def _kernel_validate(run: _Run):
    cfg = run.cfg
    k = cfg.kernels
    names = k.get("names", ("riesz-transform",))
    order = int(k.get("order", 64))
    scales = k.get("scales", (0.5, 2.0, 4.0))
    tid = run.theorem_id("kernel-validate")
    run.stage("setup")
    rows, summary = [], []
    for name in names:
        rep = kernel_validate(get_kernel(name), order, scales, zero_mean_tol=cfg.gates.zero_mean_tol, homogeneity_tol=cfg.gates.homogeneity_tol)
        for r in rep.rows():
            rows.append([tid, name, order, r["check"], r["value"], r["bound"], r["pass"]])
        summary.append({"kernel": name, "pass": rep.passed, "zero_mean_defect": rep.zero_mean_defect, "homogeneity_defect": rep.homogeneity_defect})
        run.gate(f"{tid}:{name}", rep.passed)
    run.stage("compute")
    run.write_rows(f"{tid}.csv", ["theorem_id", "kernel", "order", "check", "value", "bound", "pass"], rows)
    run.write_json(f"{tid}.json", {"theorem_id": tid, "order": order, "kernels": summary, "pass": all(s["pass"] for s in summary)})


_COMMANDS = {
    "norms": _norms,
    "verify-embedding": _verify_embedding,
    "verify-operator": _verify_operator,
    "epsilon-limit": _epsilon_limit,
    "pde-check": _pde_check,
    "kernel-validate": _kernel_validate,
}
assert set(_COMMANDS) == set(COMMANDS)


def run(cfg: ExperimentConfig, out_dir=None) -> RunManifest:
    """Execute ``cfg.command`` and write reports plus ``manifest.json``."""
    if cfg.command not in _COMMANDS:
        raise ConfigError(f"field 'command': unknown command {cfg.command!r}; allowed: {list(COMMANDS)}")
    r = _Run(cfg, Path(out_dir if out_dir is not None else cfg.output_dir))
    _COMMANDS[cfg.command](r)
    r.stage("write")
    r.manifest.outputs.append("manifest.json")
    r.out.mkdir(parents=True, exist_ok=True)
    (r.out / "manifest.json").write_text(json.dumps(r.manifest.to_json(), indent=2, sort_keys=True) + "\n")
    return r.manifest


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="morreylab", description="Run a Morrey-space experiment from a TOML config.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="TOML experiment file")
    p.add_argument("--out", help="output directory (overrides output_dir)")
    p.add_argument("--seed", type=int, help="corpus seed, unsigned 64-bit (overrides seed)")
    p.add_argument("--resolution", type=int, help="run a single grid resolution")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _overrides(args, cfg_steps_of) -> dict:
    out = {"command": args.command}
    if args.seed is not None:
        out["seed"] = args.seed
    if args.out is not None:
        out["output_dir"] = args.out
    if args.resolution is not None:
        out["grid.resolutions"] = [args.resolution]
        steps = cfg_steps_of(args.resolution)
        if steps is not None:
            out["grid.steps"] = [steps]
    return out


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        base = load_config(args.config)
        if base.command is not None and base.command != args.command:
            raise ConfigError(f"{args.config}: field 'command': config is for {base.command!r}, not {args.command!r}")

        def steps_of(res):
            # time steps paired with the requested resolution, else the finest level's
            if base.steps is None:
                return None
            return dict(zip(base.resolutions, base.steps)).get(res, base.steps[-1])

        cfg = load_config(args.config, _overrides(args, steps_of))
        manifest = run(cfg)
    except MorreyLabError as e:
        print(f"morreylab: error: {e}", file=sys.stderr)
        return 2
    if not manifest.passed:
        print(f"morreylab: gate failed: {', '.join(manifest.failed)}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
