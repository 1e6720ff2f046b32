import csv
import json
import subprocess
import sys

import pytest

from morreylab.cli import main, run
from morreylab.config import config_hash, load_config, parse_config
from morreylab.errors import ConfigError
from morreylab.norms import MixedParams, MorreyParams

KERNELS = """
command = "kernel-validate"
[kernels]
names = ["riesz-transform", "heat-gamma-12"]
order = 64
"""

COMMUTATOR = """
command = "verify-operator"
seed = 3
[grid]
n = 2
box = [[-2, -2], [2, 2]]
resolutions = [16, 32]
[corpus]
count = 4
box = [-1, 1]
lam = 1
[exponents]
source = {p = 2, lam = 1}
target = {p = 2, lam = 1}
[operator]
name = "commutator"
params = {a = "constant:2", epsilon = 0.25}
"""

MAXIMAL = """
command = "verify-operator"
seed = 1
[grid]
n = 1
box = [-2, 2]
resolutions = [64, 128]
steps = [8, 16]
[corpus]
count = 5
box = [-1, 1]
lam = 0.5
[exponents]
source = {q = 2, mu = 0.5, p = 2, lam = 0.5}
target = {q = 2, mu = 0.5, p = 2, lam = 0.5}
[operator]
name = "hl-maximal"
"""

EPSILON = """
command = "epsilon-limit"
[grid]
n = 1
box = [-2, 2]
resolutions = [512]
[corpus]
count = 2
generators = ["bump", "tensor"]
box = [-1, 1]
[exponents]
norm = {p = 2, lam = 0.5}
[epsilon]
largest = 0.25
terms = 4
"""


def write(tmp_path, text, name="exp.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


# -- config ---------------------------------------------------------------------


def test_parse_defaults_and_exponents():
    cfg = parse_config(MAXIMAL)
    assert cfg.command == "verify-operator" and cfg.seed == 1 and cfg.n == 1
    assert cfg.resolutions == (64, 128) and cfg.steps == (8, 16)
    assert cfg.box == ((-2.0,), (2.0,)) and cfg.corpus_box == ((-1.0,), (1.0,))
    assert cfg.corpus.seed == 1 and cfg.corpus.count == 5
    assert cfg.exponents["source"] == MixedParams.of(2, 0.5, 2, 0.5, 1)
    assert cfg.gates.drift_factor == 1.25
    cfg = parse_config(COMMUTATOR)
    assert cfg.exponents["target"] == MorreyParams(2, 1, 2)
    assert not cfg.timed


def test_hash_stable_under_reordering():
    a = 'seed = 4\n[grid]\nn = 1\nresolutions = [8]\n[corpus]\ncount = 3\n'
    b = 'seed = 4\n[corpus]\ncount = 3\n[grid]\nresolutions = [8]\nn = 1\n'
    assert parse_config(a).hash == parse_config(b).hash
    assert parse_config(a).hash != parse_config(a.replace("seed = 4", "seed = 5")).hash
    assert config_hash({"a": 1, "b": {"c": 2, "d": 3}}) == config_hash({"b": {"d": 3, "c": 2}, "a": 1})


@pytest.mark.parametrize(
    "text, field, line",
    [
        ("[grid]\nn = 2\nresolutions = [0]\n", "grid.resolutions", 3),
        ("[grid]\nn = 2\nfoo = 1\n", "grid.foo", 3),
        ("seed = 1\nbogus = 2\n", "bogus", 2),
        ("[exponents]\nsource = {p = 0.5, lam = 1}\n", "exponents.source", 2),
        ("[exponents]\nsource = {p = 2}\n", "exponents.source", 2),
        ("[grid]\nsteps = [4, 4]\nresolutions = [8, 16, 32]\n", "grid.steps", 2),
        ("[grid]\nT = -1.0\n", "grid.T", 2),
        ('[grid]\nn = "two"\n', "grid.n", 2),
        ('[corpus]\ngenerators = ["bump", "spline"]\n', "corpus.generators", 2),
        ("[gates]\ndrift_factor = 0.9\n", "gates.drift_factor", 2),
        ("grid = 3\n", "grid", None),
        ('command = "plot"\n', "command", 1),
    ],
)
def test_config_diagnostics_name_field_and_line(text, field, line):
    with pytest.raises(ConfigError) as e:
        parse_config(text, "exp.toml")
    msg = str(e.value)
    assert f"field '{field}'" in msg
    if line is not None:
        assert msg.startswith(f"exp.toml:{line}:")


def test_toml_syntax_error_reports_line():
    with pytest.raises(ConfigError, match="line 2"):
        parse_config("seed = 1\n[grid\n", "exp.toml")


def test_overrides_and_missing_file(tmp_path):
    cfg = parse_config(MAXIMAL, overrides={"seed": 9, "grid.resolutions": [32], "grid.steps": [4]})
    assert cfg.seed == 9 and cfg.corpus.seed == 9 and cfg.resolutions == (32,) and cfg.steps == (4,)
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "absent.toml")


def test_seed_fixes_corpus():
    from morreylab.embeddings import build_corpus
    from morreylab.grid import build_grid, sample

    g = build_grid(1, (-1, 1), 64)
    vals = []
    for seed in (5, 5, 6):
        cfg = parse_config(MAXIMAL, overrides={"seed": seed})
        fn = build_corpus(cfg.corpus, 1, cfg.corpus_box)[0]
        vals.append(sample(fn.expr, g).values)
    assert (vals[0] == vals[1]).all() and not (vals[0] == vals[2]).all()


# -- runner -----------------------------------------------------------------------


def test_kernel_validate_example(tmp_path):
    out = tmp_path / "out"
    assert main(["kernel-validate", "--config", write(tmp_path, KERNELS), "--out", str(out)]) == 0
    rows = read_csv(out / "kernel-validate.csv")
    zm = {r["kernel"]: float(r["value"]) for r in rows if r["check"] == "zero-mean"}
    assert zm["riesz-transform"] < 1e-8 and zm["heat-gamma-12"] < 1e-8
    hom = [float(r["value"]) for r in rows if r["check"] == "homogeneity"]
    assert max(hom) < 1e-10


def test_constant_commutator_all_zero_and_deterministic(tmp_path):
    path = write(tmp_path, COMMUTATOR)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["verify-operator", "--config", path, "--out", str(a)]) == 0
    assert main(["verify-operator", "--config", path, "--out", str(b)]) == 0
    rows = read_csv(a / "commutator.csv")
    assert len(rows) == 8
    assert all(float(r["ratio"]) == 0.0 for r in rows)
    assert {r["theorem_id"] for r in rows} == {"commutator"}
    assert set(rows[0]) >= {"theorem_id", "function_id", "resolution", "lhs", "rhs", "ratio", "source_p", "target_lam"}
    assert (a / "commutator.csv").read_bytes() == (b / "commutator.csv").read_bytes()
    summary = json.loads((a / "commutator.json").read_text())
    assert summary["pass"] and summary["max_ratio"] == 0.0
    assert [h["resolution"] for h in summary["history"]] == [16, 32]


def test_manifest_lists_every_output(tmp_path):
    out = tmp_path / "m"
    assert main(["verify-operator", "--config", write(tmp_path, MAXIMAL), "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    files = sorted(p.name for p in out.iterdir())
    assert manifest["outputs"] == files
    assert manifest["config_hash"] == load_config(tmp_path / "exp.toml").hash
    assert manifest["pass"] and manifest["version"]
    assert set(manifest["stages"]) >= {"setup", "compute", "write"}


def test_seed_and_resolution_flags(tmp_path):
    path = write(tmp_path, MAXIMAL)
    out = tmp_path / "r"
    assert main(["verify-operator", "--config", path, "--out", str(out), "--resolution", "64", "--seed", "7"]) == 0
    rows = read_csv(out / "hl-maximal.csv")
    assert {r["resolution"] for r in rows} == {"64"} and {r["steps"] for r in rows} == {"8"}
    other = tmp_path / "s"
    main(["verify-operator", "--config", path, "--out", str(other), "--resolution", "64", "--seed", "8"])
    assert (out / "hl-maximal.csv").read_bytes() != (other / "hl-maximal.csv").read_bytes()


def test_epsilon_limit_and_gate_failure(tmp_path, capsys):
    path = write(tmp_path, EPSILON)
    assert main(["epsilon-limit", "--config", path, "--out", str(tmp_path / "e")]) == 0
    rows = read_csv(tmp_path / "e" / "epsilon-limit.csv")
    assert len(rows) == 6 and all(r["monotone"] == "true" for r in rows)
    strict = write(tmp_path, EPSILON + "[gates]\nepsilon_tol = 1e-9\n", "strict.toml")
    assert main(["epsilon-limit", "--config", strict, "--out", str(tmp_path / "f")]) == 1
    assert "gate failed: epsilon-limit" in capsys.readouterr().err


def test_usage_errors_exit_2(tmp_path, capsys):
    path = write(tmp_path, KERNELS)
    with pytest.raises(SystemExit) as e:
        main(["plot", "--config", path])
    assert e.value.code == 2
    assert main(["norms", "--config", path]) == 2
    assert "config is for 'kernel-validate'" in capsys.readouterr().err
    bad = write(tmp_path, "[grid]\nresolutions = [0]\n", "bad.toml")
    assert main(["norms", "--config", bad]) == 2
    assert "field 'grid.resolutions'" in capsys.readouterr().err
    missing = write(tmp_path, 'command = "verify-embedding"\n', "missing.toml")
    assert main(["verify-embedding", "--config", missing, "--out", str(tmp_path / "x")]) == 2
    assert "exponents.source" in capsys.readouterr().err


def test_norms_and_pde_commands(tmp_path):
    norms = """
[grid]
n = 1
box = [-2, 2]
resolutions = [32]
steps = [8]
[corpus]
count = 3
box = [-1, 1]
[exponents]
norm = {q = 2, mu = 0.5, p = 2, lam = 0.5}
"""
    assert main(["norms", "--config", write(tmp_path, norms, "n.toml"), "--out", str(tmp_path / "n")]) == 0
    rows = read_csv(tmp_path / "n" / "norms.csv")
    assert len(rows) == 3 and all(float(r["value"]) > 0 for r in rows)
    assert {r["params"] for r in rows} == {"q=2.0;mu=0.5;p=2.0;lam=0.5"}
    pde = """
[grid]
n = 2
resolutions = [20, 24]
steps = [8, 10]
[exponents]
norm = {q = 2, mu = 0.5, p = 2, lam = 1}
[pde]
count = 2
radii = [0.75, 0.5]
coefficients = ["identity"]
"""
    assert main(["pde-check", "--config", write(tmp_path, pde, "p.toml"), "--out", str(tmp_path / "p")]) == 0
    res = read_csv(tmp_path / "p" / "apriori-identity-residual.csv")
    assert all(float(r["relative_residual"]) < 1e-12 for r in res)


def test_run_rejects_unknown_command():
    cfg = parse_config(KERNELS)
    object.__setattr__(cfg, "command", "plot")
    with pytest.raises(ConfigError, match="unknown command"):
        run(cfg, "/nonexistent")


def test_console_entry_point(tmp_path):
    path = write(tmp_path, KERNELS)
    proc = subprocess.run(
        [sys.executable, "-m", "morreylab.cli", "kernel-validate", "--config", path, "--out", str(tmp_path / "o")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    proc = subprocess.run([sys.executable, "-m", "morreylab.cli", "nope", "--config", path], capture_output=True, text=True)
    assert proc.returncode == 2
