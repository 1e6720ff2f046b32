"""Acceptance criteria 1-12, each at its stated tolerance.

Every criterion prints one PASS/FAIL line; under pytest the lines are also
collected into the terminal summary.  Run standalone with
``python3 -m tests.test_acceptance``.  Criterion 3 takes about 3 minutes and
the whole module about 8 on one core.
"""

import math
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

from morreylab.embeddings import (
    CorpusSpec,
    Discretization,
    RatioReport,
    adams_corollary_exponents,
    adams_exponent,
    build_corpus,
    commutator_small_ball,
    composite_embedding_exponents,
    field_norm,
    fractional_maximal_exponent,
    morrey_embedding_exponent,
    sample_corpus,
    temporal_embedding_exponent,
    verify_embedding,
    verify_operator_bound,
)
from morreylab.embeddings.corpus import bump_profile
from morreylab.grid import RadiusSet, SampledField, TimeAxis, build_grid, sample
from morreylab.norms import MixedParams, MorreyParams, mixed_morrey_norm, morrey_norm
from morreylab.operators import (
    EpsilonSchedule,
    commutator,
    epsilon_limit,
    get_kernel,
    hl_maximal,
    kernel_validate,
    parabolic_dilation,
    parabolic_distance,
    riesz_potential,
    sharp_maximal,
    truncated_singular_integral,
)
from morreylab.parabolic import (
    StrongSolutionSample,
    apriori_check,
    coefficient_family,
    manufactured_solutions,
    representation_check,
    time_derivative_residual,
)

from . import oracles

RESULTS: dict = {}

BOX2 = ([-1.0, -1.0], [1.0, 1.0])
WIDE2 = ([-2.0, -2.0], [2.0, 2.0])


def verdict(number: int, title: str, checks: list) -> bool:
    """Record and print one line; ``checks`` holds ``(label, ok, detail)``."""
    ok = all(c[1] for c in checks)
    parts = [f"{label}: {detail}" + ("" if good else " <- fails") for label, good, detail in checks]
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d} {title} | " + "; ".join(parts)
    RESULTS[number] = line
    print(line, flush=True)
    return ok


def g4(v) -> str:
    return "None" if v is None else f"{v:.4g}"


def drift_detail(rep: RatioReport) -> str:
    hist = ", ".join(f"{res}:{g4(v)}" for res, v in rep.history)
    drifts = ", ".join(g4(d) for d in rep.drifts())
    return f"max ratio by resolution [{hist}], drift [{drifts}] < {rep.drift_factor}"


def drift_check(label: str, rep: RatioReport):
    finite = rep.max_ratio is not None and math.isfinite(rep.max_ratio)
    return (label, rep.passed and finite, drift_detail(rep))


# ---------------------------------------------------------------------------


def criterion_1():
    worst_mixed = worst_spatial = 0.0
    fields = 0
    for n in (1, 2):
        box = ([-1.0] * n, [1.0] * n)
        g, tm = build_grid(n, box, 8), TimeAxis(1.0, 8)
        sp = MorreyParams(2.0, n / 2, n)
        mp = MixedParams(2.0, 0.5, sp)
        radii, tradii = RadiusSet.for_grid(g), RadiusSet.for_time(tm)
        corpus = build_corpus(CorpusSpec(count=20, seed=0, p=2, lam=n / 2), n, box, T=1.0)
        for _, f in sample_corpus(corpus, g, tm):
            fields += 1
            got = mixed_morrey_norm(f, mp, radii, tradii).value
            ref = oracles.mixed_morrey(f.values, g.origin, g.h, tm.dt, 2.0, 0.5, 2.0, n / 2, radii.radii, tradii.radii)
            worst_mixed = max(worst_mixed, abs(got - ref) / ref if ref else abs(got))
            for s in f.slices():
                got = morrey_norm(s, sp, radii).value
                ref = oracles.morrey(s.values, g.origin, g.h, 2.0, n / 2, radii.radii)
                worst_spatial = max(worst_spatial, abs(got - ref) / ref if ref else abs(got))
    return verdict(
        1,
        "norm oracle equivalence",
        [
            ("morrey_norm", worst_spatial <= 1e-10, f"max rel diff {worst_spatial:.2e} <= 1e-10 over every slice"),
            ("mixed_morrey_norm", worst_mixed <= 1e-10, f"max rel diff {worst_mixed:.2e} <= 1e-10 over {fields} fields (n=1,2; 8^n x 8)"),
        ],
    )


def criterion_2():
    rel = morrey_embedding_exponent(2, 3, 0.5, 1.0)
    corpus = build_corpus(CorpusSpec(count=20, seed=0, p=3, lam=0.5), 2, BOX2)
    rep = verify_embedding(corpus, MorreyParams(3, 0.5, 2), MorreyParams(rel["q"], 1.0, 2), Discretization(2, BOX2, (64, 128)), "morrey-embedding")
    return verdict(2, "spatial embedding", [drift_check(f"q={g4(rel['q'])}", rep)])


def criterion_3():
    corpus = build_corpus(CorpusSpec(count=20, seed=0, p=3, lam=0.5, q=2, mu=0.25), 2, BOX2, T=1.0)
    disc = Discretization(2, BOX2, (64, 128), (64, 128))
    src = MixedParams.of(2, 0.25, 3, 0.5, 2)
    tmp = temporal_embedding_exponent(2, 0.25, 0.5)
    rep_t = verify_embedding(corpus, src, MixedParams.of(tmp["q"], 0.5, 3, 0.5, 2), disc, "temporal-embedding")
    comp = composite_embedding_exponents(2, 3, 0.5, 1.0, 2, 0.25, mu2=0.5)
    rep_c = verify_embedding(corpus, src, MixedParams.of(comp["q2"], 0.5, comp["q"], 1.0, 2), disc, "composite-embedding")
    return verdict(
        3,
        "temporal and composite embeddings",
        [drift_check(f"temporal q={g4(tmp['q'])}", rep_t), drift_check(f"composite q={g4(comp['q'])} q2={g4(comp['q2'])}", rep_c)],
    )


def _space_time_setup(lam):
    corpus = build_corpus(CorpusSpec(count=20, seed=0, p=2, lam=lam), 2, BOX2, T=1.0)
    return corpus, Discretization(2, WIDE2, (64, 128), (16, 16), 1.0)


def criterion_4():
    corpus, disc = _space_time_setup(1.0)
    params = MixedParams.of(2, 0.5, 2, 1, 2)
    rep = verify_operator_bound(corpus, "hl-maximal", params, params, disc, "maximal")
    g = build_grid(1, (-8, 8), 4096)
    chi = sample(lambda x: (np.abs(x[..., 0]) < 1).astype(float), g)
    m3 = float(hl_maximal(chi).values[g.nearest_index((3.0,))])
    err = abs(m3 - 0.25) / 0.25
    return verdict(
        4,
        "maximal bound",
        [drift_check("ratio", rep), ("closed form", err <= 0.02, f"M chi(3) = {m3:.5f} vs 1/4, rel err {err:.2e} <= 2% at h = 1/256")],
    )


def _riesz_dilation(f, alpha=0.5, s=2.0):
    """Max over |x|_inf <= 1.5 of |I f_s(x) - s^-alpha I f(s x)| / |s^-alpha I f(s x)|."""
    # odd resolution puts 0 and every k*h at cell centers, so s*x is a cell center too
    h = 1 / 64
    g = build_grid(2, ([-4 - h / 2] * 2, [4 + h / 2] * 2), 513)
    If = riesz_potential(sample(f, g), alpha, method="fft").values
    Ifs = riesz_potential(sample(lambda x: f(s * x), g), alpha, method="fft").values
    c, k = 256, 96
    lhs = Ifs[c - k : c + k + 1, c - k : c + k + 1]
    rhs = s**-alpha * If[c - 2 * k : c + 2 * k + 1 : 2, c - 2 * k : c + 2 * k + 1 : 2]
    return float(np.max(np.abs(lhs - rhs) / np.abs(rhs)))


DILATION_FIELDS = {
    "bump": lambda x: bump_profile(np.linalg.norm(x - np.array([0.1, -0.05]), axis=-1) / 1.2),
    "gaussian": lambda x: np.exp(-4 * np.sum(x * x, axis=-1)),
    "bump pair": lambda x: bump_profile(np.linalg.norm(x - 0.4, axis=-1) / 0.5) + 0.5 * bump_profile(np.linalg.norm(x + 0.3, axis=-1) / 0.7),
}


def criterion_5():
    corpus, disc = _space_time_setup(0.4)
    src = MixedParams.of(2, 0.5, 2, 0.4, 2)
    q = adams_exponent(2, 2, 0.4, 0.5)["q"]
    rep = verify_operator_bound(corpus, "riesz", src, MixedParams.of(2, 0.5, q, 0.4, 2), disc, "riesz", {"alpha": 0.5})
    cor = adams_corollary_exponents(2, 2, 0.4, 0.5)
    rep_c = verify_operator_bound(corpus, "riesz", src, MixedParams.of(2, 0.5, cor["q"], cor["mu"], 2), disc, "riesz-corollary", {"alpha": 0.5})
    errs = {name: _riesz_dilation(f) for name, f in DILATION_FIELDS.items()}
    err = max(errs.values())
    # a sampled jump is not dilation covariant cell by cell; reported, not gated
    disc = _riesz_dilation(lambda x: (np.linalg.norm(x, axis=-1) < 0.6).astype(float))
    # signed field: relative error is unbounded where I f crosses zero; reported, not gated
    signed = _riesz_dilation(lambda x: DILATION_FIELDS["bump pair"](x) - bump_profile(np.linalg.norm(x + 0.3, axis=-1) / 0.7))
    return verdict(
        5,
        "Riesz potential bounds",
        [
            drift_check(f"adams q={g4(q)}", rep),
            drift_check(f"corollary q={g4(cor['q'])} mu={g4(cor['mu'])}", rep_c),
            (
                "dilation",
                err <= 0.02,
                "max pointwise rel err " + ", ".join(f"{k} {v:.2e}" for k, v in errs.items()) + f" <= 2% (s=2, alpha=1/2, h=1/64); disc indicator {disc:.2e}, signed pair {signed:.2e} (info)",
            ),
        ],
    )


def _one_d_setup():
    corpus = build_corpus(CorpusSpec(count=20, seed=0, p=2, lam=0.5), 1, ([-1.0], [1.0]), T=1.0)
    return corpus, Discretization(1, ([-2.0], [2.0]), (256, 512), (32, 64), 1.0)


def criterion_6():
    corpus, disc = _one_d_setup()
    params = MixedParams.of(2, 0.5, 2, 0.5, 1)
    rep = verify_operator_bound(corpus, "fefferman-stein", params, params, disc, "fefferman-stein")
    # constant field: f# vanishes, so the row is degenerate; M f = |c| does not vanish
    g, tm = build_grid(1, ([-2.0], [2.0]), 256), TimeAxis(1.0, 32)
    const = SampledField(g, np.full((32, 256), 1.5), tm)
    sharp = field_norm(sharp_maximal(const), params)
    maxf = field_norm(hl_maximal(const), params)
    deg = RatioReport("fefferman-stein-constant")
    deg.add("constant", 256, maxf, sharp, 32)
    logged = deg.degenerate == ["constant@256"] and deg.max_ratio is None
    return verdict(
        6,
        "Fefferman-Stein bound",
        [
            drift_check("ratio", rep),
            ("constant f", sharp == 0.0 and logged, f"||f#|| = {sharp!r}, row logged degenerate; ||Mf|| = {maxf:.4g} (not 0, see ledger)"),
        ],
    )


def criterion_7():
    corpus, disc = _one_d_setup()
    src = MixedParams.of(2, 0.5, 2, 0.5, 1)
    rel = fractional_maximal_exponent(1, 2, 0.5, 0.1)
    rep = verify_operator_bound(corpus, "fractional-maximal", src, MixedParams.of(2, 0.5, rel["q"], 0.5, 1), disc, "fractional-maximal", {"eta": 0.1, "oscillation": True})
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 7))
        p = float(rng.uniform(1.01, 10))
        lam = float(rng.uniform(0.01, 0.99)) * n
        eta = float(rng.uniform(0.01, 0.99)) * (1 - lam / n) / p
        r = fractional_maximal_exponent(n, p, lam, eta)
        worst = max(worst, abs(p / r["eps"] - r["q"]) / r["q"])
    return verdict(
        7,
        "fractional maximal bound",
        [drift_check(f"oscillation form q={g4(rel['q'])}", rep), ("p/eps = q", worst <= 1e-12, f"max rel defect {worst:.2e} <= 1e-12 over 100 tuples")],
    )


def criterion_8():
    corpus, disc = _space_time_setup(1.0)
    params = MixedParams.of(2, 0.5, 2, 1, 2)
    rep_a = verify_operator_bound(corpus, "singular-integral", params, params, disc, "singular-integral", {"epsilon": 0.125})

    g = build_grid(2, WIDE2, 64)
    worst = 0.0
    for _, f in sample_corpus(build_corpus(CorpusSpec(count=20, seed=1), 2, BOX2), g):
        a = SampledField(g, np.full(g.extent, 2.0))
        for method in ("direct", "fft"):
            worst = max(worst, float(np.max(np.abs(commutator(a, f, "riesz-transform", 0.125, method).values))))

    c1 = build_corpus(CorpusSpec(count=10, seed=0, p=2, lam=0.5), 1, ([-1.0], [1.0]))
    rep_c = commutator_small_ball(c1, MorreyParams(2, 0.5, 1), (0.5, 0.25, 0.125, 0.0625), Discretization(1, ([-1.0], [1.0]), (2048, 4096)), method="fft")
    sweep = ", ".join(f"{r:g}:{g4(v)}" for r, v in rep_c.radius_sweep)

    sched = EpsilonSchedule.dyadic(1 / 8, 4)
    g2 = build_grid(2, WIDE2, 256)
    smooth = build_corpus(CorpusSpec(generators=("bump", "tensor"), count=4, seed=0), 2, BOX2)
    mono, dists = True, []
    for fid, f in sample_corpus(smooth, g2):
        _, r = epsilon_limit(lambda e: truncated_singular_integral(f, "riesz-transform", e, "fft"), sched, MorreyParams(2, 1, 2))
        mono &= r.monotone
        dists.append(f"{fid}:[" + ", ".join(g4(d) for d in r.distances) + "]")
    return verdict(
        8,
        "singular integrals and commutators",
        [
            drift_check("(a) K_eps", rep_a),
            ("(b) constant a", worst <= 1e-12, f"max |C[a,f]| = {worst:.1e} <= 1e-12"),
            ("(c) small balls", rep_c.passed, f"max ratio by radius [{sweep}], nonincreasing within {rep_c.slack:.0%}"),
            ("(d) eps limit", mono, "distances " + " ".join(dists)),
        ],
    )


def criterion_9():
    checks = []
    for name in ("riesz-transform", "heat-gamma-12"):
        rep = kernel_validate(get_kernel(name), order=64)
        ok = rep.zero_mean_defect < 1e-8 and rep.homogeneity_defect < 1e-10
        checks.append((name, ok, f"zero-mean {rep.zero_mean_defect:.1e} < 1e-8, homogeneity {rep.homogeneity_defect:.1e} < 1e-10"))
    return verdict(9, "kernel axioms", checks)


def criterion_10():
    rng = np.random.default_rng(10)
    axes = 0.0
    for n in (1, 2, 3):
        xp = rng.standard_normal((1000, n)) * rng.uniform(1e-3, 1e3, (1000, 1))
        t = rng.standard_normal(1000) * rng.uniform(1e-3, 1e3, 1000)
        on_space = parabolic_distance(np.concatenate([xp, np.zeros((1000, 1))], axis=1))
        on_time = parabolic_distance(np.concatenate([np.zeros((1000, n)), t[:, None]], axis=1))
        axes = max(axes, float(np.max(np.abs(on_space / np.linalg.norm(xp, axis=1) - 1))))
        axes = max(axes, float(np.max(np.abs(on_time / np.sqrt(np.abs(t)) - 1))))
    x = rng.standard_normal((1000, 3)) * rng.uniform(1e-3, 1e3, (1000, 1))
    s = rng.uniform(1e-2, 1e2, 1000)
    lhs = np.array([parabolic_distance(parabolic_dilation(xi, si)) for xi, si in zip(x, s)])
    homog = float(np.max(np.abs(lhs / (s * parabolic_distance(x)) - 1)))
    eps = np.finfo(float).eps
    return verdict(
        10,
        "parabolic metric",
        [
            ("axes", axes <= 1e-12, f"max rel err {axes:.1e} <= 1e-12"),
            ("homogeneity", homog <= 16 * eps, f"max rel err {homog:.1e} <= 16 ulp over 1000 points"),
        ],
    )


def _representation():
    T = 1 / 16
    g, tm = build_grid(2, ([-0.5, -0.5], [0.5, 0.5]), 64), TimeAxis(T, 256)
    x0 = np.array([0.05, -0.025])
    U = lambda x, t: bump_profile(np.linalg.norm(x - x0, axis=-1) / 0.25) * bump_profile((t - T / 2) / (0.4 * T))
    s = StrongSolutionSample.from_function(U, g, tm)
    a = coefficient_family("identity")(g)
    return representation_check(s, a, EpsilonSchedule((1 / 8, 1 / 16, 1 / 32)), MixedParams.of(2, 0.5, 2, 1, 2))


def criterion_11():
    family = manufactured_solutions(count=10, seed=0, d=2, radius=1.0, T=1.0)
    disc = Discretization(2, BOX2, (64, 128), (16, 16), 1.0)
    params = MixedParams.of(2, 0.5, 2, 1, 2)
    checks = []
    for coef in ("identity", "smooth-perturbation"):
        res = apriori_check(family, coef, params, (0.75, 0.5, 0.25), disc, theorem_id=f"apriori-{coef}")
        checks.append(drift_check(f"{coef} D2u", res.hessian))
        checks.append(drift_check(f"{coef} u_t", res.time))
        checks.append((f"{coef} consistency", res.consistency_ok and res.tail_stable(), "||u_t|| <= ||Lu|| + sum ||a_ij|| ||D_ij u||, smallest-radius ratio stable"))
        g, tm = build_grid(2, BOX2, 128), TimeAxis(1.0, 16)
        a = coefficient_family(coef)(g, tm)
        worst = 0.0
        for _, U in family:
            smp = StrongSolutionSample.from_field(sample(lambda x, t, U=U: U(x / 0.5, t), g, tm))
            worst = max(worst, time_derivative_residual(a, smp) / float(np.max(np.abs(smp.ut.values))))
        checks.append((f"{coef} u_t identity", worst <= 1e-12, f"max rel residual {worst:.1e} <= 1e-12"))
    rep = _representation()
    mono = all(r.monotone for r in rep.values())
    dist = " ".join(f"D{i + 1}{j + 1}:[" + ", ".join(g4(d) for d in r.distances) + "]" for (i, j), r in sorted(rep.items()))
    checks.append(("representation", mono, f"relative distances over eps 1/8, 1/16, 1/32 decrease: {dist}"))
    return verdict(11, "parabolic a-priori bounds", checks)


def criterion_12():
    from morreylab.cli import main

    configs = {
        "verify-embedding": """
[grid]
n = 2
box = [-1, 1]
resolutions = [64, 128]
[corpus]
count = 20
p = 3
lam = 0.5
[exponents]
source = {p = 3, lam = 0.5}
target = {p = 2, lam = 1.0}
""",
        "verify-operator": """
[grid]
n = 1
box = [-2, 2]
resolutions = [256, 512]
steps = [32, 64]
[corpus]
count = 20
box = [-1, 1]
lam = 0.5
[exponents]
source = {q = 2, mu = 0.5, p = 2, lam = 0.5}
target = {q = 2, mu = 0.5, p = 2, lam = 0.5}
[operator]
name = "fefferman-stein"
""",
        "kernel-validate": """
[kernels]
names = ["riesz-transform", "heat-gamma-12"]
""",
    }
    checks = []
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        for command, text in configs.items():
            cfg = tmp / f"{command}.toml"
            cfg.write_text(text)
            codes, blobs = [], []
            for k in range(2):
                out = tmp / f"{command}-{k}"
                codes.append(main([command, "--config", str(cfg), "--out", str(out), "--seed", "17"]))
                blobs.append({p.name: p.read_bytes() for p in sorted(out.glob("*.csv"))})
            same = blobs[0] == blobs[1] and bool(blobs[0])
            checks.append((command, same and codes == [0, 0], f"{len(blobs[0])} CSV file(s) byte-identical, exit codes {codes}"))
    return verdict(12, "determinism", checks)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{k:02d}" for k in range(1, 13)])
def test_acceptance(criterion):
    assert criterion()


if __name__ == "__main__":
    failed = 0
    for crit in CRITERIA:
        t0 = time.perf_counter()
        failed += not crit()
        print(f"    ({time.perf_counter() - t0:.1f} s)", flush=True)
    sys.exit(1 if failed else 0)
