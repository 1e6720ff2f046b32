"""Exponent relations of the embedding and boundedness results.

Each constructor validates its inputs, computes the dependent exponents and
returns an :class:`ExponentRelation`.  ``identities`` holds the defining
identity and its inverse forms evaluated at the result, so callers (and
tests) can check them without re-deriving the formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..errors import InadmissibleExponentsError

__all__ = [
    "ExponentRelation",
    "morrey_embedding_exponent",
    "temporal_embedding_exponent",
    "composite_embedding_exponents",
    "adams_exponent",
    "adams_corollary_exponents",
    "fractional_maximal_exponent",
    "morrey_pair_admissible",
    "temporal_pair_admissible",
    "composite_admissible",
    "relaxed_morrey_embedding",
    "relaxed_temporal_embedding",
    "relaxed_composite_embedding",
]


@dataclass(frozen=True)
class ExponentRelation:
    name: str
    inputs: dict
    outputs: dict
    admissibility: tuple = ()
    identities: dict = field(default_factory=dict)
    flags: tuple = ()

    def __getitem__(self, key):
        return self.outputs[key]

    def describe(self) -> str:
        items = {**self.inputs, **self.outputs}
        return ";".join(f"{k}={float(v)!r}" for k, v in items.items())


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise InadmissibleExponentsError(message)


def _finite(*values) -> None:
    for v in values:
        _require(isinstance(v, (int, float)) and math.isfinite(v), f"exponent {v!r} is not a finite number")


def morrey_embedding_exponent(n, p, lam, mu, relaxed: bool = False) -> ExponentRelation:
    """q = (n - mu) p / (n - lam), giving L^{p,lam} in L^{q,mu} on a bounded domain.

    Strict: ``1 < p``, ``0 < lam < mu < n``, and the result satisfies ``1 < q < p``.
    Relaxed admits ``lam = mu`` (so ``q = p``) and ``lam = 0``.
    """
    _finite(n, p, lam, mu)
    if relaxed:
        _require(1 <= p and 0 <= lam <= mu < n, f"need 1 <= p and 0 <= lam <= mu < n (got p={p}, lam={lam}, mu={mu}, n={n})")
    else:
        _require(1 < p and 0 < lam < mu < n, f"need 1 < p and 0 < lam < mu < n (got p={p}, lam={lam}, mu={mu}, n={n})")
    q = (n - mu) * p / (n - lam)
    _require(q > 1 or (relaxed and q >= 1), f"resulting q={q} must exceed 1")
    return ExponentRelation(
        "morrey-embedding",
        {"n": n, "p": p, "lam": lam, "mu": mu},
        {"q": q},
        ("1 < p", "0 < lam < mu < n", "1 < q < p"),
        {"q/p": q / p, "(n-mu)/(n-lam)": (n - mu) / (n - lam), "mu": n - n * q / p + lam * q / p},
    )


def temporal_embedding_exponent(q1, mu1, mu, relaxed: bool = False) -> ExponentRelation:
    """q = (1 - mu) q1 / (1 - mu1) for the temporal Morrey exponent.

    Strict: ``1 < q1``, ``0 < mu1 < mu < 1`` and ``q > 1``.  Relaxed admits
    ``mu = mu1``.
    """
    _finite(q1, mu1, mu)
    if relaxed:
        _require(1 < q1 and 0 < mu1 <= mu < 1, f"need 1 < q1 and 0 < mu1 <= mu < 1 (got q1={q1}, mu1={mu1}, mu={mu})")
    else:
        _require(1 < q1 and 0 < mu1 < mu < 1, f"need 1 < q1 and 0 < mu1 < mu < 1 (got q1={q1}, mu1={mu1}, mu={mu})")
    q = (1 - mu) * q1 / (1 - mu1)
    _require(q > 1, f"resulting q={q} must exceed 1")
    return ExponentRelation(
        "temporal-embedding",
        {"q1": q1, "mu1": mu1, "mu": mu},
        {"q": q},
        ("1 < q < q1", "0 < mu1 < mu < 1"),
        {"q/q1": q / q1, "(1-mu)/(1-mu1)": (1 - mu) / (1 - mu1), "mu": 1 - (1 - mu1) * q / q1},
    )


def composite_embedding_exponents(n, p, lam, mu, q1, mu1, mu2=None, q2=None, relaxed: bool = False) -> ExponentRelation:
    """Exponents of L^{q1,mu1}(L^{p,lam}) in L^{q2,mu2}(L^{q,mu}).

    Give exactly one of ``mu2`` or ``q2``; the other follows from
    ``q2 = (1 - mu2) q1 / (1 - mu1)``.
    """
    _require((mu2 is None) != (q2 is None), "give exactly one of mu2 and q2")
    spatial = morrey_embedding_exponent(n, p, lam, mu, relaxed)
    if mu2 is None:
        _finite(q2, q1, mu1)
        mu2 = 1 - (1 - mu1) * q2 / q1
    temporal = temporal_embedding_exponent(q1, mu1, mu2, relaxed)
    q, q2 = spatial["q"], temporal["q"]
    return ExponentRelation(
        "composite-embedding",
        {"n": n, "p": p, "lam": lam, "mu": mu, "q1": q1, "mu1": mu1},
        {"q": q, "q2": q2, "mu2": mu2},
        spatial.admissibility + temporal.admissibility,
        {**spatial.identities, "q2/q1": q2 / q1, "(1-mu2)/(1-mu1)": (1 - mu2) / (1 - mu1)},
    )


def _adams_pre(n, p, lam, alpha, relaxed):
    _finite(n, p, lam, alpha)
    lo_alpha = 0 <= alpha if relaxed else 0 < alpha
    _require(lo_alpha and alpha < n, f"need 0 < alpha < n (got alpha={alpha}, n={n})")
    _require(1 < p and (alpha == 0 or p < n / alpha), f"need 1 < p < n/alpha (got p={p})")
    lo_lam = 0 <= lam if relaxed else 0 < lam
    _require(lo_lam and lam < n - alpha * p, f"need 0 < lam < n - alpha p (got lam={lam})")


def adams_exponent(n, p, lam, alpha, relaxed: bool = False) -> ExponentRelation:
    """1/q = 1/p - alpha/(n - lam) for the Riesz potential on Morrey spaces.

    Also exposes (n - lam - alpha p)/(n - lam) = p/q and alpha q/(n - lam) + 1 = q/p.
    Relaxed admits ``alpha = 0`` (then ``q = p``).
    """
    _adams_pre(n, p, lam, alpha, relaxed)
    inv = 1 / p - alpha / (n - lam)
    _require(inv > 0, f"1/q = {inv} must be positive")
    q = 1 / inv
    return ExponentRelation(
        "adams",
        {"n": n, "p": p, "lam": lam, "alpha": alpha},
        {"q": q},
        ("0 < alpha < n", "1 < p < n/alpha", "0 < lam < n - alpha p"),
        {
            "1/q": 1 / q,
            "1/p - alpha/(n-lam)": inv,
            "p/q": p / q,
            "(n-lam-alpha p)/(n-lam)": (n - lam - alpha * p) / (n - lam),
            "q/p": q / p,
            "alpha q/(n-lam) + 1": alpha * q / (n - lam) + 1,
        },
    )


def adams_corollary_exponents(n, p, lam, alpha, relaxed: bool = False) -> ExponentRelation:
    """1/q = 1/p - alpha/n together with mu = n lam / (n - alpha p)."""
    _adams_pre(n, p, lam, alpha, relaxed)
    q = 1 / (1 / p - alpha / n)
    mu = n * lam / (n - alpha * p)
    flags = ("mu=0 at the lam=0 boundary",) if lam == 0 else ()
    if not relaxed:
        _require(lam < mu < n, f"need lam < mu < n (got mu={mu})")
    return ExponentRelation(
        "adams-corollary",
        {"n": n, "p": p, "lam": lam, "alpha": alpha},
        {"q": q, "mu": mu},
        ("0 < alpha < n", "1 < p < n/alpha", "0 < lam < n - alpha p", "lam < mu < n"),
        {"1/q": 1 / q, "1/p - alpha/n": 1 / p - alpha / n, "mu (n - alpha p)": mu * (n - alpha * p), "n lam": n * lam},
        flags,
    )


def fractional_maximal_exponent(n, p, lam, eta, relaxed: bool = False) -> ExponentRelation:
    """1/q = 1/p - n eta / (n - lam), with eps = (n - lam - n eta p)/(n - lam) = p/q.

    Requires ``0 < eta < (1 - lam/n)/p``; relaxed admits ``eta = 0``.
    """
    _finite(n, p, lam, eta)
    _require(1 < p and 0 < lam < n, f"need 1 < p and 0 < lam < n (got p={p}, lam={lam})")
    top = (1 - lam / n) / p
    lo = 0 <= eta if relaxed else 0 < eta
    _require(lo and eta < top, f"need 0 < eta < (1 - lam/n)/p = {top} (got eta={eta})")
    inv = 1 / p - n * eta / (n - lam)
    q = 1 / inv
    eps = (n - lam - n * eta * p) / (n - lam)
    return ExponentRelation(
        "fractional-maximal",
        {"n": n, "p": p, "lam": lam, "eta": eta},
        {"q": q, "eps": eps},
        ("1 < p", "0 < lam < n", "0 < eta < (1 - lam/n)/p"),
        {"1/q": 1 / q, "1/p - n eta/(n-lam)": inv, "p/eps": p / eps, "q": q},
    )


# ---------------------------------------------------------------------------
# relaxed pair admissibility


def morrey_pair_admissible(n, p, lam, q, mu) -> bool:
    """1 <= q <= p, 0 <= lam, mu < n and (n - mu)/q >= (n - lam)/p."""
    ranges = 1 <= q <= p < math.inf and 0 <= lam < n and 0 <= mu < n
    return bool(ranges and (n - mu) / q >= (n - lam) / p)


def temporal_pair_admissible(q1, mu1, q, mu, n=None) -> bool:
    """1 < q <= q1, 0 < mu1 <= mu < 1 or 1 < mu1 <= mu < n, and (1 - mu)/q >= (1 - mu1)/q1."""
    upper = math.inf if n is None else n
    ranges = 1 < q <= q1 < math.inf and ((0 < mu1 <= mu < 1) or (1 < mu1 <= mu < upper))
    return bool(ranges and (1 - mu) / q >= (1 - mu1) / q1)


def composite_admissible(n, p, lam, q, mu, q1, mu1, q2, mu2) -> bool:
    """Both inequalities of the composite embedding with its stated ranges.

    The temporal range reads ``0 < mu1 <= mu2 < 1`` or ``1 < mu2 <= mu1 < n``.
    """
    spatial = 1 < q <= p < math.inf and 0 < lam <= mu < n and (n - mu) / q >= (n - lam) / p
    temporal_range = (0 < mu1 <= mu2 < 1) or (1 < mu2 <= mu1 < n)
    temporal = 1 < q2 <= q1 < math.inf and temporal_range and (1 - mu2) / q2 >= (1 - mu1) / q1
    return bool(spatial and temporal)


def relaxed_morrey_embedding(n, p, lam, q, mu) -> ExponentRelation:
    _require(morrey_pair_admissible(n, p, lam, q, mu), f"(n-mu)/q >= (n-lam)/p fails or out of range: {(n, p, lam, q, mu)}")
    return ExponentRelation(
        "morrey-embedding-relaxed",
        {"n": n, "p": p, "lam": lam},
        {"q": q, "mu": mu},
        ("1 <= q <= p", "0 <= lam, mu < n", "(n-mu)/q >= (n-lam)/p"),
    )


def relaxed_temporal_embedding(q1, mu1, q, mu, n=None) -> ExponentRelation:
    _require(temporal_pair_admissible(q1, mu1, q, mu, n), f"(1-mu)/q >= (1-mu1)/q1 fails or out of range: {(q1, mu1, q, mu)}")
    return ExponentRelation(
        "temporal-embedding-relaxed",
        {"q1": q1, "mu1": mu1},
        {"q": q, "mu": mu},
        ("1 < q <= q1", "0 < mu1 <= mu < 1 or 1 < mu1 <= mu < n", "(1-mu)/q >= (1-mu1)/q1"),
    )


def relaxed_composite_embedding(n, p, lam, q, mu, q1, mu1, q2, mu2) -> ExponentRelation:
    _require(
        composite_admissible(n, p, lam, q, mu, q1, mu1, q2, mu2),
        f"composite embedding inequalities fail or out of range: {(n, p, lam, q, mu, q1, mu1, q2, mu2)}",
    )
    return ExponentRelation(
        "composite-embedding-relaxed",
        {"n": n, "p": p, "lam": lam, "q1": q1, "mu1": mu1},
        {"q": q, "mu": mu, "q2": q2, "mu2": mu2},
        ("(n-mu)/q >= (n-lam)/p", "(1-mu2)/q2 >= (1-mu1)/q1"),
    )
