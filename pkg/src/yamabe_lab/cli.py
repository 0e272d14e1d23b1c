"""Command-line driver: verification suite, dimension scan and parameter studies.

Usage::

    yamabe-lab verify [--samples N] [--seed S] [--out FILE] [--format json|csv]
    yamabe-lab scan --n-min 11 --n-max 100
    yamabe-lab eps-star --n 52
    yamabe-lab hessian --n 12 --eps 0.4
    yamabe-lab curvature [--order-test]
    yamabe-lab energy --n 12 --mu 0.1 --lambda 0.01 --rho 0.5

Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage
errors. JSON reports carry ``"schema": 1``, the full configuration and a
timestamp; keys are sorted so reruns differ only in the timestamp.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .bubbles import (
    BubbleParams,
    OmegaDomain,
    bubble,
    bubble_mass,
    bubble_mass_from_yamabe,
    omega_contains,
    phi_norm,
)
from .calculus import (
    IDENTITY_KINDS,
    SCAN_CSV_HEADER,
    F0,
    certify_minimum,
    dimension_scan,
    eps_star,
    hessian_brackets,
    hessian_xi_closed,
    hessian_xi_integral,
    homogeneous_sphere_integral,
    identity_integrand,
    identity_rhs,
    monomials,
    radial_recurrences_check,
    reduced_bracket,
    sphere_moment,
)
from .curvature import (
    GluedField,
    GluedFieldParams,
    HbarTensorField,
    PatchField,
    PatchParams,
    F_partial,
    F_zero_quadrature,
    error_norms,
    fit_exponent,
    log_smallness,
    quadratic_energy,
    random_sym_field,
    remainder_order_fit,
    scalar_curvature_exact,
    sym_exp_jet,
)
from .errors import YamabeLabError
from .quadrature import QuadratureEstimate, RadialDensity, RegionSpec, ball_mc, sphere_mc
from .weyl import M_matrix, random_weyl, weyl_quadratic_norm

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    n: int | None = None
    n_min: int = 11
    n_max: int = 100
    seed: int = 42
    samples: int = 1_000_000
    eps: float | None = None
    mu: float | None = None
    lam: float | None = None
    rho: float | None = None
    out: str | None = None
    format: str = "json"
    order_test: bool = False
    tolerances: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["lambda"] = d.pop("lam")
        return d

    def budget(self, cap: int) -> int:
        """Sample count for one stochastic check: ``--samples`` capped at ``cap``."""
        return max(2, min(self.samples, cap))


@dataclass
class Check:
    name: str
    anchor: str
    passed: bool
    value: object = None
    reference: object = None
    std_err: object = None
    tolerance: object = None
    samples: int | None = None
    reason: str = ""

    def to_dict(self) -> dict:
        return {k: _plain(v) for k, v in self.__dict__.items()}


def _plain(v):
    if isinstance(v, np.ndarray):
        return _plain(v.item()) if v.ndim == 0 else [_plain(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


# ---------------------------------------------------------------------------
# check helpers


def exact_check(name, anchor, value, reference, tol) -> Check:
    err = float(np.max(np.abs(np.asarray(value, dtype=float) - np.asarray(reference, dtype=float))))
    ok = err <= tol
    return Check(name, anchor, ok, value, reference, None, tol,
                 reason="" if ok else f"deviation {err:.3g} exceeds {tol:.3g}")


def flag_check(name, anchor, ok, value=None, reason="") -> Check:
    return Check(name, anchor, bool(ok), value, None, reason="" if ok else reason)


def stochastic_check(name, anchor, est: QuadratureEstimate, reference, k: float = 4.0,
                     max_rel: float = 0.01, floor: float = 1e-12) -> Check:
    """Agreement within ``k`` standard errors plus a resolution requirement.

    The estimate must resolve its own size: ``max(stderr) / max(|value|)``
    at most ``max_rel``. Otherwise the check fails as an insufficient budget.
    """
    v = np.asarray(est.value, dtype=float)
    se = np.asarray(est.std_err, dtype=float)
    ref = np.asarray(reference, dtype=float)
    size = float(np.max(np.abs(ref))) or float(np.max(np.abs(v)))
    rel = float(np.max(se)) / size if size > 0 else 0.0
    dev = np.abs(v - ref)
    bound = k * se + floor
    agrees = bool(np.all(dev <= bound))
    if rel > max_rel:
        return Check(name, anchor, False, v, ref, se, k, est.samples,
                     f"insufficient budget: relative stderr {rel:.3g} > {max_rel:.3g}")
    reason = "" if agrees else f"max deviation {float(np.max(dev / bound)):.3g} x ({k} stderr + floor)"
    return Check(name, anchor, agrees, v, ref, se, k, est.samples, reason)


def _z_pair(name, anchor, a: QuadratureEstimate, b: QuadratureEstimate, k=4.0, max_rel=0.01):
    se = math.hypot(a.std_err, b.std_err)
    size = max(abs(a.value), abs(b.value))
    dev = abs(a.value - b.value)
    if size > 0 and se / size > max_rel:
        return Check(name, anchor, False, a.value, b.value, se, k, a.samples,
                     f"insufficient budget: relative stderr {se / size:.3g} > {max_rel:.3g}")
    ok = dev <= k * se + 1e-300
    return Check(name, anchor, ok, a.value, b.value, se, k, a.samples,
                 "" if ok else f"difference {dev:.3g} exceeds {k} combined stderr")


# ---------------------------------------------------------------------------
# verify


def _verify_checks(cfg: RunConfig) -> list[Check]:
    seed = cfg.seed
    checks: list[Check] = []
    W6, W12 = random_weyl(6, seed), random_weyl(12, seed)

    for W in (W6, W12):
        res = max(W.residuals().values())
        checks.append(exact_check(f"weyl symmetries n={W.n}", "algebraic Weyl symmetries",
                                  res, 0.0, 1e-12))
    checks.append(exact_check("trace M equals N", "Weyl contraction identity",
                              np.trace(M_matrix(W12)), weyl_quadratic_norm(W12),
                              1e-10 * weyl_quadratic_norm(W12)))

    rng = np.random.default_rng(seed)
    for n in (6, 52):
        b = BubbleParams(n, rng.uniform(-1, 1, n), 0.7)
        x = rng.uniform(-1, 1, (100, n))
        u, _, hess = bubble(b, x)
        res = np.trace(hess, axis1=1, axis2=2) + n * (n - 2) * u ** ((n + 2) / (n - 2))
        checks.append(exact_check(f"bubble equation residual n={n}", "flat critical equation",
                                  float(np.max(np.abs(res))), 0.0, 1e-10))
    rel = max(abs(bubble_mass(n) / bubble_mass_from_yamabe(n) - 1) for n in (3, 6, 52))
    checks.append(exact_check("bubble mass vs Yamabe constant", "bubble mass identity", rel, 0.0, 1e-10))

    worst = 0.0
    for _ in range(100):
        beta = rng.uniform(0.5, 30.0)
        alpha = (beta + 3) / 2 + rng.uniform(0.1, 40.0)
        worst = max(worst, max(abs(v - 1) for v in radial_recurrences_check(alpha, beta)))
    checks.append(exact_check("radial recurrences", "radial integral recurrences", worst, 0.0, 1e-12))

    worst = 0.0
    for n in range(3, 9):
        for deg in range(0, 7):
            for mono in monomials(n, deg):
                idx = [i for i, e in enumerate(mono) for _ in range(e)]
                a = sphere_moment(n, idx)
                b = homogeneous_sphere_integral({mono: 1.0}, n)
                worst = max(worst, abs(a - b) / max(1.0, abs(a)))
    checks.append(exact_check("sphere moments vs Laplacian reduction", "sphere moment formula",
                              worst, 0.0, 1e-12))

    e52 = eps_star(52)
    checks.append(exact_check("critical scale n=52", "critical scale formula", e52,
                              math.sqrt(0.5), 1e-12))
    checks.append(exact_check("reduced bracket at critical scale", "reduced bracket value",
                              reduced_bracket(52, e52), 1 / 28, 1e-12))
    checks.append(exact_check("reduced bracket curvature at critical scale",
                              "reduced bracket second derivative", reduced_bracket(52, e52, 2),
                              -2 / 7, 1e-12))
    checks.append(flag_check("critical scale inside Omega", "admissible parameter region",
                             omega_contains(52, np.zeros(52), e52), e52 ** 2,
                             "eps_star^2 outside the admissible interval"))
    rows = dimension_scan(11, 100)
    first = next((r.n for r in rows if r.certified_min), None)
    certified = [r.n for r in rows if r.certified_min]
    checks.append(flag_check("dimension scan threshold", "dimension threshold n >= 52",
                             first == 52 and certified == list(range(52, 101)), first,
                             f"first certified dimension {first}"))
    rep = certify_minimum(52, random_weyl(52, seed))
    b1, b2 = rep.hessian_brackets
    checks.append(flag_check("xi-Hessian positivity n=52", "strict local minimum",
                             b1 > 0 and b2 > 0 and rep.hessian_eigen_min > 0,
                             [b1, b2, rep.hessian_eigen_min], "a bracket or eigenvalue is not positive"))
    checks.append(flag_check("eps-direction minimum n=52", "strict local minimum",
                             abs(rep.dF_deps) < 1e-10 and rep.d2F_deps2 > 0,
                             [rep.dF_deps, rep.d2F_deps2], "not a critical minimum in eps"))

    s = cfg.budget(200_000)
    est = hessian_xi_integral(12, W12, 0.4, samples=s, seed=seed)
    checks.append(stochastic_check("xi-Hessian integral vs closed form n=12", "Hessian closed form",
                                   est, hessian_xi_closed(12, W12, 0.4), max_rel=0.2))

    s = cfg.budget(100_000)
    for kind in IDENTITY_KINDS:
        est = sphere_mc(lambda x, k=kind: identity_integrand(k, W6, x), 6, 2.0, samples=s, seed=seed)
        checks.append(stochastic_check(f"sphere identity {kind} n=6 r=2", "sphere integral identities",
                                       est, identity_rhs(kind, W6, 2.0)))

    s = cfg.budget(20_000)
    est = F_zero_quadrature(12, W12, 0.4, samples=s, seed=seed)
    ref = F0(12, W12, 0.4)
    checks.append(stochastic_check("F(0, eps) product quadrature n=12", "formula for F(0, eps)",
                                   est, ref, max_rel=0.02))
    s = cfg.budget(20_000)
    est = F_partial(W12, np.zeros(12), 0.4, samples=s, seed=seed)
    checks.append(stochastic_check("F(0, eps) full-space Monte Carlo n=12", "formula for F(0, eps)",
                                   est, ref, max_rel=0.05))

    s = cfg.budget(200_000)
    a = phi_norm(BubbleParams(6, np.zeros(6), 1.0), 0, samples=s, seed=seed)
    b = phi_norm(BubbleParams(6, np.eye(6)[0], 0.3), 0, samples=s, seed=seed + 1)
    checks.append(_z_pair("kernel norm invariance", "kernel norms constant in (xi, eps)", a, b))

    s = cfg.budget(200_000)
    masses = []
    for k, eps in enumerate((0.5, 2.0)):
        bp = BubbleParams(6, np.zeros(6), eps)
        region = RegionSpec.full_space(6, r_split=eps)
        masses.append(ball_mc(lambda x, bp=bp: bubble(bp, x, order=0) ** 3, 6, region, s, seed + k,
                              RadialDensity(eps, 2.0)))
    checks.append(_z_pair("bubble mass scale invariance", "bubble mass identity", *masses))

    s = cfg.budget(20_000)
    n, lam, mu, rho = 12, 0.05, 0.3, 0.5
    xi, eps = 0.1 * np.eye(n)[0], 0.4
    q1 = quadratic_energy(PatchField(W12, PatchParams(mu, lam, rho)), BubbleParams(n, lam * xi, lam * eps),
                          RegionSpec.ball(n, rho), s, seed, RadialDensity(lam * eps, 3.0))
    q2 = quadratic_energy(HbarTensorField(W12), BubbleParams(n, xi, eps), RegionSpec.ball(n, rho / lam),
                          s, seed + 1, RadialDensity(eps, 3.0))
    scale = mu**2 * lam**8
    checks.append(_z_pair("quadratic energy scaling identity", "energy scaling lam^8 mu^2",
                          q1, QuadratureEstimate(scale * q2.value, scale * q2.std_err, s, seed + 1),
                          max_rel=0.05))

    slopes = []
    for n in (4, 6):
        for k in range(3):
            f = random_sym_field(n, seed + k)
            x = np.random.default_rng(seed + k).uniform(-0.5, 0.5, n)
            slopes.append(remainder_order_fit(f, x)[0])
    ok = all(2.7 <= v <= 3.3 for v in slopes)
    checks.append(flag_check("curvature expansion remainder order", "third-order remainder",
                             ok, slopes, "fitted slope outside [2.7, 3.3]"))

    worst = 0.0
    for n in (4, 6):
        f = random_sym_field(n, seed, scale=0.3)
        x = np.random.default_rng(seed).uniform(-1, 1, (50, n))
        worst = max(worst, float(np.max(np.abs(sym_exp_jet(*f.jet(x)).det() - 1))))
    checks.append(exact_check("unit determinant of exp(h)", "trace-free h gives det g = 1", worst, 0.0, 1e-12))

    p = PatchParams(0.1, 0.05, 0.3)
    x = np.random.default_rng(seed).normal(size=(50, 12))
    x *= (0.3 * np.random.default_rng(seed + 1).random(50) / np.linalg.norm(x, axis=1))[:, None]
    h, dh, _ = PatchField(W12, p).jet(x)
    worst = max(float(np.abs(np.einsum("mii->m", h)).max()),
                float(np.abs(np.einsum("mik,mi->mk", h, x)).max()),
                float(np.abs(np.einsum("miki->mk", dh)).max()))
    checks.append(exact_check("patch interior identities", "patch is trace-free, radial-free, divergence-free",
                              worst, 0.0, 1e-12))

    gp = GluedFieldParams(3, 9, W12)
    g = GluedField(gp)
    worst = 0.0
    for N in (3, 4):
        y = gp.center(N)
        d = np.random.default_rng(N).normal(size=(20, 12))
        d *= (np.random.default_rng(N + 100).random(20) / (4 * N * N) / np.linalg.norm(d, axis=1))[:, None]
        worst = max(worst, float(np.abs(g(y + d) - g.single_patch_jet(N, y + d)[0]).max()))
    checks.append(exact_check("glued field core equality", "glued patches", worst, 0.0, 1e-14))
    logs = [log_smallness(2.0**-N, 2.0 ** (-N / 2), 1 / (4 * N * N), 52) for N in range(40, 81)]
    checks.append(flag_check("smallness combination decreasing", "smallness hypothesis",
                             all(b < a for a, b in zip(logs, logs[1:])), logs[-1],
                             "combination not decreasing on the schedule"))
    return checks


def cmd_verify(cfg: RunConfig) -> tuple[dict, list]:
    checks = _verify_checks(cfg)
    table = [[c.name, c.anchor, c.passed, c.reason] for c in checks]
    return {"checks": [c.to_dict() for c in checks]}, [["name", "anchor", "passed", "reason"]] + table


# ---------------------------------------------------------------------------
# other commands


def cmd_scan(cfg: RunConfig):
    if not 11 <= cfg.n_min <= cfg.n_max:
        raise UsageError("scan needs 11 <= n-min <= n-max")
    rows = dimension_scan(cfg.n_min, cfg.n_max)
    first = next((r.n for r in rows if r.certified_min), None)
    summary = f"first certified dimension: {first}" if first is not None else "none certified"
    checks = [Check("dimension scan", "dimension threshold n >= 52", True, first, reason=summary)]
    body = {"rows": [r.to_dict() for r in rows], "first_certified": first, "summary": summary,
            "checks": [c.to_dict() for c in checks]}
    return body, [SCAN_CSV_HEADER] + [r.csv_row() for r in rows], summary


def cmd_eps_star(cfg: RunConfig):
    n = cfg.n or 52
    if n <= 10:
        raise UsageError("eps-star needs n >= 11")
    try:
        rep = certify_minimum(n, random_weyl(n, cfg.seed))
    except YamabeLabError as exc:
        check = Check("real critical scale", "critical scale formula", False, reason=str(exc))
        return {"checks": [check.to_dict()]}, [["n", "error"], [n, str(exc)]]
    checks = [
        Check("certified strict local minimum", "strict local minimum", rep.certified_min,
              rep.certified_min, reason="" if rep.certified_min else "conditions not met"),
    ]
    body = dict(rep.to_dict())
    body["checks"] = [c.to_dict() for c in checks]
    return body, [SCAN_CSV_HEADER, rep.csv_row()]


def cmd_hessian(cfg: RunConfig):
    n = cfg.n or 12
    eps = cfg.eps if cfg.eps is not None else 0.4
    if n <= 8:
        raise UsageError("hessian needs n >= 9")
    W = random_weyl(n, cfg.seed)
    closed = hessian_xi_closed(n, W, eps)
    est = hessian_xi_integral(n, W, eps, samples=cfg.samples, seed=cfg.seed)
    check = stochastic_check("xi-Hessian integral vs closed form", "Hessian closed form", est, closed,
                             max_rel=math.inf)
    body = {"closed": closed, "integral": est.value, "std_err": est.std_err,
            "brackets": hessian_brackets(n, eps), "checks": [check.to_dict()]}
    rows = [["p", "q", "closed", "integral", "std_err", "z"]]
    for p in range(n):
        for q in range(p, n):
            se = est.std_err[p, q]
            rows.append([p, q, closed[p, q], est.value[p, q], se,
                         (est.value[p, q] - closed[p, q]) / se if se > 0 else 0.0])
    return {k: _plain(v) for k, v in body.items()}, rows


def cmd_curvature(cfg: RunConfig):
    seed = cfg.seed
    checks = []
    rows = [["n", "field_seed", "slope"]]
    worst = 0.0
    for n in (4, 6):
        f = random_sym_field(n, seed, scale=0.3)
        x = np.random.default_rng(seed).uniform(-1, 1, (50, n))
        g, s = scalar_curvature_exact(sym_exp_jet(*f.jet(x)), return_both=True)
        worst = max(worst, float(np.max(np.abs(g - s) / np.maximum(np.abs(g), 1.0))))
    checks.append(exact_check("curvature formulas agree", "scalar curvature from Christoffel symbols",
                              worst, 0.0, 1e-10))
    if cfg.order_test:
        for n in (4, 6):
            for k in range(3):
                f = random_sym_field(n, seed + k)
                x = np.random.default_rng(seed + k).uniform(-0.5, 0.5, n)
                slope, _ = remainder_order_fit(f, x)
                rows.append([n, seed + k, slope])
                checks.append(Check(f"remainder order n={n} field={seed + k}", "third-order remainder",
                                    2.7 <= slope <= 3.3, slope, 3.0, None, [2.7, 3.3],
                                    reason="" if 2.7 <= slope <= 3.3 else "slope outside window"))
    return {"checks": [c.to_dict() for c in checks]}, rows


def cmd_energy(cfg: RunConfig):
    n = cfg.n or 12
    mu = cfg.mu if cfg.mu is not None else 0.1
    lam = cfg.lam if cfg.lam is not None else 0.02
    rho = cfg.rho if cfg.rho is not None else 0.5
    W = random_weyl(n, cfg.seed)
    checks = []
    rows = [["parameter", "norm", "std_err", "fitted_exponent"]]

    s = cfg.budget(50_000)
    xi, eps = 0.1 * np.eye(n)[0], 0.4
    q1 = quadratic_energy(PatchField(W, PatchParams(mu, lam, rho)), BubbleParams(n, lam * xi, lam * eps),
                          RegionSpec.ball(n, rho), s, cfg.seed, RadialDensity(lam * eps, 3.0))
    q2 = quadratic_energy(HbarTensorField(W), BubbleParams(n, xi, eps), RegionSpec.ball(n, rho / lam),
                          s, cfg.seed + 1, RadialDensity(eps, 3.0))
    scale = mu**2 * lam**8
    checks.append(_z_pair("quadratic energy scaling identity", "energy scaling lam^8 mu^2", q1,
                          QuadratureEstimate(scale * q2.value, scale * q2.std_err, s, cfg.seed + 1),
                          max_rel=0.05))

    s = cfg.budget(8192)
    lams = [lam, lam / 2, lam / 4]
    eps2 = 0.125 if n == 12 else sum(OmegaDomain(n).eps2_bounds) / 2
    norms = {"A1": [], "A12": []}
    for lm in lams:
        b = BubbleParams(n, 0.5 * lm * np.eye(n)[0], math.sqrt(eps2) * lm)
        est = error_norms(W, PatchParams(mu, lm, rho), b, ("A1", "A12"), samples=s, seed=cfg.seed)
        for k in norms:
            norms[k].append(est[k])
    for k, window in (("A1", (3.6, 4.4)), ("A12", (7.5, 8.5))):
        slope = fit_exponent(lams, [e.value for e in norms[k]])
        for lm, e in zip(lams, norms[k]):
            rows.append([f"{k} lambda={lm:g}", e.value, e.std_err, slope])
        ok = window[0] <= slope <= window[1]
        checks.append(Check(f"{k} lambda-exponent", "error term estimate", ok, slope, None, None,
                            list(window), s, "" if ok else "fitted exponent outside window"))
    return {"checks": [c.to_dict() for c in checks]}, rows


COMMANDS = {
    "verify": cmd_verify,
    "scan": cmd_scan,
    "eps-star": cmd_eps_star,
    "hessian": cmd_hessian,
    "curvature": cmd_curvature,
    "energy": cmd_energy,
}


# ---------------------------------------------------------------------------
# plumbing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=None, help="dimension")
    common.add_argument("--seed", type=int, default=42, help="master seed (default 42)")
    common.add_argument("--samples", type=int, default=1_000_000,
                        help="Monte-Carlo budget; each check caps its own share (default 1e6)")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                        help="tolerance override, recorded in the report")

    parser = argparse.ArgumentParser(prog="yamabe-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="run every closed-form vs oracle check")
    p = sub.add_parser("scan", parents=[common], help="certify the critical point for a range of n")
    p.add_argument("--n-min", type=int, default=11)
    p.add_argument("--n-max", type=int, default=100)
    p = sub.add_parser("eps-star", parents=[common], help="critical-point report for one n")
    p = sub.add_parser("hessian", parents=[common], help="xi-Hessian closed form vs integral form")
    p.add_argument("--eps", type=float, default=None)
    p = sub.add_parser("curvature", parents=[common], help="curvature formula checks")
    p.add_argument("--order-test", action="store_true", help="fit the expansion remainder order")
    p = sub.add_parser("energy", parents=[common], help="energy scaling and error-term exponents")
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--rho", type=float, default=None)
    return parser


def _config(args) -> RunConfig:
    tolerances = {}
    for item in args.tol:
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"bad --tol {item!r}; expected NAME=VALUE")
        try:
            tolerances[name] = float(value)
        except ValueError as exc:
            raise UsageError(f"bad --tol value {value!r}") from exc
    if args.samples < 2:
        raise UsageError("--samples must be >= 2")
    return RunConfig(
        command=args.command, n=args.n, seed=args.seed, samples=args.samples, out=args.out,
        format=args.format, tolerances=tolerances,
        n_min=getattr(args, "n_min", 11), n_max=getattr(args, "n_max", 100),
        eps=getattr(args, "eps", None), mu=getattr(args, "mu", None), lam=getattr(args, "lam", None),
        rho=getattr(args, "rho", None), order_test=getattr(args, "order_test", False))


def _render(cfg: RunConfig, body: dict, rows: list) -> str:
    if cfg.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in rows:
            writer.writerow([_plain(v) for v in row])
        return buf.getvalue()
    report = dict(body)
    report.update({
        "schema": SCHEMA_VERSION,
        "command": cfg.command,
        "config": cfg.to_dict(),
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "version": __version__,
    })
    return json.dumps(_plain_tree(report), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _plain_tree(obj):
    if isinstance(obj, dict):
        return {str(k): _plain_tree(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain_tree(v) for v in obj]
    return _plain(obj)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = _config(args)
        result = COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    body, rows = result[0], result[1]
    checks = body.get("checks", [])
    body["passed"] = all(c["passed"] for c in checks)
    text = _render(cfg, body, rows)
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if len(result) > 2:
        print(result[2], file=sys.stderr)
    for c in checks:
        if not c["passed"]:
            print(f"FAIL {c['name']}: {c['reason']}", file=sys.stderr)
    return EXIT_OK if body["passed"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
