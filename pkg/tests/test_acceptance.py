"""Acceptance suite: twelve end-to-end criteria at their stated tolerances.

Each criterion is a function returning ``(passed, detail)``. Under pytest
every criterion is one test and a summary line per criterion is printed at
the end of the session; ``python tests/test_acceptance.py`` runs them
directly and prints the same lines.
"""

import math
import time

import numpy as np
import pytest

from yamabe_lab.bubbles import BubbleParams, bubble, bubble_mass, bubble_mass_from_yamabe, phi_norm
from yamabe_lab.calculus import (
    IDENTITY_KINDS,
    F0,
    d2F0_deps2,
    dF0_deps,
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
from yamabe_lab.curvature import (
    F_zero_quadrature,
    GluedField,
    GluedFieldParams,
    HbarTensorField,
    PatchField,
    PatchParams,
    error_fields,
    error_norms,
    fit_exponent,
    log_smallness,
    quadratic_energy,
    random_sym_field,
    remainder_order_fit,
    sym_exp_jet,
)
from yamabe_lab.quadrature import RadialDensity, RegionSpec, agree, sphere_mc
from yamabe_lab.weyl import random_weyl

SEED = 42
RESULTS = {}


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def criterion_01():
    rows, secs = _timed(lambda: dimension_scan(11, 100))
    certified = [r.n for r in rows if r.certified_min]
    ok = certified == list(range(52, 101)) and secs < 5.0
    return ok, f"certified {certified[0] if certified else None}..{certified[-1] if certified else None}, {secs:.2f}s"


def criterion_02():
    W = random_weyl(52, SEED)
    e = eps_star(52)
    checks = {
        "eps_star": abs(e - math.sqrt(0.5)) < 1e-12,
        "B": abs(reduced_bracket(52, e) - 1 / 28) < 1e-12,
        "B''": abs(reduced_bracket(52, e, 2) + 2 / 7) < 1e-12,
        "dF0": abs(dF0_deps(52, W, e)) < 1e-10 and abs(reduced_bracket(52, e, 1)) < 1e-10,
        "d2F0": d2F0_deps2(52, W, e) > 0,
    }
    return all(checks.values()), ", ".join(f"{k}={'ok' if v else 'bad'}" for k, v in checks.items())


def criterion_03():
    W = random_weyl(52, SEED)
    e = eps_star(52)
    b1, b2 = hessian_brackets(52, e)
    eig = float(np.linalg.eigvalsh(hessian_xi_closed(52, W, e))[0])
    ok = (b1 > 0 and b2 > 0 and eig > 0
          and abs(b1 - 2.8409e-3) < 1e-7 and abs(b2 - 8.2386e-2) < 1e-6)
    return ok, f"brackets {b1:.4e}, {b2:.4e}; min eigenvalue {eig:.3e}"


def criterion_04():
    W = random_weyl(12, SEED)
    est, secs = _timed(lambda: hessian_xi_integral(12, W, 0.4, samples=1_000_000, seed=SEED))
    z = float(np.max(est.z_score(hessian_xi_closed(12, W, 0.4))))
    ok = est.agrees_with(hessian_xi_closed(12, W, 0.4)) and secs < 120
    return ok, f"max |z| {z:.2f}, {secs:.1f}s"


def criterion_05():
    worst_z, worst_rel, ok = 0.0, 0.0, True
    for n in (6, 12):
        W = random_weyl(n, SEED)
        for r in (0.5, 1.0, 2.0):
            for k, kind in enumerate(IDENTITY_KINDS):
                est = sphere_mc(lambda x, kind=kind: identity_integrand(kind, W, x), n, r,
                                samples=100_000, seed=SEED + k)
                ref = identity_rhs(kind, W, r)
                scale = float(np.max(np.abs(ref)))
                if scale == 0.0:
                    # Hbar vanishes identically on the unit sphere
                    ok &= bool(np.max(np.abs(est.value)) < 1e-12)
                    continue
                rel = float(np.max(est.std_err)) / scale
                worst_rel = max(worst_rel, rel)
                worst_z = max(worst_z, float(np.max(est.z_score(ref))))
                ok &= est.agrees_with(ref) and rel < 0.01
    return ok, f"max |z| {worst_z:.2f}, max relative stderr {worst_rel:.2e}"


def criterion_06():
    W = random_weyl(52, SEED)
    details, ok = [], True
    for eps in (0.5, eps_star(52), 0.72):
        est = F_zero_quadrature(52, W, eps, samples=20_000, seed=SEED)
        ref = F0(52, W, eps)
        rel = abs(est.value / ref - 1)
        ok &= est.agrees_with(ref) and rel < 0.02
        details.append(f"eps={eps:.4f}: rel {rel:.1e} z {float(est.z_score(ref)):.2f}")
    return ok, "; ".join(details)


def criterion_07():
    rng = np.random.default_rng(SEED)
    rec = 0.0
    for _ in range(100):
        beta = rng.uniform(0.5, 30.0)
        alpha = (beta + 3) / 2 + rng.uniform(0.1, 40.0)
        rec = max(rec, max(abs(v - 1) for v in radial_recurrences_check(alpha, beta)))
    mom = 0.0
    for n in range(3, 9):
        for deg in range(7):
            for mono in monomials(n, deg):
                idx = [i for i, e in enumerate(mono) for _ in range(e)]
                a = sphere_moment(n, idx)
                mom = max(mom, abs(a - homogeneous_sphere_integral({mono: 1.0}, n)) / max(1.0, abs(a)))
    return rec < 1e-12 and mom < 1e-12, f"recurrence {rec:.1e}, moments {mom:.1e}"


def criterion_08():
    rng = np.random.default_rng(SEED)
    res = 0.0
    for n in (6, 52):
        b = BubbleParams(n, rng.uniform(-1, 1, n), 0.7)
        u, _, hess = bubble(b, rng.uniform(-1, 1, (100, n)))
        res = max(res, float(np.max(np.abs(np.trace(hess, axis1=1, axis2=2)
                                           + n * (n - 2) * u ** ((n + 2) / (n - 2))))))
    mass = max(abs(bubble_mass(n) / bubble_mass_from_yamabe(n) - 1) for n in (3, 6, 52))
    a = phi_norm(BubbleParams(6, np.zeros(6), 1.0), 0, samples=200_000, seed=SEED)
    c = phi_norm(BubbleParams(6, np.eye(6)[0], 0.3), 0, samples=200_000, seed=SEED + 1)
    inv = agree(a, c)
    z = abs(a.value - c.value) / math.hypot(a.std_err, c.std_err)
    return res < 1e-10 and mass < 1e-10 and inv, f"residual {res:.1e}, mass {mass:.1e}, phi-norm z {z:.2f}"


def criterion_09():
    slopes, det = [], 0.0
    for n in (4, 6):
        for k in range(3):
            f = random_sym_field(n, SEED + k)
            x = np.random.default_rng(SEED + k).uniform(-0.5, 0.5, n)
            slopes.append(remainder_order_fit(f, x)[0])
        f = random_sym_field(n, SEED, scale=0.3)
        pts = np.random.default_rng(SEED).uniform(-1, 1, (50, n))
        det = max(det, float(np.max(np.abs(sym_exp_jet(*f.jet(pts)).det() - 1))))
    ok = all(2.7 <= s <= 3.3 for s in slopes) and det < 1e-12
    return ok, f"slopes {', '.join(f'{s:.2f}' for s in slopes)}; det {det:.1e}"


def criterion_10():
    n, mu, rho = 12, 0.1, 0.5
    W = random_weyl(n, SEED)
    lams = [0.02, 0.01, 0.005]

    def run():
        out = {"A1": [], "A12": []}
        for lam in lams:
            b = BubbleParams(n, 0.5 * lam * np.eye(n)[0], math.sqrt(0.125) * lam)
            est = error_norms(W, PatchParams(mu, lam, rho), b, ("A1", "A12"), samples=8192, seed=SEED)
            for k in out:
                out[k].append(est[k].value)
        return out

    norms, secs = _timed(run)
    s1 = fit_exponent(lams, norms["A1"])
    s12 = fit_exponent(lams, norms["A12"])
    # flat metric: mu = 0 everywhere, and mu > 0 beyond the cutoff radius
    b = BubbleParams(n, 0.5 * lams[0] * np.eye(n)[0], math.sqrt(0.125) * lams[0])
    x = np.random.default_rng(SEED).normal(size=(50, n))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    flat = error_fields(W, PatchParams(0.0, lams[0], rho), b, 0.3 * x).A1
    beyond = error_fields(W, PatchParams(mu, lams[0], rho), b, 1.2 * x).A1
    zero = not np.any(flat) and not np.any(beyond)
    ok = 3.6 <= s1 <= 4.4 and 7.5 <= s12 <= 8.5 and zero and secs < 300
    return ok, (f"A1 exponent {s1:.3f} [3.6, 4.4], A1+A2 exponent {s12:.3f} [7.5, 8.5], "
                f"flat A1 zero {zero}, {secs:.0f}s")


def criterion_11():
    n, rho = 12, 0.5
    configs = [(42, 0.05, 0.3, 0.1 * np.eye(n)[0], 0.4),
               (43, 0.04, 0.5, 0.2 * np.eye(n)[1], 0.45),
               (44, 0.05, 0.2, -0.15 * np.eye(n)[2], 0.5)]
    zs, ok = [], True
    for seed, lam, mu, xi, eps in configs:
        W = random_weyl(n, seed)
        q1 = quadratic_energy(PatchField(W, PatchParams(mu, lam, rho)), BubbleParams(n, lam * xi, lam * eps),
                              RegionSpec.ball(n, rho), 20_000, seed, RadialDensity(lam * eps, 3.0))
        q2 = quadratic_energy(HbarTensorField(W), BubbleParams(n, xi, eps), RegionSpec.ball(n, rho / lam),
                              20_000, seed + 1000, RadialDensity(eps, 3.0))
        s = mu**2 * lam**8
        comb = math.hypot(q1.std_err, s * q2.std_err)
        zs.append(abs(q1.value - s * q2.value) / comb)
        ok &= zs[-1] <= 4
    return ok, "z " + ", ".join(f"{z:.2f}" for z in zs)


def criterion_12():
    n = 12
    gp = GluedFieldParams(3, 9, random_weyl(n, SEED))
    g = GluedField(gp)
    core = 0.0
    for N in (gp.N0, gp.N0 + 1):
        y = gp.center(N)
        d = np.random.default_rng(N).normal(size=(50, n))
        d *= (np.random.default_rng(N + 100).random(50) / (4 * N * N) / np.linalg.norm(d, axis=1))[:, None]
        core = max(core, float(np.abs(g(y + d) - g.single_patch_jet(N, y + d)[0]).max()))
    x = np.random.default_rng(SEED).normal(size=(200, n))
    x *= ((0.5 + np.random.default_rng(SEED + 1).random(200)) / np.linalg.norm(x, axis=1))[:, None]
    outside = not np.any(g(x))
    logs = [log_smallness(2.0**-N, 2.0 ** (-N / 2), 1 / (4 * N * N), 52) for N in range(40, 81)]
    decreasing = all(b < a for a, b in zip(logs, logs[1:]))
    return core < 1e-14 and outside and decreasing, (
        f"core diff {core:.1e}, zero for |x| >= 1/2 {outside}, smallness decreasing {decreasing}")


CRITERIA = [
    ("01 dimension threshold", criterion_01),
    ("02 critical scale and reduced bracket", criterion_02),
    ("03 xi-Hessian positivity", criterion_03),
    ("04 Hessian cross-validation", criterion_04),
    ("05 sphere integral identities", criterion_05),
    ("06 F(0, eps) quadrature", criterion_06),
    ("07 radial recurrences and moments", criterion_07),
    ("08 bubble identities", criterion_08),
    ("09 curvature expansion order", criterion_09),
    ("10 error-term scaling", criterion_10),
    ("11 energy scaling", criterion_11),
    ("12 glued field", criterion_12),
]


def _line(name, ok, detail):
    return f"criterion {name}: {'PASS' if ok else 'FAIL'} ({detail})"


@pytest.mark.acceptance
@pytest.mark.parametrize("name, fn", CRITERIA, ids=[c[0].split()[0] for c in CRITERIA])
def test_criterion(name, fn):
    ok, detail = fn()
    RESULTS[name] = (ok, detail)
    print(_line(name, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    for name, fn in CRITERIA:
        print(_line(name, *fn()), flush=True)
