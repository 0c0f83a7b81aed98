"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line.

The lines are also collected into an "acceptance criteria" section of the
pytest terminal summary.
"""

import math
import time
import warnings

import numpy as np
import pytest
from scipy.optimize import minimize

from hypomix import models
from hypomix.certifier import bound_from_constants, certify
from hypomix.dynamics import (
    default_time_grid,
    empirical_mixing_time,
    heisenberg_decay,
    propagate,
    schrodinger_decay,
)
from hypomix.lindblad import exact_spectrum
from hypomix.cli import sweep_rows
from conftest import zoo
from lemmas import check_lemmas, lemmas_hold
from oracles import (
    complete_laplacian_gap,
    cycle_laplacian_gap,
    rate_constants_exact,
    spectral_gap_oracle,
    tfim_hamiltonian,
)

pytestmark = pytest.mark.acceptance


def rel_close(a, b, tol):
    return abs(a - b) <= tol * max(abs(b), 1e-300)


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def test_criterion_01_qutrit_constants(record_criterion):
    bad = []
    with Timer() as tm:
        for omega in (0.5, 1.0, 2.0):
            for gamma in (0.5, 1.0, 2.0):
                cert = certify(models.qutrit(omega, gamma))
                sigma = cert.artifacts["sigma"]
                if not rel_close(cert.lambda_m, 1.5 * gamma, 1e-8):
                    bad.append(f"lambda_m({omega},{gamma})={cert.lambda_m:.6g} vs {1.5 * gamma}")
                if not rel_close(cert.lambda_M, omega ** 2, 1e-8):
                    bad.append(f"lambda_M({omega},{gamma})={cert.lambda_M:.6g} vs {omega ** 2}")
                dev = np.abs(sigma - np.diag([0.5, 0.25, 0.25])).max()
                if dev > 1e-9:
                    bad.append(f"sigma({omega},{gamma}) off by {dev:.3g}")
    ok = not bad and tm.elapsed < 1.0
    record_criterion("1 qutrit constants", ok,
                     f"{len(bad)} mismatches, e.g. {bad[:3]}; {tm.elapsed:.2f}s")
    assert ok, bad


def test_criterion_02_dephasing_structure(record_criterion):
    with Timer() as tm:
        results = []
        for n in (2, 3):
            for gamma in (0.5, 1.0):
                cert = certify(models.tfim_dephasing(n, 1.0, gamma))
                results.append((n, gamma, cert.kernel_dim, cert.lambda_m))
    ok = all(k == 2 ** n and abs(lm - 2 * g) <= 1e-9 for n, g, k, lm in results)
    ok &= tm.elapsed < 5
    record_criterion("2 dephasing kernel dim and gap", ok, f"{results}; {tm.elapsed:.2f}s")
    assert ok


def brute_force_lambda_M(n, h, seed=0, starts=20):
    """Minimise |i[H, A]|^2 / |A|^2 over traceless diagonal A (sigma = I/d)."""
    ham = tfim_hamiltonian(n, h)
    d = 2 ** n
    rng = np.random.default_rng(seed)

    def quotient(a):
        a = a - a.mean()
        nrm = np.dot(a, a)
        if nrm < 1e-300:
            return np.inf
        comm = ham * (a[None, :] - a[:, None])
        return float(np.sum(np.abs(comm) ** 2) / nrm)

    best = min(minimize(quotient, rng.normal(size=d), method="BFGS").fun for _ in range(starts))
    # the minimum-weight Z-string attains the bound exactly
    z0 = np.array([1.0 if ((k >> (n - 1)) & 1) == 0 else -1.0 for k in range(d)])
    return best, quotient(z0)


def test_criterion_03_tfim_constants(record_criterion):
    details, ok = [], True
    with Timer() as tm:
        for n in (2, 3):
            for h in (0.5, 1.0):
                gamma = 1.0
                m = models.tfim_dephasing(n, h, gamma)
                cert = certify(m)
                brute, zstring = brute_force_lambda_M(n, h)
                bound = 2 * ((n - 1) + n * h) + 2 * n * gamma
                row_ok = (abs(cert.lambda_M - 4 * h * h) <= 1e-8
                          and abs(brute - 4 * h * h) <= 1e-6
                          and abs(zstring - 4 * h * h) <= 1e-12
                          and cert.cm_prime_numeric <= bound
                          and cert.residuals["php_zero"] <= 1e-10)
                ok &= row_ok
                details.append(f"N={n},h={h}: lM={cert.lambda_M:.12g} brute={brute:.8g} "
                               f"cm'={cert.cm_prime_numeric:.5g}<={bound:.5g}")
    ok &= tm.elapsed < 10
    record_criterion("3 TFIM constants", ok, "; ".join(details) + f"; {tm.elapsed:.2f}s")
    assert ok


def test_criterion_04_heisenberg_constants(record_criterion):
    with Timer() as tm:
        cert = certify(models.heisenberg_dephasing(3, 1.0, 1.0, 1.0, 1.0, 1.0))
    ok = cert.lambda_M >= 4 - 1e-8 and tm.elapsed < 10
    record_criterion("4 Heisenberg lambda_M >= 4h^2", ok,
                     f"lambda_M={cert.lambda_M:.12g}; {tm.elapsed:.2f}s")
    assert ok


def test_criterion_05_quantum_walk(record_criterion):
    with Timer() as tm:
        c4 = certify(models.quantum_walk_dephasing(models.cycle_graph(4), 1.0))
        k4 = certify(models.quantum_walk_dephasing(models.complete_graph(4), 1.0))
    want_c4 = 2 * cycle_laplacian_gap(4)
    want_k4 = 2 * complete_laplacian_gap(4)
    ok = (abs(c4.lambda_M - want_c4) <= 1e-8 and abs(k4.lambda_M - want_k4) <= 1e-8
          and abs(want_c4 - 4) < 1e-12 and abs(want_k4 - 8) < 1e-12 and tm.elapsed < 2)
    record_criterion("5 quantum walk lambda_M = 2 Delta", ok,
                     f"C4 {c4.lambda_M:.12g}, K4 {k4.lambda_M:.12g}; {tm.elapsed:.2f}s")
    assert ok


def _shape_ok(values):
    peak = int(np.nanargmax(values))
    return 0 < peak < len(values) - 1 and values[0] < values[peak] and values[-1] < values[peak]


@pytest.mark.slow
def test_criterion_06_bound_soundness_sweep(record_criterion):
    grid = np.logspace(-2, 2, 25).tolist()
    details, ok = [], True
    with Timer() as tm:
        for recipe, base in (("qutrit", {"omega": 1.0}),
                             ("heisenberg", {"n": 4, "jx": 1.0, "jy": 1.0, "jz": 1.0, "h": 1.0})):
            rows = sweep_rows(recipe, base, "gamma", grid, 0.01)
            lam = np.array([r["lambda_bound"] for r in rows])
            gap = np.array([r["gap_exact"] for r in rows])
            passed = all(r["passed"] for r in rows)
            dominated = bool(np.all(lam <= gap + 1e-9))
            shape = _shape_ok(lam) and _shape_ok(gap)
            ok &= passed and dominated and shape
            details.append(f"{recipe}: passed={passed} dominated={dominated} shape={shape} "
                           f"max lam/gap={np.max(lam / gap):.3g}")
    ok &= tm.elapsed < 600
    record_criterion("6 certified rate below exact gap on gamma sweeps", ok,
                     "; ".join(details) + f"; {tm.elapsed:.1f}s")
    assert ok


def test_criterion_07_closed_form(record_criterion):
    with Timer() as tm:
        k = bound_from_constants(2, 4, 10, 4)
    eps, lam, c = rate_constants_exact(2, 4, 10, 4)
    ok = (abs(k.eps - float(eps)) <= 1e-6 and abs(k.lam - float(lam)) <= 1e-6
          and abs(k.big_c - c) <= 1e-6 and abs(k.eps - 0.0408163) <= 1e-6
          and abs(k.lam - 0.0065359) <= 1e-6 and abs(k.big_c - 1.04168) <= 1e-5
          and tm.elapsed < 1e-3)
    record_criterion("7 closed-form rate constants", ok,
                     f"eps={k.eps:.7g} lam={k.lam:.7g} C={k.big_c:.6g}; {tm.elapsed * 1e6:.0f}us")
    assert ok


def test_criterion_08_lemma_suite(record_criterion):
    details, ok = [], True
    with Timer() as tm:
        for name, model in zoo(gamma=1.0).items():
            viol = check_lemmas(certify(model), k=500, seed=2024)
            good = lemmas_hold(viol)
            ok &= good
            worst = max(viol, key=viol.get)
            details.append(f"{name}:{'ok' if good else 'VIOLATED ' + worst}")
    ok &= tm.elapsed < 60
    record_criterion("8 lemma inequalities on 500 random observables", ok,
                     ", ".join(details) + f"; {tm.elapsed:.1f}s")
    assert ok


def test_criterion_09_envelopes(record_criterion):
    details, ok = [], True
    with Timer() as tm:
        for model in (models.qutrit(1.0, 1.0), models.tfim_dephasing(2, 1.0, 1.0)):
            cert = certify(model)
            bound = cert.tmix(0.01)
            times = default_time_grid(2 * bound)
            d = model.dim
            rng = np.random.default_rng(99)
            violations = 0
            for _ in range(10):
                a0 = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
                violations += int(np.sum(~heisenberg_decay(model, cert, a0, times).envelope_ok))
                psi = rng.normal(size=d) + 1j * rng.normal(size=d)
                rho0 = np.outer(psi, psi.conj()) / np.vdot(psi, psi).real
                violations += int(np.sum(~schrodinger_decay(model, cert, rho0, times).envelope_ok))
            emp = empirical_mixing_time(model, 0.01, times)
            ok &= violations == 0 and len(times) == 200 and emp <= bound
            details.append(f"{model.name}: violations={violations} empirical={emp:.4g} "
                           f"bound={bound:.4g}")
    ok &= tm.elapsed < 60
    record_criterion("9 Heisenberg/Schrodinger envelopes and mixing bound", ok,
                     "; ".join(details) + f"; {tm.elapsed:.1f}s")
    assert ok


def test_criterion_10_toy_exactness(record_criterion):
    with Timer() as tm:
        model = models.toy_qubit()
        cert = certify(model)
        frame = cert.artifacts["frame"]
        x0 = frame.to_coords(np.array([[0, 1], [0, 0]], dtype=complex))
        errs = []
        for t in (0.1, 1.0, 5.0):
            xt = propagate(cert.artifacts["d_full"], x0, t)
            errs.append(abs(np.linalg.norm(xt) / np.linalg.norm(x0) - math.exp(-t)))
        gap = exact_spectrum(model).gap
    ok = max(errs) <= 1e-10 and abs(gap - 0.5) <= 1e-10 and tm.elapsed < 1
    record_criterion("10 toy qubit decay and gap", ok,
                     f"max decay err={max(errs):.2e} gap={gap:.15g}; {tm.elapsed:.2f}s")
    assert ok


def test_scaling_tfim_mixing_bound(record_criterion):
    ns = (2, 3, 4)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        bounds = [certify(models.tfim_dephasing(n, 1.0, 1.0)).tmix(0.01) for n in ns]
    ratios = [b / a for a, b in zip(bounds, bounds[1:])]
    slopes = [math.log(b / a) / math.log(nb / na)
              for (na, a), (nb, b) in zip(zip(ns, bounds), zip(ns[1:], bounds[1:]))]
    # polynomial growth: successive ratios shrink and the log-log slope stays modest
    ok = all(r2 < r1 for r1, r2 in zip(ratios, ratios[1:])) and max(slopes) < 4
    record_criterion("scaling: TFIM t_mix bound polynomial in N", ok,
                     f"bounds={[round(b, 1) for b in bounds]} ratios={[round(r, 3) for r in ratios]}"
                     f" slopes={[round(s, 2) for s in slopes]}")
    assert ok


def test_gap_oracle_crosscheck():
    # the sweep's exact gap agrees with an independent column-major eigensolve
    m = models.qutrit(1.0, 0.3)
    assert exact_spectrum(m).gap == pytest.approx(spectral_gap_oracle(m.hamiltonian, m.jumps),
                                                  rel=1e-9)
