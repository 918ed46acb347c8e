"""Acceptance criteria 1-10, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the
"acceptance criteria" summary section) or ``python tests/test_acceptance.py``.
"""

import io
import math
import time

import numpy as np

from wgl import cli
from wgl import dyadic_core as dc
from wgl import interpolants as it
from wgl import riesz_products as rp
from wgl import tensor_norms as tn

SINH1_1 = math.sinh(1) - 1


def test_ac01_parseval(acceptance_record):
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst = 0.0
    for n in range(1, 11):
        N = 1 << n
        for _ in range(1000):
            f = rng.standard_normal(N) + 1j * rng.standard_normal(N)
            g = rng.standard_normal(N) + 1j * rng.standard_normal(N)
            F, G = dc.fwht(f).coeffs, dc.fwht(g).coeffs
            for lhs, rhs in ((np.mean(f * np.conj(g)), np.sum(F * np.conj(G))), (np.mean(f * g), np.sum(F * G))):
                scale = max(abs(lhs), np.sqrt(np.mean(np.abs(f) ** 2) * np.mean(np.abs(g) ** 2)))
                worst = max(worst, abs(lhs - rhs) / scale)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-11 and elapsed < 10
    assert acceptance_record("AC1 Parseval identity, n=1..10 x 1000 pairs", ok,
                             f"worst rel err {worst:.2e}, {elapsed:.1f}s")


def test_ac02_riesz_coefficient_law(acceptance_record):
    rng = np.random.default_rng(102)
    worst_c, worst_e = 0.0, 0.0
    for n in range(1, 9):
        for _ in range(50):
            x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            a, b = rp.riesz_product(x, "pointwise").coeffs, rp.riesz_product(x, "subset").coeffs
            worst_c = max(worst_c, float(np.max(np.abs(a - b)) / max(1, np.max(np.abs(b)))))
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        x = rng.standard_normal(n) * rng.uniform(0.05, 2)
        p = float(rng.uniform(1, 6))
        c = rp.riesz_product(x).coeffs
        # compare logarithms: the bound exp(|x|_p^p) overflows for large x
        worst_e = max(worst_e, math.log(float(np.sum(np.abs(c) ** p))) - rp.vector_norm(x, p) ** p)
    ok = worst_c <= 1e-12 and worst_e <= 1e-12
    assert acceptance_record("AC2 Riesz coefficient law and l^p mass bound", ok,
                             f"construction gap {worst_c:.1e}, max log mass ratio {worst_e:.4f}")


def test_ac03_q_p_structure_and_key_bounds(acceptance_record):
    rng = np.random.default_rng(103)
    structure_bad = violations = printed = 0
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        eps = float(rng.uniform(0.02, 2))
        s = float(rng.choice([1.0, rng.uniform(1, 2), 2.0, rng.uniform(2, 8), math.inf]))
        x = rng.standard_normal(n)
        for kind in ("Q", "P"):
            out = rp.interpolant(x, kind, eps, s)
            even = dc.mask_orders(n) % 2 == 0
            structure_bad += bool(np.any(out.series.coeffs[even] != 0))
            structure_bad += bool(np.max(np.abs(out.series.singletons() - x)) > 1e-10)
            for c in (-2.0, -1.0, 0.5):
                structure_bad += not np.allclose(rp.interpolant(c * x, kind, eps, s).series.coeffs,
                                                 c * out.series.coeffs, atol=1e-12)
        rep = rp.verify_key_bounds(x + (1j * rng.standard_normal(n) if rng.random() < 0.2 else 0), eps, s)
        violations += len(rep.violations)
        printed += len(rep.printed_exceedances)
    e3 = e4 = 0.0
    for _ in range(200):
        x = rng.standard_normal(int(rng.integers(1, 11)))
        x /= np.linalg.norm(x)
        q = rp.q_interpolant(x, 1, 2)
        e3 = max(e3, dc.sup_norm(q.series) - math.exp(0.5))
        e4 = max(e4, dc.lp_norm(q.perturbation, 2) - math.sqrt(SINH1_1))
    ok = structure_bad == 0 and violations == 0 and e3 <= 1e-9 and e4 <= 1e-9
    assert acceptance_record("AC3 Q/P structure and norm-bound suite", ok,
                             f"structure failures {structure_bad}, violations {violations} "
                             f"(printed-constant exceedances {printed}), max excess over e^(1/2) {e3:.1e}, over sqrt(sinh1-1) {e4:.1e}")


def test_ac04_convolution_and_parseval_formulae(acceptance_record):
    rng = np.random.default_rng(104)
    worst = 0.0
    failed = 0
    for s, t in ((2.0, 2.0), (1.5, 3.0), (1.0, math.inf)):
        for _ in range(200):
            n = int(rng.integers(1, 6))
            x, y = rng.standard_normal(n), rng.standard_normal(n)
            for rep in (rp.convolution_identities_check(x, y, s, t), rp.parseval_formulae_check(x, y, s, t)):
                failed += not rep.passed
                worst = max(worst, max(r.measured for r in rep.rows))
    ok = failed == 0 and worst <= 1e-10
    assert acceptance_record("AC4 convolution identities and Parseval formulae", ok,
                             f"max coefficient error {worst:.1e}")


def test_ac05_cascade_representation(acceptance_record):
    rng = np.random.default_rng(105)
    t0 = time.perf_counter()
    ok = True
    parts = []
    for J in (1, 2, 3):
        plan = it.build_cascade_plan(3, J, "odd")
        worst = 0.0
        for _ in range(500):
            x, y = rng.standard_normal(3), rng.standard_normal(3)
            x, y = x / np.linalg.norm(x), y / np.linalg.norm(y)
            value, bound = it.pairing(it.ultra_interpolant(x, plan), it.ultra_interpolant(y, plan))
            worst = max(worst, abs(value - np.dot(x, y)))
            ok &= abs(value - np.dot(x, y)) <= bound * (1 + 1e-9)
        ok &= worst <= SINH1_1**J * (1 + 1e-9)
        parts.append(f"J={J}: worst {worst:.2e} <= (sinh1-1)^J = {SINH1_1**J:.4f}; delta^J = {math.sqrt(SINH1_1)**J:.4f}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 30
    assert acceptance_record("AC5 cascade pairing residual, n=3 odd, J=1..3", bool(ok),
                             "; ".join(parts) + f"; {elapsed:.1f}s")


def test_ac06_khintchin_constant(acceptance_record):
    c2 = tn.kappa_estimate(2, seed=6)
    vals = [c2.value] + [tn.kappa_estimate(n, seed=6).value for n in (3, 4)]
    w = np.abs(c2.witness["x"])
    ok = abs(vals[0] - math.sqrt(2)) <= 1e-6 and np.allclose(w, 1 / math.sqrt(2), atol=1e-6)
    ok &= all(b >= a - 1e-12 for a, b in zip(vals, vals[1:])) and max(vals) <= math.sqrt(2) + 1e-6
    assert acceptance_record("AC6 Khintchin L1 constant sqrt 2", bool(ok),
                             "kappa(2..4) = " + ", ".join(f"{v:.10f}" for v in vals))


def test_ac07_grothendieck_instance(acceptance_record):
    H = np.array([[1.0, 1.0], [1.0, -1.0]])
    real = tn.injective_norm_real(H)
    vec = tn.vector_norm(H, 2)
    ratio = vec.value / real.value
    ok = real.value == 2 and vec.value >= 2 * math.sqrt(2) - 1e-6 and vec.kind == "exact"
    ok &= abs(ratio - math.sqrt(2)) <= 1e-6
    rng = np.random.default_rng(107)
    worst_ratio = min(tn.grothendieck_ratio(rng.standard_normal((4, 4)), 4, restarts=8, seed=i).ratio
                      for i in range(100))
    ol = 0
    for _ in range(10_000):
        a = rng.standard_normal((int(rng.integers(1, 7)), int(rng.integers(1, 7))))
        ol += tn.mixed_norm(a.T, 2, 1) > tn.mixed_norm(a, 1, 2) * (1 + 1e-12)
    ok &= worst_ratio >= 1 - 1e-9 and ol == 0
    assert acceptance_record("AC7 Grothendieck instance ratio and O <= L", bool(ok),
                             f"ratio {ratio:.8f}, min random ratio {worst_ratio:.4f}, O>L count {ol}")


def test_ac08_uniformizer(acceptance_record):
    rng = np.random.default_rng(108)
    K = it.estimate_exp_square_constant(10, 10_000, seed=108)
    hard = below = total = 0
    for delta in (0.2, 0.5, 0.8):
        for _ in range(200):
            x = rng.standard_normal(10)
            x /= np.linalg.norm(x)
            rep = it.uniformize(x, delta, kappa_hat=K)
            hard += bool(rep.hard_failures) or not np.allclose(rep.g.singletons(), x, atol=1e-10)
            below += not rep.curve_exceeded
            total += 1
    ok = hard == 0 and below >= 0.95 * total
    assert acceptance_record("AC8 truncation uniformizer contract, n=10", ok,
                             f"hard failures {hard}, {below}/{total} below the printed curve, K~{K:.2f}")


def test_ac09_endpoints(acceptance_record):
    rng = np.random.default_rng(109)
    bad = 0
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        plan = it.build_cascade_plan(n, 1)
        sup1 = dc.sup_norm(it.ultra_interpolant(x, plan, 1.0).factors[0])
        l1 = float(np.sum(np.abs(x)))
        bad += not ((2 / math.pi) * l1 <= sup1 * (1 + 1e-12) and sup1 <= l1 * (1 + 1e-12))
        m = dc.m_norm(it.ultra_interpolant(x, plan, math.inf).factors[0])
        linf = float(np.max(np.abs(x)))
        bad += not (linf <= m * (1 + 1e-12) and m <= 4 * linf * (1 + 1e-12))
    assert acceptance_record("AC9 endpoint representations s=1 and s=inf", bad == 0, f"violations {bad}")


def test_ac10_determinism(acceptance_record):
    outs = []
    codes = []
    for _ in range(2):
        buf = io.StringIO()
        codes.append(cli.run(["verify-all", "--seed", "7", "--no-timestamp"], buf))
        outs.append(buf.getvalue())
    ok = outs[0] == outs[1] and codes == [0, 0]
    assert acceptance_record("AC10 verify-all --seed 7 reproducible", ok, f"exit codes {codes}")


if __name__ == "__main__":
    def record(label, ok, detail=""):
        print(f"[{'PASS' if ok else 'FAIL'}] {label}" + (f"  ({detail})" if detail else ""))
        return ok

    for name, fn in sorted(globals().items()):
        if name.startswith("test_ac"):
            try:
                fn(record)
            except AssertionError:
                pass
