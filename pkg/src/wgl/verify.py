"""The bundled invariant suite behind ``wgl verify-all``.

Each check returns a row keyed by an ASCII equation tag.  All randomness
derives from one seed through SeedSequence children, one per check, so
adding a check does not perturb the others.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import dyadic_core as dc
from . import interpolants as it
from . import riesz_products as rp
from . import tensor_norms as tn


@dataclass
class CheckRow:
    tag: str
    passed: bool
    cases: int
    worst: float  # largest measured / bound ratio, or largest error
    detail: str = ""

    def __post_init__(self):
        self.passed = bool(self.passed)
        self.worst = float(self.worst)


def _unit(rng, n, s=2.0, complex_=False):
    x = rng.standard_normal(n)
    if complex_:
        x = x + 1j * rng.standard_normal(n)
    return x / rp.vector_norm(x, s)


def check_parseval(rng, max_n, trials):
    worst = 0.0
    cases = 0
    for n in range(1, max_n + 1):
        for _ in range(trials):
            f = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
            g = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
            F, G = dc.fwht(f), dc.fwht(g)
            sesq = np.mean(f * np.conj(g))
            bil = np.mean(f * g)
            scale = max(1.0, abs(sesq), abs(bil))
            worst = max(worst, abs(sesq - np.sum(F.coeffs * np.conj(G.coeffs))) / scale,
                        abs(bil - dc.bilinear_pairing(F, G)) / scale)
            cases += 1
    return CheckRow("parseval", worst <= 1e-11, cases, worst)


def check_riesz(rng, max_n, trials):
    worst_coeff, worst_ext = 0.0, 0.0
    for _ in range(trials):
        n = int(rng.integers(1, min(max_n, 8) + 1))
        x = rng.standard_normal(n) * rng.uniform(0.1, 2)
        a = rp.riesz_product(x, "pointwise").coeffs
        b = rp.riesz_product(x, "subset").coeffs
        worst_coeff = max(worst_coeff, float(np.max(np.abs(a - b))))
        p = float(rng.uniform(1, 4))
        lhs = float(np.sum(np.abs(b) ** p))
        worst_ext = max(worst_ext, lhs / math.exp(rp.vector_norm(x, p) ** p))
    return [CheckRow("Riesz2", worst_coeff <= 1e-12, trials, worst_coeff),
            CheckRow("extendp", worst_ext <= 1 + 1e-9, trials, worst_ext)]


def check_key_bounds(rng, max_n, trials):
    by_tag: dict[str, list] = {}
    printed: dict[str, int] = {}
    for _ in range(trials):
        n = int(rng.integers(1, min(max_n, 8) + 1))
        s = float(rng.choice([1.0, rng.uniform(1, 2), 2.0, rng.uniform(2, 6), math.inf]))
        eps = float(rng.uniform(0.05, 1.0))
        cx = bool(rng.random() < 0.25)
        x = rng.standard_normal(n) + (1j * rng.standard_normal(n) if cx else 0)
        rep = rp.verify_key_bounds(x, eps, s)
        for row in rep.rows:
            by_tag.setdefault(row.tag, []).append(row)
            if row.printed_ok is False:
                printed[row.tag] = printed.get(row.tag, 0) + 1
    out = []
    for tag, rows in sorted(by_tag.items()):
        worst = max((r.measured / r.bound) if r.bound else r.measured for r in rows)
        detail = f"printed-constant exceedances: {printed[tag]}" if tag in printed else ""
        out.append(CheckRow(tag, all(r.ok for r in rows), len(rows), float(worst), detail))
    return out


def check_convolution(rng, max_n, trials):
    rows = {}
    for s, t in ((2.0, 2.0), (1.5, 3.0), (1.0, math.inf)):
        for _ in range(trials):
            n = int(rng.integers(1, min(max_n, 5) + 1))
            x, y = rng.standard_normal(n), rng.standard_normal(n)
            for rep in (rp.convolution_identities_check(x, y, s, t), rp.parseval_formulae_check(x, y, s, t)):
                for row in rep.rows:
                    key = row.tag
                    ok, cnt, worst = rows.get(key, (True, 0, 0.0))
                    rows[key] = (ok and row.ok, cnt + 1, max(worst, row.measured))
    return [CheckRow(k, *v) for k, v in sorted(rows.items())]


def check_cascade(rng, max_n, trials):
    out = []
    for J in (1, 2, 3):
        plan = it.build_cascade_plan(3, J, "odd")
        worst = 0.0
        ok = True
        for _ in range(trials):
            x, y = _unit(rng, 3), _unit(rng, 3)
            v, bound = it.pairing(it.ultra_interpolant(x, plan), it.ultra_interpolant(y, plan))
            res = abs(v - np.dot(x, y))
            ok &= res <= it.SINH1_MINUS_1**J * (1 + 1e-9) and res <= bound * (1 + 1e-9) + 1e-15
            worst = max(worst, res)
        out.append(CheckRow(f"MT1-J{J}", bool(ok), trials, worst,
                            f"bound (sinh1-1)^J = {it.SINH1_MINUS_1**J:.4f}"))
    # product-group oracle at a non-trivial plan
    n = min(4, max_n)
    plan = it.build_cascade_plan(n, 2, "odd")
    worst = 0.0
    for s in (1.5, 2.0, 3.0):
        t = it.conjugate_exponent(s)
        x, y = _unit(rng, n, s), _unit(rng, n, t)
        F, G = it.ultra_interpolant(x, plan, s), it.ultra_interpolant(y, plan, t)
        direct = np.mean(it.materialize(F).values * it.materialize(G).values)
        worst = max(worst, abs(direct - it.pairing(F, G).value))
    out.append(CheckRow("Rep-oracle", worst <= 1e-10, 3, worst))
    return out


def check_endpoints(rng, max_n, trials):
    worst1, worst_inf = 0.0, 0.0
    for _ in range(trials):
        n = int(rng.integers(1, min(max_n, 8) + 1))
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        plan = it.build_cascade_plan(n, 1)
        sup1 = dc.sup_norm(it.ultra_interpolant(x, plan, 1.0).factors[0])
        l1 = float(np.sum(np.abs(x)))
        worst1 = max(worst1, sup1 / l1, (2 / math.pi) * l1 / sup1)
        m = dc.m_norm(it.ultra_interpolant(x, plan, math.inf).factors[0])
        linf = float(np.max(np.abs(x)))
        worst_inf = max(worst_inf, linf / m, m / (4 * linf))
    return [CheckRow("est1-line1", worst1 <= 1 + 1e-9, trials, worst1),
            CheckRow("est1-line4", worst_inf <= 1 + 1e-9, trials, worst_inf)]


def check_khintchin(rng, max_n, trials):
    seed = int(rng.integers(2**31))
    vals = [tn.kappa_estimate(n, seed=seed).value for n in range(2, min(max_n, 4) + 1)]
    ok = abs(vals[0] - math.sqrt(2)) <= 1e-6 and all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
    ok &= max(vals) <= math.sqrt(2) + 1e-6
    return CheckRow("Khintcon", bool(ok), len(vals), max(vals), ", ".join(f"{v:.9f}" for v in vals))


def check_grothendieck(rng, max_n, trials):
    H = np.array([[1.0, 1.0], [1.0, -1.0]])
    r = tn.grothendieck_ratio(H, 2)
    ok = abs(r.ratio - math.sqrt(2)) <= 1e-6
    worst_ratio = math.inf
    worst_ol = 0.0
    for _ in range(trials):
        a = rng.standard_normal((4, 4))
        worst_ratio = min(worst_ratio, tn.grothendieck_ratio(a, 4, restarts=8, seed=int(rng.integers(2**31))).ratio)
    for _ in range(trials * 10):
        a = rng.standard_normal((int(rng.integers(1, 6)), int(rng.integers(1, 6))))
        worst_ol = max(worst_ol, tn.mixed_norm(a.T, 2, 1) / tn.mixed_norm(a, 1, 2))
    return [CheckRow("grothen", bool(ok and worst_ratio >= 1 - 1e-9), trials + 1, float(r.ratio)),
            CheckRow("orlicz", worst_ol <= 1 + 1e-12, trials * 10, worst_ol)]


def check_sidon(rng, max_n, trials):
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, max_n + 1))
        worst = max(worst, tn.sidon_ratio(rng.standard_normal(n) + 1j * rng.standard_normal(n)))
    return CheckRow("Sid1", worst <= math.pi / 2 + 1e-9, trials, worst)


def check_log_convexity(rng, max_n, trials):
    worst = math.inf
    for _ in range(trials):
        n = int(rng.integers(1, max_n + 1))
        f = dc.WalshSeries.from_array(rng.standard_normal(1 << n))
        f = f * (1 / dc.lp_norm(f, 2))
        p = float(rng.uniform(2.5, 6))
        val = dc.lp_norm(f, 1) ** ((p - 2) / (p - 1)) * dc.lp_norm(f, p) ** (p / (p - 1))
        worst = min(worst, val)
    return CheckRow("modi", worst >= 1 - 1e-12, trials, worst)


def check_uniformizer(rng, max_n, trials):
    n = max_n
    seed = int(rng.integers(2**31))
    K = it.estimate_exp_square_constant(n, 2000, seed)
    hard = 0
    below = 0
    total = 0
    for delta in (0.2, 0.5, 0.8):
        for _ in range(trials):
            rep = it.uniformize(_unit(rng, n), delta, kappa_hat=K)
            hard += bool(rep.hard_failures)
            below += not rep.curve_exceeded
            total += 1
    return CheckRow("trunc2", hard == 0, total, below / total,
                    f"{below}/{total} below the printed curve; hard failures {hard}")


CHECKS = (check_parseval, check_riesz, check_key_bounds, check_convolution, check_cascade,
          check_endpoints, check_khintchin, check_grothendieck, check_sidon, check_log_convexity,
          check_uniformizer)


def run_all(max_n: int = 8, seed: int = 7, trials: int = 20) -> list[CheckRow]:
    if not 1 <= max_n <= dc.MAX_N:
        raise ValueError(f"max_n must lie in [1, {dc.MAX_N}]")
    children = np.random.SeedSequence(seed).spawn(len(CHECKS))
    rows: list[CheckRow] = []
    for check, child in zip(CHECKS, children):
        res = check(np.random.default_rng(child), max_n, trials)
        rows.extend(res if isinstance(res, list) else [res])
    return rows


def rows_as_dicts(rows) -> list[dict]:
    return [asdict(r) for r in rows]
