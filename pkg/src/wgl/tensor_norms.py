"""Bilinear-form norms on finite index sets, and desk-scale classical constants.

Arrays are indexed a[u, v]; u runs over rows (the ``s`` side) and v over
columns (the ``t`` side).  Randomness is driven by one integer seed, recorded
in every certificate.  Parallel work honours WGL_THREADS and reduces with a
deterministic tie-break, so threaded and serial runs report the same numbers.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dyadic_core import MAX_N, DomainError, WalshSeries, ifwht, lp_norm, sup_norm

REAL_EXACT_CAP = 24
SIGN_PAIR_CAP = 22  # bits of double enumeration for complex arrays
GRID_STEP = 1e-4
CONVERGENCE_TOL = 1e-12
MAX_ROUNDS = 10_000
GROTHENDIECK_CR1 = math.pi**2 / 4


@dataclass
class NormCertificate:
    value: float
    kind: str  # exact | lower_bound | upper_bound
    witness: dict = field(default_factory=dict, repr=False)
    restarts_used: int = 0
    seed: int | None = None
    tolerance: float = 0.0
    notes: list[str] = field(default_factory=list)

    def __float__(self):
        return float(self.value)

    def as_dict(self) -> dict:
        def conv(v):
            if isinstance(v, np.ndarray):
                if np.iscomplexobj(v):
                    return {"re": v.real.tolist(), "im": v.imag.tolist()}
                return v.tolist()
            return v
        return {"value": self.value, "kind": self.kind, "restarts_used": self.restarts_used,
                "seed": self.seed, "tolerance": self.tolerance, "notes": self.notes,
                "witness": {k: conv(v) for k, v in self.witness.items()}}


def _threads() -> int:
    env = os.environ.get("WGL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"WGL_THREADS must be an integer, got {env!r}") from None
    return min(4, os.cpu_count() or 1)


def _ordered_map(func, items):
    items = list(items)
    k = _threads()
    if k == 1 or len(items) < 2:
        return [func(it) for it in items]
    with ThreadPoolExecutor(max_workers=k) as ex:
        return list(ex.map(func, items))


def _as_matrix(a) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or 0 in a.shape:
        raise ValueError(f"expected a non-empty 2-d array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("array has non-finite entries")
    return a


def _is_real(a) -> bool:
    return not np.iscomplexobj(a) or not np.any(np.asarray(a).imag != 0)


def _sign_rows(start: int, stop: int, m: int) -> np.ndarray:
    """Sign vectors for integers start..stop-1; bit u set means s_u = -1; s_0 = +1 always."""
    idx = np.arange(start, stop, dtype=np.int64)[:, None]
    bits = (idx >> np.arange(m - 1, dtype=np.int64)[None, :]) & 1
    return np.hstack([np.ones((stop - start, 1)), 1.0 - 2.0 * bits])


def _signs_of(z):
    return np.where(z >= 0, 1.0, -1.0)  # ties -> +1


# ---------------------------------------------------------------------------
# real injective norm
# ---------------------------------------------------------------------------


def injective_norm_real(a, heuristic: bool = False, restarts: int = 64, seed: int = 0,
                        chunk: int = 1 << 14) -> NormCertificate:
    """max over sign vectors s, t of sum_uv a_uv s_u t_v.

    Enumerates the smaller side (first sign fixed to +1) and solves the other
    side by taking signs.  Exact up to min dimension 24; beyond that pass
    ``heuristic=True`` for a multi-restart alternating-sign lower bound.
    """
    a = _as_matrix(a)
    if not _is_real(a):
        raise ValueError("injective_norm_real needs a real array; use injective_norm_complex")
    a = np.real(a).astype(float)
    flip = a.shape[0] > a.shape[1]
    b = a.T if flip else a
    m = b.shape[0]
    if m > REAL_EXACT_CAP:
        if not heuristic:
            raise DomainError(f"smaller side has {m} indices (exact cap {REAL_EXACT_CAP}); "
                              "use heuristic=True for a lower bound")
        return _real_heuristic(a, restarts, seed)
    total = 1 << (m - 1)
    bounds = [(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]

    def work(rng_):
        lo, hi = rng_
        S = _sign_rows(lo, hi, m)
        vals = np.abs(S @ b).sum(axis=1)
        i = int(np.argmax(vals))
        return vals[i], lo + i

    best_v, best_i = -1.0, 0
    for v, i in _ordered_map(work, bounds):
        if v > best_v:
            best_v, best_i = v, i
    s = _sign_rows(best_i, best_i + 1, m)[0]
    t = _signs_of(s @ b)
    s_out, t_out = (t, s) if flip else (s, t)
    value = float(s_out @ a @ t_out)
    return NormCertificate(value, "exact", {"s": s_out, "t": t_out}, seed=seed,
                           notes=[f"enumerated {total} sign vectors"])


def _real_heuristic(a, restarts, seed):
    rng = np.random.default_rng(seed)
    S = _signs_of(rng.standard_normal((restarts, a.shape[0])))
    prev = -np.inf
    for _ in range(MAX_ROUNDS):
        T = _signs_of(S @ a)
        S = _signs_of(T @ a.T)
        vals = np.einsum("ru,uv,rv->r", S, a, T)
        if vals.max() - prev <= CONVERGENCE_TOL:
            break
        prev = vals.max()
    i = int(np.argmax(vals))
    return NormCertificate(float(vals[i]), "lower_bound", {"s": S[i], "t": T[i]},
                           restarts_used=restarts, seed=seed,
                           notes=["alternating signs beyond the exact cap"])


def sign_norm(a) -> NormCertificate:
    """max over sign vectors s, t of |sum_uv a_uv s_u t_v| for any array.

    For real arrays this is the real injective norm.  Complex arrays need
    double enumeration, capped at 2^22 sign pairs.
    """
    a = _as_matrix(a)
    if _is_real(a):
        return injective_norm_real(np.real(a))
    m, k = a.shape
    if m + k - 1 > SIGN_PAIR_CAP:
        raise DomainError(f"{m}x{k} complex array needs 2^{m + k - 1} sign pairs (cap 2^{SIGN_PAIR_CAP})")
    T = _sign_rows(0, 1 << (k - 1), k)
    T = np.vstack([T, -T])
    S = _sign_rows(0, 1 << (m - 1), m)
    vals = np.abs((S @ a) @ T.T)
    i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
    return NormCertificate(float(vals[i, j]), "exact", {"s": S[i], "t": T[j]},
                           notes=["double sign enumeration"])


# ---------------------------------------------------------------------------
# complex injective norm
# ---------------------------------------------------------------------------


def _phase(z):
    az = np.abs(z)
    return np.where(az > 0, z / np.where(az > 0, az, 1), 1.0)


def _phase_starts(k, restarts, rng, extra=()):
    starts = []
    if k <= 3:
        grid = np.exp(2j * np.pi * np.arange(64) / 64)
        mesh = np.meshgrid(*([grid] * (k - 1)), indexing="ij") if k > 1 else []
        starts.append(np.column_stack([np.ones(64 ** (k - 1))] + [g.reshape(-1) for g in mesh]))
    elif k <= 6:
        quarter = np.array([1, 1j, -1, -1j])
        mesh = np.meshgrid(*([quarter] * (k - 1)), indexing="ij")
        starts.append(np.column_stack([np.ones(4 ** (k - 1))] + [g.reshape(-1) for g in mesh]))
    starts.append(np.exp(2j * np.pi * rng.random((restarts, k))))
    for e in extra:
        starts.append(np.asarray(e, dtype=complex)[None, :])
    return np.vstack(starts)


def injective_norm_complex(a, restarts: int = 64, seed: int = 0) -> NormCertificate:
    """Lower bound for max over unimodular s, t of |sum_uv a_uv s_u t_v|.

    Alternating phase maximisation from grid, quarter-phase, random and (for
    real arrays) real-witness starts.  Attaches the check
    complex value <= (pi^2/4) * sign norm when the sign norm is computable.
    """
    a = _as_matrix(a).astype(complex)
    rng = np.random.default_rng(seed)
    extra = []
    notes = []
    real_cert = None
    if _is_real(a) and min(a.shape) <= REAL_EXACT_CAP:
        real_cert = injective_norm_real(a.real)
        extra.append(real_cert.witness["t"])
    T = _phase_starts(a.shape[1], restarts, rng, extra)
    prev = -np.inf
    rounds = 0
    for rounds in range(1, MAX_ROUNDS + 1):
        S = np.conj(_phase(T @ a.T))
        Z = S @ a
        T = np.conj(_phase(Z))
        vals = np.abs(Z).sum(axis=1)
        best = vals.max()
        if best - prev <= CONVERGENCE_TOL:
            break
        prev = best
    S = np.conj(_phase(T @ a.T))
    vals = np.real(np.einsum("ru,uv,rv->r", S, a, T))
    i = int(np.argmax(vals))
    cert = NormCertificate(float(vals[i]), "lower_bound", {"s": S[i], "t": T[i]},
                           restarts_used=T.shape[0], seed=seed, notes=notes)
    try:
        sn = real_cert if real_cert is not None else sign_norm(a)
        cert.witness["sign_norm"] = sn.value
        cert.witness["sandwich_ok"] = bool(cert.value <= GROTHENDIECK_CR1 * sn.value * (1 + 1e-9) + 1e-12)
    except DomainError as exc:
        notes.append(f"sandwich check skipped: {exc}")
    notes.append(f"{rounds} alternation rounds")
    return cert


# ---------------------------------------------------------------------------
# vector-valued norm
# ---------------------------------------------------------------------------


def _normalize_rows(X, fallback):
    nrm = np.linalg.norm(X, axis=-1, keepdims=True)
    return np.where(nrm > 0, X / np.where(nrm > 0, nrm, 1), fallback)


def _random_unit(rng, shape):
    X = rng.standard_normal(shape)
    return X / np.linalg.norm(X, axis=-1, keepdims=True)


def _vector_value(a, X, Y):
    return float(np.einsum("uv,ud,vd->", a, X, Y))


def vector_norm(a, dim: int = 2, restarts: int = 32, seed: int = 0) -> NormCertificate:
    """max over unit vectors x_u, y_v in R^dim of sum_uv a_uv <x_u, y_v>.

    Alternating maximisation; each half-step is an exact conditional argmax so
    the objective never decreases.  With two indices on either side the value
    is certified by an angular grid at 1e-4 (kind ``exact``, tolerance 1e-3).
    """
    a = _as_matrix(a)
    if not _is_real(a):
        raise ValueError("vector_norm is implemented for real arrays")
    a = np.real(a).astype(float)
    if dim < 1:
        raise ValueError("dim must be at least 1")
    m, k = a.shape
    notes = []
    if dim > min(m, k):
        notes.append(f"dim {dim} exceeds min(|rows|, |cols|) = {min(m, k)}; value is already stable there")
    rng = np.random.default_rng(seed)
    Y = _random_unit(rng, (restarts, k, dim))
    # embed the real sign witness so the vector value dominates the scalar one
    if min(m, k) <= REAL_EXACT_CAP:
        t = injective_norm_real(a).witness["t"]
        emb = np.zeros((1, k, dim))
        emb[0, :, 0] = t
        Y = np.concatenate([Y, emb])
    X = np.zeros((Y.shape[0], m, dim))
    e1 = np.zeros(dim)
    e1[0] = 1
    history = []
    prev = -np.inf
    for _ in range(MAX_ROUNDS):
        X = _normalize_rows(np.einsum("uv,rvd->rud", a, Y), e1)
        half = np.einsum("uv,rud,rvd->r", a, X, Y)
        Y = _normalize_rows(np.einsum("uv,rud->rvd", a, X), e1)
        vals = np.einsum("uv,rud,rvd->r", a, X, Y)
        history.append((half.max(), vals.max()))
        if vals.max() - prev <= CONVERGENCE_TOL:
            break
        prev = vals.max()
    i = int(np.argmax(vals))
    Xb, Yb = X[i], Y[i]
    cert = NormCertificate(_vector_value(a, Xb, Yb), "lower_bound", {"x": Xb, "y": Yb},
                           restarts_used=Y.shape[0], seed=seed, notes=notes)
    cert.witness["ascent_monotone"] = bool(all(
        h[0] >= prev_v - 1e-12 and h[1] >= h[0] - 1e-12
        for prev_v, h in zip([-np.inf] + [v for _, v in history[:-1]], history)))
    if min(m, k) <= 2 and dim >= 2:
        g, theta = _angular_grid(a)
        if g > cert.value:
            cert.value = g
            cert.witness["grid_theta"] = theta
        cert.kind = "exact"
        cert.tolerance = 1e-3
        notes.append("angular-grid certificate at 1e-4 resolution")
    return cert


def _angular_grid(a):
    """Two vectors on one side span a plane: fix x_1 = e_1, scan x_2's angle."""
    if a.shape[0] > 2:
        a = a.T
    if a.shape[0] == 1:
        return float(np.linalg.norm(a[0], 1)), 0.0
    theta = np.arange(0, 2 * np.pi, GRID_STEP)
    c, s = np.cos(theta), np.sin(theta)
    # sum_v |a_1v e_1 + a_2v (c, s)|
    vals = np.zeros_like(theta)
    for v in range(a.shape[1]):
        vals += np.hypot(a[0, v] + a[1, v] * c, a[1, v] * s)
    i = int(np.argmax(vals))
    return float(vals[i]), float(theta[i])


@dataclass
class RatioReport:
    ratio: float | None
    vector: NormCertificate
    scalar: NormCertificate
    note: str = ""

    def __float__(self):
        if self.ratio is None:
            raise ValueError("ratio undefined: scalar norm is 0")
        return float(self.ratio)

    def as_dict(self) -> dict:
        return {"ratio": self.ratio, "vector": self.vector.as_dict(),
                "scalar": self.scalar.as_dict(), "note": self.note}


def _ratio(vec, sca):
    if sca.value <= 0:
        return RatioReport(None, vec, sca, "scalar norm is 0; ratio undefined")
    return RatioReport(vec.value / sca.value, vec, sca)


def grothendieck_ratio(a, dim: int = 2, restarts: int = 32, seed: int = 0) -> RatioReport:
    return _ratio(vector_norm(a, dim, restarts, seed), injective_norm_real(a))


# ---------------------------------------------------------------------------
# quadratic variant
# ---------------------------------------------------------------------------


def _upper_sym(a):
    a = _as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError("quadratic forms need a square array")
    if not _is_real(a):
        raise ValueError("quadratic forms are implemented for real arrays")
    u = np.triu(np.real(a).astype(float), 1)
    return u + u.T


def quadratic_scalar_norm(a) -> NormCertificate:
    """max over signs of sum_{u<v} a_uv s_u s_v (exact enumeration)."""
    b = _upper_sym(a)
    m = b.shape[0]
    if m > REAL_EXACT_CAP:
        raise DomainError(f"{m} indices exceeds the exact cap {REAL_EXACT_CAP}")
    total = 1 << (m - 1)
    best_v, best_s = -np.inf, None
    for lo in range(0, total, 1 << 14):
        S = _sign_rows(lo, min(lo + (1 << 14), total), m)
        vals = 0.5 * np.einsum("ru,uv,rv->r", S, b, S)
        i = int(np.argmax(vals))
        if vals[i] > best_v:
            best_v, best_s = float(vals[i]), S[i]
    return NormCertificate(best_v, "exact", {"s": best_s})


def quadratic_vector_norm(a, dim: int = 2, restarts: int = 32, seed: int = 0) -> NormCertificate:
    """Lower bound for max over unit x_u of sum_{u<v} a_uv <x_u, x_v>, by coordinate ascent."""
    b = _upper_sym(a)
    m = b.shape[0]
    rng = np.random.default_rng(seed)
    X = _random_unit(rng, (restarts, m, dim))
    if m <= REAL_EXACT_CAP:
        emb = np.zeros((1, m, dim))
        emb[0, :, 0] = quadratic_scalar_norm(a).witness["s"]
        X = np.concatenate([X, emb])
    prev = -np.inf
    for _ in range(MAX_ROUNDS):
        for u in range(m):
            X[:, u, :] = _normalize_rows(np.einsum("v,rvd->rd", b[u], X), X[:, u, :])
        vals = 0.5 * np.einsum("uv,rud,rvd->r", b, X, X)
        if vals.max() - prev <= CONVERGENCE_TOL:
            break
        prev = vals.max()
    i = int(np.argmax(vals))
    return NormCertificate(float(vals[i]), "lower_bound", {"x": X[i]},
                           restarts_used=X.shape[0], seed=seed)


def quadratic_ratio(a, dim: int = 2, restarts: int = 32, seed: int = 0) -> RatioReport:
    r = _ratio(quadratic_vector_norm(a, dim, restarts, seed), quadratic_scalar_norm(a))
    r.note = (r.note + "; " if r.note else "") + "relation to the bilinear constant unknown; both ratios reported"
    return r


# ---------------------------------------------------------------------------
# mixed norms, Littlewood / Orlicz
# ---------------------------------------------------------------------------


def mixed_norm(a, s: float, t: float) -> float:
    """(sum_beta (sum_alpha |a_alpha,beta|^t)^(s/t))^(1/s); rows alpha, columns beta."""
    if not (s >= 1 and t >= 1):
        raise ValueError(f"exponents must be >= 1, got s={s}, t={t}")
    a = np.abs(_as_matrix(a))
    inner = a.max(axis=0) if math.isinf(t) else (a**t).sum(axis=0) ** (1 / t)
    return float(inner.max() if math.isinf(s) else (inner**s).sum() ** (1 / s))


@dataclass
class LittlewoodReport:
    L: float
    O: float  # noqa: E741
    V: NormCertificate
    L_over_V: float | None
    O_over_V: float | None

    def as_dict(self) -> dict:
        return {"L": self.L, "O": self.O, "V": self.V.as_dict(),
                "L_over_V": self.L_over_V, "O_over_V": self.O_over_V}


def littlewood_orlicz_report(a, seed: int = 0) -> LittlewoodReport:
    a = _as_matrix(a)
    L = mixed_norm(a, 1, 2)
    O = mixed_norm(a.T, 2, 1)  # noqa: E741
    V = injective_norm_real(a) if _is_real(a) else injective_norm_complex(a, seed=seed)
    if V.value > 0:
        return LittlewoodReport(L, O, V, L / V.value, O / V.value)
    return LittlewoodReport(L, O, V, None, None)


# ---------------------------------------------------------------------------
# Khintchin and Sidon
# ---------------------------------------------------------------------------


def khintchin_lp(x, p: float) -> float:
    """||sum_a x_a r_a||_{L^p}, exactly, by enumerating all 2^n sign points."""
    return lp_norm(WalshSeries.rademacher_sum(x), p)


def rademacher_matrix(n: int) -> np.ndarray:
    pts = np.arange(1 << n)[:, None]
    return 1.0 - 2.0 * ((pts >> np.arange(n)[None, :]) & 1)


def _l1_objective(R, x):
    return float(np.mean(np.abs(R @ x)))


def _polish(R, x, tol=1e-6):
    """Snap to the arrangement vertex spanned by the near-active sign hyperplanes."""
    z = np.abs(R @ x)
    for scale in (tol, 1e-4, 1e-3, 1e-2):
        act = R[z <= scale * np.abs(R @ x).max()]
        if act.shape[0] == 0:
            continue
        _, sv, vt = np.linalg.svd(act)
        rank = int(np.sum(sv > 1e-9))
        null = vt[rank:]
        if null.shape[0] != 1:
            continue
        y = null[0] / np.linalg.norm(null[0])
        if y @ x < 0:
            y = -y
        return y
    return None


def kappa_estimate(n: int, seed: int = 0, restarts: int = 64, steps: int = 2000) -> NormCertificate:
    """1 / min ||U_R x||_{L^1} over the real unit sphere (a lower bound for kappa).

    Multi-start projected subgradient descent, then each iterate is polished to
    the nearest vertex of the sign-hyperplane arrangement.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n > MAX_N:
        raise DomainError(f"n={n} exceeds the cap MAX_N={MAX_N}")
    R = rademacher_matrix(n)
    if n == 1:
        return NormCertificate(1.0, "exact", {"x": np.ones(1)}, seed=seed)
    rng = np.random.default_rng(seed)
    X = _random_unit(rng, (restarts, n))
    F = np.mean(np.abs(X @ R.T), axis=1)
    for it in range(steps):
        G = np.sign(X @ R.T) @ R / R.shape[0]
        G -= np.sum(G * X, axis=1, keepdims=True) * X  # tangent component
        Y = X - 0.1 / math.sqrt(it + 1) * G
        Y /= np.linalg.norm(Y, axis=1, keepdims=True)
        FY = np.mean(np.abs(Y @ R.T), axis=1)
        better = FY <= F
        X[better], F[better] = Y[better], FY[better]
    best_f, best_x = np.inf, None
    for r in range(restarts):
        x, fx = X[r], F[r]
        y = _polish(R, x)
        if y is not None and _l1_objective(R, y) < fx:
            x, fx = y, _l1_objective(R, y)
        if fx < best_f - 1e-15:
            best_f, best_x = fx, x
    return NormCertificate(1.0 / best_f, "lower_bound", {"x": best_x, "min_l1": best_f},
                           restarts_used=restarts, seed=seed)


def sidon_ratio(x) -> float:
    """||x||_1 / ||U_R x||_inf."""
    x = np.asarray(x, dtype=complex).reshape(-1)
    if not np.any(x != 0):
        raise ValueError("x must be non-zero")
    return float(np.sum(np.abs(x)) / sup_norm(ifwht(WalshSeries.rademacher_sum(x))))
