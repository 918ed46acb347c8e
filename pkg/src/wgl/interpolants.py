"""Cascade ultra-interpolants and the truncation uniformizer.

A set-cascade starts from A_1 = A and takes as the next index set the
non-Rademacher characters of the previous level (all of them, or only the
odd-order ones).  Feeding the perturbation coefficients of each level's
interpolant forward gives the vector-cascade x^(1), x^(2), ...; the weighted
sum  Phi(x) = sum_j i^(j-1) g_j(x^(j))  of the level interpolants lives on the
product of the level groups, and its bilinear pairing telescopes to x . y up
to the last level's tail x^(J+1) . y^(J+1).

Everything here is truncated at an explicit depth J and carries the tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .dyadic_core import (
    MAX_N,
    DomainError,
    DyadicDomain,
    PointValues,
    WalshSeries,
    fwht,
    ifwht,
    lp_norm,
    ls_coeff_norm,
    m_norm,
    mask_orders,
    sup_norm,
)
from .riesz_products import (
    Kind,
    interpolant,
    p_perturbation_ls_factor,
    q_interpolant,
    q_perturbation_ls_factor,
    vector_norm,
)

SINH1_MINUS_1 = math.sinh(1.0) - 1.0
DELTA_2 = math.sqrt(SINH1_MINUS_1)
KHINTCHIN_KAPPA = math.sqrt(2.0)


def conjugate_exponent(s: float) -> float:
    if s == 1:
        return math.inf
    if math.isinf(s):
        return 1.0
    return s / (s - 1)


def default_kind(s: float) -> Kind:
    return Kind.Q if s <= 2 else Kind.P


def level_decay(s: float) -> float:
    """Per-level contraction |x^(j+1)|_s <= delta_s |x^(j)|_s at eps = 1.

    Q levels (s <= 2): (sinh 1 - 1)^(1/s).  P levels (s > 2): the sharp
    constant ((sinh t - t)/t)^(1/s), t = 2^-s, which tends to 1/4.
    """
    if s <= 2:
        return q_perturbation_ls_factor(1.0, s)
    return p_perturbation_ls_factor(1.0, s)


# ---------------------------------------------------------------------------
# plans
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CascadeLevel:
    size: int
    index_map: np.ndarray | None = field(repr=False)  # masks over the previous level


@dataclass(frozen=True)
class CascadePlan:
    base: DyadicDomain
    depth: int
    variant: str
    levels: tuple[CascadeLevel, ...]
    terminated: bool = False

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(lv.size for lv in self.levels)

    @property
    def total_bits(self) -> int:
        return sum(self.sizes)

    def as_dict(self) -> dict:
        return {"n": self.base.n, "depth": self.depth, "variant": self.variant,
                "sizes": list(self.sizes), "terminated": self.terminated}


def next_level_masks(n: int, variant: str) -> np.ndarray:
    order = mask_orders(n)
    if variant == "full":
        keep = order >= 2
    elif variant == "odd":
        keep = (order >= 3) & (order % 2 == 1)
    else:
        raise ValueError(f"variant must be 'odd' or 'full', got {variant!r}")
    return np.flatnonzero(keep)


def next_level_size(n: int, variant: str) -> int:
    if variant == "full":
        return (1 << n) - n - 1
    return (1 << max(n - 1, 0)) - n if n > 0 else 0


def build_cascade_plan(n_or_domain, depth: int, variant: str = "odd") -> CascadePlan:
    base = n_or_domain if isinstance(n_or_domain, DyadicDomain) else DyadicDomain(int(n_or_domain))
    if depth < 1:
        raise ValueError("depth must be at least 1")
    levels = [CascadeLevel(base.n, None)]
    terminated = False
    while len(levels) < depth:
        prev = levels[-1].size
        size = next_level_size(prev, variant)
        if size == 0:
            terminated = True
            break
        if size > MAX_N:
            raise DomainError(
                f"cascade level {len(levels) + 1} would have {size} indices (cap {MAX_N}); "
                f"reduce depth or n")
        levels.append(CascadeLevel(size, next_level_masks(prev, variant)))
    return CascadePlan(base, depth, variant, tuple(levels), terminated)


# ---------------------------------------------------------------------------
# vector cascade and ultra-interpolant
# ---------------------------------------------------------------------------


def _check_kind(kind, s):
    kind = default_kind(s) if kind is None else Kind(kind)
    if kind is not default_kind(s):
        raise ValueError(f"kind {kind.value} is incompatible with s={s}: use Q for s in [1,2], P for s in (2,inf]")
    return kind


def vector_cascade(x, plan: CascadePlan, kind=None, s: float = 2.0) -> list[np.ndarray]:
    """x^(1), ..., x^(J), x^(J+1) for real x.

    The last entry is the coefficient vector left over after the last
    realised level; it is what the truncation drops.
    """
    kind = _check_kind(kind, s)
    x = np.asarray(x, dtype=float)
    if x.shape != (plan.base.n,):
        raise DomainError(f"x has {x.shape[0]} entries, plan expects {plan.base.n}")
    out = [x]
    for j in range(len(plan.levels)):
        pert = interpolant(out[-1], kind, 1.0, s).perturbation.coeffs.real
        if j + 1 < len(plan.levels):
            out.append(pert[plan.levels[j + 1].index_map])
        else:
            out.append(pert[next_level_masks(plan.levels[j].size, plan.variant)])
    return out


@dataclass(frozen=True)
class FactoredSeries:
    """sum_j i^(j-1) g_j o pi_j on the product of the cascade levels."""

    plan: CascadePlan
    factors: tuple[WalshSeries, ...]
    s: float
    kind: Kind | None
    tail: np.ndarray = field(repr=False)  # x^(J+1) (complex for complex input)
    x_norm: float = 0.0
    beta: float = 0.0
    beta_label: str = ""

    @property
    def weights(self) -> list[complex]:
        return [1j**j for j in range(len(self.factors))]

    @property
    def sup_certificate(self) -> float:
        return float(sum(sup_norm(f) for f in self.factors))

    @property
    def m_certificate(self) -> float:
        return float(sum(m_norm(f) for f in self.factors))

    @property
    def stated_bound(self) -> float:
        return self.beta / (1 - level_decay(self.s)) * self.x_norm

    def coeff_norm(self, s: float) -> float:
        # the factors occupy disjoint, non-trivial character sets of the product group
        if math.isinf(s):
            return max(ls_coeff_norm(f, s) for f in self.factors)
        return float(sum(ls_coeff_norm(f, s) ** s for f in self.factors) ** (1 / s))

    def level1_singletons(self) -> np.ndarray:
        return self.factors[0].singletons()

    def as_dict(self) -> dict:
        return {"plan": self.plan.as_dict(), "s": self.s,
                "kind": None if self.kind is None else self.kind.value,
                "sup_certificate": self.sup_certificate, "m_certificate": self.m_certificate,
                "beta": self.beta, "beta_label": self.beta_label,
                "stated_bound": self.stated_bound, "tail_norm": vector_norm(self.tail, self.s)}


def _level_beta(s: float) -> tuple[float, str]:
    if s == 1:
        return 1.0, "sup |U_R x| <= |x|_1"
    if s <= 2:
        return math.sqrt(math.e), "measured Q level bound e^(1/2) (eps=1) replaces beta_R(delta)"
    return 2.0, "P level M-norm bound 2/eps (eps=1) replaces beta_R(delta)"


def _real_factors(u: np.ndarray, plan: CascadePlan, s: float):
    J = len(plan.levels)
    if s == 1 or math.isinf(s):
        first = (WalshSeries.rademacher_sum(u) if s == 1 else interpolant(u, Kind.P, 1.0, s).series)
        rest = [WalshSeries.zero(lv.size) for lv in plan.levels[1:]]
        return [first] + rest, np.zeros(next_level_size(plan.levels[-1].size, plan.variant))
    kind = default_kind(s)
    vecs = vector_cascade(u, plan, kind, s)
    factors = [interpolant(vecs[j], kind, 1.0, s).series for j in range(J)]
    return factors, vecs[J]


def ultra_interpolant(x, plan: CascadePlan, s: float = 2.0) -> FactoredSeries:
    """Truncated Phi^(s)(x) on the cascade ``plan``.

    s = 1 gives U_R x and s = inf gives P_A(x) on the first level (no
    cascade); s in (1, 2] uses Q levels and s in (2, inf) uses P levels, all
    at eps = 1.  Complex x is split into real and imaginary parts.
    """
    if not s >= 1:
        raise ValueError(f"s must lie in [1, inf], got {s}")
    x = np.asarray(x, dtype=complex)
    if x.shape != (plan.base.n,):
        raise DomainError(f"x has {x.shape[0]} entries, plan expects {plan.base.n}")
    fu, tu = _real_factors(x.real, plan, s)
    real = not np.any(x.imag != 0)
    if real:
        factors, tail, norm = fu, tu.astype(complex), vector_norm(x.real, s)
    else:
        fv, tv = _real_factors(x.imag, plan, s)
        factors = [a + 1j * b for a, b in zip(fu, fv)]
        tail = tu + 1j * tv
        norm = vector_norm(x.real, s) + vector_norm(x.imag, s)
    beta, label = _level_beta(s)
    kind = None if s == 1 or math.isinf(s) else default_kind(s)
    return FactoredSeries(plan, tuple(factors), s, kind, tail, norm, beta, label)


class PairingResult(NamedTuple):
    value: complex
    residual_bound: float


def pairing(F: FactoredSeries, G: FactoredSeries) -> PairingResult:
    """Bilinear integral of Phi(x) Phi(y) over the product group.

    Cross-level terms vanish (independent zero-mean factors), so the value is
    sum_j (i^(j-1))^2 <g_j, h_j>.  ``residual_bound`` certifies
    |value - x . y| <= delta_s^J delta_t^J |x|_s |y|_t (Hoelder on the tail).
    """
    if F.plan.sizes != G.plan.sizes or F.plan.variant != G.plan.variant:
        raise DomainError("pairing requires both series on the same cascade plan")
    value = 0j
    for w, f, g in zip(F.weights, F.factors, G.factors):
        value += w * w * complex(np.sum(f.coeffs * g.coeffs))
    # a terminated plan has an empty tail, so the bound at the requested depth holds
    J = F.plan.depth
    bound = _tail_decay(F.s, J) * _tail_decay(G.s, J) * F.x_norm * G.x_norm
    return PairingResult(value, float(bound))


def _tail_decay(s: float, J: int) -> float:
    if s == 1 or math.isinf(s):
        return 0.0 if s == 1 else level_decay(s) ** J
    return level_decay(s) ** J


def materialize(F: FactoredSeries) -> PointValues:
    """Point values of Phi on the whole product group (small plans only)."""
    bits = F.plan.total_bits
    if bits > MAX_N:
        raise DomainError(f"product group has {bits} coordinates (cap {MAX_N})")
    total = np.zeros(1, dtype=complex)
    for w, f in zip(F.weights, F.factors):
        v = w * ifwht(f).values
        # new level occupies the next block of high bits
        total = (v[:, None] + total[None, :]).reshape(-1)
    return PointValues(DyadicDomain(bits), total)


# ---------------------------------------------------------------------------
# truncation uniformizer
# ---------------------------------------------------------------------------


def rademacher_values(n: int) -> np.ndarray:
    """Matrix of r_a(omega): rows are points, columns coordinates."""
    pts = np.arange(1 << n)[:, None]
    return 1.0 - 2.0 * ((pts >> np.arange(n)[None, :]) & 1)


def exp_square_integral(x) -> float:
    """Integral of exp(|U_R x|^2) under the uniform measure."""
    x = np.asarray(x, dtype=complex)
    vals = ifwht(WalshSeries.rademacher_sum(x)).values
    return float(np.mean(np.exp(np.abs(vals) ** 2)))


def estimate_exp_square_constant(n: int, samples: int = 10_000, seed: int = 0, chunk: int = 1000) -> float:
    """Finite-n surrogate for the exponential-square constant.

    Max of the integral of exp(|U_R x|^2) over seeded random unit vectors.
    """
    rng = np.random.default_rng(seed)
    r = rademacher_values(n)
    best = 0.0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        X = rng.standard_normal((m, n))
        X /= np.linalg.norm(X, axis=1, keepdims=True)
        vals = X @ r.T
        best = max(best, float(np.max(np.mean(np.exp(vals**2), axis=1))))
        done += m
    return best


def e_function(xi: float, K: float) -> float:
    return 2 * math.sqrt(K) * xi * math.exp(-xi * xi / 2)


def e_inverse(delta: float, K: float, tol: float = 1e-12, max_iter: int = 100) -> float:
    """Solve 2 sqrt(K) xi exp(-xi^2/2) = delta on [1, inf).

    Newton from the asymptotic guess, bisection on [1, 30] as fallback.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    if delta > e_function(1.0, K):
        raise ValueError(f"delta={delta} exceeds the range of the map (max {e_function(1.0, K):.6g})")
    f = lambda t: e_function(t, K) - delta  # noqa: E731
    xi = max(1.0, math.sqrt(2 * math.log(2 * math.sqrt(K) / delta)))
    for _ in range(max_iter):
        d = 2 * math.sqrt(K) * math.exp(-xi * xi / 2) * (1 - xi * xi)
        if d == 0:
            break
        step = f(xi) / d
        xi_new = xi - step
        if xi_new < 1:
            break
        if abs(step) <= tol * max(1.0, xi):
            return xi_new
        xi = xi_new
    lo, hi = 1.0, 30.0
    if f(hi) > 0:
        raise RuntimeError("e_inverse: root lies beyond the bisection bracket [1, 30]")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol:
            return 0.5 * (lo + hi)
    raise RuntimeError("e_inverse did not converge")


@dataclass
class UniformizeReport:
    g: WalshSeries = field(repr=False)
    sup_g: float
    l2_dist: float
    xi: float
    delta: float
    curve_sup_bound: float
    kappa_used: float
    substitute_constant: float
    substitute_budget: float
    substitute_sup_bound: float
    interpolation_error: float
    x_norm: float = 1.0
    kappa_sampled: float | None = None
    p: float | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def hard_failures(self) -> list[str]:
        out = []
        if self.interpolation_error > 1e-10:
            out.append("interpolation")
        if self.l2_dist > self.substitute_budget * (1 + 1e-9) + 1e-12:
            out.append("l2_budget")
        if not math.isfinite(self.sup_g):
            out.append("sup_not_finite")
        return out

    @property
    def curve_exceeded(self) -> bool:
        return self.sup_g > self.curve_sup_bound * (1 + 1e-12)

    def as_dict(self) -> dict:
        return {
            "sup_g": self.sup_g, "l2_dist": self.l2_dist, "xi": self.xi, "delta": self.delta,
            "curve_sup_bound": self.curve_sup_bound, "kappa_used": self.kappa_used,
            "kappa_sampled": self.kappa_sampled, "substitute_constant": self.substitute_constant,
            "substitute_budget": self.substitute_budget, "substitute_sup_bound": self.substitute_sup_bound,
            "interpolation_error": self.interpolation_error, "x_norm": self.x_norm, "p": self.p,
            "hard_failures": self.hard_failures, "curve_exceeded": self.curve_exceeded,
            "notes": self.notes,
        }


def _clip_and_patch(x: np.ndarray, xi: float):
    """h = U_R x clipped to |.| <= xi, then g = h + Q(v) with v the clipped mass on R."""
    n = x.shape[0]
    u_series = WalshSeries.rademacher_sum(x)
    u = ifwht(u_series).values
    h = np.where(np.abs(u) <= xi, u, 0)
    phi = fwht(PointValues(DyadicDomain(n), u - h))
    v = phi.singletons()
    patch = q_interpolant(v, 1.0, 2.0).series
    g = fwht(PointValues(DyadicDomain(n), h)) + patch
    return g, u_series, phi, v


def _finish(g, u_series, x, scale_norm):
    l2 = lp_norm(g - u_series, 2)
    err = float(np.max(np.abs(g.singletons() - x), initial=0.0))
    return l2, err


def uniformize(x, delta: float, kappa_hat: float | None = None, seed: int = 0,
               samples: int = 10_000) -> UniformizeReport:
    """Sup-bounded interpolant of x whose L^2 distance to U_R x is O(delta).

    The inner interpolant applied to the clipped mass is Q (eps=1, s=2), a
    concrete stand-in for an abstract choice; its constants define the
    budget checked here:  ||g - U_R x||_2 <= (sqrt(sinh 1)/2) delta  and
    ||g||_inf <= xi + e^(1/2) delta / 2 (doubled for complex x).
    """
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    x = np.asarray(x, dtype=complex)
    DyadicDomain(x.shape[0])
    norm = vector_norm(x, 2)
    if norm == 0:
        raise ValueError("x must be non-zero")
    xs = x / norm
    real = not np.any(xs.imag != 0)
    notes = []
    sampled = None
    if kappa_hat is None:
        sampled = estimate_exp_square_constant(x.shape[0], samples, seed)
        kappa_hat = sampled
        notes.append(f"exp-square constant sampled over {samples} unit vectors (seed {seed}) at n={x.shape[0]}")
    own = exp_square_integral(xs)
    kappa_used = max(kappa_hat, own)
    if own > kappa_hat:
        notes.append("kappa raised to this instance's own exp-square integral")
    xi = e_inverse(delta, kappa_used)
    g, u_series, phi, v = _clip_and_patch(xs, xi)
    l2, err = _finish(g, u_series, xs, norm)
    scale = 1.0 if real else 2.0
    c = math.sqrt(math.sinh(1.0)) / 2 * (1.0 if real else math.sqrt(2.0))
    notes.append("the reference curve bounds a different (non-constructive) interpolant; exceedances are not failures")
    notes.append("sharpness of the curve is an open question")
    return UniformizeReport(
        g=g * norm, sup_g=sup_norm(g) * norm, l2_dist=l2 * norm, xi=xi, delta=delta,
        curve_sup_bound=(xi + delta / math.sqrt(2)) * norm, kappa_used=kappa_used,
        substitute_constant=c, substitute_budget=c * delta * norm,
        substitute_sup_bound=(xi + scale * math.sqrt(math.e) * delta / 2) * norm,
        interpolation_error=err * norm, x_norm=norm, kappa_sampled=sampled, notes=notes)


def lambda_p_threshold(delta: float, p: float, kappa2: float, kappa: float = KHINTCHIN_KAPPA) -> float:
    """xi solving 2 xi^((2-p)/2) kappa2^(p/2) kappa = delta."""
    return (delta / (2 * kappa2 ** (p / 2) * kappa)) ** (2 / (2 - p))


def lambda_p_constant(p: float, kappa2: float, kappa: float = KHINTCHIN_KAPPA) -> float:
    return 4 ** (1 / (p - 2)) * kappa2 ** (p / (p - 2)) * kappa ** (2 / (p - 2))


def uniformize_lambda_p(x, delta: float, p: float, kappa2_hat: float | None = None) -> UniformizeReport:
    """Variant of ``uniformize`` driven by an L^2 -> L^p bound instead of exp-square integrability.

    Default kappa2 = sqrt(p) (Khintchin for Rademacher sums), kappa = sqrt 2.
    Budget with the Q stand-in: ||g - U_R x||_2 <= sqrt(sinh 1) delta / (2 sqrt 2).
    """
    if not p > 2:
        raise ValueError(f"p must exceed 2, got {p}")
    if not delta > 0:
        raise ValueError("delta must be positive")
    x = np.asarray(x, dtype=complex)
    DyadicDomain(x.shape[0])
    norm = vector_norm(x, 2)
    if norm == 0:
        raise ValueError("x must be non-zero")
    xs = x / norm
    real = not np.any(xs.imag != 0)
    notes = []
    kappa2 = math.sqrt(p) if kappa2_hat is None else kappa2_hat
    own = lp_norm(WalshSeries.rademacher_sum(xs), p)
    if own > kappa2:
        kappa2 = own
        notes.append("kappa2 raised to this instance's own L^p norm")
    xi = lambda_p_threshold(delta, p, kappa2)
    g, u_series, phi, v = _clip_and_patch(xs, xi)
    l2, err = _finish(g, u_series, xs, norm)
    scale = 1.0 if real else 2.0
    c = math.sqrt(math.sinh(1.0)) / (2 * KHINTCHIN_KAPPA) * (1.0 if real else math.sqrt(2.0))
    Cp = lambda_p_constant(p, kappa2)
    return UniformizeReport(
        g=g * norm, sup_g=sup_norm(g) * norm, l2_dist=l2 * norm, xi=xi, delta=delta,
        curve_sup_bound=(Cp * delta ** (2 / (2 - p)) + delta / 2) * norm, kappa_used=kappa2,
        substitute_constant=c, substitute_budget=c * delta * norm,
        substitute_sup_bound=(xi + scale * math.sqrt(math.e) * delta / (2 * KHINTCHIN_KAPPA)) * norm,
        interpolation_error=err * norm, x_norm=norm, p=p, notes=notes)
