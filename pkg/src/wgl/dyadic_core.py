"""Walsh-Fourier analysis on the finite dyadic group {-1, 1}^n.

Group points and Walsh characters share one encoding: an n-bit mask.
The character w evaluated at the point omega is (-1)^popcount(w & omega),
so the same butterfly serves both directions of the transform.

Normalisation: coefficients are averages over the uniform probability
measure, ``coeff[w] = 2^-n * sum_omega f(omega) w(omega)``, and the inverse
is the plain sum ``f(omega) = sum_w coeff[w] w(omega)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

MAX_N = 20


class DomainError(ValueError):
    """Raised for size-cap violations or mismatched dyadic domains."""


@dataclass(frozen=True)
class DyadicDomain:
    n: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 0:
            raise DomainError(f"n must be a non-negative integer, got {self.n!r}")
        if self.n > MAX_N:
            raise DomainError(f"n={self.n} exceeds the cap MAX_N={MAX_N}")
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
            if len(self.labels) != self.n:
                raise DomainError("labels must have exactly n entries")

    @property
    def size(self) -> int:
        return 1 << self.n


def popcount(masks):
    """Vectorised popcount for non-negative integer arrays (up to 32 bits)."""
    m = np.asarray(masks, dtype=np.uint32)
    m = m - ((m >> 1) & 0x55555555)
    m = (m & 0x33333333) + ((m >> 2) & 0x33333333)
    m = (m + (m >> 4)) & 0x0F0F0F0F
    return ((m * 0x01010101) & 0xFFFFFFFF) >> 24


def mask_orders(n: int) -> np.ndarray:
    """Order (popcount) of every character mask 0 .. 2^n - 1."""
    return popcount(np.arange(1 << n)).astype(np.int64)


def singleton_masks(n: int) -> np.ndarray:
    return np.left_shift(1, np.arange(n, dtype=np.int64))


def character_values(w: int, n: int) -> np.ndarray:
    """The character ``w`` evaluated at every point of the group."""
    return 1.0 - 2.0 * (popcount(np.arange(1 << n) & w) & 1)


def _check_length(length: int) -> int:
    if length < 1 or length & (length - 1):
        raise DomainError(f"length {length} is not a power of two")
    n = length.bit_length() - 1
    if n > MAX_N:
        raise DomainError(f"n={n} exceeds the cap MAX_N={MAX_N}")
    return n


def _butterfly(a: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard butterfly, O(n 2^n), on a private copy."""
    out = np.array(a, dtype=complex, copy=True)
    size = out.shape[0]
    h = 1
    while h < size:
        view = out.reshape(-1, 2, h)
        top = view[:, 0, :].copy()
        view[:, 0, :] += view[:, 1, :]
        view[:, 1, :] = top - view[:, 1, :]
        h *= 2
    return out


def _check_complex(a):
    return np.asarray(a, dtype=complex).reshape(-1)


@dataclass(frozen=True)
class PointValues:
    domain: DyadicDomain
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = _check_complex(self.values)
        if v.shape[0] != self.domain.size:
            raise DomainError(f"expected {self.domain.size} values, got {v.shape[0]}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_array(cls, values) -> PointValues:
        v = _check_complex(values)
        return cls(DyadicDomain(_check_length(v.shape[0])), v)

    def to_json(self) -> dict:
        return _to_json(self.domain.n, "point", self.values)


@dataclass(frozen=True)
class WalshSeries:
    domain: DyadicDomain
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = _check_complex(self.coeffs)
        if c.shape[0] != self.domain.size:
            raise DomainError(f"expected {self.domain.size} coefficients, got {c.shape[0]}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_array(cls, coeffs) -> WalshSeries:
        c = _check_complex(coeffs)
        return cls(DyadicDomain(_check_length(c.shape[0])), c)

    @classmethod
    def zero(cls, n: int) -> WalshSeries:
        return cls(DyadicDomain(n), np.zeros(1 << n, dtype=complex))

    @classmethod
    def rademacher_sum(cls, x) -> WalshSeries:
        """U_R x: the series with x on the singleton masks and zero elsewhere."""
        x = np.asarray(x, dtype=complex).reshape(-1)
        n = x.shape[0]
        c = np.zeros(1 << DyadicDomain(n).n, dtype=complex)
        c[singleton_masks(n)] = x
        return cls(DyadicDomain(n), c)

    @property
    def n(self) -> int:
        return self.domain.n

    def singletons(self) -> np.ndarray:
        return np.array(self.coeffs[singleton_masks(self.n)])

    def restrict(self, keep: np.ndarray) -> WalshSeries:
        """Zero every coefficient where the boolean mask ``keep`` is False."""
        return WalshSeries(self.domain, np.where(keep, self.coeffs, 0))

    def __add__(self, other: WalshSeries) -> WalshSeries:
        _same_domain(self, other)
        return WalshSeries(self.domain, self.coeffs + other.coeffs)

    def __sub__(self, other: WalshSeries) -> WalshSeries:
        _same_domain(self, other)
        return WalshSeries(self.domain, self.coeffs - other.coeffs)

    def __mul__(self, c) -> WalshSeries:
        return WalshSeries(self.domain, self.coeffs * c)

    __rmul__ = __mul__

    def to_json(self) -> dict:
        return _to_json(self.domain.n, "coeff", self.coeffs)


def _same_domain(f, g):
    if f.domain.n != g.domain.n:
        raise DomainError(f"domain mismatch: n={f.domain.n} vs n={g.domain.n}")


def fwht(values) -> WalshSeries:
    if not isinstance(values, PointValues):
        values = PointValues.from_array(values)
    return WalshSeries(values.domain, _butterfly(values.values) / values.domain.size)


def ifwht(series) -> PointValues:
    if not isinstance(series, WalshSeries):
        series = WalshSeries.from_array(series)
    return PointValues(series.domain, _butterfly(series.coeffs))


def dot(x, y) -> complex:
    """Bilinear pairing sum_a x(a) y(a). No conjugation."""
    x = np.asarray(x).reshape(-1)
    y = np.asarray(y).reshape(-1)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape[0]} vs {y.shape[0]}")
    return complex(np.sum(x * y))


def convolve(f: WalshSeries, g: WalshSeries) -> WalshSeries:
    """Group convolution, i.e. the coefficient-wise product of the series."""
    _same_domain(f, g)
    return WalshSeries(f.domain, f.coeffs * g.coeffs)


def bilinear_pairing(f: WalshSeries, g: WalshSeries) -> complex:
    """Integral of f*g under the uniform measure, evaluated on the transform side."""
    _same_domain(f, g)
    return dot(f.coeffs, g.coeffs)


def _values_of(f) -> np.ndarray:
    if isinstance(f, WalshSeries):
        return ifwht(f).values
    if isinstance(f, PointValues):
        return f.values
    return _check_complex(f)


def _coeffs_of(f) -> np.ndarray:
    if isinstance(f, WalshSeries):
        return f.coeffs
    if isinstance(f, PointValues):
        return fwht(f).coeffs
    return _check_complex(f)


def _check_exponent(p, name):
    if not p >= 1:
        raise ValueError(f"{name} must lie in [1, inf], got {p}")


def lp_norm(f, p) -> float:
    """L^p norm of the point values under the uniform probability measure."""
    _check_exponent(p, "p")
    a = np.abs(_values_of(f))
    if np.isinf(p):
        return float(a.max())
    return float(np.mean(a**p) ** (1.0 / p))


def sup_norm(f) -> float:
    return lp_norm(f, np.inf)


def ls_coeff_norm(f, s) -> float:
    """l^s norm of the Walsh coefficients (counting measure)."""
    _check_exponent(s, "s")
    a = np.abs(_coeffs_of(f))
    if np.isinf(s):
        return float(a.max())
    return float(np.sum(a**s) ** (1.0 / s))


# On a finite group every measure has a density against the uniform measure,
# and its total variation is the L^1 norm of that density.
M_NORM_IDENTIFICATION = "m_norm = L1 norm of the density against uniform P_A (finite group)"


def m_norm(f) -> float:
    return lp_norm(f, 1)


def lp_s_norm(f, p, s) -> float:
    """max(||f||_{L^p}, ||f^||_s): the L^p_(s) norm."""
    return max(lp_norm(f, p), ls_coeff_norm(f, s))


def m_s_norm(f, s) -> float:
    """max(||f||_M, ||f^||_s): the M_(s) norm."""
    return max(m_norm(f), ls_coeff_norm(f, s))


def _to_json(n, side, arr) -> dict:
    return {"n": int(n), "side": side, "re": arr.real.tolist(), "im": arr.imag.tolist()}


def series_from_json(obj) -> WalshSeries | PointValues:
    """Inverse of ``to_json`` for both sides; accepts a dict or a JSON string."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        n, side = int(obj["n"]), obj["side"]
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed series JSON: {exc}") from exc
    if re.shape != im.shape:
        raise ValueError("re and im have different lengths")
    dom = DyadicDomain(n)
    if side == "coeff":
        return WalshSeries(dom, re + 1j * im)
    if side == "point":
        return PointValues(dom, re + 1j * im)
    raise ValueError(f"side must be 'coeff' or 'point', got {side!r}")
