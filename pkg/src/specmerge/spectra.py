"""Spectral functions on [0, 1] and the four spectrum-matching dissimilarities.

A spectrum of n eigenvalues is laid out on the unit interval with the largest
eigenvalue at x = 0 and the smallest at x = 1 (index i maps to (n-i)/(n-1)),
then scaled according to the matching method:

    CLRL    lambda_i / lambda_n        (combinatorial)
    CLSSAL  lambda_i / n               (combinatorial)
    CLMXL   lambda_i / n, compared at x = 0 only
    NLL     lambda_i                   (normalized)
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpectrum, DomainError, MethodMismatch
from .laplacian import COMBINATORIAL, NORMALIZED, Spectrum, laplacian, spectrum


class MatchMethod(str, enum.Enum):
    CLRL = "CLRL"
    CLSSAL = "CLSSAL"
    CLMXL = "CLMXL"
    NLL = "NLL"

    @property
    def laplacian_kind(self) -> str:
        return NORMALIZED if self is MatchMethod.NLL else COMBINATORIAL

    @classmethod
    def parse(cls, name: "str | MatchMethod") -> "MatchMethod":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).upper())
        except ValueError:
            raise ValueError(f"unknown match method {name!r}") from None


@dataclass(frozen=True, eq=False)
class SpectralFunction:
    knots: np.ndarray  # strictly increasing, 0 .. 1
    values: np.ndarray
    method: MatchMethod
    source_n: int

    def __post_init__(self):
        k = np.array(self.knots, dtype=float)
        v = np.array(self.values, dtype=float)
        if k.shape != v.shape or k.ndim != 1 or len(k) < 2:
            raise DegenerateSpectrum("need at least two knots with matching values")
        if k[0] != 0.0 or k[-1] != 1.0 or np.any(np.diff(k) <= 0):
            raise DomainError("knots must increase strictly from 0 to 1")
        k.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "knots", k)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "method", MatchMethod.parse(self.method))

    def __call__(self, x):
        return evaluate_at(self, x)


def build_spectral_function(E: Spectrum, method: MatchMethod | str) -> SpectralFunction:
    method = MatchMethod.parse(method)
    n = E.n
    if n < 2:
        raise DegenerateSpectrum(f"spectrum of size {n}; need at least 2 eigenvalues")
    if E.kind != method.laplacian_kind:
        raise MethodMismatch(f"{method.value} needs a {method.laplacian_kind} spectrum, got {E.kind}")
    lam = np.asarray(E.eigenvalues, dtype=float)
    if method is MatchMethod.CLRL:
        top = lam[-1]
        scaled = lam / top if top > 0 else np.zeros(n)
    elif method is MatchMethod.NLL:
        scaled = lam.copy()
    else:
        scaled = lam / n
    knots = np.arange(n) / (n - 1)
    return SpectralFunction(knots, scaled[::-1], method, n)


def evaluate_at(F: SpectralFunction, x):
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0) or np.any(xa > 1) or np.any(np.isnan(xa)):
        raise DomainError(f"x must lie in [0, 1], got {x!r}")
    out = np.interp(xa, F.knots, F.values)
    return float(out) if out.ndim == 0 else out


def _abs_area(x: np.ndarray, d: np.ndarray) -> float:
    """Exact integral of |g| for the piecewise-linear g with values d at x."""
    w = np.diff(x)
    a, b = d[:-1], d[1:]
    aa, ab = np.abs(a), np.abs(b)
    same = a * b >= 0
    denom = np.where(same, 1.0, aa + ab)
    # on a sign change the segment splits at the root into two triangles
    seg = np.where(same, 0.5 * (aa + ab) * w, 0.5 * w * (a * a + b * b) / denom)
    return float(np.sum(seg))


def spectral_distance(F1: SpectralFunction, F2: SpectralFunction, method: MatchMethod | str | None = None) -> float:
    if method is None:
        method = F1.method
    method = MatchMethod.parse(method)
    if F1.method is not method or F2.method is not method:
        raise MethodMismatch(f"cannot compare {F1.method.value} and {F2.method.value} under {method.value}")
    if method is MatchMethod.CLMXL:
        return abs(float(F1.values[0]) - float(F2.values[0]))
    if np.array_equal(F1.knots, F2.knots):
        x = F1.knots
        d = F1.values - F2.values
    else:
        x = np.union1d(F1.knots, F2.knots)
        d = np.interp(x, F1.knots, F1.values) - np.interp(x, F2.knots, F2.values)
    return _abs_area(x, d)


def sampled_distance(F1: SpectralFunction, F2: SpectralFunction, samples: int = 100_001) -> float:
    """Uniform-grid trapezoid approximation of the area between two functions.

    Cross-check only; ``spectral_distance`` is exact.
    """
    x = np.linspace(0.0, 1.0, samples)
    g = np.abs(np.interp(x, F1.knots, F1.values) - np.interp(x, F2.knots, F2.values))
    return float(np.trapezoid(g, x))


def spectral_function_of(S, method: MatchMethod | str) -> SpectralFunction:
    method = MatchMethod.parse(method)
    return build_spectral_function(spectrum(laplacian(S, method.laplacian_kind)), method)
