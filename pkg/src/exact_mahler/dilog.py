"""Dilogarithm, Bloch-Wigner function and Clausen function in double precision."""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def _bernoulli(n_max: int) -> tuple[Fraction, ...]:
    B = [Fraction(0)] * (n_max + 1)
    B[0] = Fraction(1)
    for m in range(1, n_max + 1):
        B[m] = -sum(Fraction(math.comb(m + 1, k)) * B[k] for k in range(m)) / (m + 1)
    return tuple(B)


_NTERMS = 40
# Li2(z) = sum_n B_n u^(n+1) / (n+1)!,  u = -log(1 - z)
_LI2_COEF = [float(b / math.factorial(n + 1)) for n, b in enumerate(_bernoulli(2 * _NTERMS))]
# Cl2(t) = t - t log|t| + sum_k |B_2k| t^(2k+1) / (2k (2k+1)!)
_CL2_COEF = [float(abs(_bernoulli(2 * _NTERMS)[2 * k]) / (2 * k * math.factorial(2 * k + 1))) for k in range(1, _NTERMS)]


def _li2_core(z: complex) -> complex:
    u = -cmath.log(1 - z)
    acc = 0j
    upow = u
    for c in _LI2_COEF:
        if c:
            term = c * upow
            acc += term
            if abs(term) < 1e-18 * abs(acc):
                break
        upow *= u
    return acc


def li2(z: complex) -> complex:
    """Principal branch of the dilogarithm."""
    z = complex(z)
    if z == 0:
        return 0j
    if z == 1:
        return complex(math.pi**2 / 6)
    if abs(z) > 1:
        # Li2(z) = -Li2(1/z) - pi^2/6 - log(-z)^2 / 2
        return -li2(1 / z) - math.pi**2 / 6 - cmath.log(-z) ** 2 / 2
    if z.real > 0.5:
        # Li2(z) = -Li2(1-z) + pi^2/6 - log z log(1-z)
        return -_li2_core(1 - z) + math.pi**2 / 6 - cmath.log(z) * cmath.log(1 - z)
    return _li2_core(z)


def _bw_scalar(z: complex) -> float:
    if z == 0 or z == 1:
        return 0.0
    if abs(z) > 1:
        return -_bw_scalar(1 / z)
    if z.real > 0.5:
        return -_bw_scalar(1 - z)
    return _li2_core(z).imag + cmath.phase(1 - z) * math.log(abs(z))


def bloch_wigner(z):
    """D(z) = Im Li2(z) + arg(1 - z) log|z|, with D(0) = D(1) = 0 (and D(inf) = 0)."""
    if np.ndim(z) == 0:
        return _bw_scalar(complex(z))
    arr = np.asarray(z, dtype=complex)
    return np.vectorize(_bw_scalar, otypes=[float])(arr)


def _cl2_scalar(theta: float) -> float:
    t = math.remainder(theta, 2 * math.pi)
    if t == 0:
        return 0.0
    acc = t - t * math.log(abs(t))
    tp = t
    t2 = t * t
    for c in _CL2_COEF:
        tp *= t2
        term = c * tp
        acc += term
        if abs(term) < 1e-18:
            break
    return acc


def clausen(theta):
    """Cl2(theta) = sum_{n>=1} sin(n theta) / n^2."""
    if np.ndim(theta) == 0:
        return _cl2_scalar(float(theta))
    return np.vectorize(_cl2_scalar, otypes=[float])(np.asarray(theta, dtype=float))
