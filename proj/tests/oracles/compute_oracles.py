"""Independent reference values for the frozen regression tests.

Uses mpmath / numpy / scipy only; shares no code with the C++ library.
Run: python3 tests/oracles/compute_oracles.py
"""
import math

import mpmath as mp
import numpy as np
from scipy.special import erfcx
from scipy.optimize import brentq, minimize_scalar

mp.mp.dps = 50


def vd_mp(x):
    x = mp.mpf(x)
    return 2 - 3 * mp.sqrt(mp.pi / 2) * x * mp.exp(x * x / 2) * mp.erfc(x / mp.sqrt(2))


def vd(x):
    return 2.0 - 3.0 * math.sqrt(math.pi / 2) * x * erfcx(x / math.sqrt(2))


def omega(k, P, chi):
    return 0.5 * np.sqrt(k**4 + P * k**2 * (1 + chi * vd(k)))


def omega_dchi(k, P, chi):
    return P * k**2 * vd(k) / (8 * omega(k, P, chi))


def has_roton(P, chi):
    k = np.logspace(-3, math.log10(20), 20001)
    rad = k**4 + P * k**2 * (1 + chi * vd(k))
    if rad.min() < 0:
        return True
    w = 0.5 * np.sqrt(rad)
    return bool(np.any(np.diff(w) < 0))


def chi_star_grid(P, step=1e-3):
    chi = 0.0
    while not has_roton(P, chi):
        chi += step
    return chi - step, chi


def riemann(P, Q, zeta, chi, t, dk=1e-5, kmax=None):
    kmax = kmax or math.sqrt(2 * math.log(1e16)) / zeta
    k = (np.arange(int(kmax / dk)) + 0.5) * dk
    w = omega(k, P, chi)
    f = k**3 * np.exp(-(zeta**2) * k**2 / 2)
    s = np.sin(w * t / 2)
    return Q * np.sum(f * 2 * s * s / w**3) * dk, Q * np.sum(f / w**3) * dk


def stationary(P, chi):
    dw = lambda k: (omega(k + 1e-7, P, chi) - omega(k - 1e-7, P, chi)) / 2e-7
    kM = brentq(dw, 0.5, 1.3, xtol=1e-14)
    km = brentq(dw, 1.3, 2.5, xtol=1e-14)
    return kM, km


def weight(k, P, Q, zeta, chi):
    h = 1e-4
    w2 = (omega(k + h, P, chi) - 2 * omega(k, P, chi) + omega(k - h, P, chi)) / h**2
    f = k**3 * math.exp(-(zeta**2) * k**2 / 2)
    return Q * math.sqrt(2 / abs(w2)) * f / omega(k, P, chi) ** 3


def delta_e_rb_dy():
    hbar = 1.054571817e-34
    u = 1.66053906660e-27
    a0 = 5.29177210903e-11
    mA, mB = 86.909180527 * u, 163.929174751 * u
    wz = 2 * math.pi * 1e3
    wA = wz * mB / mA
    lA, lB = math.sqrt(hbar / (mA * wA)), math.sqrt(hbar / (mB * wz))
    n, aAB, aB = 4.4e13, 5e-9, 130 * a0
    mAB = mA * mB / (mA + mB)
    P = 8 * math.sqrt(2 * math.pi) * lB * aB * n
    Q = n * aAB**2 * lB**2 * (mA + mB) ** 2 / (mA**2 * (lA**2 + lB**2))
    de = 2 * math.sqrt(math.pi) * n * aAB * mB * lB**2 / (mAB * math.sqrt(lA**2 + lB**2))
    return P, Q, de


if __name__ == "__main__":
    print("v_D(1) =", mp.nstr(vd_mp(1), 30))
    print("chi*(P=1.5) bracket =", chi_star_grid(1.5))
    for chi in (1.0, 4.8):
        for t in (1.0, 10.0, 50.0, 100.0):
            g, g0 = riemann(2.0, 4e-3, 1.0, chi, t)
            print(f"chi={chi} t={t} Gamma={g:.12e} Gamma0={g0:.12e}")
    kM, km = stationary(2.0, 5.6)
    print("chi=5.6 g_m =", weight(km, 2.0, 4e-3, 1.0, 5.6), "g_M =", weight(kM, 2.0, 4e-3, 1.0, 5.6))
    print("Rb-Dy P, Q, delta_e =", delta_e_rb_dy())
