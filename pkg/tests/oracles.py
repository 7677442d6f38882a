"""Reference computations that share no code with the package under test."""

import numpy as np
from scipy.optimize import brentq
from scipy.special import lambertw


def cara(s, a, eta):
    return (1.0 - np.exp(-eta * s)) / eta - a * a / 2.0


def grid_best_response(premium, belief, eta, hi=None, step=1e-6):
    """Brute-force maximizer of the agent's point-belief utility on a fine grid."""
    if hi is None:
        hi = premium * np.exp(-eta * premium * belief) + 0.5
    a = np.arange(0.0, hi + step, step)
    return float(a[np.argmax(cara(premium * (a + belief), a, eta))])


def brent_best_response(premium, belief, eta):
    if premium == 0:
        return 0.0
    f = lambda a: premium * np.exp(-eta * premium * (a + belief)) - a
    return brentq(f, 0.0, premium * np.exp(-eta * premium * belief) + 1.0, xtol=1e-14)


def lambert_premium(target, belief, eta):
    """Closed-form IC premium: r * exp(-eta * c * r) = target, principal branch."""
    c = target + belief
    if abs(c) < 1e-15:
        return target
    return float(np.real(-lambertw(-eta * c * target) / (eta * c)))


def grid_second_best(eta, step=1e-4):
    """Exhaustive premium grid with an inner Brent best response."""
    rhos = np.round(np.arange(0.0, 1.0 + step / 2, step), 12)
    efforts = np.array([brent_best_response(r, 0.0, eta) for r in rhos])
    up = (1.0 - rhos) * efforts
    ok = cara(rhos * efforts, efforts, eta) >= 0.0
    up = np.where(ok, up, -np.inf)
    i = int(np.argmax(up))
    return rhos[i], efforts[i], up[i], cara(rhos[i] * efforts[i], efforts[i], eta)
