"""Independent reference computations shared by the test modules."""
import math

import numpy as np

GRID_POINTS = 1_000_000
_COARSE = 1000  # grid index i = COARSE_STEP * a + b


class GridScanner:
    """Roots of (1-x)h - x exp(-kx) on [0, 1] by sign scan of a uniform grid.

    exp(-k x_i) is built as an outer product of a coarse and a fine exponential
    table, so a scan costs a few array passes and only ~2000 exp calls. The
    sign of the residual is read off h (1-x)/x > exp(-kx). Roots are refined
    by linear interpolation inside each bracketing cell.
    """

    def __init__(self, points=GRID_POINTS):
        if points % _COARSE:
            raise ValueError("points must be a multiple of 1000")
        self.points = points
        self.fine = points // _COARSE
        self.x = np.arange(points + 1) / points
        with np.errstate(divide="ignore"):
            self.odds = (1.0 - self.x) / self.x  # +inf at x = 0, where f = h > 0
        self._decay = np.empty((_COARSE + 1, self.fine))
        self._lhs = np.empty(points + 1)
        self._pos = np.empty(points + 1, dtype=bool)
        self._a = np.arange(_COARSE + 1)[:, None] * (self.fine / points)
        self._b = np.arange(self.fine)[None, :] / points

    def residual_at(self, i, h, load_scale):
        x = self.x[i]
        return (1.0 - x) * h - x * np.exp(-load_scale * x)

    def roots(self, h, load_scale):
        np.multiply(np.exp(-load_scale * self._a), np.exp(-load_scale * self._b), out=self._decay)
        decay = self._decay.ravel()[: self.points + 1]
        np.multiply(self.odds, h, out=self._lhs)
        np.greater(self._lhs, decay, out=self._pos)
        pos = self._pos
        cells = np.flatnonzero(pos[:-1] != pos[1:])
        found = []
        for i in cells:
            f0 = self.residual_at(i, h, load_scale)
            f1 = self.residual_at(i + 1, h, load_scale)
            if f0 == f1:
                found.append(float(self.x[i]))
                continue
            found.append(float(self.x[i] + (self.x[i + 1] - self.x[i]) * f0 / (f0 - f1)))
        return sorted(found)


def grid_roots(h, load_scale, points=GRID_POINTS):
    return GridScanner(points).roots(h, load_scale)


def random_params(rng, n):
    """Valid parameter sets with the attempt probability inside the W domain."""
    from eponsim.model import SystemParams, attempt_probability
    from eponsim.stability import critical_omegas

    sets = []
    while len(sets) < n:
        tau_a = float(rng.uniform(5.0, 200.0))
        tau_f = float(rng.uniform(5.0, 200.0))
        cycle = float(rng.uniform(0.05, 1.0)) * min(2.0, (tau_a + tau_f) / 20.0)
        p = (
            SystemParams(
                n_onus=int(rng.integers(64, 2049)),
                tau_a=tau_a,
                tau_f=tau_f,
                cycle=cycle,
                req_len=float(rng.uniform(1e-6, 3e-6)),
                max_wait=350e-6,
                one_trip=float(rng.uniform(10e-6, 100e-6)),
            )
        )
        # keep omega0/4 comfortably above the REQ length so sweeps stay valid
        if critical_omegas(p, attempt_probability(p))[0] / 4 > 2 * p.req_len:
            sets.append(p)
    return sets


def p_rer_quadrature(tau_a, tau_f, cycle):
    """Pr{t_A + t_F < T | t_A < T} by 2-D quadrature of the exponential densities."""
    from scipy.integrate import dblquad

    fa = lambda t: math.exp(-t / tau_a) / tau_a
    ff = lambda t: math.exp(-t / tau_f) / tau_f
    joint, _ = dblquad(lambda tf, ta: fa(ta) * ff(tf), 0.0, cycle, 0.0, lambda ta: cycle - ta,
                       epsabs=1e-13, epsrel=1e-12)
    return joint / (1.0 - math.exp(-cycle / tau_a))
