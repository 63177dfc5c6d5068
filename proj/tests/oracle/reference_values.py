#!/usr/bin/env python3
"""Independent dense reference computations for the frozen regression values.

Everything here uses plain NumPy/SciPy dense linear algebra (scipy.linalg.expm,
numpy.linalg.eigh, scipy.integrate) and shares no code with the C++ library.
Run it to regenerate the numbers pinned in tests/frozen_values.hpp.
"""
import itertools
import numpy as np
from scipy.linalg import expm
from scipy import integrate

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def kron_all(ops):
    out = np.array([[1.0 + 0j]])
    for op in ops:
        out = np.kron(out, op)
    return out


def projectors(theta, phi):
    n = (np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta))
    ns = n[0] * SX + n[1] * SY + n[2] * SZ
    return {+1: (I2 + ns) / 2, -1: (I2 - ns) / 2}


def ptrace_env(joint, de):
    return np.einsum("iaja->ij", joint.reshape(2, de, 2, de))


def ptrace_sys(joint, de):
    return np.einsum("aiaj->ij", joint.reshape(2, de, 2, de))


class Dense:
    """Bipartite dynamics given by a dense superoperator or unitary builder."""

    def __init__(self, de, sigma0, prop):
        self.de, self.sigma0, self.prop = de, sigma0, prop

    def lift(self, e):
        return np.kron(e, np.eye(self.de))

    def seq(self, rho0, steps):
        """steps: list of (time, projector); returns probability."""
        joint = np.kron(rho0, self.sigma0)
        now = 0.0
        for time, e in steps:
            joint = self.prop(joint, time - now)
            now = time
            big = self.lift(e)
            joint = big @ joint @ big
        return np.trace(joint).real

    def reduced(self, rho, t):
        return ptrace_env(self.prop(np.kron(rho, self.sigma0), t), self.de)


def unitary_prop(h):
    cache = {}

    def prop(joint, dt):
        if dt == 0:
            return joint
        key = round(dt, 14)
        if key not in cache:
            cache[key] = expm(-1j * dt * h)
        u = cache[key]
        return u @ joint @ u.conj().T

    return prop


def spin_bath(g, n):
    h = g * sum(kron_all([SZ] + [SZ if k == j else I2 for k in range(n)]) for j in range(n))
    de = 2 ** n
    return Dense(de, np.eye(de) / de, unitary_prop(h))


def liouvillian(jumps_gamma, z_ops):
    d = z_ops[0].shape[0]
    eye = np.eye(d)
    lv = np.zeros((d * d, d * d), dtype=complex)
    # column stacking: vec(A X B) = (B^T kron A) vec(X)
    n = len(z_ops)
    for j in range(n):
        for k in range(n):
            gjk = jumps_gamma[j, k]
            if gjk == 0:
                continue
            zj, zk = z_ops[j], z_ops[k]
            lv += gjk * (np.kron(zk.T, zj) - 0.5 * np.kron(eye, zk @ zj) - 0.5 * np.kron((zk @ zj).T, eye))
    return lv


def dissipative(gamma, chi, n):
    idx = np.arange(n)
    gam = (gamma - chi) * np.eye(n) + chi * np.outer(1j ** idx, (-1j) ** idx)
    z_ops = [kron_all([SZ if k == j else I2 for k in range(n)]) for j in range(n)]
    lv = liouvillian(gam, z_ops)
    cache = {}
    d = 2 ** n

    def prop(joint, dt):
        if dt == 0:
            return joint
        key = round(dt, 14)
        if key not in cache:
            cache[key] = expm(dt * lv)
        v = cache[key] @ joint.reshape(-1, order="F")
        return v.reshape(d, d, order="F")

    de = 2 ** (n - 1)
    return Dense(de, np.eye(de) / de, prop)


def markov_dephasing(gamma):
    def prop(joint, dt):
        out = joint.copy()
        out[0, 1] *= np.exp(-2 * gamma * dt)
        out[1, 0] *= np.exp(-2 * gamma * dt)
        return out

    return Dense(1, np.eye(1), prop)


class OUGauss:
    """OU dephasing averaged by Gauss-Hermite quadrature over the interval phases."""

    def __init__(self, gamma, tau_c, nodes=48):
        self.gamma, self.tau_c = gamma, tau_c
        x, w = np.polynomial.hermite_e.hermegauss(nodes)
        self.x, self.w = x, w / w.sum()
        self._roots = {}

    def corr(self, s):
        return self.gamma / (2 * self.tau_c) * np.exp(-abs(s) / self.tau_c)

    def cov(self, a, b, c, d):
        # covariance of 2*int_a^b xi and 2*int_c^d xi by numerical quadrature
        if b <= a or d <= c:
            return 0.0
        val, _ = integrate.dblquad(lambda s2, s1: self.corr(s1 - s2), a, b, c, d, epsabs=1e-13, epsrel=1e-12)
        return 4 * val

    def seq(self, rho0, steps):
        times = [0.0] + [s[0] for s in steps]
        ivals = [(times[k], times[k + 1]) for k in range(len(steps))]
        live = [k for k, (a, b) in enumerate(ivals) if b > a]
        m = len(live)
        key = tuple(ivals[k] for k in live)
        if key not in self._roots:
            cov = np.array([[self.cov(*ivals[i], *ivals[j]) for j in live] for i in live]).reshape(m, m)
            evals, evecs = np.linalg.eigh(cov)
            self._roots[key] = evecs @ np.diag(np.sqrt(np.clip(evals, 0, None)))
        root = self._roots[key]
        if m:
            grids = np.meshgrid(*([self.x] * m), indexing="ij")
            wgrids = np.meshgrid(*([self.w] * m), indexing="ij")
            u = np.stack([g.ravel() for g in grids])
            weight = np.prod(np.stack([g.ravel() for g in wgrids]), axis=0)
            phases = root @ u
        else:
            u = np.zeros((0, 1))
            weight = np.ones(1)
            phases = u
        full = np.zeros((len(steps), u.shape[1]))
        for row, k in enumerate(live):
            full[k] = phases[row]
        prob = np.ones(u.shape[1])
        rho = rho0
        for (time, e), ph in zip(steps, full):
            # Tr(E U rho U^dag) with U = diag(exp(-i ph/2), exp(i ph/2))
            val = (e[0, 0] * rho[0, 0] + e[1, 1] * rho[1, 1]).real + 2 * np.real(e[1, 0] * rho[0, 1] * np.exp(-1j * ph))
            prob = prob * val
            rho = e
        return float(np.dot(weight, prob))


def dni_axis(rho):
    w, v = np.linalg.eigh(rho)
    if abs(w[1] - w[0]) < 1e-9:
        return None
    top = v[:, 1]
    pr = np.outer(top, top.conj())
    b = np.array([np.trace(pr @ s).real for s in (SX, SY, SZ)])
    return b


def axis_to_angles(b):
    b = b / np.linalg.norm(b)
    theta = np.arccos(np.clip(b[2], -1, 1))
    phi = np.arctan2(b[1], b[0]) % (2 * np.pi)
    return theta, phi


def invasiveness(engine, rho0, px, pz, t, tau, reduced):
    # DNI intermediate basis from rho_{t|x}
    axis = None
    for x in (+1, -1):
        axis = dni_axis(reduced(px[x], t))
        if axis is not None:
            break
    py = projectors(*axis_to_angles(axis)) if axis is not None else projectors(np.pi / 2, 0.0)
    i_val = 0.0
    for z, x in itertools.product((1, -1), repeat=2):
        p3 = sum(engine.seq(rho0, [(0.0, px[x]), (t, py[y]), (t + tau, pz[z])]) for y in (1, -1))
        p2 = engine.seq(rho0, [(0.0, px[x]), (t + tau, pz[z])])
        i_val += abs(p3 - p2)
    return i_val


DIRECTIONS = [(th, ph) for th in (np.pi / 6, np.pi / 2, 5 * np.pi / 6) for ph in (0, np.pi / 2, np.pi, 3 * np.pi / 2)]
TIMES = [0.25, 0.5, 0.75, 1.0, 1.25]


def grid_max(engine, reduced, directions=DIRECTIONS, times=TIMES):
    rho0 = I2 / 2
    best = 0.0
    for dx in directions:
        px = projectors(*dx)
        for dz in directions:
            pz = projectors(*dz)
            for t in times:
                for tau in times:
                    best = max(best, invasiveness(engine, rho0, px, pz, t, tau, reduced))
    return best


def ou_reduced(gamma, tau_c):
    def red(rho, t):
        d = np.exp(-2 * gamma * (t - tau_c * (1 - np.exp(-t / tau_c))))
        out = rho.copy()
        out[0, 1] *= d
        out[1, 0] *= d
        return out

    return red


def factorization_distance(engine, t, tau, dirs):
    rho0 = I2 / 2
    px, py, pz = (projectors(*d) for d in dirs)
    total = 0.0
    p2yx = {(y, x): engine.seq(rho0, [(0.0, px[x]), (t, py[y])]) for y in (1, -1) for x in (1, -1)}
    p2zy = {(z, y): engine.seq(rho0, [(t, py[y]), (t + tau, pz[z])]) for z in (1, -1) for y in (1, -1)}
    for z, y, x in itertools.product((1, -1), repeat=3):
        p3 = engine.seq(rho0, [(0.0, px[x]), (t, py[y]), (t + tau, pz[z])])
        p1x = p2yx[(1, x)] + p2yx[(-1, x)]
        p1y = p2zy[(1, y)] + p2zy[(-1, y)]
        total += abs(p3 - (p2zy[(z, y)] / p1y) * (p2yx[(y, x)] / p1x) * p1x)
    return total


def main():
    np.set_printoptions(precision=17)
    out = {}
    sb1, sb4 = spin_bath(1.0, 1), spin_bath(1.0, 4)
    diss = dissipative(1.0, 0.5, 4)
    out["dni_max_I_spin_bath_n1"] = grid_max(sb1, sb1.reduced)
    out["dni_max_I_spin_bath_n4"] = grid_max(sb4, sb4.reduced)
    out["dni_max_I_dissipative_chi05_n4"] = grid_max(diss, diss.reduced)
    markov = markov_dephasing(1.0)
    out["dni_max_I_markov_dephasing"] = grid_max(markov, markov.reduced)
    ou = OUGauss(1.0, 1.0)
    # the OU grid is evaluated on the x-hat-first slice only (quadrature is slow)
    out["dni_max_I_ou_xfirst"] = grid_max(ou, ou_reduced(1.0, 1.0), directions=[(np.pi / 2, 0.0)])
    x = (np.pi / 2, 0.0)
    out["factorization_distance_spin_bath_n4_t04"] = factorization_distance(sb4, 0.4, 0.4, (x, x, x))
    # x-n(pi/2,0)-x invasiveness, tau = t, t in [0,3] with 31 points
    best = 0.0
    px = projectors(*x)
    for t in np.linspace(0.0, 3.0, 31):
        rho0 = I2 / 2
        i_val = 0.0
        for z, xx in itertools.product((1, -1), repeat=2):
            p3 = sum(ou.seq(rho0, [(0.0, px[xx]), (t, px[y]), (2 * t, px[z])]) for y in (1, -1))
            p2 = ou.seq(rho0, [(0.0, px[xx]), (2 * t, px[z])])
            i_val += abs(p3 - p2)
        best = max(best, i_val)
    out["cli_ou_max_I_x_x_x_t0_3"] = best
    for k, v in out.items():
        print(f"{k} = {v!r}")


if __name__ == "__main__":
    main()
