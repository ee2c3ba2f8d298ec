"""Independent high-precision oracle values frozen into the C++ unit tests.

Run `python3 tests/oracles/generate_oracles.py` and update the constants in
test_quad_analysis.cpp / test_smooth_analysis.cpp when a formula changes.
Needs mpmath.
"""

import mpmath as mp

mp.mp.dps = 50


def quad10_eigs():
    return [mp.mpf((i + 1) ** 2 + 5) for i in range(10)]


def mode(a, b, g, lam):
    a, b, g, lam = map(mp.mpf, (a, b, g, lam))
    c = (1 + b) - a * (1 + g) * lam
    d = -(b - a * g * lam)
    # Eigenvalues of the companion block from a general eigensolver.
    ev, _ = mp.eig(mp.matrix([[c, d], [1, 0]]))
    rho = max(abs(e) for e in ev)
    u = (1 + d) * ((1 - d) ** 2 - c ** 2) / (lam * (1 - d) * a ** 2)
    return c, d, rho, u


def stationary_variance(a, b, g, lam, s2=1):
    """0.5 lam Xi_11 from the 3x3 linear system of the 2x2 Lyapunov equation."""
    c, d, _, _ = mode(a, b, g, lam)
    a = mp.mpf(a)
    # Unknowns x = Xi11, y = Xi12, z = Xi22 of Xi = M Xi M^T + Q.
    A = mp.matrix([[1 - c * c, -2 * c * d, -d * d], [-c, 1 - d, 0], [-1, 0, 1]])
    rhs = mp.matrix([s2 * a * a, 0, 0])
    x = mp.lu_solve(A, rhs)
    return lam * x[0] / 2


def entropic_risk(a, b, g, eigs, s2, theta):
    us = [mode(a, b, g, lam)[3] for lam in eigs]
    return -(mp.mpf(s2) / theta) * mp.fsum(mp.log(1 - theta / (2 * u)) for u in us), min(us)


def evar(a, b, g, eigs, s2, zeta):
    _, umin = entropic_risk(a, b, g, eigs, s2, mp.mpf(1))
    lz = mp.log(1 / mp.mpf(zeta))

    def obj(t):
        return entropic_risk(a, b, g, eigs, s2, t)[0] + 2 * s2 * lz / t

    # Stationary point of a convex-in-1/theta objective: root of the derivative.
    t = mp.findroot(lambda t: mp.diff(obj, t), umin)
    return obj(t), t


def smooth(vt, ps, mu, L, alpha=None):
    vt, ps, mu, L = map(mp.mpf, (vt, ps, mu, L))
    a = alpha if alpha is not None else (1 - vt) / (L * (1 - ps))
    a = mp.mpf(a)
    beta = (1 - mp.sqrt(vt * a * mu)) / (1 - a * ps * mu) * (1 - mp.sqrt(a * mu / vt))
    gamma = ps * beta
    rate2 = 1 - mp.sqrt(vt * a * mu)
    lamP = vt / (2 * a)
    return a, beta, gamma, rate2, lamP


def in_s1(vt, ps, mu, L):
    vt, ps, mu, L = map(mp.mpf, (vt, ps, mu, L))
    k = L / mu
    lhs = (1 - mp.sqrt((1 - vt) * vt / (k * (1 - ps)))) * (
        1 - (1 - vt) * (mu * ps ** 2 - L * (1 - ps) ** 2) / (L * (1 - ps) * vt))
    return lhs <= (1 - (1 - vt) * ps / (k * (1 - ps))) ** 2


def gaussian_risk(vt, ps, mu, L, d, s2, theta, alpha=None):
    a, b, g, r2, lamP = smooth(vt, ps, mu, L, alpha)
    mu, L = mp.mpf(mu), mp.mpf(L)
    delta = b - g
    v = 2 * L ** 2 / mu * (2 * delta ** 2 + (1 - a * L) ** 2 * (1 + 2 * g + 2 * g ** 2)) + lamP * r2
    c1 = a * (vt + a * L)
    thu = 2 * (1 - r2) / (8 * a ** 2 * v + (1 - r2) * c1)
    theta = mp.mpf(theta) * thu  # theta given as a fraction of theta_u
    l = 4 * theta * a ** 2 * v / (2 - theta * c1)
    rb2 = (r2 + l) / 2 + mp.sqrt((r2 + l) ** 2 + 4 * l) / 2
    stat = s2 * d * c1 / ((1 - rb2) * (2 - theta * c1))
    return thu, rb2, stat, v


def main():
    print("// mode(alpha=0.01, beta=0.5, gamma=0.3, lambda=20): c d rho u")
    for v in mode("0.01", "0.5", "0.3", 20):
        print(mp.nstr(v, 17))
    print("// mode(alpha=0.02, beta=0.9, gamma=0.1, lambda=3) (complex pair)")
    for v in mode("0.02", "0.9", "0.1", 3):
        print(mp.nstr(v, 17))
    print("// stationary variance same two modes")
    print(mp.nstr(stationary_variance("0.01", "0.5", "0.3", 20), 17))
    print(mp.nstr(stationary_variance("0.02", "0.9", "0.1", 3), 17))

    eigs = quad10_eigs()
    mu, L = eigs[0], eigs[-1]
    q = mu / L
    a = 1 / L
    b = (1 - mp.sqrt(q)) / (1 + mp.sqrt(q))
    print("// AGD on the 10-d quadratic: rho, risk(theta=1), risk(theta=5), evar(0.95), theta*")
    print(mp.nstr(max(mode(a, b, b, lam)[2] for lam in eigs), 17))
    print(mp.nstr(entropic_risk(a, b, b, eigs, 1, mp.mpf(1))[0], 17))
    print(mp.nstr(entropic_risk(a, b, b, eigs, 1, mp.mpf(5))[0], 17))
    val, t = evar(a, b, b, eigs, 1, "0.95")
    print(mp.nstr(val, 17), mp.nstr(t, 17))
    print("// quad benchmark kappa = 17.5")
    print(mp.nstr((1 - 2 / mp.sqrt(3 * L / mu + 1)) ** 2, 17))

    print("// S_1 membership of (0.9, 0.5), (1.2, 1.5), (1.2, 2)")
    print([in_s1(vt, ps, 6, 105) for vt, ps in (("0.9", "0.5"), ("1.2", "1.5"), ("1.2", "2"))])
    print("// smooth params (vartheta, psi) = (0.9, 0.5), (1.2, 1.5): alpha beta gamma rate2 lamP")
    for vt, ps in (("0.9", "0.5"), ("1.2", "1.5")):
        for v in smooth(vt, ps, 6, 105):
            print(mp.nstr(v, 17))
    kappa = L / mu
    print("// HB: psi = 0, vartheta = kappa/(1+kappa)")
    for v in smooth(kappa / (1 + kappa), 0, 6, 105):
        print(mp.nstr(v, 17))
    print("// Gaussian risk bound, AGD (alpha = 1/L), d = 10, theta = theta_u / 2: thu rb2 stat v")
    for v in gaussian_risk(1, 1, 6, 105, 10, 1, mp.mpf("0.5"), alpha=1 / mp.mpf(105)):
        print(mp.nstr(v, 17))
    print("// GD alpha = 1/L, d = 10, theta = 5: thu rb2 stat")
    rho2 = (1 - mu / L) ** 2
    a2l = 1 / L
    print(mp.nstr(2 * (1 - rho2) / a2l, 17))
    print(mp.nstr(rho2 / (1 - 5 * a2l / 2), 17))
    print(mp.nstr(10 * a2l / (2 * (1 - rho2) - 5 * a2l), 17))


if __name__ == "__main__":
    main()
