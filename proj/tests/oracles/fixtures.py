"""High-precision reference values pinned in the C++ tests.

Run with `python3 fixtures.py`; needs mpmath. Everything is built from the
power-law solution family of the best-response ODEs directly, not from the closed-form coefficient
expressions the library uses, so the two act as independent checks.
"""
from mpmath import mp, mpf, findroot

mp.dps = 50


def family(r, k0, k1, k2, l, b, a):
    p, q = b / l, l / b
    s = (1 - a) * r + a
    a1 = a * (b * l + b + 2 * l) / ((b + l) * (b + 2 * l) * (1 - a))
    a2 = a * b * l * (1 + 2 * b + l) / ((b + l) * (2 * b + l) * (1 - a))
    f1 = k0 / ((l + 2 * b) * (1 - a)) * s**p + b / (b + 2 * l) * r - a1 + k1 * s ** (-(1 + p))
    f2 = l * b * k0 ** (-q) / ((2 * l + b) * (1 - a)) * s**q + l / (2 * b + l) * r - a2 + k2 * s ** (-(1 + q))
    return f1, f2


def pinned_k(k0, l, b, a, e):
    """K1, K2 solving f1(e) = f2(e) = 0 exactly (linear in K1, K2)."""
    s = (1 - a) * e + a
    p, q = b / l, l / b
    f1, f2 = family(e, k0, 0, 0, l, b, a)
    return -f1 * s ** (1 + p), -f2 * s ** (1 + q)


def right_gap(k0, l, b, a, e):
    k1, k2 = pinned_k(k0, l, b, a, e)
    f1, f2 = family(1, k0, k1, k2, l, b, a)
    return l * f1 - f2


def k0_root(l, b, a):
    l, b, a = mpf(l), mpf(b), mpf(a)
    return findroot(lambda k: right_gap(k, l, b, a, 0), 1)


def k0_pinned_eps(l, b, a, e):
    l, b, a, e = map(mpf, (l, b, a, e))
    return findroot(lambda k: right_gap(k, l, b, a, e), 1)


def c_constants(l, b, a, e):
    """Constants of K0 = (C3 - C1 K0^(-l/b)) / C2, from the linearized K1, K2."""
    l, b, a, e = map(mpf, (l, b, a, e))
    p, q, x = b / l, l / b, (1 - a) * e / a
    d1 = (l + 2 * b) * (1 - a)
    a1 = a * (b * l + b + 2 * l) / ((b + l) * (b + 2 * l) * (1 - a))
    a2 = a * b * l * (1 + 2 * b + l) / ((b + l) * (2 * b + l) * (1 - a))
    den1 = a ** (-(1 + p)) * ((1 + p) * x - 1)
    den2 = a ** (-(1 + q)) * ((1 + q) * x - 1)
    c1 = -b / ((1 - a) * (2 * l + b)) * (1 + a**q * (1 + q * x) / den2)
    c2 = 1 / d1 * (1 + a**p * (1 + p * x) / den1)
    c3 = -(a / ((b + l) * (1 - a)) * (b * (1 + 2 * b + l) / (2 * b + l) - (b * l + b + 2 * l) / (b + 2 * l))
           + b / (b + 2 * l) + (b / (b + 2 * l) * e - a1) / den1 - 1 / (2 * b + l) - (e / (2 * b + l) - a2 / l) / den2)
    return c1, c2, c3


def k0_orders(l, b, a, e):
    c1, c2, c3 = c_constants(l, b, a, e)
    q = mpf(l) / b
    phi = lambda k: (c3 - c1 * k ** (-q)) / c2
    k1 = phi(mpf(1))
    return k1, phi(k1), findroot(lambda k: c2 * k + c1 * k ** (-q) - c3, 1)


if __name__ == "__main__":
    print("root(1, 1, 0.5)   =", mp.nstr(k0_root(1, 1, 0.5), 20))
    print("root(2, 1, 0.3)   =", mp.nstr(k0_root(2, 1, 0.3), 20))
    print("root(1.2, 1, 0.3) =", mp.nstr(k0_root(1.2, 1, 0.3), 20))
    print("root(1.5, 0.5, 0.2) =", mp.nstr(k0_root(1.5, 0.5, 0.2), 20))
    print("pinned-eps K0(1.2, 1, 0.3, 1e-3) =", mp.nstr(k0_pinned_eps(1.2, 1, 0.3, 1e-3), 20))
    c = c_constants(1.2, 1, 0.3, 1e-3)
    print("C(1.2, 1, 0.3, 1e-3) =", [mp.nstr(v, 20) for v in c])
    print("K0 order1/order2/fixed point (1.2, 1, 0.3, 1e-3) =", [mp.nstr(v, 20) for v in k0_orders(1.2, 1, 0.3, 1e-3)])
