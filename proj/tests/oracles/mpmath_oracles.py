"""Independent reference values for the C++ test suites.

Run with `python3 tests/oracles/mpmath_oracles.py`; the printed values are
frozen as constants in the doctest files. Everything here is written from the
closed forms with mpmath at 40 digits and shares no code with the library.
"""

import mpmath as mp

mp.mp.dps = 40


def flux(a, sigma):
    """Flux function with the concave C^1 filler on (1, 2]."""
    a = mp.mpf(a)
    L = -mp.log(a)
    f1 = 1 - (1 - a) / L
    if sigma <= a:
        return mp.mpf(0)
    if sigma <= 1:
        return (sigma * (mp.log(sigma) - mp.log(a)) - (sigma - a)) / L
    if sigma >= 2:
        return mp.mpf(1)
    x = sigma - 1
    if mp.mpf(1) / 3 <= f1 <= mp.mpf(2) / 3:
        # cubic Hermite: f(0)=f1, f'(0)=1, f(1)=1, f'(1)=0
        h00 = 2 * x**3 - 3 * x**2 + 1
        h10 = x**3 - 2 * x**2 + x
        h01 = -2 * x**3 + 3 * x**2
        return h00 * f1 + h10 + h01
    m = 1 - f1
    if f1 >= mp.mpf(1) / 2:
        knot = 2 * m
        return f1 + x - x**2 / (2 * knot) if x < knot else mp.mpf(1)
    x1 = 2 * m - 1
    if x <= x1:
        return f1 + x
    return f1 + x1 + (x - x1) - (x - x1) ** 2 / (2 * (1 - x1))


def spec(r0, R):
    s0 = -mp.log(r0)
    S = -mp.log(R)
    return s0, S, 2 * S / s0


def q_parts(r0, R, gamma):
    s0, S, a = spec(r0, R)
    L = -mp.log(a)
    g = mp.mpf(gamma)

    def bracket(u):
        # sigma (log sigma - log a) - (sigma - a) at sigma = a + u
        x = u / a
        if x < mp.mpf("1e-6"):
            return a * mp.fsum((-1) ** n * x**n / (n * (n - 1)) for n in range(2, 12))
        return (a + u) * mp.log1p(x) - u

    def integrand(u):
        sig = a + u
        return 2 / s0 * sig ** (g - 1) / L * bracket(u) ** (-g)

    # u = v^p removes the u^{-2g} endpoint singularity
    pw = 1 / (1 - 2 * g)

    def smooth(v):
        return integrand(v**pw) * pw * v ** (pw - 1)

    def quad_u(lo, hi):
        return mp.quad(smooth, [lo ** (1 / pw), hi ** (1 / pw)])

    split = mp.e**2 * a
    if split < 1:
        q2 = quad_u(0, split - a)
        q1 = quad_u(split - a, 1 - a)
        return q1 + q2, q1, q2
    q = quad_u(0, 1 - a)
    return q, mp.mpf(0), q


def near_integral(gamma):
    g = mp.mpf(gamma)
    pw = 1 / (1 - 2 * g)
    # b = 1 + v^p removes the (b-1)^{-2g} endpoint singularity
    return mp.quad(lambda v: (1 + v**pw) ** g * pw, [0, 1, (mp.e**2 - 1) ** (1 / pw)])


def c_q(gamma):
    g = mp.mpf(gamma)
    near = 2 ** (1 + g) * near_integral(gamma) * mp.log(mp.mpf(3) / 2) ** (g - 1)
    far = 2 ** (1 + g) / (1 - g)
    return (near + far) * (1 - mp.log(2) / mp.log(3)) ** (-g)


def q_bound(r0, R, gamma):
    s0, S, _ = spec(r0, R)
    return c_q(gamma) / (s0 * (mp.log(s0) - mp.log(S)) ** gamma)


def barrier():
    return mp.mpf(9) / (32 * mp.log(2) ** 2)


def odi(gamma):
    g = mp.mpf(gamma)
    return (1 + g) / g * (2 * mp.pi) ** (1 / (1 + g)) * barrier() ** (g / (1 + g))


def area_constant(gamma):
    g = mp.mpf(gamma)
    return odi(gamma) * c_q(gamma) ** (1 / (1 + g))


def envelope(gamma, r0):
    g = mp.mpf(gamma)
    s0 = -mp.log(r0)
    return area_constant(gamma) ** (1 + g) / s0 * (1 - mp.log(s0) / mp.log(3)) ** g


def weighted_bigbang(r0, R, t, s_max):
    s0, S, a = spec(r0, R)
    H = lambda s: 1 / mp.sinh(s) ** 2
    phi = lambda s: flux(a, 2 * s / s0)
    body = mp.quad(lambda s: 2 * t * H(s) * phi(s), [S, s0 / 2, s0, s_max])
    tail = mp.pi * 2 * t * H(s_max)
    return 2 * mp.pi * body + tail


def j_rate(r0, R, s_max):
    s0, S, a = spec(r0, R)
    phi = lambda s: flux(a, 2 * s / s0)
    f = lambda s: (1 / s**2 - 1 / mp.sinh(s) ** 2) * phi(s)
    return 4 * mp.pi * mp.quad(f, [S, s0 / 2, s0, s_max])


def show(name, value):
    print(f"{name} = {mp.nstr(value, 18)}")


if __name__ == "__main__":
    r0, R = mp.exp(-0.5), mp.exp(-0.1)
    show("Q(e^-0.5, e^-0.1, 0.25)", q_parts(r0, R, 0.25)[0])
    show("bound(e^-0.5, e^-0.1, 0.25)", q_bound(r0, R, 0.25))
    for r0_, R_, g_ in [(0.75, 0.99, 0.25), (0.6, 0.999, 0.1), (0.9, 0.99, 0.4)]:
        q, q1, q2 = q_parts(mp.mpf(r0_), mp.mpf(R_), g_)
        show(f"Q({r0_},{R_},{g_})", q)
        show(f"Q1({r0_},{R_},{g_})", q1)
        show(f"Q2({r0_},{R_},{g_})", q2)
        show(f"bound({r0_},{R_},{g_})", q_bound(mp.mpf(r0_), mp.mpf(R_), g_))
    for g_ in [0.1, 0.25, 0.4]:
        show(f"I2({g_})", near_integral(g_))
        show(f"C_Q({g_})", c_q(g_))
        show(f"C*({g_})", odi(g_))
        show(f"C_L({g_})", area_constant(g_))
        show(f"C({g_},0.75)", envelope(g_, mp.mpf(0.75)))
    show("C", barrier())
    show("f(1) a=e^-2", flux(mp.exp(-2), mp.mpf(1)))
    s0 = -mp.log(mp.mpf(0.8))
    show("BigBang Vol D_0.8 t=1", 4 * mp.pi * (mp.coth(s0) - 1))
    show("weighted BigBang (0.75,0.99) t=1 s_max=8", weighted_bigbang(mp.mpf(0.75), mp.mpf(0.99), 1, 8))
    show("J rate BB/Cusp (0.75,0.99) s_max=8", j_rate(mp.mpf(0.75), mp.mpf(0.99), 8))
