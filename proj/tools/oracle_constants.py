#!/usr/bin/env python3
"""Independent regeneration of the population constants frozen in the tests.

Every constant the C++ test suite pins for the linear Gaussian preset
(g(x) = x, standard normal covariate, unit noise, Gaussian pair kernel) is
recomputed here through SciPy adaptive quadrature, deliberately avoiding the
library's own Gauss-Hermite code path:

  theta    target E[f(X) g'(X)]
  sigma2   variance of the influence function in the first coordinate
  delta2   pair-level variance constant (small-bandwidth variance term)
  beta     bias slope: (E[theta_hat] - theta) / h^2 extrapolated to h -> 0
  kappa1   E[psi^3]
  kappa2   pair-interaction third-moment constant (6x the h -> 0 limit of
           E[psi(Z1) psi(Z2) U_12])

Run:  python3 tools/oracle_constants.py
"""

import math

import numpy as np
from scipy import integrate

SQRT_2PI = math.sqrt(2.0 * math.pi)
S = 1.0  # noise standard deviation


def phi(x):
    return np.exp(-0.5 * x * x) / SQRT_2PI


def phi_dot(x):
    return -x * phi(x)


def g(x):
    return x


def g_dot(x):
    return np.ones_like(np.asarray(x, dtype=float))


def kprime(u):
    """Derivative of the Gaussian kernel k(u) = phi(u)."""
    return -u * phi(u)


def quad(f, lo=-12.0, hi=12.0):
    val, _ = integrate.quad(f, lo, hi, limit=400, epsabs=1e-13, epsrel=1e-13)
    return val


# --- building blocks -------------------------------------------------------

THETA = quad(lambda x: g_dot(x) * phi(x) ** 2)


def a_fun(x):
    """Linear influence part a(x) = 2 (e'(x) - g(x) f'(x) - theta), e = f g."""
    e_dot = g_dot(x) * phi(x) + g(x) * phi_dot(x)
    return 2.0 * (e_dot - g(x) * phi_dot(x) - THETA)


def b_fun(x):
    """Noise-coefficient part: psi = a(x) + eps * b(x) with b = -2 s f'."""
    return -2.0 * S * phi_dot(x)


def sigma2():
    return quad(lambda x: (a_fun(x) ** 2 + b_fun(x) ** 2) * phi(x))


def kappa1():
    return quad(lambda x: (a_fun(x) ** 3 + 3.0 * a_fun(x) * b_fun(x) ** 2) * phi(x))


def delta2():
    f2 = quad(lambda x: phi(x) ** 2)
    rough = quad(lambda u: kprime(u) ** 2)
    return 2.0 * S * S * f2 * rough


# --- finite-bandwidth pair moments (substituted x2 = x - h w) --------------


def mean_u(h):
    """E[U_12] at bandwidth h: the pair-mean expectation.

    U_12 = -h^{-2} k'((x1 - x2)/h) (y1 - y2); substituting x2 = x - h w
    (Jacobian h) and integrating the noise out leaves
    -h^{-1} k'(w) (g(x) - g(x - h w)) f(x) f(x - h w).
    """

    def inner(w, x):
        x2 = x - h * w
        return -kprime(w) * (g(x) - g(x2)) / h * phi(x) * phi(x2)

    val, _ = integrate.dblquad(inner, -9.0, 9.0, -9.0, 9.0, epsabs=1e-12, epsrel=1e-12)
    return val


def pair_interaction(h):
    """E[psi(Z1) psi(Z2) U_12] at bandwidth h (noise integrated analytically).

    With psi_i = a(x_i) + eps_i b(x_i) and y1 - y2 = g1 - g2 + S(eps1 - eps2),
    E over the noise gives a1 a2 (g1 - g2) + S (b1 a2 - a1 b2); the same
    substitution as in mean_u absorbs one power of h.
    """

    def inner(w, x):
        x2 = x - h * w
        a1, a2 = a_fun(x), a_fun(x2)
        bracket = a1 * a2 * (g(x) - g(x2)) + S * (b_fun(x) * a2 - a1 * b_fun(x2))
        return -kprime(w) / h * bracket * phi(x) * phi(x2)

    val, _ = integrate.dblquad(inner, -9.0, 9.0, -9.0, 9.0, epsabs=1e-12, epsrel=1e-12)
    return val


def richardson(values):
    """Two-level Richardson on an h, h/2, h/4 ladder for an h^2 + h^4 error."""
    v0, v1, v2 = values
    lvl1a = (4.0 * v1 - v0) / 3.0
    lvl1b = (4.0 * v2 - v1) / 3.0
    lvl2 = (16.0 * lvl1b - lvl1a) / 15.0
    diag = abs(lvl2 - lvl1b) / max(abs(lvl2), 1e-300)
    return lvl2, diag


def beta_by_extrapolation():
    hs = [0.2, 0.1, 0.05]
    slopes = [(mean_u(h) - THETA) / (h * h) for h in hs]
    return richardson(slopes)


def kappa2_by_extrapolation():
    hs = [0.2, 0.1, 0.05]
    vals = [pair_interaction(h) for h in hs]
    limit, diag = richardson(vals)
    return 6.0 * limit, diag


FROZEN = {
    "theta": 0.28209479177387814,
    "sigma2": 0.17176024308002458,
    "delta2": 0.079577471545947659,
    "beta": -0.21157109383040862,
    "kappa1": -0.025847690625621034,
    "kappa2": 0.40365385596600084,
}


def report(name, value, extra=""):
    frozen = FROZEN[name]
    rel = abs(value - frozen) / max(abs(frozen), 1e-300)
    print(f"{name:8s} {value:+.17g}   frozen {frozen:+.17g}   rel diff {rel:.2e} {extra}")


def main():
    report("theta", THETA, f"(closed form 1/(2 sqrt(pi)) = {0.5 / math.sqrt(math.pi):+.17g})")
    report("sigma2", sigma2())
    report("delta2", delta2(), f"(closed form 1/(4 pi) = {0.25 / math.pi:+.17g})")
    beta, beta_diag = beta_by_extrapolation()
    report("beta", beta, f"(extrapolation diag {beta_diag:.1e}; closed form "
                         f"-3/(8 sqrt(pi)) = {-3.0 / (8.0 * math.sqrt(math.pi)):+.17g})")
    report("kappa1", kappa1())
    kappa2, kappa2_diag = kappa2_by_extrapolation()
    report("kappa2", kappa2, f"(extrapolation diag {kappa2_diag:.1e})")


if __name__ == "__main__":
    main()
