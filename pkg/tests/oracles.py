"""Independent reference computations for the tests.

Everything here works from the defining formulas in mpmath (or plain
Python) and never calls into the package.
"""

import mpmath as mp


def gamma_delta_pmf(alpha, beta, x, dps=200):
    """x^(alpha-1, falling) beta^alpha / (Gamma(alpha) (1+beta)^(x+1)) term by term."""
    with mp.workdps(dps):
        a, b, x = mp.mpf(alpha), mp.mpf(beta), mp.mpf(x)
        ff = mp.gamma(x + 1) / mp.gamma(x + 2 - a)
        return ff * b**a / (mp.gamma(a) * (1 + b) ** (x + 1))


def gamma_nabla_pmf(alpha, beta, x, dps=200):
    """x^(alpha-1, rising) beta^alpha (1-beta)^(x-1) / Gamma(alpha)."""
    with mp.workdps(dps):
        a, b, x = mp.mpf(alpha), mp.mpf(beta), mp.mpf(x)
        rf = mp.gamma(x + a - 1) / mp.gamma(x)
        return rf * b**a * (1 - b) ** (x - 1) / mp.gamma(a)


def nabla_transform(pmf, s, terms=4000, dps=40):
    """sum_{x>=1} (1-s)^(x-1) pmf(x), summed until the terms are negligible."""
    with mp.workdps(dps):
        s = mp.mpf(s)
        return mp.nsum(lambda x: (1 - s) ** (x - 1) * pmf(int(x)), [1, mp.inf])


def delta_transform(pmf, offset, s, dps=40):
    """sum_{x in N_offset} (1+s)^(-(x+1)) pmf(x)."""
    with mp.workdps(dps):
        s = mp.mpf(s)
        return mp.nsum(lambda m: (1 + s) ** (-(offset + m + 1)) * pmf(offset + m), [0, mp.inf])


def central_difference(f, s, i, h):
    """Five-point stencils for the first and second derivative."""
    if i == 1:
        return (-f(s + 2 * h) + 8 * f(s + h) - 8 * f(s - h) + f(s - 2 * h)) / (12 * h)
    if i == 2:
        return (-f(s + 2 * h) + 16 * f(s + h) - 30 * f(s) + 16 * f(s - h) - f(s - 2 * h)) / (12 * h * h)
    raise ValueError(i)


def beta_pdf(u, a, b):
    with mp.workdps(30):
        return float(u ** (a - 1) * (1 - u) ** (b - 1) / mp.beta(a, b))
