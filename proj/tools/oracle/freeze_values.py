"""High-precision reference values frozen into tests/unit/test_numerics.cpp.

Every value is computed by direct quadrature at 50 digits, independently of
the library's continued fraction and Lanczos code.
"""
import mpmath as mp

mp.mp.dps = 50


def beta_integral(a, b, lo, hi):
    f = lambda t: t ** (a - 1) * (1 - t) ** (b - 1)
    return mp.quad(f, [lo, (lo + hi) / 2, hi])


def beta_cdf(a, b, u):
    a, b, u = mp.mpf(a), mp.mpf(b), mp.mpf(u)
    return beta_integral(a, b, 0, u) / beta_integral(a, b, 0, 1)


def ln_gamma(a):
    # Gamma(a) = Gamma(a + 1) / a keeps the integrand bounded at 0.
    a = mp.mpf(a)
    return mp.log(mp.quad(lambda x: x ** a * mp.exp(-x), [0, 1, a, 2 * a + 10, mp.inf])) - mp.log(a)


def f_cdf(k, l, x):
    k, l = mp.mpf(k), mp.mpf(l)
    dens = lambda t: mp.sqrt((k * t) ** k * l ** l / (k * t + l) ** (k + l)) / t
    norm = beta_integral(k / 2, l / 2, 0, 1)
    return mp.quad(dens, [0, mp.mpf(x) / 2, x]) / norm


def bisect(fn, target, lo=0.0, hi=1.0):
    lo, hi = mp.mpf(lo), mp.mpf(hi)
    while hi - lo > mp.mpf("1e-30"):
        mid = (lo + hi) / 2
        if fn(mid) < target:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def show(label, v):
    print(f"{label:40s} {mp.nstr(v, 20)}")


for a in ["0.1", "2.5", "7.3", "33.25", "1000.5"]:
    show(f"ln_gamma({a})", ln_gamma(a))
for a, b, u in [(2.5, 1.5, 0.7), (0.5, 0.5, 0.1), (7, 1.5, 0.3), (0.5, 7, 0.02),
                (1.5, 7, 0.9), (8.5, 1.5, 0.85), (40, 0.5, 0.95), (0.5, 12, 0.4)]:
    show(f"beta_cdf({a},{b},{u})", beta_cdf(a, b, u))
show("beta_quantile(2.5,1.5,0.9)", bisect(lambda u: beta_cdf(2.5, 1.5, u), mp.mpf("0.9")))
show("f_cdf(5,12,2.3)", f_cdf(5, 12, 2.3))
show("1-f_cdf(2,7,5.25)", 1 - f_cdf(2, 7, 5.25))
