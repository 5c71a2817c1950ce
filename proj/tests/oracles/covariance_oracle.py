# High-precision reference values of the low-parametric covariance (exponent -a10 on
# the Cauchy-type term). Output is pasted into tests/unit/covariance_reference.hpp.
import mpmath as mp

mp.mp.dps = 40
a = [mp.mpf(x) for x in ("0.3", "0.6", "0.4", "0.7", "0.05", "0.2", "1.3", "0.01", "0.15", "1.7", "1.2", "0.9", "1.8")]
a1, a2, a3, a4, a5, a6, a7, a8, a9, a10, a11, a12, a13 = a


def sinc(y):
    return mp.mpf(1) if y == 0 else mp.sin(y) / y


def rho(h):
    h = mp.mpf(h)
    p = lambda e: mp.mpf(0) if h == 0 else h ** e
    first = sinc(a4 * h) * mp.e ** (-a5 * p(a11))
    pe = mp.e ** (-a6 * p(a12))
    second = sinc(a7 * h) * mp.e ** (-a8 * p(a13))
    cauchy = (1 + (a9 * h) ** 2) ** (-a10)
    return a1 * first + (1 - a1) * (a2 * (a3 * pe + (1 - a2) * second) + (1 - a3) * cauchy)


print("// h = 0..100")
print("inline constexpr double kCovarianceReference[101] = {")
for h in range(101):
    print("    " + mp.nstr(rho(h), 17, min_fixed=-5, max_fixed=5) + ",")
print("};")
