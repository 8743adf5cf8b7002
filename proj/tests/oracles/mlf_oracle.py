"""Reference values for the Mittag-Leffler and kernel tests.

Run with mpmath; the printed numbers are frozen into tests/test_mlf.cpp and
tests/test_spectral.cpp. Nothing here is used at build or run time.
"""
import mpmath as mp

mp.mp.dps = 60


def ml_series(alpha, beta, z, terms=400):
    alpha, beta, z = mp.mpf(alpha), mp.mpf(beta), mp.mpf(z)
    return mp.fsum(z**k / mp.gamma(alpha * k + beta) for k in range(terms))


def talbot(F, t):
    return mp.invertlaplace(F, t, method="talbot")


def relax_T(q, mu, t):
    return ml_series(q, 1, -mu * mp.mpf(t) ** q)


def relax_S(q, mu, t):
    return mp.mpf(t) * ml_series(q, 2, -mu * mp.mpf(t) ** q)


if __name__ == "__main__":
    print("E_{1.5,2}(-1)       =", mp.nstr(ml_series(1.5, 2, -1), 20))
    print("E_{1.5,1}(-1)       =", mp.nstr(ml_series(1.5, 1, -1), 20))
    q, mu = mp.mpf("1.5"), 1
    print("T(1.5,1,1) talbot   =",
          mp.nstr(talbot(lambda s: s ** (q - 1) / (s**q + mu), 1), 20))
    q, mu = mp.mpf("1.25"), 4
    print("S(1.25,4,0.5)       =", mp.nstr(relax_S(q, mu, 0.5), 20))
    print("S(1.25,4,0.5) talbot=",
          mp.nstr(talbot(lambda s: s ** (q - 2) / (s**q + mu), mp.mpf("0.5")), 20))
    # large negative arguments, used to pin the integral route
    for a, b, z in [(1.25, 1, -40), (1.5, 2, -60), (1.9, 1, -93.3), (1.75, 1, -250),
                    (1.1, 2, -12), (0.6, 1, -30), (0.8, 1.5, -20)]:
        mp.mp.dps = 200
        v = ml_series(a, b, z, terms=3000)
        mp.mp.dps = 60
        print(f"E_{{{a},{b}}}({z}) =", mp.nstr(v, 20))
    print("J^0.5 t at 1        =", mp.nstr(mp.gamma(2) / mp.gamma(2.5), 20))
    print("phase norm e^s      =", mp.nstr(1 + mp.sqrt((1 - mp.e**-40) / 4), 20))
    print("N2* (a=1)           =", mp.nstr(1 + mp.sqrt((1 - mp.e**-2) / 2), 20))
    for n in range(1, 6):
        c = 4 * mp.sqrt(2 / mp.pi) * (1 - (-1) ** n) / n**3
        quad = mp.quad(lambda u: u * (mp.pi - u) * mp.sqrt(2 / mp.pi) * mp.sin(n * u), [0, mp.pi])
        print(f"c_{n} closed={mp.nstr(c, 18)} quad={mp.nstr(quad, 18)}")
