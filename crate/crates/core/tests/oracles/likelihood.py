"""Extended-precision references for the specimen scale and likelihood tests."""
from mpmath import mp, mpf, log, exp

from cmb import invert_grid_bisect

mp.dps = 50

THETA = dict(sf=1400.0, b=-0.09, ef=0.25, c=-0.65, A=0.35, k=0.6, m=3.2)
E = 150000.0
ROWS = [(0.5, 1.8, 1.2), (2.0, 1.3, 0.4), (6.0, 1.0, 0.0)]
AREA = 20.0


def life(eps, chi):
    t = THETA
    support = 1 + mpf(t["A"]) * mpf(chi) ** mpf(t["k"]) if chi > 0 else mpf(1)
    return invert_grid_bisect(mpf(eps) / support, t["sf"], t["b"], t["ef"], t["c"], E)


def eta_tabulated(eps):
    m = mpf(THETA["m"])
    s = sum(mpf(da) * life(mpf(kappa) * mpf(eps), chi) ** (-m) for da, kappa, chi in ROWS)
    return s ** (-1 / m)


def eta_uniform(eps):
    m = mpf(THETA["m"])
    return life(eps, 0) * mpf(AREA) ** (-1 / m)


RECORDS = [
    ("smooth", 0.004, 7000.0, 0),
    ("smooth", 0.004, 4200.0, 0),
    ("smooth", 0.006, 620.0, 0),
    ("smooth", 0.003, 60000.0, 1),
    ("smooth", 0.008, 150.0, 0),
    ("notch", 0.004, 3000.0, 0),
    ("notch", 0.004, 5200.0, 0),
    ("notch", 0.005, 900.0, 0),
    ("notch", 0.0025, 100000.0, 1),
    ("notch", 0.007, 330.0, 0),
]


def nll():
    m = mpf(THETA["m"])
    total = mpf(0)
    for pid, eps, n, cens in RECORDS:
        eta = eta_uniform(eps) if pid == "smooth" else eta_tabulated(eps)
        z = mpf(n) / eta
        total += z ** m if cens else -log(m) + log(eta) - (m - 1) * log(z) + z ** m
    return total


if __name__ == "__main__":
    print("eta tabulated 0.004", mp.nstr(eta_tabulated(0.004), 20))
    print("nll", mp.nstr(nll(), 20))
