"""Independent replay of the estimator and monitor arithmetic in arbitrary
precision. Produces the frozen expected values used by the C++ tests.

Discovery probabilities here come from the defining expectation
E[min(X+1, y)/(X+1)], X ~ Poisson(lambda), summed directly, not from the
closed form used by the library.
"""
from mpmath import mp, mpf, exp, log, sqrt, factorial

mp.dps = 40


def discovery(y, lam):
    if y == 0:
        return mpf(0)
    lam = mpf(lam)
    total = mpf(0)
    pmf = exp(-lam)
    k = 0
    while True:
        total += min(k + 1, y) / mpf(k + 1) * pmf
        k += 1
        pmf = pmf * lam / k
        if k > lam + 50 and pmf < mpf(10) ** -35:
            break
    return total


def azuma(t, delta, sigma_sq, nu):
    l = log(2 / mpf(delta))
    return max(sqrt(2 * mpf(sigma_sq) / t * l), 2 * mpf(nu) / t * l)


class Replay:
    def __init__(self, delta, sigma_sq, nu):
        self.delta, self.sigma_sq, self.nu = delta, sigma_sq, nu
        self.xs, self.shifts = [], []

    def update(self, x, shift):
        # Direct evaluation of the running-mean definition (no recurrence).
        self.xs.append(mpf(x))
        t = len(self.xs)
        resid = [self.xs[s] - sum(self.shifts[:s], mpf(0)) for s in range(t)]
        e1 = sum(resid, mpf(0)) / t
        est = e1 + sum(self.shifts, mpf(0))
        self.shifts.append(mpf(shift))
        eps = azuma(t, self.delta, self.sigma_sq, self.nu)
        return est - eps, est + eps, e1


def coin_trace():
    r = Replay(mpf("0.05"), 1, 0)
    for x in (1, 0, 1):
        lo, hi, e1 = r.update(x, mpf("0.1") if x == 1 else mpf("-0.1"))
    print("coin e1 after (1,0,1):", mp.nstr(e1, 20), "estimate:", mp.nstr((lo + hi) / 2, 20))


def attention_fixture():
    gamma, delta, lmin, lmax, floor = mpf("0.0025"), mpf("0.05"), 4, 14, mpf("1e-9")
    a = Replay(delta / 2, 2 * lmax, 2)
    b = Replay(delta / 2, 2 * lmax, 2)
    steps = [(7, 9, 2, 1), (10, 6, 0, 3), (8, 8, 1, 1)]
    change = lambda y: gamma if y == 0 else -gamma * y
    for t, (xa, xb, ya, yb) in enumerate(steps, 1):
        out = []
        for rep, x, y in ((a, xa, ya), (b, xb, yb)):
            lo, hi, _ = rep.update(x, change(y))
            mid = (lo + hi) / 2
            clamped = lo < floor
            lo_c = max(lo, floor)
            om = (discovery(y, hi), discovery(y, lo_c))
            point = discovery(y, max(mid, floor))
            out.append((om, point, clamped))
        (oa, pa, ca), (ob, pb, cb) = out
        print(f"t={t} phi_lo={mp.nstr(oa[0]-ob[1], 17)} phi_hi={mp.nstr(oa[1]-ob[0], 17)} "
              f"point={mp.nstr(pa-pb, 17)} clamped={ca or cb}")
        print(f"     omega_a=[{mp.nstr(oa[0],17)}, {mp.nstr(oa[1],17)}] omega_b=[{mp.nstr(ob[0],17)}, {mp.nstr(ob[1],17)}]")


def lending_two_obs():
    eps = azuma(1, mpf("0.025"), 100, 0)
    print("lending eps_g(1, 0.025, (100,0)) =", mp.nstr(eps, 20), "half-width:", mp.nstr(2 * eps, 20))


def eta_values():
    for y, lam in ((1, 1), (50, 1), (3, "0.5"), (3, 2)):
        print(f"eta({y},{lam}) =", mp.nstr(discovery(y, lam), 20))
    print("azuma(100, 0.05, 1, 0) =", mp.nstr(azuma(100, mpf("0.05"), 1, 0), 20))


if __name__ == "__main__":
    coin_trace()
    lending_two_obs()
    eta_values()
    attention_fixture()
