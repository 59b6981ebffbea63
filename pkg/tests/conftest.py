import functools

import pytest

from ydecay import model, solver

# Reference instances used throughout the suite.  alpha = (2 beta + rho)/(1-m).
EXPLICIT = dict(n=3, m=0.2, beta=2.5, rho=1.0, eta=1.0)  # alpha = n beta = 7.5, lam = sqrt(2)
YAMABE3 = dict(n=3, m=0.2, beta=1.0, rho=1.0, eta=1.0)  # alpha = 3.75 > n beta
THEOREM4 = dict(n=4, m=0.25, beta=2.0, rho=1.0, eta=1.0)  # alpha = 20/3 < n beta
YAMABE5 = dict(n=5, m=3.0 / 7.0, beta=1.0, rho=1.0, eta=1.0)  # alpha = 5.25 > n beta
OFF_REGIME = dict(n=3, m=0.3, beta=3.0, rho=2.0, eta=1.0)  # below the beta lower bound


def make_params(spec, **overrides):
    d = dict(spec)
    d.update(overrides)
    return model.ProblemParams(**d)


@functools.lru_cache(maxsize=None)
def _solve(n, m, beta, rho, eta, r_max, tol, r0, allow):
    p = model.ProblemParams(n=n, m=m, beta=beta, rho=rho, eta=eta)
    return solver.integrate(p, r_max=r_max, tol=tol, r0=r0, allow_any_regime=allow)


@pytest.fixture(scope="session")
def get_curve():
    """Memoized solver front end shared by the whole suite."""

    def solve(spec, r_max=1e6, tol=1e-10, r0=1e-4, allow=False, **overrides):
        d = dict(spec)
        d.update(overrides)
        return _solve(d["n"], d["m"], d["beta"], d["rho"], d["eta"], r_max, tol, r0, allow)

    return solve
