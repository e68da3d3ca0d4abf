import pytest

from epifront import InitialData, ModelParams, NonlinearitySpec


@pytest.fixture
def monod_benchmark():
    """H(v) = 2v/(1+v), G(u) = 3u/(1+u): R0 = 6, (u*, v*) = (1.25, 5/3)."""
    return NonlinearitySpec.monod(2.0, 1.0, 3.0, 1.0)


@pytest.fixture
def monod_symmetric():
    """H = G = 2z/(1+z): R0 = 4, u* = v* = 1, l0 = pi for the unit parameters."""
    return NonlinearitySpec.monod(2.0, 1.0, 2.0, 1.0)


@pytest.fixture
def monod_subcritical():
    """H'(0) G'(0) = 0.5: R0 = 0.5 with unit decay rates."""
    return NonlinearitySpec.monod(1.0, 1.0, 0.5, 1.0)


@pytest.fixture
def unit_params():
    return ModelParams(1.0, 1.0, 1.0, 1.0, mu1=1.0, mu2=1.0, h0=4.0)


def make_params(**kw):
    base = dict(d1=1.0, d2=1.0, a=1.0, b=1.0, mu1=1.0, mu2=1.0, h0=4.0)
    base.update(kw)
    return ModelParams(**base)


def bump(h0, fixed_end="dirichlet", **kw):
    return InitialData.bump(h0, fixed_end, **kw)


def random_supercritical(rng):
    """Random positive parameters with R0 > 1 (and a Monod pair realizing them)."""
    while True:
        d1, d2, a, b = rng.uniform(0.3, 3.0, size=4)
        alpha1, alpha2 = rng.uniform(0.3, 3.0, size=2)
        if alpha1 * alpha2 > 1.2 * a * b:
            nl = NonlinearitySpec.monod(alpha1, 1.0, alpha2, 1.0)
            fixed_end = "dirichlet" if rng.random() < 0.5 else "neumann"
            return make_params(d1=d1, d2=d2, a=a, b=b, fixed_end=fixed_end), nl
