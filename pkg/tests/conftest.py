import pytest

from ultimum import BrownianDrift, CompoundPoissonDrift, JumpDiffusion, scale_model

# canonical parameter sets used throughout: the Brownian benchmark and the
# two figure configurations
BM_PARAMS = dict(sigma=1.0, mu=-0.5)
JD_PARAMS = dict(sigma=0.5, mu=0.5, lam=1.0, eta=1.0)
CP_PARAMS = dict(mu=2.0, lam=5.0, eta=0.2)


@pytest.fixture(scope="session")
def bm():
    return BrownianDrift(**BM_PARAMS)


@pytest.fixture(scope="session")
def jd():
    return JumpDiffusion(**JD_PARAMS)


@pytest.fixture(scope="session")
def cp():
    return CompoundPoissonDrift(**CP_PARAMS)


@pytest.fixture(scope="session")
def all_families(bm, jd, cp):
    return {"bm": bm, "jd": jd, "cp": cp}


@pytest.fixture(scope="session")
def bm_model(bm):
    return scale_model(bm)


@pytest.fixture(scope="session")
def jd_model(jd):
    return scale_model(jd)


@pytest.fixture(scope="session")
def cp_model(cp):
    return scale_model(cp)
