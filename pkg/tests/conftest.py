import pytest

from quantum_tweezers import build_level_model, derive_all, get_preset


@pytest.fixture(scope="session")
def fig3a():
    return get_preset("fig3a")


@pytest.fixture(scope="session")
def fig3a_derived(fig3a):
    return derive_all(fig3a.system)


@pytest.fixture(scope="session")
def fig3a_model(fig3a_derived):
    return build_level_model(fig3a_derived, n_max=2)


@pytest.fixture(scope="session")
def fig3b():
    return get_preset("fig3b")
