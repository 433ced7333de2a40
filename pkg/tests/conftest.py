import pytest

from mipkit import catalog as cat
from mipkit import modular_algebra as ma


@pytest.fixture(scope="session")
def groups():
    """Catalog groups built once per session, by name."""
    return {entry.name: cat.build(entry.name) for entry in cat.builtin_catalog()}


@pytest.fixture(scope="session")
def algebras(groups):
    return {name: ma.GroupAlgebra(g) for name, g in groups.items()}


@pytest.fixture(scope="session")
def small_groups(groups):
    """The sub-catalog where exhaustive sweeps stay cheap."""
    return {name: g for name, g in groups.items() if g.order <= 64}
