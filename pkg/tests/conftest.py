import numpy as np
import pytest

from app.catalog import build_artifacts, catalog_from_artifacts, write_catalog
from app.schemas import save_state
from app.wh_group import wh_group


@pytest.fixture(scope="session")
def group22():
    return wh_group((2, 2))


@pytest.fixture(scope="session")
def artifacts():
    return build_artifacts(seed=42)


@pytest.fixture(scope="session")
def catalog(artifacts):
    return catalog_from_artifacts(artifacts)


@pytest.fixture(scope="session")
def catalog_dir(catalog, tmp_path_factory):
    return write_catalog(catalog, tmp_path_factory.mktemp("catalog"))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def state_file(tmp_path):
    """Escribe un estado en JSON y devuelve la ruta."""

    def _write(state, name: str = "state.json"):
        path = tmp_path / name
        save_state(path, state)
        return path

    return _write
