import os

import pytest

from maninlab.polynomial import parse_polynomial


@pytest.fixture(scope="session", autouse=True)
def _isolated_cache(tmp_path_factory):
    old = os.environ.get("MANINLAB_CACHE")
    os.environ["MANINLAB_CACHE"] = str(tmp_path_factory.mktemp("cache"))
    yield
    if old is None:
        os.environ.pop("MANINLAB_CACHE", None)
    else:
        os.environ["MANINLAB_CACHE"] = old


@pytest.fixture(scope="session")
def conic():
    return parse_polynomial("x1^2+x2^2+x3^2")


@pytest.fixture(scope="session")
def quadric4():
    return parse_polynomial("x1^2+x2^2+x3^2+x4^2")


@pytest.fixture(scope="session")
def fermat_cubic():
    return parse_polynomial("x1^3+x2^3+x3^3")
