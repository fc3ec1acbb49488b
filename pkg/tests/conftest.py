import pytest

import toricball as tb

# Atlases are expensive to warm up (Hilbert bases, localization rules),
# so they are shared per session.  Everything in the library is
# immutable after construction, which makes that safe.

_FAN_CACHE = {}
_ATLAS_CACHE = {}


def get_fan(name):
    if name not in _FAN_CACHE:
        _FAN_CACHE[name] = tb.load_bundled(name)
    return _FAN_CACHE[name]


def get_atlas(name):
    if name not in _ATLAS_CACHE:
        _ATLAS_CACHE[name] = tb.Atlas(get_fan(name))
    return _ATLAS_CACHE[name]


@pytest.fixture(scope="session")
def p1():
    return get_fan("p1")


@pytest.fixture(scope="session")
def p2():
    return get_fan("p2")


@pytest.fixture(scope="session")
def p1xp1():
    return get_fan("p1xp1")


@pytest.fixture(scope="session")
def p3():
    return get_fan("p3")


@pytest.fixture(scope="session")
def cube_fan():
    return get_fan("p1xp1xp1")


@pytest.fixture(scope="session")
def p112():
    return get_fan("p112")


@pytest.fixture(scope="session")
def twisted_p3():
    return get_fan("twisted_p3")


@pytest.fixture(scope="session")
def atlas_p2():
    return get_atlas("p2")


@pytest.fixture(scope="session")
def atlas_p1xp1():
    return get_atlas("p1xp1")
