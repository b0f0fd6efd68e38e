import functools
import os
import sys

from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# fixtures exercised as pseudo tensor structures, with the fields they run over
DY_FIXTURES = [
    ("trivial", "Q"),
    ("product-field", "Q"),
    ("kronecker-p1", "Q"),
    ("kronecker-p1", "F5"),
    ("cyclic-group-2", "Q"),
    ("cyclic-group-2", "F2"),
    ("cyclic-group-3", "F3"),
]


@functools.lru_cache(maxsize=None)
def fixture_structure(name: str, field: str):
    from dgdy import make_fixture
    return make_fixture(name, field)


@functools.lru_cache(maxsize=None)
def fixture_dy(name: str, field: str):
    from dgdy import build_dy
    _, s = fixture_structure(name, field)
    return build_dy(s)
