from functools import lru_cache

import pytest
from hypothesis import HealthCheck, settings

from capform.discform import DiscGroup
from capform.orders import catalog_order

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@lru_cache(maxsize=None)
def disc(N: int) -> DiscGroup:
    return DiscGroup(catalog_order(N))


@pytest.fixture(params=[2, 3, 5, 7])
def small_D(request):
    return disc(request.param)
