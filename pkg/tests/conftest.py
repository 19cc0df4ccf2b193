import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from esscoh import grouptheory as gt
from esscoh.pipeline import GroupContext, ResolutionRegistry


@pytest.fixture(scope="session")
def registry():
    return ResolutionRegistry()


@pytest.fixture(scope="session")
def ctx_factory(registry):
    """Shared per-group pipelines at their default degree caps."""
    cache: dict = {}

    def get(name: str, maxdeg=None) -> GroupContext:
        key = (name, maxdeg)
        if key not in cache:
            cache[key] = GroupContext(gt.catalog_group(name), maxdeg=maxdeg,
                                      registry=registry)
        return cache[key]

    return get
