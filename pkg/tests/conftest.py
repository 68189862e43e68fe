import numpy as np
import pytest

from spflab import expr as ex
from spflab.functors import build_module, set_algebra_store_loader


def bm(text, p, n, guard_dim=None):
    """Build the representing module of a functor expression."""
    return build_module(ex.parse(text), p, n, guard_dim=guard_dim)


def random_fp_array(rng, rows, cols, p):
    return rng.integers(0, p, size=(rows, cols), dtype=np.int64)


@pytest.fixture(autouse=True)
def _no_persistent_cache():
    """Keep library tests away from any on-disk structure-constant cache."""
    prev = set_algebra_store_loader(None)
    yield
    set_algebra_store_loader(prev)
