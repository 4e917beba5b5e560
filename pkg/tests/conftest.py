import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from twfpd.cli import EXAMPLES, load_example  # noqa: E402
from twfpd.construct import BankConfig, DirectionSpec, build_bank  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")


@pytest.fixture(scope="session")
def example_configs():
    return {name: load_example(name) for name in EXAMPLES}


@pytest.fixture(scope="session")
def banks(example_configs):
    return {name: build_bank(cfg) for name, cfg in example_configs.items()}


def random_config(rng: np.random.Generator, max_n: int = 3, max_lam: int = 3, max_m: int = 3) -> BankConfig:
    """Random valid bank: xi in [-2, 2]^n minus 0, zeta in [-2, 2]^n, N <= lam^n."""
    n = int(rng.integers(1, max_n + 1))
    lam = int(rng.integers(2, max_lam + 1))
    N = int(rng.integers(1, lam ** n + 1))
    dirs = []
    for _ in range(N):
        xi = rng.integers(-2, 3, n)
        while not xi.any():
            xi = rng.integers(-2, 3, n)
        zeta = rng.integers(-2, 3, n)
        dirs.append(DirectionSpec(tuple(int(v) for v in xi), tuple(int(v) for v in zeta),
                                  int(rng.integers(1, max_m + 1))))
    orientation = ("min_phase", "max_phase")[int(rng.integers(2))]
    return BankConfig(n, lam, tuple(dirs), orientation=orientation)


@st.composite
def bank_configs(draw, max_n: int = 2, max_lam: int = 3, max_m: int = 3, max_dirs: int = 4):
    n = draw(st.integers(1, max_n))
    lam = draw(st.integers(2, max_lam))
    N = draw(st.integers(1, min(max_dirs, lam ** n)))
    vec = st.lists(st.integers(-2, 2), min_size=n, max_size=n)
    dirs = []
    for _ in range(N):
        xi = draw(vec.filter(any))
        zeta = draw(vec)
        dirs.append(DirectionSpec(tuple(xi), tuple(zeta), draw(st.integers(1, max_m))))
    orientation = draw(st.sampled_from(["min_phase", "max_phase"]))
    return BankConfig(n, lam, tuple(dirs), orientation=orientation)


@st.composite
def sparse_polys(draw, dim: int = 2, max_terms: int = 6, radius: int = 3):
    keys = st.tuples(*[st.integers(-radius, radius)] * dim)
    coeff = st.floats(-2, 2, allow_nan=False).filter(lambda c: abs(c) > 1e-3)
    terms = draw(st.dictionaries(keys, coeff, max_size=max_terms))
    from twfpd.trigpoly import TrigPoly
    return TrigPoly(dim, terms)


def camera_image() -> np.ndarray:
    from skimage import data
    return data.camera().astype(float) / 255.0
