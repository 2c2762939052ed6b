import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bsv_tunnel import BarrierSpec, SqueezingParams


@pytest.fixture(scope="session")
def barrier() -> BarrierSpec:
    """Default 5 eV barrier across a 3 nm gap, atomic units."""
    return BarrierSpec.from_ev_nm(5.0, 3.0)


@pytest.fixture()
def params_r2() -> SqueezingParams:
    return SqueezingParams(r=2.0)
