import warnings

import numpy as np
import pytest

from zzsim.coupling import CapacitanceNetwork
from zzsim.device import DeviceModel, bundled_card_path, load_card

warnings.filterwarnings("ignore", message=".*dispersive validity.*")
warnings.filterwarnings("ignore", message=".*saturated at level.*")


@pytest.fixture(scope="session")
def paper_card():
    return load_card(bundled_card_path())


@pytest.fixture(scope="session")
def paper_model(paper_card):
    return DeviceModel(paper_card)


@pytest.fixture(scope="session")
def paper_network():
    return CapacitanceNetwork(
        c_rt=452.1, c_ab=3.9, c_b0=58.0, c_sht=30.0, c_t=5.0, c_c0=60.0,
        c_cd=10.0, c_r=468.9, c_rcsfq=438.8, c_gh=3.9, c_g0=59.0,
        c_shcsfq=30.0, c_1=5.0, c_e0=50.2, c_de=14.5, c_3=2.25,
        l_r=1.3, l_rt=1.2, l_rcsfq=1.2,
    )


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(2024)
