import pytest

from semnoma.access import DownlinkScenario
from semnoma.channel import NoiseModel
from semnoma.rates import SemanticTextModel


@pytest.fixture
def model():
    return SemanticTextModel()


@pytest.fixture
def downlink():
    # symmetric 14 dB full-band SNR
    return DownlinkScenario(1e-13, 1e-13, 1.0, 1e6, NoiseModel(4e-21))
