import pytest

from superframe.frames import WaveletFamily
from superframe.funcspace import haar
from superframe.intlin import IntMatrix
from superframe.quotient import CosetSystem

QUINCUNX = "1,1;1,-1"


@pytest.fixture(scope="session")
def cs13():
    """d=1, dilation 2, oversampling 3 (the workhorse admissible pair)."""
    return CosetSystem.build(IntMatrix.parse("2"), IntMatrix.parse("3"))


@pytest.fixture(scope="session")
def cs32():
    """d=1, dilation 3, oversampling 2."""
    return CosetSystem.build(IntMatrix.parse("3"), IntMatrix.parse("2"))


@pytest.fixture(scope="session")
def csq():
    """d=2, quincunx dilation, oversampling 3I (p = 9)."""
    return CosetSystem.build(IntMatrix.parse(QUINCUNX), IntMatrix.parse("3,0;0,3"))


@pytest.fixture(scope="session")
def haar_family():
    return WaveletFamily([haar()])
