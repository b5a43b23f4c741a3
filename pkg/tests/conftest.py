import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mddreach import corpus
from mddreach.model import parse_model


@pytest.fixture
def toggle():
    return parse_model(corpus.toggle())


@pytest.fixture
def ring10():
    return parse_model(corpus.ring(10))


@pytest.fixture
def prodcons():
    return parse_model(corpus.producer_consumer(3))


@pytest.fixture
def phils3():
    return parse_model(corpus.philosophers(3))


@pytest.fixture(params=sorted(corpus.SMALL))
def small_model(request):
    """Each small corpus member, freshly parsed."""
    return request.param, parse_model(corpus.SMALL[request.param])
