import pytest

from helpers import LEMMAS


@pytest.mark.parametrize("name", list(LEMMAS))
def test_lemma(name):
    instances, violations = LEMMAS[name]()
    assert instances > 0
    assert violations == []
