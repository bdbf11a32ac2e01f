from ontopred.lib.parallel import ordered_map
import pytest


@pytest.mark.parametrize("threads", [1, 2, 8])
def test_ordered_map_keeps_input_order(threads):
    assert ordered_map(lambda x: x * x, range(20), threads) == [
        x * x for x in range(20)
    ]


def test_ordered_map_empty():
    assert ordered_map(str, [], 4) == []
