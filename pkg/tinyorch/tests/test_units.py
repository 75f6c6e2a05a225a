from contextlib import nullcontext as does_not_raise

import pytest

from ..units import to_canonical
from ..units import to_canonical_int


@pytest.mark.parametrize(
    "value, kind, expected, context",
    [
        [442000, "bytes", 442000, does_not_raise()],
        ["442 kB", "bytes", 442000, does_not_raise()],
        ["2 KiB", "bytes", 2048, does_not_raise()],
        ["2 MB", "bytes", 2000000, does_not_raise()],
        ["50 MHz", "frequency", 50000000, does_not_raise()],
        ["1 Mbit/s", "bandwidth", 1000000, does_not_raise()],
        ["100 us", "duration", 100000, does_not_raise()],
        ["16 ms", "duration", 16000000, does_not_raise()],
        ["0.25 W", "power", 0.25, does_not_raise()],
        ["250 mW", "power", 0.25, does_not_raise()],
        ["50 nJ/B", "energy_per_byte", 50, does_not_raise()],
        ["50 kg", "bytes", None, pytest.raises(ValueError)],
        ["not a number", "duration", None, pytest.raises(ValueError)],
        [True, "bytes", None, pytest.raises(ValueError)],
        [None, "bytes", None, pytest.raises(ValueError)],
    ],
)
def test_to_canonical(value, kind, expected, context):
    with context:
        assert to_canonical(value, kind) == pytest.approx(expected)


@pytest.mark.parametrize(
    "value, kind, expected, context",
    [
        ["442 kB", "bytes", 442000, does_not_raise()],
        [1.5, "duration", 2, does_not_raise()],
        [2.5, "duration", 2, does_not_raise()],
        [float("nan"), "duration", None, pytest.raises(ValueError)],
        [float("inf"), "bytes", None, pytest.raises(ValueError)],
    ],
)
def test_to_canonical_int(value, kind, expected, context):
    with context:
        result = to_canonical_int(value, kind)
        assert isinstance(result, int)
        assert result == expected
