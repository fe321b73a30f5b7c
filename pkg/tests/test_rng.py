import numpy as np

from report_fault_injector import rng


def test_streams_repeat():
    a = rng.stream(7, "suite-sampling/F1").integers(0, 1000, size=20)
    b = rng.stream(7, "suite-sampling/F1").integers(0, 1000, size=20)
    assert np.array_equal(a, b)


def test_streams_are_independent():
    a = rng.stream(7, "suite-sampling/F1").integers(0, 2**32, size=8)
    b = rng.stream(7, "suite-sampling/F2").integers(0, 2**32, size=8)
    c = rng.stream(8, "suite-sampling/F1").integers(0, 2**32, size=8)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_large_seeds():
    top = rng.stream(2**64 - 1, "baseline-sampling").random()
    assert 0.0 <= top < 1.0
