"""The ten acceptance criteria at full trial counts and stated tolerances.

Each test prints one PASS/FAIL line; the lines are repeated in the terminal
summary (see conftest.py) so they survive output capture.
"""
import pytest

from hermpair import acceptance as acc

RESULTS = []


def record(result):
    RESULTS.append(result.line())
    print(result.line())
    return result


@pytest.fixture(scope="module")
def round_trip():
    return acc.criterion_round_trip(trials=500)


@pytest.fixture(scope="module")
def orbit():
    return acc.criterion_orbit_invariance(configs=100, conjugates=10)


def test_01_round_trip(round_trip):
    r = record(round_trip[0])
    assert r.metrics["elapsed"] < 60
    assert r.passed, r.detail


def test_02_orbit_invariance(orbit):
    r = record(orbit[0])
    assert r.passed, r.detail


def test_03_signature(round_trip, orbit):
    r = record(acc.criterion_signature([round_trip[1:], orbit[1:]]))
    assert r.passed, r.detail


def test_04_catalan():
    r = record(acc.criterion_catalan())
    assert r.passed, r.detail


def test_05_explicit_converter():
    r = record(acc.criterion_explicit_converter())
    assert r.passed, r.detail


def test_06_atlas():
    r = record(acc.criterion_atlas(k_max=8))
    assert r.passed, r.detail


def test_07_hong_horn():
    r = record(acc.criterion_hong_horn(trials=200, n_max=6))
    assert r.passed, r.detail


def test_08_glr():
    r = record(acc.criterion_glr(trials=100))
    assert r.passed, r.detail


def test_09_hankel_determinant():
    r = record(acc.criterion_hankel_det(k_max=8))
    assert r.passed, r.detail


def test_10_scalar_oracle():
    r = record(acc.criterion_scalar_oracle(trials=1000))
    assert r.passed, r.detail
