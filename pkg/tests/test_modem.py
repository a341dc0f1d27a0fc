import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ocdetect.errors import DegenerateError, ShapeError
from ocdetect.modem import (
    Scheme,
    build_constellation,
    hard_bits,
    llr_maxlog,
    map_bits,
    project_box,
    slice_hard,
    slice_index,
)

from oracles import brute_llr, nearest_point

ALL = [s.value for s in Scheme]
finite = st.floats(-50, 50, allow_nan=False)


@pytest.mark.parametrize("scheme", ALL)
def test_constellation_invariants(scheme):
    c = build_constellation(scheme)
    assert abs(np.mean(np.abs(c.points) ** 2) - 1) < 1e-12
    assert c.size == 2**c.Q
    assert len({tuple(l) for l in c.labels}) == c.size
    assert c.box_radius == c.points.real.max()


@pytest.mark.parametrize("scheme", ["qpsk", "qam16", "qam64"])
def test_gray_neighbours_differ_in_one_bit(scheme):
    c = build_constellation(scheme)
    levels = np.unique(np.round(c.points.real, 12))
    step = levels[1] - levels[0]
    for i, p in enumerate(c.points):
        for j, q in enumerate(c.points):
            d = q - p
            adjacent = (abs(abs(d.real) - step) < 1e-9 and abs(d.imag) < 1e-9) or (
                abs(abs(d.imag) - step) < 1e-9 and abs(d.real) < 1e-9
            )
            if adjacent:
                assert np.sum(c.labels[i] != c.labels[j]) == 1


def test_qpsk_points():
    c = build_constellation("qpsk")
    expected = {complex(a, b) / np.sqrt(2) for a in (1, -1) for b in (1, -1)}
    assert {complex(np.round(p, 15)) for p in c.points} == {
        complex(np.round(p, 15)) for p in expected
    }
    assert c.Q == 2


def test_qam64_levels():
    c = build_constellation("qam64")
    assert c.Q == 6
    np.testing.assert_allclose(
        np.unique(np.round(c.points.real * np.sqrt(42), 9)), [-7, -5, -3, -1, 1, 3, 5, 7]
    )
    np.testing.assert_allclose(
        np.unique(np.round(c.points.imag * np.sqrt(42), 9)), [-7, -5, -3, -1, 1, 3, 5, 7]
    )


def test_bpsk():
    c = build_constellation("bpsk")
    assert c.Q == 1 and c.box_radius == 1.0
    np.testing.assert_array_equal(map_bits([0, 1], c), [-1, 1])


def test_real_axis_bits_come_first():
    c = build_constellation("qam16")
    # points sharing the first two label bits share the real part
    for k in range(c.size):
        same = [j for j in range(c.size) if (j >> 2) == (k >> 2)]
        assert np.allclose(c.points[same].real, c.points[k].real)


def test_map_bits_all_zero_qpsk(qpsk):
    z = map_bits(np.zeros(8, dtype=int), qpsk)
    assert np.all(z == qpsk.points[0])
    assert z.size == 4


def test_map_bits_shape_error(qam16):
    with pytest.raises(ShapeError):
        map_bits([0, 1, 1], qam16)


@pytest.mark.parametrize("scheme", ALL)
def test_round_trip_through_llr_signs(scheme):
    c = build_constellation(scheme)
    rng = np.random.default_rng(5)
    bits = rng.integers(0, 2, 20 * c.Q)
    s = map_bits(bits, c)
    llr = llr_maxlog(s, 1.0, 1.0, c)
    np.testing.assert_array_equal(hard_bits(llr), bits)


def test_slice_examples(bpsk, qpsk, qam64):
    assert slice_hard(0.2 + 5j, bpsk) == 1
    assert np.isclose(slice_hard(10 + 10j, qpsk), (1 + 1j) / np.sqrt(2))
    for p in qam64.points:
        assert slice_hard(p, qam64) == p


def test_slice_tie_goes_to_lowest_index(qpsk):
    # origin is equidistant from all four points
    assert slice_index(0j, qpsk) == 0


@settings(max_examples=200, deadline=None)
@given(finite, finite, st.sampled_from(ALL))
def test_slice_matches_exhaustive_search(re, im, scheme):
    c = build_constellation(scheme)
    assert slice_index(complex(re, im), c) == nearest_point(complex(re, im), c.points)


def test_project_examples(qpsk, bpsk):
    unit = dataclasses.replace(qpsk, box_radius=1.0)
    assert project_box(0.5 + 0.3j, unit) == 0.5 + 0.3j
    assert project_box(2 - 3j, unit) == 1 - 1j
    assert project_box(0.5 + 2j, bpsk) == 0.5


@settings(max_examples=200, deadline=None)
@given(finite, finite, finite, finite, st.sampled_from(ALL))
def test_projection_properties(a, b, c_, d, scheme):
    c = build_constellation(scheme)
    w1, w2 = complex(a, b), complex(c_, d)
    p1, p2 = project_box(w1, c), project_box(w2, c)
    assert project_box(p1, c) == p1
    assert abs(p1 - p2) <= abs(w1 - w2) + 1e-12
    assert abs(p1.real) <= c.box_radius and abs(p1.imag) <= c.box_radius
    if c.is_real:
        assert p1.imag == 0


def test_llr_zero_at_origin(qpsk):
    np.testing.assert_array_equal(llr_maxlog(0j, 1.0, 1.0, qpsk), np.zeros((1, 2)))


def test_llr_at_constellation_point(qpsk):
    # QPSK unit power: opposite-bit neighbour is sqrt(2) away -> squared distance 2
    for k, p in enumerate(qpsk.points):
        llr = llr_maxlog(p, 1.0, 1.0, qpsk)[0]
        expected = brute_llr(p, 1.0, 1.0, qpsk.points, qpsk.labels)
        np.testing.assert_allclose(llr, expected, atol=1e-12)
        np.testing.assert_allclose(np.abs(llr), 2.0, atol=1e-12)
        np.testing.assert_array_equal(llr > 0, qpsk.labels[k] == 1)


def test_llr_linear_in_rho(qam16):
    z = np.array([0.3 - 0.7j, 1.1 + 0.2j])
    base = llr_maxlog(z, 0.9, 1.0, qam16)
    np.testing.assert_allclose(llr_maxlog(z, 0.9, 3.5, qam16), 3.5 * base, rtol=1e-15)


@pytest.mark.parametrize("scheme", ALL)
def test_llr_matches_brute_force(scheme):
    c = build_constellation(scheme)
    rng = np.random.default_rng(11)
    z = rng.normal(size=10) + 1j * rng.normal(size=10)
    mu = rng.uniform(0.5, 1.0, 10)
    rho = rng.uniform(0.1, 50, 10)
    got = llr_maxlog(z, mu, rho, c)
    for i in range(10):
        np.testing.assert_allclose(
            got[i], brute_llr(z[i], mu[i], rho[i], c.points, c.labels), rtol=1e-12, atol=1e-12
        )


@pytest.mark.parametrize("scheme", ALL)
def test_llr_signs_agree_with_slicing(scheme):
    c = build_constellation(scheme)
    rng = np.random.default_rng(3)
    z = 1.2 * (rng.normal(size=500) + 1j * rng.normal(size=500))
    mu = 0.8
    llr = llr_maxlog(z, mu, 2.0, c)
    keep = np.all(np.abs(llr) > 1e-9, axis=1)
    bits = hard_bits(llr[keep]).reshape(-1, c.Q)
    np.testing.assert_array_equal(bits, c.labels[slice_index(z[keep] / mu, c)])


def test_llr_rejects_zero_gain(qpsk):
    with pytest.raises(DegenerateError):
        llr_maxlog(1 + 1j, 0.0, 1.0, qpsk)
