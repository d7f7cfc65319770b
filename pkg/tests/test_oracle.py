import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from occlude import RaySamples, equivalence_check, nerf_quadrature, piecewise_constant_integral
from occlude.exceptions import DimensionMismatchError, RangeError
from occlude.oracle import accumulated_alpha


def test_single_sample():
    out = nerf_quadrature(RaySamples([math.log(2)], [1.0], [[1.0, 1.0, 1.0]]))
    np.testing.assert_allclose(out, [0.5, 0.5, 0.5], atol=1e-15)


def test_zero_density_sample_contributes_nothing():
    base = RaySamples([0.7, 1.3], [1.0, 0.5], [[1.0], [2.0]])
    with_zero = RaySamples([0.7, 0.0, 1.3], [1.0, 2.0, 0.5], [[1.0], [99.0], [2.0]])
    assert nerf_quadrature(base)[0] == nerf_quadrature(with_zero)[0]


def test_two_samples_two_channels():
    ln2 = math.log(2)
    out = nerf_quadrature(RaySamples([ln2, ln2], [1.0, 1.0], [[1.0, 0.0], [0.0, 1.0]]))
    np.testing.assert_allclose(out, [0.5, 0.25], atol=1e-15)


def test_closed_form_single_segment():
    assert piecewise_constant_integral(RaySamples([math.log(2)], [1.0], [1.0]))[0] == pytest.approx(0.5, abs=1e-15)


def test_splitting_segment_is_invariant():
    whole = piecewise_constant_integral(RaySamples([0.9], [2.0], [[0.3, -1.0]]))
    for k in (2, 3, 7):
        split = piecewise_constant_integral(RaySamples([0.9] * k, [2.0 / k] * k, [[0.3, -1.0]] * k))
        np.testing.assert_allclose(split, whole, atol=1e-15)


def test_zero_density_medium():
    assert piecewise_constant_integral(RaySamples([0.0, 0.0], [1.0, 3.0], [5.0, 6.0]))[0] == 0.0


def test_bad_samples():
    with pytest.raises(DimensionMismatchError):
        RaySamples([1.0], [1.0, 1.0], [1.0])
    with pytest.raises(RangeError):
        RaySamples([-1.0], [1.0], [1.0])
    with pytest.raises(RangeError):
        RaySamples([1.0], [0.0], [1.0])


def numeric_integral(samples):
    """Adaptive quadrature of the continuous integrand, one interval at a time."""
    total = np.zeros(samples.colors.shape[1])
    depth = 0.0
    for sigma, delta, color in zip(samples.sigmas, samples.deltas, samples.colors):
        val, _ = quad(lambda s: math.exp(-(depth + sigma * s)) * sigma, 0.0, delta, epsabs=1e-14, epsrel=1e-13)
        total += val * color
        depth += sigma * delta
    return total


def test_closed_form_agrees_with_adaptive_quadrature(rng):
    for _ in range(30):
        n = int(rng.integers(1, 6))
        samples = RaySamples(rng.uniform(0, 3, n), rng.uniform(0.1, 2, n), rng.uniform(-1, 1, (n, 2)))
        np.testing.assert_allclose(piecewise_constant_integral(samples), numeric_integral(samples), atol=1e-11)


ray = st.integers(1, 10).flatmap(
    lambda n: st.tuples(
        st.lists(st.floats(0, 10), min_size=n, max_size=n),
        st.lists(st.floats(1e-3, 5), min_size=n, max_size=n),
        st.lists(st.floats(-1, 1), min_size=n, max_size=n),
    )
)


@given(ray)
@settings(max_examples=300, deadline=None)
def test_quadrature_exact_and_alpha_bounded(r):
    samples = RaySamples(*r)
    assert abs(nerf_quadrature(samples)[0] - piecewise_constant_integral(samples)[0]) <= 1e-14
    assert accumulated_alpha(samples) <= 1.0 + 1e-15


def test_equivalence_examples(rng):
    latents = rng.uniform(-1, 1, (3, 4, 4, 3))
    assert equivalence_check(latents, rng.uniform(0, 3, 3)).max_abs_deviation <= 1e-12
    single = rng.uniform(-1, 1, (1, 2, 3, 2))
    assert equivalence_check(single, [0.4]).max_abs_deviation == 0.0
    assert equivalence_check(latents, [0.0, 1.0, 0.0]).ok


def test_equivalence_requires_full_masks(rng):
    with pytest.raises(ValueError):
        equivalence_check(np.zeros((1, 2, 2, 1)), [1.0], masks=np.zeros((1, 2, 2)))
