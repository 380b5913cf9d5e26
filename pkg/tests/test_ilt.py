import math

import numpy as np
import pytest

from kvwave import ilt, specfun
from kvwave.ilt import IltConfig, IltRefusal, LaplaceImage

M64 = IltConfig(node_count=64)
T_GRID = np.linspace(0.1, 10.0, 34)

# Five transform pairs with closed-form originals.
PAIRS = {
    "1/s": (lambda s: 1 / s, lambda t: 1.0),
    "1/s^2": (lambda s: 1 / s ** 2, lambda t: t),
    "1/(s+1)": (lambda s: 1 / (s + 1), lambda t: math.exp(-t)),
    "1/(s^2+1)": (lambda s: 1 / (s * s + 1), math.sin),
    "exp(-sqrt s)/s": (lambda s: np.exp(-np.sqrt(s)) / s,
                       lambda t: float(specfun.erfc(1 / (2 * math.sqrt(t))))),
}


def max_error(name, cfg, ts=T_GRID):
    image, exact = PAIRS[name]
    return max(abs(ilt.invert(LaplaceImage(image), t, cfg).value - exact(t)) for t in ts)


def test_config_validation():
    with pytest.raises(ValueError):
        IltConfig(node_count=7)
    with pytest.raises(ValueError):
        IltConfig(contour_scale=0.0)
    with pytest.raises(ValueError):
        IltConfig(t_min_guard=0.0)


def test_heaviside_pair():
    res = ilt.invert(LaplaceImage(lambda s: 1 / s), 1.0)
    assert res.converged
    assert res.value == pytest.approx(1.0, abs=1e-12)


def test_exponential_pair():
    res = ilt.invert(LaplaceImage(lambda s: 1 / (s + 1)), 2.0)
    assert res.value == pytest.approx(math.exp(-2.0), abs=1e-12)


def test_erfc_pair():
    res = ilt.invert(LaplaceImage(lambda s: np.exp(-np.sqrt(s)) / s), 1.0)
    assert res.value == pytest.approx(float(specfun.erfc(0.5)), abs=1e-12)


@pytest.mark.parametrize("name", sorted(PAIRS))
def test_known_pair_suite(name):
    assert max_error(name, M64) <= 1e-8


# Once truncation error is gone, contour rounding (about eps * exp(c M))
# takes over and grows slowly with M; monotonicity is checked above it.
ROUNDING_FLOOR = 1e-10


@pytest.mark.parametrize("name", sorted(PAIRS))
def test_refinement_monotone(name):
    errs = [max_error(name, IltConfig(node_count=m)) for m in (16, 32, 64)]
    for coarse, fine in zip(errs, errs[1:]):
        assert fine <= max(10 * coarse, ROUNDING_FLOOR)


@pytest.mark.parametrize("name", sorted(PAIRS))
def test_imaginary_residue(name):
    image, _ = PAIRS[name]
    for t in (0.5, 2.0, 7.0):
        z = ilt.contour_sum(LaplaceImage(image), t, 32)
        assert abs(z.imag) <= 1e-10 * abs(z.real)


def test_odd_node_count_has_finite_center_node():
    res = ilt.invert(LaplaceImage(lambda s: 1 / (s + 1)), 1.0, IltConfig(node_count=33))
    assert res.value == pytest.approx(math.exp(-1.0), abs=1e-11)


def test_error_estimate_flags_underresolved_inversion():
    res = ilt.invert(LaplaceImage(PAIRS["1/(s^2+1)"][0]), 10.0, IltConfig(node_count=16))
    assert not res.converged
    assert res.error_estimate > 1e-8


def test_function_evals_counts_both_sums():
    res = ilt.invert(LaplaceImage(lambda s: 1 / s), 1.0, IltConfig(node_count=20))
    assert res.function_evals == 20 + 28


def test_singularity_shift_to_the_right():
    # exp(t) has its pole at s = 1; the contour must be moved past it.
    res = ilt.invert(LaplaceImage(lambda s: 1 / (s - 1), singularity_abscissa=1.0), 1.5, M64)
    assert res.value == pytest.approx(math.exp(1.5), rel=1e-10)


def test_guard_refusal():
    with pytest.raises(IltRefusal):
        ilt.invert(LaplaceImage(lambda s: 1 / s), 1e-4)


def test_step_image_xi_zero_is_heaviside():
    img = ilt.step_image(0.0)
    for t in (0.01, 1.0, 50.0):
        assert ilt.invert(img, t).value == pytest.approx(1.0, abs=1e-12)


def test_step_image_value_at_one():
    v = ilt.step_image(0.5).evaluate(np.array([1.0 + 0j]))[0]
    assert v.real == pytest.approx(0.7021885013265595962381875, rel=1e-15)
    assert v.imag == 0.0


@pytest.mark.parametrize("factory", [ilt.step_image, ilt.delta_image, ilt.kernel_f_image])
def test_conjugate_symmetry(factory):
    rng = np.random.default_rng(7)
    s = rng.uniform(1e-3, 20, 100) + 1j * rng.uniform(-50, 50, 100)
    img = factory(0.5)
    np.testing.assert_allclose(img.evaluate(np.conj(s)), np.conj(img.evaluate(s)),
                               rtol=1e-14, atol=0)


def test_delta_image_at_zero_is_refused():
    img = ilt.delta_image(0.0)
    assert img.impulsive
    np.testing.assert_array_equal(img.evaluate(np.array([1 + 1j, 5.0])), 1.0)
    with pytest.raises(IltRefusal):
        ilt.invert(img, 1.0)


def test_negative_xi_rejected():
    for factory in (ilt.step_image, ilt.delta_image, ilt.kernel_f_image):
        with pytest.raises(ValueError):
            factory(-0.1)


def test_default_config_on_response_images():
    # The default node count resolves the response images well below the
    # agreement tolerance across the plotted ranges.
    for xi in (0.01, 0.5, 2.0, 4.0):
        for t in (0.05, 0.5, 5.0):
            for img in (ilt.step_image(xi), ilt.delta_image(xi)):
                assert ilt.invert(img, t).converged
