import numpy as np
import pytest

from rcarstable import kernels
from rcarstable.innovations import FAMILY_CODES, InnovationSpec
from rcarstable.streams import Stream

BACKENDS = kernels.backends()
needs_both = pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled backend not built")

SPECS = [InnovationSpec("rademacher"), InnovationSpec("gaussian_std"),
         InnovationSpec("uniform_sym", 0.7), InnovationSpec("exponential_pos", 1.5),
         InnovationSpec("point_mass", -0.25)]


def test_backend_choice_is_reported():
    assert kernels.BACKEND in BACKENDS
    assert set(FAMILY_CODES.values()) == set(range(5))


@needs_both
@pytest.mark.parametrize("n", [1, 63, 64, 65, 1000])
def test_increments_identical(n):
    a = BACKENDS["cython"].draw_increments(Stream(3).arrivals, n)
    b = BACKENDS["python"].draw_increments(Stream(3).arrivals, n)
    np.testing.assert_array_equal(a, b)


@needs_both
@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.family)
@pytest.mark.parametrize("n", [1, 64, 129, 5000])
def test_innovations_identical(spec, n):
    a = BACKENDS["cython"].draw_innovations(Stream(5).innovations, spec.code, spec.param, n)
    b = BACKENDS["python"].draw_innovations(Stream(5).innovations, spec.code, spec.param, n)
    np.testing.assert_array_equal(a, b)


@needs_both
@pytest.mark.parametrize("a", [0.75, 1.0, 2.0, 2.5])
def test_recursion_identical(a):
    s = Stream(9)
    inc = BACKENDS["python"].draw_increments(s.arrivals, 2000)
    eps = BACKENDS["python"].draw_innovations(s.innovations, 1, 0.0, 2000)
    G1, X1 = BACKENDS["cython"].rcar_recursion(inc, eps, a)
    G2, X2 = BACKENDS["python"].rcar_recursion(inc, eps, a)
    np.testing.assert_allclose(G1, G2, rtol=1e-15)
    np.testing.assert_allclose(X1, X2, rtol=1e-13, atol=1e-13 * np.abs(X2).max())


@needs_both
@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.family)
@pytest.mark.parametrize("a", [0.8, 1.0, 2.0])
def test_terminal_and_lepage_agree(spec, a):
    for seed in range(5):
        t = [m.rcar_terminal(Stream(seed).arrivals, Stream(seed).innovations,
                             spec.code, spec.param, a, 3000) for m in BACKENDS.values()]
        z = [m.lepage_sum(Stream(seed).arrivals, Stream(seed).innovations,
                          spec.code, spec.param, a, 3000) for m in BACKENDS.values()]
        assert t[0] == pytest.approx(t[1], rel=1e-12, abs=1e-300)
        assert z[0] == pytest.approx(z[1], rel=1e-12, abs=1e-12)


def test_rademacher_bits_are_balanced():
    e = kernels.draw_innovations(Stream(1).innovations, 0, 0.0, 10**5)
    assert set(np.unique(e)) == {-1.0, 1.0}
    assert abs(e.mean()) < 4 / np.sqrt(1e5)


def test_lepage_sum_of_zero_innovations_is_zero():
    s = Stream(2)
    assert kernels.lepage_sum(s.arrivals, s.innovations, 4, 0.0, 2.0, 500) == 0.0
