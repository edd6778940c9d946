from fractions import Fraction

import numpy as np
import pytest

from cusplab import fd
from cusplab.errors import ResolutionError


def test_central_weights_exact():
    w = fd.stencil_weights((-2, -1, 0, 1, 2), 2)
    exact = [Fraction(-1, 12), Fraction(4, 3), Fraction(-5, 2), Fraction(4, 3), Fraction(-1, 12)]
    assert list(w) == [float(c) for c in exact]


def test_first_derivative_weights_sum_zero():
    w = fd.stencil_weights((0, 1, 2, 3, 4, 5), 1)
    assert abs(sum(w)) < 1e-14
    # exactness on x^5 / 5! scaled: derivative of x at 0 is 1
    assert sum(c * o for c, o in zip(w, range(6))) == pytest.approx(1, abs=1e-14)


@pytest.mark.parametrize("deriv", [1, 2])
def test_fourth_order_convergence(deriv):
    errs = []
    for n in (81, 161):
        x = np.linspace(0.3, 2.0, n)
        h = x[1] - x[0]
        f = np.sin(3 * x) * np.exp(x)
        exact = (np.exp(x) * (np.sin(3 * x) + 3 * np.cos(3 * x)) if deriv == 1
                 else np.exp(x) * (-8 * np.sin(3 * x) + 6 * np.cos(3 * x)))
        errs.append(np.max(np.abs(fd.derivative(f, h, deriv) - exact)))
    assert errs[0] / errs[1] > 12  # 16 for 4th order; closures dominate the max


def test_polynomials_exact():
    x = np.linspace(-1, 1, 21)
    h = x[1] - x[0]
    f = x ** 4 - 2 * x ** 3
    assert np.allclose(fd.derivative(f, h, 2), 12 * x ** 2 - 12 * x, atol=1e-10)


def test_grid_checks():
    with pytest.raises(ResolutionError):
        fd.check_grid(np.linspace(0, 1, 5))
    with pytest.raises(ResolutionError):
        fd.check_grid(np.array([0, 1, 2, 4, 5, 6, 7.0]))
    assert fd.check_grid(np.linspace(0, 1, 11)) == pytest.approx(0.1)
