import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from doublewell import DoubleWellSolver


@pytest.fixture(scope="module")
def fitted():
    return DoubleWellSolver(n_cells=4000).fit(6.0)


def test_fit_attributes(fitted):
    m = fitted
    assert m.g_ == 6.0
    assert m.E_ev_ < m.E_plus_ < m.E_od_
    assert m.splitting_ == pytest.approx(m.E_od_ - m.E_ev_)
    assert 0 < m.gamma_ < 1
    assert len(m.n_iter_) == 3


def test_predict_parity_and_norm(fitted):
    x = np.linspace(-3, 3, 601)
    out = fitted.predict(x)
    assert out.shape == (601, 2)
    assert np.allclose(out[:, 0], out[::-1, 0])
    assert np.allclose(out[:, 1], -out[::-1, 1])
    grid = np.linspace(-fitted.even_.grid.x_max, fitted.even_.grid.x_max, 20001)
    psi = fitted.predict(grid)
    dx = grid[1] - grid[0]
    assert np.sum(psi[:, 0] ** 2) * dx == pytest.approx(1.0, rel=1e-3)
    assert np.sum(psi[:, 1] ** 2) * dx == pytest.approx(1.0, rel=1e-3)
    assert abs(np.sum(psi[:, 0] * psi[:, 1]) * dx) < 1e-12


def test_predict_column_input(fitted):
    assert fitted.predict([[0.5], [1.0]]).shape == (2, 2)


def test_predict_out_of_range(fitted):
    with pytest.raises(ValueError):
        fitted.predict([100.0])


def test_not_fitted():
    with pytest.raises(NotFittedError):
        DoubleWellSolver().predict([0.0])


def test_params_roundtrip():
    m = DoubleWellSolver(n_cells=2000, tol_fn=1e-9)
    assert m.get_params()["n_cells"] == 2000
    c = clone(m)
    assert c.get_params() == m.get_params()
    assert not hasattr(c, "E_ev_")
    c.set_params(max_iter=50)
    assert c.max_iter == 50
