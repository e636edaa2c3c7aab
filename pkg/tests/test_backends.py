import numpy as np
import pytest

from clustersync import _backend, _pykernels, gallery, simulate, specfile

needs_compiled = pytest.mark.skipif(not _backend.HAVE_COMPILED, reason="compiled kernels not built")


def test_resolve():
    assert _backend.resolve(None) == _backend.DEFAULT_BACKEND
    assert _backend.resolve("auto") == _backend.DEFAULT_BACKEND
    assert _backend.resolve("python") == "python"
    with pytest.raises(ValueError):
        _backend.resolve("fortran")
    assert _backend.get_kernels("python") is _pykernels


@needs_compiled
@pytest.mark.parametrize("name", ["three-clusters", "complete-star-20", "asymmetric", "k4"])
def test_integrators_agree(name):
    net = specfile.build_network(gallery.spec(name))
    x0 = simulate.random_state(net, (-2, 2), 0)
    a = simulate.integrate(net, None, x0, 20.0, backend="compiled")
    b = simulate.integrate(net, None, x0, 20.0, backend="python")
    assert np.array_equal(a.times, b.times)
    assert np.allclose(a.states, b.states, rtol=0, atol=1e-12)


@needs_compiled
@pytest.mark.parametrize("save_every,n_steps", [(1, 1), (1, 7), (3, 10), (10, 100), (7, 5)])
def test_kernel_save_schedule(save_every, n_steps):
    args = (np.array([0, 1, 2]), np.array([1, 0]), np.ones(2), np.full(2, 0.1), np.full(2, 0.1),
            np.full(2, 0.08), np.full(2, 0.9), 0.3, 0.0, np.array([1.0, -1.0]), np.zeros(2), 0.01,
            n_steps, save_every)
    sa, xa, fa = _backend.get_kernels("compiled").fn_rk4(*args)
    sb, xb, fb = _pykernels.fn_rk4(*args)
    assert list(sa) == list(sb) and sa[-1] == n_steps and fa == fb == -1
    assert np.allclose(xa, xb, atol=1e-14)


@needs_compiled
def test_kernel_rejects_inconsistent_sizes():
    with pytest.raises(ValueError, match="sizes"):
        _backend.get_kernels("compiled").fn_rk4(
            np.array([0, 1]), np.array([0]), np.ones(1), np.ones(2), np.ones(2), np.ones(2), np.ones(2),
            1.0, 0.0, np.zeros(2), np.zeros(2), 0.01, 1, 1)


@needs_compiled
def test_kernel_reports_blow_up_step():
    kern = _backend.get_kernels("compiled")
    args = (np.array([0, 0]), np.zeros(0, np.int64), np.zeros(0), np.zeros(1), np.ones(1), np.full(1, 0.1),
            np.zeros(1), 0.0, 0.0, np.array([-60.0]), np.zeros(1), 1.0, 20, 1)
    s1, x1, f1 = kern.fn_rk4(*args)
    s2, x2, f2 = _pykernels.fn_rk4(*args)
    assert f1 == f2 > 0 and list(s1) == list(s2)
