import numpy as np
import pytest

from diffnet import Mlp, backward, forward, init_mlp, param_count
from errors import DimensionMismatchError


def test_param_count_sums_weights_and_biases():
    assert param_count((4, 8, 1)) == 4 * 8 + 8 + 8 * 1 + 1


def test_forward_accepts_vector_and_batch():
    net = init_mlp((3, 5, 2), np.random.default_rng(0))
    x = np.random.default_rng(1).standard_normal((4, 3))
    batch = forward(net, x)
    assert batch.shape == (4, 2)
    np.testing.assert_array_equal(forward(net, x[2]), batch[2])


def test_constant_net_outputs_its_bias(make_constant_net):
    net = make_constant_net((6, 4, 1), 0.1)
    out = forward(net, np.random.default_rng(0).standard_normal((5, 6)))
    np.testing.assert_array_equal(out, np.full((5, 1), 0.1))


def test_init_sets_output_bias_only():
    net = init_mlp((3, 4, 1), np.random.default_rng(0), output_bias=0.25)
    (_, hidden_bias), (_, out_bias) = net.layers()
    np.testing.assert_array_equal(hidden_bias, np.zeros(4))
    np.testing.assert_array_equal(out_bias, [0.25])


def test_wrong_input_width_raises():
    net = init_mlp((3, 2), np.random.default_rng(0))
    with pytest.raises(DimensionMismatchError):
        forward(net, np.zeros(4))


def test_wrong_param_count_raises():
    with pytest.raises(DimensionMismatchError):
        Mlp((3, 2), np.zeros(5))


def test_params_are_read_only():
    net = init_mlp((2, 2), np.random.default_rng(0))
    with pytest.raises(ValueError):
        net.params[0] = 1.0


@pytest.mark.parametrize("seed", range(10))
def test_backward_matches_finite_differences(seed, fd, close_gradients):
    rng = np.random.default_rng(seed)
    net = init_mlp((4, 8, 1), rng)
    x = rng.standard_normal((6, 4))
    upstream = rng.standard_normal((6, 1))

    def loss_of_params(params):
        return float(np.sum(upstream * forward(net.with_params(params), x)))

    def loss_of_inputs(flat):
        return float(np.sum(upstream * forward(net, flat.reshape(x.shape))))

    grad, cotangent = backward(net, x, upstream)
    close_gradients(grad, fd(loss_of_params, net.params))
    close_gradients(cotangent.ravel(), fd(loss_of_inputs, x.ravel()))


def test_backward_on_single_vector_returns_vector_cotangent():
    net = init_mlp((3, 4, 2), np.random.default_rng(0))
    grad, cotangent = backward(net, np.ones(3), np.ones(2))
    assert grad.shape == net.params.shape
    assert cotangent.shape == (3,)
