import numpy as np
import pytest

from diffnet import format_checkpoint, init_mlp, load_checkpoint, parse_checkpoint, save_checkpoint
from errors import UsageError


def test_checkpoint_file_is_bit_exact(tmp_path):
    net = init_mlp((5, 7, 2), np.random.default_rng(3))
    extra = [-0.5, 1.0 / 3.0]
    path = tmp_path / "net.ckpt"
    save_checkpoint(path, net, extra)
    loaded, loaded_extra = load_checkpoint(path)
    assert loaded.layer_sizes == (5, 7, 2)
    np.testing.assert_array_equal(loaded.params, net.params)
    np.testing.assert_array_equal(loaded_extra, extra)


def test_first_line_holds_layer_sizes():
    net = init_mlp((2, 3, 1), np.random.default_rng(0))
    text = format_checkpoint(net)
    assert text.splitlines()[0] == "2 3 1"
    assert len(text.splitlines()) == 1 + net.params.size


def test_truncated_checkpoint_raises():
    with pytest.raises(UsageError):
        parse_checkpoint("2 3 1\n0.5\n")


def test_non_numeric_checkpoint_raises():
    with pytest.raises(UsageError):
        parse_checkpoint("2 1\nabc\n")


def test_empty_checkpoint_raises():
    with pytest.raises(UsageError):
        parse_checkpoint("\n")


def test_missing_file_raises(tmp_path):
    with pytest.raises(UsageError):
        load_checkpoint(tmp_path / "absent.ckpt")
