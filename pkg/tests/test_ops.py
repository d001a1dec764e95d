import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slhnet import ops
from slhnet.errors import DimensionError, SingularMatrix
from slhnet.sampling import haar_unitary, random_hermitian


def test_matmul_identity_and_involution(rng):
    X = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    assert np.array_equal(ops.matmul(np.eye(2), X), X)
    swap = np.array([[0, 1], [1, 0]])
    assert np.array_equal(ops.matmul(swap, swap), np.eye(2))


def test_matmul_dimension_mismatch():
    with pytest.raises(DimensionError):
        ops.matmul(np.eye(2), np.eye(3))


def test_as_op_rejects_bad_input():
    assert ops.as_op(3.0).shape == (1, 1)
    with pytest.raises(DimensionError):
        ops.as_op(np.zeros((2, 2, 2)))
    with pytest.raises(ValueError):
        ops.as_op([[np.nan]])


def test_dagger():
    assert np.array_equal(ops.dagger([[1j]]), [[-1j]])
    H = random_hermitian(3, 1)
    assert np.allclose(ops.dagger(H), H, atol=0)


def test_inv_checked():
    assert np.array_equal(ops.inv_checked(np.eye(3)), np.eye(3))
    assert np.allclose(ops.inv_checked([[2.0]]), [[0.5]])
    with pytest.raises(SingularMatrix) as info:
        ops.inv_checked(1 - np.array([[1.0]]))
    assert info.value.sigma_min == 0.0


def test_inv_checked_relative_threshold():
    a = np.diag([1.0, 1e-12])
    with pytest.raises(SingularMatrix) as info:
        ops.inv_checked(a, tol=1e-10)
    assert info.value.sigma_min == pytest.approx(1e-12)
    assert info.value.sigma_max == pytest.approx(1.0)
    assert np.allclose(ops.inv_checked(a, tol=1e-13) @ a, np.eye(2))


def test_inv_checked_empty():
    assert ops.inv_checked(np.zeros((0, 0))).shape == (0, 0)


def test_kron():
    assert np.array_equal(ops.kron(np.eye(2), np.eye(3)), np.eye(6))
    a = np.array([[1, 2], [3, 4j]])
    assert np.array_equal(ops.kron(a, np.eye(1)), a)


def test_annihilator():
    assert np.array_equal(ops.annihilator(2), [[0, 1], [0, 0]])
    a3 = ops.annihilator(3)
    assert a3[0, 1] == 1 and a3[1, 2] == pytest.approx(np.sqrt(2))
    assert np.count_nonzero(a3) == 2
    with pytest.raises(ValueError):
        ops.annihilator(1)


def test_annihilator_commutator_truncated():
    # [a, a^dag] = 1 except in the last level
    d = 5
    a = ops.annihilator(d)
    comm = a @ ops.creator(d) - ops.creator(d) @ a
    expected = np.eye(d)
    expected[-1, -1] = 1 - d
    assert np.allclose(comm, expected)


def test_unitary_and_hermitian_predicates(rng):
    assert ops.is_unitary(np.eye(4))
    assert ops.is_unitary(np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, 5))))
    assert not ops.is_unitary([[1, 1], [0, 1]])
    assert ops.is_hermitian(random_hermitian(3, rng))
    assert not ops.is_hermitian([[0, 1], [0, 0]])


def test_im_op():
    H = random_hermitian(3, 2)
    assert np.array_equal(ops.im_op(H), np.zeros((3, 3)))
    assert np.allclose(ops.im_op([[1j]]), [[1]])


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_re_im_decomposition(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    re, im = ops.re_op(a), ops.im_op(a)
    assert ops.is_hermitian(re, 0) and ops.is_hermitian(im, 0)
    assert np.allclose(re + 1j * im, a, atol=1e-14)


def test_embed_orders_factors():
    a = ops.annihilator(2)
    assert np.array_equal(ops.embed(a, [2, 3], 0), np.kron(a, np.eye(3)))
    assert np.array_equal(ops.embed(a, [3, 2], 1), np.kron(np.eye(3), a))
    with pytest.raises(DimensionError):
        ops.embed(a, [3, 3], 0)


def test_block_shape():
    shape = ops.BlockShape((2, 3, 1))
    assert shape.total == 6 and shape.offsets == (0, 2, 5, 6)
    assert list(shape.indices([2, 0])) == [5, 0, 1]
    m = np.arange(36).reshape(6, 6)
    assert np.array_equal(ops.block(m, shape, shape, 1, 2), m[2:5, 5:6])


def test_condition_number_of_unitary(rng):
    assert ops.condition_number(haar_unitary(4, rng)) == pytest.approx(1.0)
