import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clocknet.qlinalg import (DensityOperator, DimensionError, HilbertFactorization, KrausChannel,
                              LabelError, Operator, apply_channel, apply_unitary, embed_levels,
                              fidelity_pure, overlap_decompose, partial_trace, project, reorder, tensor)

X = np.array([[0, 1], [1, 0]], dtype=complex)


def space(*factors):
    return HilbertFactorization.of(*factors)


def random_state(rng, dims, labels=None, rank=None):
    labels = labels or [f"f{i}" for i in range(len(dims))]
    sp = space(*zip(labels, dims))
    n = sp.dim
    A = rng.normal(size=(n, rank or n)) + 1j * rng.normal(size=(n, rank or n))
    rho = A @ A.conj().T
    return DensityOperator(sp, rho / np.trace(rho).real)


def random_unitary(rng, n):
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return q * (np.diag(r) / abs(np.diag(r)))


seeds = st.integers(0, 2**32 - 1)


# -- spaces -----------------------------------------------------------------


def test_factorization_basics():
    sp = space(("a", 2), ("b", 3))
    assert sp.dim == 6
    assert sp.labels == ("a", "b")
    assert sp.dim_of("b") == 3
    assert space().dim == 1
    with pytest.raises(LabelError):
        space(("a", 2), ("a", 3))
    with pytest.raises(LabelError):
        sp.index("zz")
    with pytest.raises(DimensionError):
        space(("a", 0))


def test_operator_shape_checked():
    with pytest.raises(DimensionError):
        Operator(space(("a", 2)), np.eye(3))


def test_density_invariants():
    sp = space(("a", 2))
    with pytest.raises(ValueError):
        DensityOperator(sp, np.array([[0.5, 0.1], [0.0, 0.5]]))
    with pytest.raises(ValueError):
        DensityOperator(sp, np.eye(2))
    DensityOperator(sp, np.eye(2) * 0.3, normalized=False)
    with pytest.raises(ValueError):
        DensityOperator(sp, np.eye(2), normalized=False)
    with pytest.raises(ValueError):
        DensityOperator(sp, np.diag([1.5, -0.5])).validate()


def test_kraus_completeness_enforced():
    sp = space(("a", 2))
    with pytest.raises(ValueError):
        KrausChannel((Operator(sp, 0.5 * np.eye(2)),))
    KrausChannel((Operator(sp, 0.5 * np.eye(2)),), trace_preserving=False)


# -- tensor -----------------------------------------------------------------


def test_tensor_identities():
    i2 = Operator.identity(space(("a", 2)))
    i3 = Operator.identity(space(("b", 3)))
    assert np.allclose(tensor(i2, i3).matrix, np.eye(6))
    r = tensor(DensityOperator(space(("a", 2)), np.diag([1.0, 0.0])),
               DensityOperator(space(("b", 2)), np.diag([0.5, 0.5])))
    assert np.allclose(r.matrix, np.diag([0.5, 0.5, 0, 0]))


def test_tensor_rank_one_against_brute_force():
    zero = np.array([1.0, 0.0])
    plus = np.array([1.0, 1.0]) / math.sqrt(2)
    r = tensor(DensityOperator.pure(space(("a", 2)), zero), DensityOperator.pure(space(("b", 2)), plus))
    expected = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    expected[2 * i + k, 2 * j + l] = zero[i] * zero[j] * plus[k] * plus[l]
    assert np.allclose(r.matrix, expected, atol=1e-15)
    assert np.allclose(r.matrix @ r.matrix, r.matrix)


def test_tensor_label_collision():
    a = DensityOperator.maximally_mixed(space(("a", 2)))
    with pytest.raises(LabelError):
        tensor(a, a)


# -- partial trace ----------------------------------------------------------


def test_partial_trace_bell():
    bell = DensityOperator.pure(space(("a", 2), ("b", 2)), [0, 1, 1, 0])
    for lab in ("a", "b"):
        assert np.allclose(partial_trace(bell, [lab]).matrix, np.eye(2) / 2)


@given(seeds)
@settings(max_examples=25, deadline=None)
def test_partial_trace_matches_index_loop(seed):
    rng = np.random.default_rng(seed)
    rho = random_state(rng, (2, 3), ["A", "B"])
    t = rho.matrix.reshape(2, 3, 2, 3)
    for keep, drop in (("A", "B"), ("B", "A")):
        red = partial_trace(rho, [drop])
        assert red.space.labels == (keep,)
        if keep == "A":
            ref = np.array([[sum(t[i, k, j, k] for k in range(3)) for j in range(2)] for i in range(2)])
        else:
            ref = np.array([[sum(t[k, i, k, j] for k in range(2)) for j in range(3)] for i in range(3)])
        assert np.allclose(red.matrix, ref, atol=1e-14)


@given(seeds)
@settings(max_examples=25, deadline=None)
def test_partial_trace_of_product(seed):
    rng = np.random.default_rng(seed)
    a = random_state(rng, (3,), ["A"])
    b = random_state(rng, (2, 2), ["B", "C"])
    assert np.max(np.abs(partial_trace(tensor(a, b), ["B", "C"]).matrix - a.matrix)) <= 1e-12
    # middle factor of three
    c = random_state(rng, (2,), ["D"])
    abc = tensor(tensor(a, c), b)
    red = partial_trace(abc, ["D"])
    assert red.space.labels == ("A", "B", "C")
    assert np.allclose(red.matrix, tensor(a, b).matrix, atol=1e-12)


def test_partial_trace_unknown_label():
    with pytest.raises(LabelError):
        partial_trace(DensityOperator.maximally_mixed(space(("a", 2))), ["b"])


# -- unitaries, channels, projections --------------------------------------


def test_apply_unitary_examples():
    sp = space(("a", 2))
    r0 = DensityOperator.basis(sp, 0)
    assert np.allclose(apply_unitary(r0, Operator.identity(sp)).matrix, r0.matrix)
    assert np.allclose(apply_unitary(r0, Operator(sp, X)).matrix, np.diag([0, 1]))
    sp2 = space(("a", 2), ("b", 2))
    r00 = DensityOperator.basis(sp2, 0, 0)
    out = apply_unitary(r00, Operator(space(("b", 2)), X), ["b"])
    IX = np.kron(np.eye(2), X)
    assert np.allclose(out.matrix, IX @ r00.matrix @ IX.conj().T)
    with pytest.raises(ValueError):
        apply_unitary(r0, Operator(sp, np.diag([1.0, 0.5])))
    with pytest.raises(DimensionError):
        apply_unitary(r00, Operator(space(("x", 3)), np.eye(3)), ["a"])


@given(seeds)
@settings(max_examples=25, deadline=None)
def test_unitary_roundtrip_and_trace(seed):
    rng = np.random.default_rng(seed)
    rho = random_state(rng, (2, 3, 2), ["A", "B", "C"])
    U = Operator(space(("C", 2), ("A", 2)), random_unitary(rng, 4))
    out = apply_unitary(rho, U, ["C", "A"])
    assert abs(out.trace - 1.0) <= 1e-10
    back = apply_unitary(out, U.dag, ["C", "A"])
    assert np.max(np.abs(back.matrix - rho.matrix)) <= 1e-10
    # reordered factors give the same embedding as an explicit permutation
    perm = reorder(rho, ["C", "A", "B"])
    ref = apply_unitary(perm, Operator(space(("C", 2), ("A", 2), ("B", 3)), np.kron(U.matrix, np.eye(3))))
    assert np.allclose(reorder(out, ["C", "A", "B"]).matrix, ref.matrix, atol=1e-12)


def test_channel_examples():
    sp = space(("q", 3))
    rho = random_state(np.random.default_rng(1), (3,), ["q"])
    ident = KrausChannel((Operator.identity(sp),))
    assert np.allclose(apply_channel(rho, ident).matrix, rho.matrix)
    replace_all = KrausChannel(tuple(
        Operator(sp, np.outer(np.eye(3)[i], np.eye(3)[j]) / math.sqrt(3)) for i in range(3) for j in range(3)))
    assert np.allclose(apply_channel(rho, replace_all).matrix, np.eye(3) / 3, atol=1e-14)
    eta = 0.3
    q = space(("p", 2))
    damp = KrausChannel((Operator(q, np.diag([1, math.sqrt(eta)])),
                         Operator(q, np.array([[0, math.sqrt(1 - eta)], [0, 0]]))))
    out = apply_channel(DensityOperator.basis(q, 1), damp)
    assert np.allclose(np.diag(out.matrix).real, [1 - eta, eta])


@given(seeds, st.floats(0, 1))
@settings(max_examples=25, deadline=None)
def test_channel_trace_and_positivity(seed, p):
    rng = np.random.default_rng(seed)
    rho = random_state(rng, (3, 2), ["s", "x"], rank=2)
    sp = space(("s", 3))
    ops = [Operator(sp, math.sqrt(1 - p) * np.eye(3))]
    ops += [Operator(sp, math.sqrt(p / 3) * np.outer(np.eye(3)[i], np.eye(3)[j]))
            for i in range(3) for j in range(3)]
    out = apply_channel(rho, KrausChannel(tuple(ops)), ["s"])
    assert abs(out.trace - 1.0) <= 1e-10
    assert out.min_eigenvalue() >= -1e-10


def test_project_examples():
    sp = space(("a", 2))
    mixed = DensityOperator.maximally_mixed(sp)
    assert np.allclose(project(mixed, Operator.identity(sp)).matrix, mixed.matrix)
    assert project(mixed, Operator(sp, np.diag([1.0, 0.0]))).trace == pytest.approx(0.5)
    sp2 = space(("a", 2), ("b", 2))
    bell = DensityOperator.pure(sp2, [0, 1, 1, 0])
    out = project(bell, Operator(sp2, np.diag([0, 1.0, 0, 0])))
    assert out.trace == pytest.approx(0.5)
    assert not out.normalized
    assert np.allclose(out.matrix, np.diag([0, 0.5, 0, 0]))
    with pytest.raises(ValueError):
        project(mixed, Operator(sp, np.array([[1, 1], [0, 0]])))


def test_embed_levels_zero_pads():
    rho = random_state(np.random.default_rng(3), (2, 2), ["a", "b"])
    big = embed_levels(rho, "a", 3)
    assert big.space.dims == (3, 2)
    t = big.matrix.reshape(3, 2, 3, 2)
    assert np.allclose(t[:2, :, :2, :], rho.matrix.reshape(2, 2, 2, 2))
    assert np.allclose(t[2], 0) and np.allclose(t[:, :, 2], 0)
    with pytest.raises(DimensionError):
        embed_levels(big, "a", 2)


# -- overlaps ---------------------------------------------------------------


def test_overlap_examples():
    u = np.array([1, 1]) / math.sqrt(2)
    assert overlap_decompose(u, u) == pytest.approx((1.0, 0.0))
    assert overlap_decompose([1, 0], [0, 1]) == (0.0, 0.0)
    with pytest.raises(ValueError):
        overlap_decompose([1, 1], [1, 0])


@given(st.floats(-20, 20))
def test_overlap_two_level(theta):
    u = np.array([1, 1]) / math.sqrt(2)
    v = np.array([1, np.exp(-1j * theta)]) / math.sqrt(2)
    mag, lam = overlap_decompose(u, v)
    assert mag == pytest.approx(abs(math.cos(theta / 2)), abs=1e-12)
    direct = np.vdot(u, v)
    if mag > 1e-12:
        assert mag * np.exp(-1j * lam) == pytest.approx(direct, abs=1e-12)


def test_fidelity_pure():
    sp = space(("a", 2), ("b", 2))
    psi = np.array([0, 1, 1, 0]) / math.sqrt(2)
    assert fidelity_pure(DensityOperator.pure(sp, psi), psi) == pytest.approx(1.0)
    assert fidelity_pure(DensityOperator.maximally_mixed(sp), psi) == pytest.approx(0.25)
