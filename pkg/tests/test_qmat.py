"""Core linear-algebra operations against independent oracles."""

import math

import numpy as np
import pytest

from overlapcert import (
    Bipartition,
    PureVec,
    QState,
    basis_state,
    eig_hermitian,
    embed_operator,
    hs_inner,
    partial_trace,
    partial_trace_matrix,
    partial_transpose,
    permute_subsystems_matrix,
    schmidt_decompose,
    tensor,
)
from overlapcert.states import max_entangled, random_mixed, random_pure


def random_hermitian(dim, rng):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (g + g.conj().T) / 2


# ---------------------------------------------------------------------------
# type invariants


def test_qstate_rejects_non_hermitian():
    m = np.eye(4, dtype=complex) / 4
    m[0, 1] = 0.5
    with pytest.raises(ValueError, match="Hermitian"):
        QState((2, 2), m)


def test_qstate_rejects_wrong_trace():
    with pytest.raises(ValueError, match="trace"):
        QState((2, 2), np.eye(4) / 2)


def test_qstate_rejects_negative_operator():
    m = np.diag([0.7, 0.5, -0.1, -0.1]).astype(complex)
    with pytest.raises(ValueError, match="positive"):
        QState((2, 2), m)


def test_qstate_rejects_dims_mismatch():
    with pytest.raises(ValueError, match="shape"):
        QState((2, 3), np.eye(4) / 4)


def test_purevec_rejects_unnormalized():
    with pytest.raises(ValueError, match="normalized"):
        PureVec((2,), np.array([1.0, 1.0]))


def test_state_matrices_are_immutable():
    s = random_mixed((2, 2), seed=3)
    with pytest.raises(ValueError):
        s.matrix[0, 0] = 99.0


# ---------------------------------------------------------------------------
# tensor


def test_tensor_basis_product():
    v = tensor(basis_state((2,), (0,)), basis_state((2,), (0,)))
    assert v.dims == (2, 2)
    np.testing.assert_allclose(v.vec, [1, 0, 0, 0])


def test_tensor_maximally_mixed():
    half = QState((2,), np.eye(2) / 2)
    out = tensor(half, half)
    np.testing.assert_allclose(out.matrix, np.eye(4) / 4)


def test_tensor_against_multiply_out_oracle():
    rng = np.random.default_rng(11)
    rho = random_mixed((3,), seed=1)
    sig = random_mixed((3,), seed=2)
    out = tensor(rho, sig)
    # oracle: explicit double loop over index blocks
    expect = np.zeros((9, 9), dtype=complex)
    for i in range(3):
        for j in range(3):
            expect[3 * i : 3 * i + 3, 3 * j : 3 * j + 3] = (
                rho.matrix[i, j] * sig.matrix
            )
    np.testing.assert_allclose(out.matrix, expect, atol=1e-14)
    assert abs(np.trace(out.matrix) - 1) < 1e-12


def test_tensor_rejects_mixed_kinds():
    with pytest.raises(TypeError):
        tensor(random_mixed((2,), seed=0), random_pure((2,), seed=0))


# ---------------------------------------------------------------------------
# partial trace


def test_partial_trace_max_entangled_gives_white_noise():
    for d in (2, 3, 4):
        rho = max_entangled(d).projector()
        red = partial_trace(rho, Bipartition((0,)))
        np.testing.assert_allclose(red.matrix, np.eye(d) / d, atol=1e-12)


def test_partial_trace_product_marginal():
    rho = random_mixed((3,), seed=5)
    sig = random_mixed((2,), seed=6)
    joint = tensor(rho, sig)
    np.testing.assert_allclose(
        partial_trace(joint, Bipartition((0,))).matrix, rho.matrix, atol=1e-12
    )
    np.testing.assert_allclose(
        partial_trace(joint, Bipartition((1,))).matrix, sig.matrix, atol=1e-12
    )


def test_partial_trace_corner_isotropic_reduction():
    # reduced state is (1-x)/(d-1) on the first d-1 levels plus x/d of identity
    from overlapcert.states import corner_isotropic

    d, x = 5, 0.37
    red = partial_trace(corner_isotropic(d, x), Bipartition((1,)))
    expect = np.zeros((d, d))
    expect[: d - 1, : d - 1] = (1 - x) / (d - 1) * np.eye(d - 1)
    expect += x / d * np.eye(d)
    np.testing.assert_allclose(red.matrix, expect, atol=1e-12)


def test_partial_trace_preserves_trace_many_cuts():
    rng = np.random.default_rng(7)
    for dims in [(2, 2), (2, 3), (2, 2, 3)]:
        s = random_mixed(dims, seed=int(rng.integers(1000)))
        n = len(dims)
        for k in range(1, 2**n - 1):
            kept = tuple(i for i in range(n) if k >> i & 1)
            red = partial_trace(s, Bipartition(kept))
            assert abs(np.trace(red.matrix) - 1) < 1e-10


def test_partial_trace_bad_index():
    s = random_mixed((2, 2), seed=0)
    with pytest.raises(ValueError):
        partial_trace(s, Bipartition((0, 5)))


# ---------------------------------------------------------------------------
# partial transpose


def test_partial_transpose_product_state_stays_psd():
    rho = random_mixed((2,), seed=8)
    sig = random_mixed((3,), seed=9)
    joint = tensor(rho, sig)
    pt = partial_transpose(joint, Bipartition((0,)))
    np.testing.assert_allclose(pt, np.kron(rho.matrix.T, sig.matrix), atol=1e-12)
    assert np.linalg.eigvalsh(pt)[0] > -1e-12


def test_partial_transpose_bell_eigenvalues():
    bell = max_entangled(2).projector()
    pt = partial_transpose(bell, Bipartition((0,)))
    eigs = np.linalg.eigvalsh(pt)
    np.testing.assert_allclose(sorted(eigs), [-0.5, 0.5, 0.5, 0.5], atol=1e-12)


def test_partial_transpose_max_entangled_is_swap_over_d():
    # (|Psi><Psi|)^T_A = S/d with S built from symmetric/antisymmetric pairs
    for d in (2, 3):
        rho = max_entangled(d).projector()
        pt = partial_transpose(rho, Bipartition((0,)))
        expect = np.zeros((d * d, d * d), dtype=complex)
        def ket(i, j):
            v = np.zeros(d * d)
            v[i * d + j] = 1.0
            return v
        for i in range(d):
            for j in range(i, d):
                v = (ket(i, j) + ket(j, i))
                v = v / np.linalg.norm(v)
                expect += np.outer(v, v) / d
        for k in range(d):
            for l in range(k + 1, d):
                w = (ket(k, l) - ket(l, k)) / math.sqrt(2)
                expect -= np.outer(w, w) / d
        np.testing.assert_allclose(pt, expect, atol=1e-12)


def test_partial_transpose_involution_and_invariants():
    from overlapcert.qmat import partial_transpose_matrix

    rng = np.random.default_rng(21)
    for dims in [(2, 2), (3, 2), (3, 3)]:
        s = random_mixed(dims, seed=int(rng.integers(1000)))
        pt = partial_transpose(s, Bipartition((0,)))
        again = partial_transpose_matrix(pt, dims, [0])
        np.testing.assert_allclose(again, s.matrix, atol=1e-13)
        assert abs(np.trace(pt) - 1) < 1e-12
        assert abs(np.linalg.norm(pt) - np.linalg.norm(s.matrix)) < 1e-12


# ---------------------------------------------------------------------------
# inner product


def test_hs_inner_purity_of_pure_state():
    rho = random_pure((3, 3), seed=13).projector()
    assert abs(hs_inner(rho, rho) - 1.0) < 1e-12


def test_hs_inner_white_noise():
    for d in (2, 3, 5):
        eye = QState((d,), np.eye(d) / d)
        assert abs(hs_inner(eye, eye) - 1.0 / d) < 1e-14


def test_hs_inner_against_double_loop_oracle():
    from overlapcert.states import isotropic

    a = isotropic(3, 0.4)
    b = isotropic(3, 1.0)
    total = 0.0
    for i in range(9):
        for j in range(9):
            total += (a.matrix[i, j] * b.matrix[j, i]).real
    assert abs(hs_inner(a, b) - total) < 1e-12


def test_hs_inner_dimension_mismatch():
    with pytest.raises(ValueError, match="mismatch"):
        hs_inner(np.eye(2), np.eye(3))


# ---------------------------------------------------------------------------
# eigendecomposition


def test_eig_identity():
    w, v = eig_hermitian(np.eye(5))
    np.testing.assert_allclose(w, np.ones(5))


def test_eig_rejects_non_hermitian():
    with pytest.raises(ValueError, match="Hermitian"):
        eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_eig_residual_and_orthonormality():
    rng = np.random.default_rng(17)
    m = random_hermitian(12, rng)
    w, v = eig_hermitian(m)
    scale = np.linalg.norm(m)
    for k in range(12):
        assert np.linalg.norm(m @ v[:, k] - w[k] * v[:, k]) <= 1e-8 * scale
    np.testing.assert_allclose(v.conj().T @ v, np.eye(12), atol=1e-9)
    assert all(np.diff(w) >= -1e-12)


def test_eig_corner_quadratic_form_matrix():
    # explicit d=3 quadratic-form matrix with m = n = 1/4: its spectrum is
    # {1/4} plus the roots of l^2 - l + 1/16
    m_ = n_ = 0.25
    p = np.full((3, 3), n_)
    p[0, 0] += m_
    p[1, 1] += m_
    w, _ = eig_hermitian(p)
    roots = sorted(np.roots([1.0, -1.0, 1.0 / 16.0]).real)
    np.testing.assert_allclose(sorted(w), sorted([0.25] + roots), atol=1e-12)


# ---------------------------------------------------------------------------
# Schmidt decomposition


def test_schmidt_product_state():
    sd = schmidt_decompose(basis_state((2, 2), (0, 0)))
    assert sd.rank == 1
    np.testing.assert_allclose(sd.coeffs, [1.0])


def test_schmidt_max_entangled():
    for d in (2, 3, 4):
        sd = schmidt_decompose(max_entangled(d))
        np.testing.assert_allclose(sd.coeffs, np.full(d, 1.0 / d), atol=1e-12)


def test_schmidt_reconstruction_roundtrip():
    for dims, seed in [((2, 2), 1), ((3, 3), 2), ((4, 4), 3), ((2, 4), 4)]:
        v = random_pure(dims, seed=seed)
        sd = schmidt_decompose(v)
        rebuilt = sd.reconstruct()
        # global phase free
        phase = np.vdot(rebuilt, v.vec)
        phase /= abs(phase)
        assert np.linalg.norm(rebuilt * phase - v.vec) < 1e-9
        assert abs(sd.coeffs.sum() - 1.0) < 1e-10
        assert all(np.diff(sd.coeffs) <= 1e-12)


def test_schmidt_orthonormal_factors():
    v = random_pure((3, 4), seed=9)
    sd = schmidt_decompose(v)
    np.testing.assert_allclose(
        sd.left_vecs.conj().T @ sd.left_vecs, np.eye(sd.rank), atol=1e-10
    )
    np.testing.assert_allclose(
        sd.right_vecs.conj().T @ sd.right_vecs, np.eye(sd.rank), atol=1e-10
    )


def test_schmidt_noncontiguous_cut():
    # product across the {0,2} | {1} cut of a three-qubit state
    v = random_pure((2, 2), seed=31)
    w = random_pure((2,), seed=32)
    # arrange as qubits (0, 2) entangled, qubit 1 in between
    from overlapcert.qmat import permute_subsystems_vec

    joint = np.kron(v.vec, w.vec)  # layout (0, 2, 1)
    natural = permute_subsystems_vec(joint, (2, 2, 2), [0, 2, 1])
    state = PureVec((2, 2, 2), natural)
    sd = schmidt_decompose(state, Bipartition((0, 2)))
    assert sd.rank == 1


# ---------------------------------------------------------------------------
# identities used by the witness construction


def test_embedding_identity_left_and_right():
    # <I x P_B, Q> = <P_B, Q_B> and <P_A x I, Q> = <P_A, Q_A>
    rng = np.random.default_rng(23)
    for d_a, d_b in [(2, 2), (2, 3), (3, 3)]:
        p = random_hermitian(d_a * d_b, rng)
        q = random_hermitian(d_a * d_b, rng)
        dims = (d_a, d_b)
        p_a = partial_trace_matrix(p, dims, [0])
        p_b = partial_trace_matrix(p, dims, [1])
        q_a = partial_trace_matrix(q, dims, [0])
        q_b = partial_trace_matrix(q, dims, [1])
        lhs1 = hs_inner(np.kron(np.eye(d_a), p_b), q)
        lhs2 = hs_inner(np.kron(p_a, np.eye(d_b)), q)
        assert abs(lhs1 - hs_inner(p_b, q_b)) < 1e-10
        assert abs(lhs2 - hs_inner(p_a, q_a)) < 1e-10


def test_negative_eigenvector_direction():
    # a Hermitian operator with negative eigenvalue meets some state below 0
    rng = np.random.default_rng(29)
    for _ in range(20):
        p = random_hermitian(6, rng)
        w, v = eig_hermitian(p)
        if w[0] >= 0:
            p = p - (w[0] + 1.0) * np.eye(6)
            w, v = eig_hermitian(p)
        proj = np.outer(v[:, 0], v[:, 0].conj())
        assert abs(hs_inner(p, proj) - w[0]) < 1e-10
        assert hs_inner(p, proj) < 0


def test_embed_operator_positions():
    rng = np.random.default_rng(41)
    m = random_hermitian(6, rng)  # acts on dims (2, 3)
    dims = (2, 2, 3)
    big = embed_operator(m, dims, [0, 2])
    # oracle: contract against product vectors
    for _ in range(5):
        a = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        c = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        full = np.kron(np.kron(a, b), c)
        ac = np.kron(a, c)
        lhs = full.conj() @ (big @ full)
        rhs = (ac.conj() @ (m @ ac)) * (b.conj() @ b)
        assert abs(lhs - rhs) < 1e-9


def test_permute_subsystems_roundtrip():
    s = random_mixed((2, 3, 2), seed=55)
    m = permute_subsystems_matrix(s.matrix, s.dims, [2, 0, 1])
    back = permute_subsystems_matrix(m, (2, 2, 3), [1, 2, 0])
    np.testing.assert_allclose(back, s.matrix, atol=1e-14)


def test_bipartite_view_groups_noncontiguous_cut():
    from overlapcert import bipartite_view

    s = random_mixed((2, 3, 2), seed=77)
    grouped = bipartite_view(s, Bipartition((0, 2)))
    assert grouped.dims == (4, 3)
    # spectra and purity are permutation invariants
    np.testing.assert_allclose(
        np.linalg.eigvalsh(grouped.matrix), np.linalg.eigvalsh(s.matrix), atol=1e-12
    )
    # the kept-side marginal matches the direct partial trace
    direct = partial_trace(s, Bipartition((0, 2)))
    via_view = partial_trace(grouped, Bipartition((0,)))
    np.testing.assert_allclose(via_view.matrix, direct.matrix, atol=1e-12)
