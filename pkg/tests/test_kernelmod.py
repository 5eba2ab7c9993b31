"""Kernel machines: kernel algebra, the analytic two-point SVC problem,
SVR tube behavior, and post-fit KKT audits on random data."""

import numpy as np
import pytest

from mpgworkbench.kernelmod import (KKT_TOL, KernelSpec, SmoError,
                                    fit_svc_smo, fit_svr, gamma_scale,
                                    kernel_eval, kernel_matrix,
                                    solve_svr_dual, svc_kkt_violations,
                                    svm_decision, svm_predict_class,
                                    svr_kkt_violations)

LINEAR = KernelSpec("linear")


# --- kernels

def test_rbf_zero_distance_is_one():
    spec = KernelSpec("rbf", gamma=0.7)
    u = np.array([1.0, 2.0])
    assert kernel_eval(spec, u, u) == 1.0


def test_linear_dot_product():
    assert kernel_eval(LINEAR, np.array([1.0, 2.0]), np.array([3.0, 4.0])) == 11.0


def test_rbf_log2_distance_is_half():
    spec = KernelSpec("rbf", gamma=1.0)
    u = np.array([0.0])
    v = np.array([np.sqrt(np.log(2.0))])
    assert kernel_eval(spec, u, v) == pytest.approx(0.5, abs=1e-12)


def test_kernel_eval_dimension_mismatch():
    with pytest.raises(ValueError):
        kernel_eval(LINEAR, np.ones(2), np.ones(3))


def test_kernel_spec_validation():
    with pytest.raises(ValueError):
        KernelSpec("poly")
    with pytest.raises(ValueError):
        KernelSpec("rbf")  # gamma required
    with pytest.raises(ValueError):
        KernelSpec("rbf", gamma=-1.0)


def test_kernel_matrix_matches_elementwise(rng):
    A = rng.normal(size=(6, 3))
    B = rng.normal(size=(4, 3))
    for spec in (LINEAR, KernelSpec("rbf", gamma=0.3)):
        K = kernel_matrix(spec, A, B)
        for i in range(6):
            for j in range(4):
                assert K[i, j] == pytest.approx(
                    kernel_eval(spec, A[i], B[j]), abs=1e-12)


def test_rbf_kernel_matrix_values_in_unit_interval(rng):
    A = rng.normal(size=(8, 2))
    K = kernel_matrix(KernelSpec("rbf", gamma=1.5), A, A)
    assert np.all(K > 0.0) and np.all(K <= 1.0)
    np.testing.assert_allclose(np.diag(K), 1.0)


def test_gamma_scale_rejects_constant():
    with pytest.raises(ValueError):
        gamma_scale(np.ones((5, 2)))


# --- SVC

def two_point_problem():
    X = np.array([[-1.0], [1.0]])
    labels = np.array([0, 1])
    return X, labels


def test_svc_two_point_analytic_solution():
    X, labels = two_point_problem()
    m = fit_svc_smo(X, labels, C=10.0, kernel=LINEAR)
    # optimum: alpha = 0.5 both, w = 1, b = 0, f(x) = x
    np.testing.assert_allclose(np.sort(m.dual_coefs), [-0.5, 0.5], atol=1e-6)
    assert abs(m.bias) < 1e-6
    assert svm_decision(m, np.array([[2.0]]))[0] == pytest.approx(2.0, abs=1e-6)


def test_svc_two_point_same_solution_for_any_large_c():
    X, labels = two_point_problem()
    for C in (0.5, 1.0, 100.0):
        m = fit_svc_smo(X, labels, C=C, kernel=LINEAR)
        np.testing.assert_allclose(np.sort(m.dual_coefs), [-0.5, 0.5], atol=1e-6)


def test_svc_tie_and_sign_rules():
    X, labels = two_point_problem()
    m = fit_svc_smo(X, labels, C=10.0, kernel=LINEAR)
    preds = svm_predict_class(m, np.array([[0.0], [2.0], [-2.0]]))
    assert preds.tolist() == [1, 1, 0]  # score 0 resolves to class 1


def test_svc_requires_both_classes():
    with pytest.raises(ValueError):
        fit_svc_smo(np.ones((3, 1)), np.array([1, 1, 1]), C=1.0, kernel=LINEAR)


def test_svc_iteration_cap_raises_with_diagnostics(rng):
    X = rng.normal(size=(30, 2))
    labels = (X[:, 0] > 0).astype(int)
    with pytest.raises(SmoError) as exc:
        fit_svc_smo(X, labels, C=1.0, kernel=LINEAR, max_iter=1)
    assert exc.value.dual is not None
    assert exc.value.max_violation is not None


def svc_audit(X, labels, C, kernel, seed=0):
    m = fit_svc_smo(X, labels, C=C, kernel=kernel, seed=seed)
    y = np.where(labels == 1, 1.0, -1.0)
    # reconstruct the full dual vector from the support set
    scores = svm_decision(m, X)
    errors = scores - y
    alpha = np.zeros(X.shape[0])
    if m.support_vectors.shape[0]:
        K = kernel_matrix(kernel, X, m.support_vectors)
        match = np.abs(X[:, None, :] - m.support_vectors[None, :, :]).sum(axis=2)
        for j in range(m.support_vectors.shape[0]):
            i = int(np.argmin(match[:, j]))
            alpha[i] = m.dual_coefs[j] * y[i]
    viol = svc_kkt_violations(alpha, y, errors, C)
    return m, viol


def test_svc_random_kkt_audit(rng):
    for trial in range(10):
        n = int(rng.integers(6, 40))
        X = rng.normal(size=(n, 2))
        labels = (X[:, 0] + 0.5 * rng.normal(size=n) > 0).astype(int)
        if labels.min() == labels.max():
            labels[0] = 1 - labels[0]
        kernel = LINEAR if trial % 2 else KernelSpec("rbf", gamma=0.5)
        C = float(rng.choice([0.5, 1.0, 10.0]))
        m, viol = svc_audit(X, labels, C, kernel)
        assert viol.max() <= 2.0 * KKT_TOL
        assert abs((m.dual_coefs).sum()) <= 1e-8  # sum alpha_i y_i = 0
        assert np.abs(m.dual_coefs).max() <= C + 1e-12


# --- SVR

def test_svr_constant_target_inside_tube():
    X = np.arange(6.0)[:, None]
    y = np.full(6, 3.0)
    m = fit_svr(X, y, C=10.0, epsilon=0.1, kernel=LINEAR)
    assert m.support_vectors.shape[0] == 0
    np.testing.assert_allclose(svm_decision(m, X), 3.0, atol=1e-9)


def test_svr_exact_line_within_tube():
    X = np.linspace(-2, 2, 15)[:, None]
    y = X[:, 0].copy()
    m = fit_svr(X, y, C=1000.0, epsilon=0.01, kernel=LINEAR)
    pred = svm_decision(m, X)
    assert np.abs(pred - y).max() <= 0.01 + 1e-6


def test_svr_dual_constraints(rng):
    X = rng.normal(size=(25, 2))
    y = X[:, 0] + 0.2 * rng.normal(size=25)
    m = fit_svr(X, y, C=5.0, epsilon=0.1, kernel=KernelSpec("rbf", gamma=0.5))
    assert abs(m.dual_coefs.sum()) <= 1e-8
    assert np.abs(m.dual_coefs).max() <= 5.0 + 1e-12


def test_svr_random_kkt_audit(rng):
    for trial in range(10):
        n = int(rng.integers(5, 40))
        X = rng.normal(size=(n, 2))
        y = np.sin(X[:, 0]) + 0.1 * rng.normal(size=n)
        kernel = LINEAR if trial % 2 else KernelSpec("rbf", gamma=0.7)
        C = float(rng.choice([0.5, 1.0, 10.0]))
        K = kernel_matrix(kernel, X, X)
        beta, b = solve_svr_dual(K, y, C, 0.1)
        E = K @ beta + b - y
        assert svr_kkt_violations(beta, E, C, 0.1).max() <= 2.0 * KKT_TOL
        assert abs(beta.sum()) <= 1e-8


def test_svr_dual_objective_not_decreased_by_warm_start(rng):
    """A warm start must land at (up to tolerance) the same optimum."""
    X = rng.normal(size=(20, 2))
    y = X[:, 0] + 0.1 * rng.normal(size=20)
    K = kernel_matrix(LINEAR, X, X)
    beta1, _ = solve_svr_dual(K, y, 1.0, 0.1)
    beta10_cold, b_cold = solve_svr_dual(K, y, 10.0, 0.1)
    beta10_warm, b_warm = solve_svr_dual(K, y, 10.0, 0.1, beta0=beta1)

    def dual_objective(beta):
        return float(y @ beta - 0.1 * np.abs(beta).sum()
                     - 0.5 * beta @ K @ beta)

    assert dual_objective(beta10_warm) == pytest.approx(
        dual_objective(beta10_cold), abs=1e-2)


def test_svr_beta0_validation(rng):
    X = rng.normal(size=(5, 1))
    K = kernel_matrix(LINEAR, X, X)
    y = rng.normal(size=5)
    with pytest.raises(ValueError, match="box"):
        solve_svr_dual(K, y, 1.0, 0.1, beta0=np.full(5, 2.0))
    with pytest.raises(ValueError, match="shape"):
        solve_svr_dual(K, y, 1.0, 0.1, beta0=np.zeros(4))


def test_svr_negative_epsilon_rejected():
    with pytest.raises(ValueError):
        fit_svr(np.ones((3, 1)), np.zeros(3), C=1.0, epsilon=-0.1, kernel=LINEAR)


def test_empty_support_vector_decision_is_bias():
    X = np.arange(4.0)[:, None]
    m = fit_svr(X, np.full(4, 2.0), C=1.0, epsilon=0.5, kernel=LINEAR)
    np.testing.assert_allclose(svm_decision(m, np.array([[7.0]])), [2.0],
                               atol=1e-9)
