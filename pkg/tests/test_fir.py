import numpy as np
import pytest

from graphfilt import (
    ConjugateSymmetryError,
    FirFilter,
    ParameterError,
    build_er_graph,
    complex_disc_grid,
    eigendecompose,
    fir_apply,
    fir_design,
    fir_from_json,
    fir_matrix_fit,
    fir_response,
    fir_to_json,
    gft,
    igft,
    normalize,
    uniform_real_grid,
    vandermonde,
)
from graphfilt.experiments import ideal_lowpass
from graphfilt.graphs import Graph, NORMALIZED_LAPLACIAN, custom_operator

from conftest import random_pair_symmetric


class TestVandermonde:
    def test_three_point_two_columns(self):
        grid = uniform_real_grid(3)
        system = vandermonde(grid, 2)
        assert np.allclose(system.psi.real, [[1, 0], [1, 1], [1, 2]])
        assert np.all(system.psi.imag == 0)

    def test_single_column_is_ones(self):
        grid = uniform_real_grid(5)
        assert np.allclose(vandermonde(grid, 1).psi, np.ones((5, 1)))

    def test_condition_grows_with_columns(self):
        grid = uniform_real_grid(100)
        conds = [vandermonde(grid, c).condition_estimate for c in range(2, 18)]
        assert all(b >= a * (1 - 1e-9) for a, b in zip(conds, conds[1:]))


class TestFirDesign:
    def test_allpass_gives_delta(self):
        grid = uniform_real_grid(20)
        design = fir_design(grid, np.ones(20, dtype=complex), 4)
        expected = np.zeros(5)
        expected[0] = 1.0
        assert np.allclose(design.filter.g, expected, atol=1e-10)
        assert design.rnmse <= 1e-12

    def test_exact_linear_response(self):
        grid = uniform_real_grid(25)
        h = 3.0 - 2.0 * grid.lambdas
        design = fir_design(grid, h, 1)
        assert np.allclose(design.filter.g, [3.0, -2.0], atol=1e-10)
        assert design.rnmse <= 1e-10

    def test_conjugate_symmetry_violation_rejected(self):
        grid = complex_disc_grid(20)
        h = np.ones(20, dtype=complex)
        h[np.flatnonzero(grid.pair != np.arange(20))[0]] += 1j
        with pytest.raises(ConjugateSymmetryError):
            fir_design(grid, h, 3)

    def test_lowpass_error_plateaus_near_one_tenth(self):
        # FIR error stays around 1e-1 and barely improves with order on
        # the universal grid
        grid = uniform_real_grid(100)
        h = ideal_lowpass(grid, 1.0)
        errs = {k: fir_design(grid, h, k).rnmse for k in (2, 8, 16, 24, 30)}
        assert errs[2] > errs[30]
        for k in (8, 16, 24, 30):
            assert 0.05 <= errs[k] <= 0.3

    def test_rnmse_non_increasing_in_order(self):
        grid = uniform_real_grid(60)
        h = ideal_lowpass(grid, 1.0)
        errs = [fir_design(grid, h, k).rnmse for k in range(1, 16)]
        assert all(b <= a + 1e-9 * a for a, b in zip(errs, errs[1:]))

    def test_matches_normal_equations_oracle(self):
        # independent brute-force solve of (Psi^H Psi) g = Psi^H h
        rng = np.random.default_rng(8)
        for n, k in [(8, 2), (15, 3), (12, 6), (20, 5)]:
            grid = complex_disc_grid(n) if n % 2 == 0 else uniform_real_grid(n)
            h = random_pair_symmetric(grid, rng)
            psi = grid.lambdas[:, None] ** np.arange(k + 1)[None, :]
            oracle = np.linalg.solve(psi.conj().T @ psi, psi.conj().T @ h).real
            design = fir_design(grid, h, k)
            assert np.linalg.norm(design.filter.g - oracle) <= 1e-6 * max(
                np.linalg.norm(oracle), 1.0
            )

    def test_real_coefficients_on_disc_grids(self):
        rng = np.random.default_rng(13)
        grid = complex_disc_grid(40)
        for _ in range(20):
            h = random_pair_symmetric(grid, rng)
            design = fir_design(grid, h, int(rng.integers(1, 9)))
            assert design.imag_residue <= 1e-8

    def test_grouping_merges_close_points(self):
        grid = uniform_real_grid(50)
        h = 2.0 * np.ones(50, dtype=complex)
        merged = fir_design(grid, h, 2, group_tol=0.5)
        assert merged.rnmse <= 1e-10


class TestFirResponse:
    def test_constant_filter(self):
        grid = uniform_real_grid(7)
        assert np.allclose(fir_response(FirFilter(g=[1.0]), grid), np.ones(7))

    def test_identity_coefficient_returns_frequencies(self):
        grid = uniform_real_grid(7)
        assert np.allclose(fir_response(FirFilter(g=[0.0, 1.0]), grid), grid.lambdas)

    def test_hand_value_at_half(self):
        grid = uniform_real_grid(9)  # includes lambda = 0.5
        resp = fir_response(FirFilter(g=[3.0, -2.0]), grid)
        idx = np.argmin(np.abs(grid.lambdas - 0.5))
        assert resp[idx] == pytest.approx(2.0, abs=1e-12)


class TestFirApply:
    def test_identity_filter(self):
        op = normalize(build_er_graph(10, 0.5, 0), NORMALIZED_LAPLACIAN)
        x = np.arange(10.0)
        assert np.allclose(fir_apply(FirFilter(g=[1.0, 0.0]), op, x), x)

    def test_single_shift(self):
        op = normalize(build_er_graph(10, 0.5, 0), NORMALIZED_LAPLACIAN)
        x = np.arange(10.0)
        assert np.allclose(fir_apply(FirFilter(g=[0.0, 1.0]), op, x), op.dense() @ x)

    def test_matches_spectral_oracle(self):
        op = normalize(build_er_graph(50, 0.2, 1), NORMALIZED_LAPLACIAN)
        dec = eigendecompose(op)
        rng = np.random.default_rng(4)
        g = rng.standard_normal(6)
        x = rng.standard_normal(50)
        response = np.polyval(g[::-1], dec.lambdas)
        oracle = igft(dec, response * gft(dec, x)).real
        y = fir_apply(FirFilter(g=g), op, x)
        assert np.linalg.norm(y - oracle) <= 1e-8 * np.linalg.norm(oracle)


class TestFirMatrixFit:
    def test_recovers_shift_itself(self):
        op = normalize(build_er_graph(12, 0.4, 2), NORMALIZED_LAPLACIAN)
        fit = fir_matrix_fit(op.dense(), op, 1)
        assert np.allclose(fit.filter.g, [0.0, 1.0], atol=1e-10)
        assert fit.frobenius_error <= 1e-10

    def test_recovers_identity(self):
        op = normalize(build_er_graph(12, 0.4, 2), NORMALIZED_LAPLACIAN)
        fit = fir_matrix_fit(np.eye(12), op, 0)
        assert np.allclose(fit.filter.g, [1.0], atol=1e-12)

    def test_nested_orders_reduce_residual(self):
        # 8-node path graph; target is the interpolation inverse
        edges = []
        for i in range(7):
            edges += [(i, i + 1, 1.0), (i + 1, i, 1.0)]
        op = normalize(Graph(n=8, edges=tuple(edges), directed=False), NORMALIZED_LAPLACIAN)
        mask = np.zeros(8)
        mask[[0, 3, 6]] = 1.0
        target = np.linalg.inv(np.diag(mask) + 1.0 * op.dense())
        low = fir_matrix_fit(target, op, 2).frobenius_error
        high = fir_matrix_fit(target, op, 4).frobenius_error
        assert high < low

    def test_rank_deficiency_reported(self):
        op = custom_operator(np.eye(4))
        fit = fir_matrix_fit(np.eye(4), op, 2)  # I, S, S^2 all identical
        assert fit.rank_deficient
        assert fit.frobenius_error <= 1e-12


def test_json_round_trip():
    filt = FirFilter(g=[1.0, -0.5, 0.25])
    assert np.array_equal(fir_from_json(fir_to_json(filt)).g, filt.g)


def test_bad_json_type_rejected():
    with pytest.raises(ParameterError):
        fir_from_json('{"type": "arma", "g": [1]}')
