import numpy as np
import pytest

from solvflow.catalog import ModelId, build_model, params_from_basis_change, x_basis
from solvflow.liecore import (
    BasisChange,
    StructureConstants,
    bracket_apply,
    change_basis,
    jacobi_residual,
    unimodularity_defect,
)


def e(i):
    v = np.zeros(5)
    v[i] = 1.0
    return v


class TestStructureConstants:
    def test_antisymmetry_enforced(self):
        c = np.zeros((5, 5, 5))
        c[0, 1, 2] = 1.0  # no antisymmetric completion
        with pytest.raises(ValueError, match="antisymmetric"):
            StructureConstants(c)

    def test_from_brackets_fills_completion(self):
        sc = StructureConstants.from_brackets(5, {(0, 1, 2): 3.0})
        assert sc.c[0, 1, 2] == 3.0
        assert sc.c[1, 0, 2] == -3.0

    def test_diagonal_bracket_rejected(self):
        with pytest.raises(ValueError):
            StructureConstants.from_brackets(5, {(1, 1, 0): 1.0})

    def test_tensor_is_frozen(self):
        sc = StructureConstants.zero(5)
        with pytest.raises(ValueError):
            sc.c[0, 1, 2] = 1.0


class TestBracketApply:
    def test_d1_x_basis_x2_x4(self):
        sc = x_basis(ModelId.D1)
        w = bracket_apply(sc, e(1), e(3))
        assert np.allclose(w, e(0))

    def test_self_bracket_vanishes(self):
        sc = x_basis(ModelId.D3)
        assert np.allclose(bracket_apply(sc, e(2), e(2)), 0.0)

    def test_d5_x3_x5(self):
        sc = x_basis(ModelId.D5)
        w = bracket_apply(sc, e(2), e(4))
        assert np.allclose(w, -e(2))

    def test_dimension_mismatch(self):
        sc = x_basis(ModelId.D1)
        with pytest.raises(ValueError):
            bracket_apply(sc, np.ones(4), e(0))

    def test_bilinearity(self):
        rng = np.random.default_rng(11)
        sc = build_model(ModelId.D11, params_from_basis_change(ModelId.D11, rng.uniform(-1, 1, 10)))
        for _ in range(25):
            a, b = rng.normal(size=2)
            u, v, w = rng.normal(size=(3, 5))
            lhs = bracket_apply(sc, a * u + b * w, v)
            rhs = a * bracket_apply(sc, u, v) + b * bracket_apply(sc, w, v)
            assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_antisymmetry_of_result(self):
        rng = np.random.default_rng(12)
        sc = x_basis(ModelId.D2)
        u, v = rng.normal(size=(2, 5))
        assert np.allclose(bracket_apply(sc, u, v), -bracket_apply(sc, v, u))


class TestJacobi:
    def test_d1_y_basis_any_params(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            a, b, g = rng.uniform(-3, 3, 3)
            sc = build_model(ModelId.D1, {"alpha": a, "beta": b, "gamma": g})
            assert jacobi_residual(sc) < 1e-12

    def test_d5_x_basis(self):
        assert jacobi_residual(x_basis(ModelId.D5)) == 0.0

    def test_non_lie_table_flagged(self):
        # [e1,e2]=e2, [e1,e3]=e3, [e2,e3]=e1: the cyclic sum over (1,2,3) is
        # [e2,e3] + [e1,e1] + [-e3,e2] = 2 e1, so the residual is 2
        sc = StructureConstants.from_brackets(
            5, {(0, 1, 1): 1.0, (0, 2, 2): 1.0, (1, 2, 0): 1.0}
        )
        assert jacobi_residual(sc) == pytest.approx(2.0)

    def test_two_bracket_heisenberg_pair_is_lie(self):
        # [e1,e2]=e3 with [e2,e3]=e1 alone already satisfies the identity:
        # every cyclic term hits a bracket of a vector with itself
        sc = StructureConstants.from_brackets(5, {(0, 1, 2): 1.0, (1, 2, 0): 1.0})
        assert jacobi_residual(sc) == 0.0

    def test_catalog_families_random_draws(self):
        rng = np.random.default_rng(4)
        for model in ModelId:
            for _ in range(20):
                a = rng.uniform(-2, 2, 10)
                eps = float(rng.choice((-1.0, 1.0)))
                sc = build_model(model, params_from_basis_change(model, a, eps=eps))
                assert jacobi_residual(sc) < 1e-12


class TestUnimodularity:
    def test_d5_x_basis(self):
        assert unimodularity_defect(x_basis(ModelId.D5)) == 0.0

    def test_abelian(self):
        assert unimodularity_defect(StructureConstants.zero(5)) == 0.0

    def test_affine_line_embedded(self):
        # [X1,X2] = X1 in dimension 5: tr ad_{X2} = -1
        sc = StructureConstants.from_brackets(5, {(0, 1, 0): 1.0})
        assert unimodularity_defect(sc) == pytest.approx(1.0)


class TestBasisChange:
    def test_layout(self):
        t = BasisChange.from_offdiag([1, 2, 3, 4, 5, 6, 7, 8, 9, 10])
        expected = np.array([
            [1, 0, 0, 0, 0],
            [1, 1, 0, 0, 0],
            [2, 5, 1, 0, 0],
            [3, 6, 8, 1, 0],
            [4, 7, 9, 10, 1],
        ], dtype=float)
        assert np.array_equal(t.matrix, expected)

    def test_rejects_non_unitriangular(self):
        m = np.eye(5)
        m[0, 1] = 1.0
        with pytest.raises(ValueError):
            BasisChange(m)
        m = np.eye(5)
        m[2, 2] = 2.0
        with pytest.raises(ValueError):
            BasisChange(m)

    def test_inverse_is_unitriangular_inverse(self):
        rng = np.random.default_rng(5)
        t = BasisChange.from_offdiag(rng.uniform(-2, 2, 10))
        prod = t.matrix @ t.inverse().matrix
        assert np.max(np.abs(prod - np.eye(5))) < 1e-13

    def test_d1_parameter_formulas(self):
        # a10=2, a5=3, a6=1, a7=0, a8=4 gives alpha=2, beta=3, gamma=6
        a = [0.0] * 10
        a[9], a[4], a[5], a[6], a[7] = 2.0, 3.0, 1.0, 0.0, 4.0
        got = change_basis(x_basis(ModelId.D1), BasisChange.from_offdiag(a))
        want = build_model(ModelId.D1, {"alpha": 2.0, "beta": 3.0, "gamma": 6.0})
        assert np.max(np.abs(got.c - want.c)) < 1e-12

    def test_d2_parameter_formulas(self):
        a = [0.0] * 10
        a[9] = 1.0  # a10=1, a5=a1=a8=a9=a6=0 -> alpha=1, beta=gamma=0
        got = change_basis(x_basis(ModelId.D2), BasisChange.from_offdiag(a))
        want = build_model(ModelId.D2, {"alpha": 1.0, "beta": 0.0, "gamma": 0.0})
        assert np.max(np.abs(got.c - want.c)) < 1e-12

    def test_identity_change(self):
        sc = x_basis(ModelId.D3)
        got = change_basis(sc, BasisChange.identity(5))
        assert np.array_equal(got.c, sc.c)

    def test_round_trip(self):
        rng = np.random.default_rng(6)
        for model in ModelId:
            sc = x_basis(model)
            t = BasisChange.from_offdiag(rng.uniform(-2, 2, 10))
            back = change_basis(change_basis(sc, t), t.inverse())
            assert np.max(np.abs(back.c - sc.c)) < 1e-12

    def test_jacobi_preserved(self):
        rng = np.random.default_rng(7)
        t = BasisChange.from_offdiag(rng.uniform(-2, 2, 10))
        sc = change_basis(x_basis(ModelId.D11, eps=-1.0), t)
        assert jacobi_residual(sc) < 1e-12
