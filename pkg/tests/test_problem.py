import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reference_values import ELLIPSOID_Y, SPHERE_DUAL, SPHERE_Y, SPHERE_Z
from surfdist.errors import DomainError, InputError
from surfdist.instances import EXAMPLES
from surfdist.oracle import sample_surface_y, sample_surface_z
from surfdist.problem import (
    PrimalPoint,
    ProblemInstance,
    analytic_separation,
    check_separation,
    dv,
    dv_star,
    g_value,
    grad_g,
    grad_h,
    h_value,
    lagrangian,
    lambda_op,
    load_instance,
    pi_value,
    v_star,
    v_value,
    w_value,
)


def simple(n=3, **kw):
    data = dict(A=np.eye(n), r=2 * math.sqrt(2), alpha=1.0, eta=2.0, f=np.zeros(n), c=np.zeros(n))
    data.update(kw)
    return ProblemInstance(**data)


class TestInstance:
    def test_arrays_are_read_only(self, sphere):
        with pytest.raises(ValueError):
            sphere.A[0, 0] = 5.0

    def test_asymmetric_matrix_rejected(self):
        A = np.eye(2)
        A[0, 1] = 1e-6
        with pytest.raises(InputError, match="symmetric"):
            simple(2, A=A)

    def test_tiny_asymmetry_tolerated(self):
        A = np.eye(2)
        A[0, 1] = 1e-12
        assert simple(2, A=A).n == 2

    def test_indefinite_matrix_rejected(self):
        with pytest.raises(InputError, match="positive definite"):
            simple(2, A=np.diag([1.0, -1.0]))

    @pytest.mark.parametrize("name", ["r", "alpha", "eta"])
    def test_nonpositive_scalars_rejected(self, name):
        with pytest.raises(InputError, match=name):
            simple(**{name: 0.0})

    def test_vector_length_checked(self):
        with pytest.raises(InputError, match="f must have length 3"):
            simple(f=[1.0, 2.0])

    def test_dict_round_trip(self, ellipsoid):
        again = ProblemInstance.from_dict(json.loads(json.dumps(ellipsoid.to_dict())))
        np.testing.assert_array_equal(again.A, ellipsoid.A)
        np.testing.assert_array_equal(again.f, ellipsoid.f)
        assert (again.r, again.alpha, again.eta) == (ellipsoid.r, ellipsoid.alpha, ellipsoid.eta)

    def test_unknown_field_rejected(self, sphere):
        data = sphere.to_dict()
        data["comment"] = "x"
        with pytest.raises(InputError, match="unknown field.*comment"):
            ProblemInstance.from_dict(data)

    def test_missing_field_rejected(self, sphere):
        data = sphere.to_dict()
        del data["eta"]
        with pytest.raises(InputError, match="missing field.*eta"):
            ProblemInstance.from_dict(data)

    def test_dimension_field_must_match(self, sphere):
        data = sphere.to_dict()
        data["n"] = 2
        with pytest.raises(InputError, match="field 'A'"):
            ProblemInstance.from_dict(data)

    def test_truncated_file_reports_position(self, tmp_path, sphere):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(sphere.to_dict(), indent=2)[:-20])
        with pytest.raises(InputError, match=r"line \d+ column \d+"):
            load_instance(path)

    def test_shipped_fixtures_match_examples(self, fixture_instances):
        assert set(fixture_instances) == set(EXAMPLES)
        for name, inst in fixture_instances.items():
            ref = EXAMPLES[name]()
            np.testing.assert_array_equal(inst.A, ref.A)
            np.testing.assert_array_equal(inst.f, ref.f)
            np.testing.assert_array_equal(inst.c, ref.c)
            assert (inst.r, inst.alpha, inst.eta) == (ref.r, ref.alpha, ref.eta)


class TestConstraintFunctions:
    def test_h_on_sphere(self):
        assert h_value(simple(), [2.0, 2.0, 0.0]) == pytest.approx(0.0, abs=1e-14)

    def test_h_at_origin(self):
        assert h_value(simple(), np.zeros(3)) == pytest.approx(-4.0)

    def test_h_at_published_ellipsoid_point(self, ellipsoid):
        assert abs(h_value(ellipsoid, ELLIPSOID_Y)) <= 1e-6

    def test_h_dimension_mismatch(self):
        with pytest.raises(InputError):
            h_value(simple(), [1.0, 2.0])

    def test_g_zero_on_reference_ray(self, symmetric):
        assert g_value(symmetric, [1.0, math.sqrt(2)]) == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize("name", sorted(EXAMPLES))
    def test_g_at_center(self, name):
        inst = EXAMPLES[name]()
        assert g_value(inst, inst.c) == pytest.approx(0.5 * inst.alpha * inst.eta**2)

    def test_g_at_published_sphere_point(self, sphere):
        assert abs(g_value(sphere, SPHERE_Z)) <= 1e-6

    def test_pi_values(self):
        inst = simple(2)
        assert pi_value(inst, PrimalPoint([1.0, 0.0], [1.0, 0.0])) == 0.0
        assert pi_value(inst, PrimalPoint([1.0, 0.0], [0.0, 1.0])) == pytest.approx(1.0)

    def test_lagrangian_without_multipliers(self, sphere):
        x = PrimalPoint(np.array([1.0, 2.0, 3.0]), np.array([0.5, -1.0, 2.0]))
        assert lagrangian(sphere, x, 0.0, 0.0) == pi_value(sphere, x)

    def test_lagrangian_at_published_minimizer(self, sphere):
        x = PrimalPoint(np.array(SPHERE_Y), np.array(SPHERE_Z))
        lam, mu, _ = SPHERE_DUAL
        assert lagrangian(sphere, x, lam, mu) == pytest.approx(pi_value(sphere, x), abs=1e-6)

    def test_lambda_op(self, symmetric):
        assert lambda_op(symmetric, symmetric.c) == 0.0
        assert lambda_op(symmetric, [1.0, math.sqrt(2)]) == pytest.approx(1.0)

    def test_lambda_op_matches_canonical_relation(self, sphere):
        # xi = DV*(sig) = sig/alpha + eta at the published dual point.
        sig = SPHERE_DUAL[2]
        assert lambda_op(sphere, SPHERE_Z) == pytest.approx(sig / sphere.alpha + sphere.eta, abs=1e-6)


class TestCanonicalFunctions:
    def test_values_at_reference_points(self, sphere):
        assert v_value(sphere, sphere.eta) == 0.0
        assert dv(sphere, sphere.eta) == 0.0
        assert v_star(sphere, 0.0) == 0.0
        assert dv_star(sphere, 0.0) == sphere.eta

    def test_domain_errors_carry_value(self, sphere):
        with pytest.raises(DomainError) as info:
            v_value(sphere, -0.5)
        assert info.value.value == -0.5
        with pytest.raises(DomainError):
            dv(sphere, -1e-9)
        bad = -sphere.alpha * sphere.eta - 1e-6
        with pytest.raises(DomainError) as info:
            v_star(sphere, bad)
        assert info.value.value == bad
        with pytest.raises(DomainError):
            dv_star(sphere, bad)

    def test_domain_boundaries_allowed(self, sphere):
        v_value(sphere, 0.0)
        v_star(sphere, -sphere.alpha * sphere.eta)


instance_params = st.fixed_dictionaries(
    {
        "alpha": st.floats(0.1, 10.0),
        "eta": st.floats(0.1, 10.0),
    }
)


@settings(max_examples=200, deadline=None)
@given(params=instance_params, xi=st.floats(0.0, 50.0))
def test_fenchel_young_equality(params, xi):
    inst = simple(**params)
    sig = dv(inst, xi)
    assert abs(v_value(inst, xi) + v_star(inst, sig) - xi * sig) <= 1e-12 * max(1.0, xi * abs(sig))


@settings(max_examples=200, deadline=None)
@given(params=instance_params, xi=st.floats(0.0, 50.0))
def test_conjugate_inverts_duality_map(params, xi):
    inst = simple(**params)
    assert dv_star(inst, dv(inst, xi)) == pytest.approx(xi, abs=1e-12 * max(1.0, xi))


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_g_splits_into_canonical_part_and_linear_part(seed):
    rng = np.random.default_rng(seed)
    inst = simple(3, alpha=rng.uniform(0.1, 5), eta=rng.uniform(0.1, 5), f=rng.normal(size=3), c=rng.normal(size=3))
    z = rng.normal(scale=3, size=3)
    expected = w_value(inst, z) - inst.f @ (z - inst.c)
    assert g_value(inst, z) == pytest.approx(expected, abs=1e-10)


@pytest.mark.parametrize("name", sorted(EXAMPLES))
def test_lagrangian_equals_objective_on_surfaces(name):
    inst = EXAMPLES[name]()
    ys = sample_surface_y(inst, None, 8).points
    zs = sample_surface_z(inst, 8).points
    rng = np.random.default_rng(3)
    for y, z in zip(ys, zs[rng.permutation(len(zs))]):
        x = PrimalPoint(y, z)
        lam, mu = rng.normal(size=2) * 5
        assert lagrangian(inst, x, lam, mu) == pytest.approx(pi_value(inst, x), abs=1e-8)


def _central_gradient(fun, p, h=1e-6):
    out = np.empty_like(p)
    for i in range(len(p)):
        e = np.zeros_like(p)
        e[i] = h
        out[i] = (fun(p + e) - fun(p - e)) / (2 * h)
    return out


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_constraint_gradients_match_finite_differences(seed):
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(3, 3))
    inst = simple(3, A=M @ M.T + np.eye(3), f=rng.normal(size=3), c=rng.normal(size=3))
    p = rng.normal(scale=2, size=3)
    for fun, grad in ((h_value, grad_h), (g_value, grad_g)):
        fd = _central_gradient(lambda q: fun(inst, q), p)
        exact = grad(inst, p)
        assert np.linalg.norm(fd - exact) <= 1e-5 * max(1.0, np.linalg.norm(exact))


class TestSeparation:
    def test_analytic_condition_holds(self):
        # (0.5 - 1)^2 / 2 = 0.125 > |f| = 0.1
        inst = simple(3, r=1.0, eta=1.0, f=[0.1, 0.0, 0.0])
        assert analytic_separation(inst) is True
        assert check_separation(inst).status == "analytically certified"

    def test_analytic_condition_fails_at_boundary(self):
        inst = simple(3, r=1.0, eta=1.0, f=[0.125, 0.0, 0.0])
        assert analytic_separation(inst) is False
        assert check_separation(inst).status != "analytically certified"

    def test_not_applicable_off_center(self, symmetric):
        rep = check_separation(symmetric)
        assert rep.analytic is None
        assert rep.status == "numerically plausible"
        assert rep.min_h_on_z > 0

    def test_small_eigenvalues_shrink_the_certified_region(self):
        # A = I/4 doubles the ellipsoid's reach, which then crosses Z.
        inst = simple(3, A=0.25 * np.eye(3), r=1.0, eta=1.0, f=[0.1, 0.0, 0.0])
        assert analytic_separation(inst) is False
        assert check_separation(inst).status == "violated"

    def test_no_samples_is_undetermined(self, monkeypatch, symmetric):
        import surfdist.oracle as oracle

        empty = oracle.SurfaceSample(np.zeros((0, 2)), 0.0, 0)
        monkeypatch.setattr(oracle, "sample_surface_z", lambda *a, **k: empty)
        rep = check_separation(symmetric)
        assert rep.status == "undetermined"
        assert not rep.ok

    @pytest.mark.parametrize("name", ["sphere", "ellipsoid"])
    def test_worked_instances_separate(self, name):
        assert check_separation(EXAMPLES[name]()).ok
