import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xthm.errors import InvalidArgumentError
from xthm.materials import (
    PLANE_STRAIN,
    PLANE_STRESS,
    FluidProps,
    SolidProps,
    darcy_velocity,
    derive_mixture,
    effective_stress,
    elasticity_matrix,
    solid_mixture,
    total_stress,
)

SOLID = SolidProps(
    E=1.6e9, nu=0.33, rho_s=2000.0, Ks=1e20, beta_s=6.6e-6, lambda_s=2.88, C_s=1170.0
)
FLUID = FluidProps(rho_f=1000.0, Kf=2e9, mu_f=2e-3, beta_f=0.0, lambda_f=0.6, C_f=4200.0)


def test_mixture_density():
    mix = derive_mixture(SOLID, FLUID, 0.3, 1e-12)
    assert mix.rho == pytest.approx(1700.0)


def test_mixture_conductivity():
    mix = derive_mixture(SOLID, FLUID, 0.3, 1e-12)
    assert mix.lambda_eff == pytest.approx(2.196)
    assert min(2.88, 0.6) <= mix.lambda_eff <= max(2.88, 0.6)


def test_biot_near_one_for_stiff_grains():
    solid = SolidProps(E=9e9, nu=0.4, Ks=1e20)
    mix = derive_mixture(solid, FLUID, 0.3, 1e-12)
    assert mix.alpha == pytest.approx(1.0, abs=1e-6)


def test_porosity_range():
    with pytest.raises(InvalidArgumentError):
        derive_mixture(SOLID, FLUID, 0.0, 1e-12)
    with pytest.raises(InvalidArgumentError):
        derive_mixture(SOLID, FLUID, 1.2, 1e-12)


def test_effective_stress_zero():
    mix = solid_mixture(SOLID)
    assert np.allclose(effective_stress(mix, [0, 0, 0], 20.0, 20.0), 0.0)


def test_effective_stress_thermal_term():
    mix = solid_mixture(SOLID)
    sig = effective_stress(mix, [0, 0, 0], 30.0, 20.0)
    expected = -10.0 * SOLID.beta_s * mix.Kt
    assert sig[0] == pytest.approx(expected)
    assert sig[1] == pytest.approx(expected)
    assert sig[2] == 0.0


def test_effective_stress_hooke():
    solid = SolidProps(E=9e9, nu=0.3)
    mix = solid_mixture(solid, PLANE_STRAIN)
    sig = effective_stress(mix, [1e-4, 0, 0], 0.0, 0.0)
    D11 = 9e9 * (1 - 0.3) / ((1 + 0.3) * (1 - 2 * 0.3))
    assert sig[0] == pytest.approx(D11 * 1e-4)


def test_total_stress_convention():
    sig = total_stress([0.0, 0.0, 0.0], 1e6, 1.0)
    assert np.allclose(sig, [1e6, 1e6, 0.0])
    assert np.allclose(total_stress([5.0, 1.0, 2.0], 1e6, 0.0), [5.0, 1.0, 2.0])
    assert np.allclose(total_stress([5.0, 1.0, 2.0], 0.0, 1.0), [5.0, 1.0, 2.0])


def test_darcy_velocity():
    mix = derive_mixture(SOLID, FLUID, 0.3, 1e-12)
    assert np.allclose(darcy_velocity(mix, [0.0, 0.0]), 0.0)
    v = darcy_velocity(mix, [2e3, 0.0])
    assert np.allclose(v, [-1e-6, 0.0])
    g = np.array([0.0, -9.81])
    hydrostatic = FLUID.rho_f * g
    assert np.allclose(darcy_velocity(mix, hydrostatic, g), 0.0, atol=1e-20)


@settings(max_examples=40, deadline=None)
@given(nu=st.floats(-0.9, 0.49))
def test_elasticity_spd(nu):
    for mode in (PLANE_STRAIN, PLANE_STRESS):
        D = elasticity_matrix(1.0, nu, mode)
        assert np.allclose(D, D.T)
        assert np.all(np.linalg.eigvalsh(D) > 0)


def test_mixture_homogeneity_in_conductivity():
    m1 = derive_mixture(SOLID, FLUID, 0.3, 1e-12)
    solid2 = SolidProps(E=SOLID.E, nu=SOLID.nu, lambda_s=3 * SOLID.lambda_s)
    fluid2 = FluidProps(rho_f=1000.0, Kf=2e9, mu_f=2e-3, lambda_f=3 * FLUID.lambda_f)
    m2 = derive_mixture(solid2, fluid2, 0.3, 1e-12)
    assert m2.lambda_eff == pytest.approx(3 * m1.lambda_eff)


def test_solid_limit():
    solid = SolidProps(E=1e9, nu=0.3, rho_s=2500.0, Ks=1e20)
    mix = derive_mixture(solid, FLUID, 1e-6, 1e-12)
    assert mix.alpha == pytest.approx(1.0, rel=1e-4)
    assert mix.inv_Qt == pytest.approx(0.0, abs=1e-12)
    assert mix.rho == pytest.approx(2500.0, rel=1e-4)
