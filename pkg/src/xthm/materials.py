"""Material containers and constitutive evaluations.

Sign convention (used by every coupling term in the package): stress is
tension-positive, pore pressure is the fluid pressure, and the total
stress is sigma = sigma' + alpha * p * I with sigma' = D eps - beta_s K_t
(T - T0) I.  All quantities are strict SI; unit conversion happens in the
config layer only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from xthm.errors import InvalidArgumentError

VOIGT_ID = np.array([1.0, 1.0, 0.0])  # identity in 2D Voigt order (xx, yy, xy)

PLANE_STRAIN = "plane_strain"
PLANE_STRESS = "plane_stress"


@dataclass(frozen=True)
class SolidProps:
    """Solid-skeleton properties.

    beta_s is the volumetric thermal expansion coefficient; f_t and G_f
    (tensile strength, fracture energy) are optional and only used by the
    crack-growth criterion.
    """

    E: float
    nu: float
    rho_s: float = 0.0
    Ks: float = 1e30
    beta_s: float = 0.0
    lambda_s: float = 0.0
    C_s: float = 0.0
    f_t: float | None = None
    G_f: float | None = None

    def __post_init__(self):
        if self.E <= 0:
            raise InvalidArgumentError("Young's modulus must be positive")
        if not -1.0 < self.nu < 0.5:
            raise InvalidArgumentError("Poisson's ratio must lie in (-1, 0.5)")
        if self.Ks <= 0:
            raise InvalidArgumentError("solid bulk modulus must be positive")


@dataclass(frozen=True)
class FluidProps:
    rho_f: float
    Kf: float
    mu_f: float
    beta_f: float = 0.0
    lambda_f: float = 0.0
    C_f: float = 0.0

    def __post_init__(self):
        for name in ("rho_f", "Kf", "mu_f"):
            if getattr(self, name) <= 0:
                raise InvalidArgumentError(f"{name} must be positive")


@dataclass(frozen=True)
class MixtureProps:
    """Derived poro-thermo-elastic coefficients of the mixture."""

    alpha: float
    inv_Qt: float
    beta_t: float
    rho: float
    rhoC_eff: float
    lambda_eff: float
    k_f: float
    n: float
    mode: str
    D: np.ndarray
    Kt: float
    E: float
    nu: float
    beta_s: float
    solid: SolidProps
    fluid: FluidProps | None

    def __post_init__(self):
        self.D.setflags(write=False)


def elasticity_matrix(E: float, nu: float, mode: str) -> np.ndarray:
    """Plane-strain or plane-stress Hooke matrix in Voigt order (xx, yy, xy)."""
    if mode == PLANE_STRAIN:
        c = E / ((1.0 + nu) * (1.0 - 2.0 * nu))
        return c * np.array(
            [[1.0 - nu, nu, 0.0], [nu, 1.0 - nu, 0.0], [0.0, 0.0, 0.5 * (1.0 - 2.0 * nu)]]
        )
    if mode == PLANE_STRESS:
        c = E / (1.0 - nu * nu)
        return c * np.array([[1.0, nu, 0.0], [nu, 1.0, 0.0], [0.0, 0.0, 0.5 * (1.0 - nu)]])
    raise InvalidArgumentError(f"unknown analysis mode {mode!r}")


def derive_mixture(
    solid: SolidProps,
    fluid: FluidProps | None,
    n: float,
    k_f: float,
    mode: str = PLANE_STRAIN,
) -> MixtureProps:
    """Mixture coefficients from phase properties.

    alpha = 1 - K_t/K_s with K_t = E/(3(1-2nu)); 1/Q_t = (alpha-n)/K_s + n/K_f;
    beta_t = (alpha-n) beta_s + n beta_f; volume-weighted density, heat
    capacity and conductivity.
    """
    if fluid is not None and not 0.0 < n < 1.0:
        raise InvalidArgumentError("porosity must lie in (0, 1)")
    Kt = solid.E / (3.0 * (1.0 - 2.0 * solid.nu))
    alpha = 1.0 - Kt / solid.Ks
    if fluid is None:
        return MixtureProps(
            alpha=0.0,
            inv_Qt=0.0,
            beta_t=0.0,
            rho=solid.rho_s,
            rhoC_eff=solid.rho_s * solid.C_s,
            lambda_eff=solid.lambda_s,
            k_f=0.0,
            n=0.0,
            mode=mode,
            D=elasticity_matrix(solid.E, solid.nu, mode),
            Kt=Kt,
            E=solid.E,
            nu=solid.nu,
            beta_s=solid.beta_s,
            solid=solid,
            fluid=None,
        )
    return MixtureProps(
        alpha=alpha,
        inv_Qt=(alpha - n) / solid.Ks + n / fluid.Kf,
        beta_t=(alpha - n) * solid.beta_s + n * fluid.beta_f,
        rho=(1.0 - n) * solid.rho_s + n * fluid.rho_f,
        rhoC_eff=(1.0 - n) * solid.rho_s * solid.C_s + n * fluid.rho_f * fluid.C_f,
        lambda_eff=(1.0 - n) * solid.lambda_s + n * fluid.lambda_f,
        k_f=k_f,
        n=n,
        mode=mode,
        D=elasticity_matrix(solid.E, solid.nu, mode),
        Kt=Kt,
        E=solid.E,
        nu=solid.nu,
        beta_s=solid.beta_s,
        solid=solid,
        fluid=fluid,
    )


def solid_mixture(solid: SolidProps, mode: str = PLANE_STRAIN) -> MixtureProps:
    """Mixture record for a dry solid (no pore fluid, porosity 0)."""
    return derive_mixture(solid, None, 0.0, 0.0, mode)


def effective_stress(props: MixtureProps, strain, T: float, T0: float) -> np.ndarray:
    """sigma' = D eps - beta_s K_t (T - T0) m in Voigt form."""
    strain = np.asarray(strain, dtype=float)
    return props.D @ strain - props.beta_s * props.Kt * (T - T0) * VOIGT_ID


def total_stress(sigma_eff, p: float, alpha: float) -> np.ndarray:
    """sigma = sigma' + alpha p m (see the module-level sign convention)."""
    return np.asarray(sigma_eff, dtype=float) + alpha * p * VOIGT_ID


def thermal_strain_coeff(props: MixtureProps) -> float:
    """In-plane thermal strain per unit temperature, consistent with D.

    Solves D (a, a, 0) = beta_s K_t (1, 1, 0): a = beta_s (1+nu)/3 in plane
    strain, beta_s (1-nu)/(3 (1-2 nu)) in plane stress.
    """
    if props.mode == PLANE_STRAIN:
        return props.beta_s * (1.0 + props.nu) / 3.0
    return props.beta_s * (1.0 - props.nu) / (3.0 * (1.0 - 2.0 * props.nu))


def darcy_velocity(props: MixtureProps, grad_p, body_force=(0.0, 0.0)) -> np.ndarray:
    """w_dot = (k_f / mu_f) (-grad p + rho_f b)."""
    if props.fluid is None:
        return np.zeros(2)
    grad_p = np.asarray(grad_p, dtype=float)
    b = np.asarray(body_force, dtype=float)
    return (props.k_f / props.fluid.mu_f) * (-grad_p + props.fluid.rho_f * b)
