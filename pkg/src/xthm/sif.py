"""Stress intensity factors and the maximum-hoop-stress growth criterion.

K_I and K_II are extracted with the interaction-integral method in its
equivalent-domain form: a plateau weight q (1 inside r1, linear to 0 at r2)
turns the contour integral into an annulus integral evaluated on element
quadrature.  The actual-state energy pairing uses the mechanical stress
(thermal strain removed), and a thermal-gradient domain term restores path
independence for non-isothermal states.  A circular-path J-integral (256
sample points, basis-function interpolation) serves as an independent
cross-check through J = (K_I^2 + K_II^2) / E'.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from xthm.errors import IntegrationDomainError, InvalidArgumentError
from xthm.levelset import CrackGeometry
from xthm.materials import PLANE_STRAIN, PLANE_STRESS

VOIGT_ID = np.array([1.0, 1.0, 0.0])


@dataclass(frozen=True)
class TipFrame:
    """Local crack-tip frame: x' along the crack pointing out of the material."""

    tip: np.ndarray
    xhat: np.ndarray
    yhat: np.ndarray
    a: float  # current crack length

    @classmethod
    def from_crack(cls, crack: CrackGeometry, tip_index: int) -> "TipFrame":
        v = crack.vertices
        if tip_index == 1:
            tip, prev = v[-1], v[-2]
        elif tip_index == 0:
            tip, prev = v[0], v[1]
        else:
            raise InvalidArgumentError("tip_index must be 0 or 1")
        xhat = tip - prev
        xhat = xhat / np.hypot(*xhat)
        yhat = np.array([-xhat[1], xhat[0]])
        return cls(tip=tip.copy(), xhat=xhat, yhat=yhat, a=crack.length)

    @property
    def rotation(self) -> np.ndarray:
        """Columns are the local axes expressed in global coordinates."""
        return np.column_stack([self.xhat, self.yhat])

    def to_local(self, pts: np.ndarray) -> np.ndarray:
        return (np.atleast_2d(pts) - self.tip) @ self.rotation


@dataclass(frozen=True)
class SifResult:
    K_I: float
    K_II: float
    J: float  # independent circular-path evaluation
    F_I: float | None = None


def _kappa(nu: float, plane: str) -> float:
    return 3.0 - 4.0 * nu if plane == PLANE_STRAIN else (3.0 - nu) / (1.0 + nu)


def eprime(E: float, nu: float, plane: str) -> float:
    return E / (1.0 - nu * nu) if plane == PLANE_STRAIN else E


def auxiliary_fields(r, theta, mode: str, Eprime: float, nu: float, plane: str = PLANE_STRAIN):
    """Westergaard near-tip fields for unit K of the requested mode.

    Returns (stress Voigt (..., 3), displacement gradient (..., 2, 2)) in the
    tip frame.  r = 0 is singular.
    """
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if np.any(r <= 0.0):
        raise InvalidArgumentError("auxiliary fields are singular at r = 0")
    E = Eprime * (1.0 - nu * nu) if plane == PLANE_STRAIN else Eprime
    G = E / (2.0 * (1.0 + nu))
    kap = _kappa(nu, plane)
    f = 1.0 / np.sqrt(2.0 * np.pi * r)
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    c3, s3 = np.cos(3.0 * theta / 2.0), np.sin(3.0 * theta / 2.0)
    ct, st = np.cos(theta), np.sin(theta)

    if mode == "I":
        sxx = f * c * (1.0 - s * s3)
        syy = f * c * (1.0 + s * s3)
        sxy = f * s * c * c3
        gx = c * (kap - ct)
        gy = s * (kap - ct)
        dgx = -0.5 * s * (kap - ct) + c * st
        dgy = 0.5 * c * (kap - ct) + s * st
    elif mode == "II":
        sxx = -f * s * (2.0 + c * c3)
        syy = f * s * c * c3
        sxy = f * c * (1.0 - s * s3)
        gx = s * (kap + 2.0 + ct)
        gy = -c * (kap - 2.0 + ct)
        dgx = 0.5 * c * (kap + 2.0 + ct) - s * st
        dgy = 0.5 * s * (kap - 2.0 + ct) + c * st
    else:
        raise InvalidArgumentError(f"mode must be 'I' or 'II', got {mode!r}")

    # u = C sqrt(r) g(theta), C = 1/(2G sqrt(2 pi))
    C = 1.0 / (2.0 * G * np.sqrt(2.0 * np.pi))
    dudx_x = C / np.sqrt(r) * (0.5 * gx * ct - dgx * st)
    dudy_x = C / np.sqrt(r) * (0.5 * gx * st + dgx * ct)
    dudx_y = C / np.sqrt(r) * (0.5 * gy * ct - dgy * st)
    dudy_y = C / np.sqrt(r) * (0.5 * gy * st + dgy * ct)
    stress = np.stack([sxx, syy, sxy], axis=-1)
    grad = np.stack(
        [np.stack([dudx_x, dudy_x], axis=-1), np.stack([dudx_y, dudy_y], axis=-1)], axis=-2
    )
    return stress, grad


def _plateau(r, r1, r2):
    q = np.clip((r2 - r) / (r2 - r1), 0.0, 1.0)
    dqdr = np.where((r > r1) & (r < r2), -1.0 / (r2 - r1), 0.0)
    return q, dqdr


def interaction_integral(
    model,
    X: np.ndarray,
    tip: TipFrame,
    mode: str,
    r1: float,
    r2: float,
    include_thermal_term: bool = True,
) -> float:
    """Equivalent-domain interaction integral I^(1+2) for unit auxiliary K."""
    if not 0.0 < r1 < r2:
        raise InvalidArgumentError("need 0 < r1 < r2")
    mesh = model.mesh
    lo, hi = mesh.coords.min(axis=0), mesh.coords.max(axis=0)
    margin = 1e-12 * float(np.max(hi - lo))
    if np.any(tip.tip - r2 < lo - margin) or np.any(tip.tip + r2 > hi + margin):
        raise IntegrationDomainError(
            f"integration radius {r2:g} at tip {tip.tip.tolist()} exceeds the mesh bounds"
        )
    tip_mat = model.materials[int(mesh.material_ids[_tip_element(model, tip)])]
    plane = tip_mat.mode
    Ep = eprime(tip_mat.E, tip_mat.nu, plane)
    R = tip.rotation

    centers = mesh.coords[mesh.elements].mean(axis=1)
    rad = np.hypot(*(centers - tip.tip).T)
    diam = np.sqrt(mesh.element_areas())
    cand = np.flatnonzero(rad <= r2 + diam)

    total = 0.0
    for e in cand:
        xg, detJw, phi, grad, nodes, kinds, m = model.element_data(int(e))
        loc = (xg - tip.tip) @ R
        r = np.hypot(loc[:, 0], loc[:, 1])
        if np.all(r >= r2):
            continue
        theta = np.arctan2(loc[:, 1], loc[:, 0])
        q, dqdr = _plateau(r, r1, r2)
        mask = r > 1e-12 * r2

        ux = X[model._entry_dofs(nodes, kinds, "ux")]
        uy = X[model._entry_dofs(nodes, kinds, "uy")]
        gux = grad.transpose(0, 2, 1) @ ux  # (g, 2): d(ux)/dx_j
        guy = grad.transpose(0, 2, 1) @ uy
        gu = np.stack([gux, guy], axis=1)  # (g, 2, 2): du_i/dx_j global
        gu_loc = np.einsum("ki,gkl,lj->gij", R, gu, R)
        eps = np.stack(
            [gu[:, 0, 0], gu[:, 1, 1], gu[:, 0, 1] + gu[:, 1, 0]], axis=-1
        )
        theta_T = np.zeros(len(xg))
        if model.has_T:
            theta_T = phi @ X[model._entry_dofs(nodes, kinds, "T")] - model.T0
        elif model.uniform_delta_T:
            theta_T = np.full(len(xg), model.uniform_delta_T)
        sig = eps @ m.D.T - (m.beta_s * m.Kt) * theta_T[:, None] * VOIGT_ID
        # rotate stress to the tip frame
        sig_t = _voigt_rotate(sig, R)

        saux, gaux = auxiliary_fields(np.where(mask, r, 1.0), theta, mode, Ep, tip_mat.nu, plane)
        eaux = np.stack(
            [gaux[:, 0, 0], gaux[:, 1, 1], gaux[:, 0, 1] + gaux[:, 1, 0]], axis=-1
        )
        # Voigt contraction with engineering shear in the third slot
        W = sig_t[:, 0] * eaux[:, 0] + sig_t[:, 1] * eaux[:, 1] + sig_t[:, 2] * eaux[:, 2]

        gradq = np.zeros((len(xg), 2))
        rr = np.where(mask, r, 1.0)
        gradq[:, 0] = dqdr * loc[:, 0] / rr
        gradq[:, 1] = dqdr * loc[:, 1] / rr

        du1 = gu_loc[:, :, 0]  # du_i/dx1' actual, local (g, 2)
        daux1 = gaux[:, :, 0]
        s_act = _voigt_to_mat(sig_t)
        s_aux = _voigt_to_mat(saux)
        t1 = np.einsum("gij,gi->gj", s_act, daux1)
        t2 = np.einsum("gij,gi->gj", s_aux, du1)
        integrand = np.einsum("gj,gj->g", t1 + t2, gradq) - W * gradq[:, 0]
        if include_thermal_term and model.has_T:
            from xthm.materials import thermal_strain_coeff

            gT = grad.transpose(0, 2, 1) @ X[model._entry_dofs(nodes, kinds, "T")]
            gT1 = gT @ tip.xhat
            integrand = integrand + thermal_strain_coeff(m) * (saux[:, 0] + saux[:, 1]) * gT1 * q
        total += float(np.sum(integrand * detJw * mask))
    return total


def _tip_element(model, tip: TipFrame) -> int:
    probe = tip.tip - 1e-8 * max(1.0, tip.a) * tip.xhat
    e, _ = model.mesh.locate(probe)
    return e


def _voigt_rotate(sig: np.ndarray, R: np.ndarray) -> np.ndarray:
    S = _voigt_to_mat(sig)
    St = np.einsum("ki,gkl,lj->gij", R, S, R)
    return np.stack([St[:, 0, 0], St[:, 1, 1], St[:, 0, 1]], axis=-1)


def _voigt_to_mat(sig: np.ndarray) -> np.ndarray:
    S = np.zeros(sig.shape[:-1] + (2, 2))
    S[..., 0, 0] = sig[..., 0]
    S[..., 1, 1] = sig[..., 1]
    S[..., 0, 1] = sig[..., 2]
    S[..., 1, 0] = sig[..., 2]
    return S


def sifs_from_interaction(I_modeI: float, I_modeII: float, Eprime: float) -> tuple[float, float]:
    """K_I = E' I_I / 2, K_II = E' I_II / 2 (unit auxiliary intensities)."""
    return 0.5 * Eprime * I_modeI, 0.5 * Eprime * I_modeII


def normalized_sif(K_I: float, E: float, nu: float, alpha_T: float, theta0: float, a: float) -> float:
    """F_I = K_I / ((E/(1-nu)) alpha_T theta0 sqrt(pi a)); alpha_T is the linear CTE."""
    if a <= 0.0:
        raise InvalidArgumentError("crack length must be positive")
    denom = (E / (1.0 - nu)) * alpha_T * theta0 * np.sqrt(np.pi * a)
    if denom == 0.0:
        raise InvalidArgumentError("normalization denominator is zero")
    return float(K_I / denom)


def hoop_stress(K_I: float, K_II: float, r: float, theta: float) -> float:
    c = np.cos(theta / 2.0)
    return (
        1.0
        / np.sqrt(2.0 * np.pi * r)
        * c
        * (K_I * c * c - 1.5 * K_II * np.sin(theta))
    )


def kink_angle(K_I: float, K_II: float) -> float:
    """Maximum-hoop-stress direction; 0 for pure mode I, sign opposite K_II."""
    if K_II == 0.0:
        return 0.0
    return 2.0 * np.arctan((K_I - np.sqrt(K_I**2 + 8.0 * K_II**2)) / (4.0 * K_II))


def hoop_growth_check(
    K_I: float, K_II: float, f_t: float, r_eval: float
) -> tuple[bool, float]:
    """(grow, kink angle): growth when the max hoop stress at r_eval exceeds f_t."""
    angle = kink_angle(K_I, K_II)
    return bool(hoop_stress(K_I, K_II, r_eval, angle) >= f_t), float(angle)


def tip_sifs(
    model,
    X: np.ndarray,
    crack_id: int,
    tip_index: int,
    r1: float | None = None,
    r2: float | None = None,
    include_thermal_term: bool = True,
    with_j: bool = True,
) -> SifResult:
    """Mixed-mode SIFs at one crack tip (domain interaction integral).

    Default annulus radii are 4 and 8 local element sizes: with
    Heaviside-only enrichment the crack profile closes linearly over the
    tip element, and annuli tighter than ~3 h sample that deficient zone
    (K_I comes out several percent low).  J is the independent
    circular-path evaluation at the annulus midpoint.
    """
    crack = model.cracks[crack_id]
    tip = TipFrame.from_crack(crack, tip_index)
    e_tip = _tip_element(model, tip)
    h = model.mesh.element_size(e_tip)
    r1 = r1 if r1 is not None else 4.0 * h
    r2 = r2 if r2 is not None else 8.0 * h
    m = model.materials[int(model.mesh.material_ids[e_tip])]
    Ep = eprime(m.E, m.nu, m.mode)
    I1 = interaction_integral(model, X, tip, "I", r1, r2, include_thermal_term)
    I2 = interaction_integral(model, X, tip, "II", r1, r2, include_thermal_term)
    K_I, K_II = sifs_from_interaction(I1, I2, Ep)
    J = j_integral_domain(model, X, tip, r1, r2) if with_j else (K_I**2 + K_II**2) / Ep
    return SifResult(K_I=K_I, K_II=K_II, J=J)


def j_integral_domain(
    model, X: np.ndarray, tip: TipFrame, r1: float, r2: float
) -> float:
    """Equivalent-domain J-integral with the plateau weight.

    J = int_A [sigma_ij u_{i,1} q_{,j} - w_mec q_{,1}] dA + thermal area
    term; w_mec pairs the stress with the mechanical strain including the
    out-of-plane sigma_zz eps_zz^T contribution in plane strain.
    """
    from xthm.materials import thermal_strain_coeff

    mesh = model.mesh
    R = tip.rotation
    centers = mesh.coords[mesh.elements].mean(axis=1)
    rad = np.hypot(*(centers - tip.tip).T)
    diam = np.sqrt(mesh.element_areas())
    total = 0.0
    for e in np.flatnonzero(rad <= r2 + diam):
        xg, detJw, phi, grad, nodes, kinds, m = model.element_data(int(e))
        loc = (xg - tip.tip) @ R
        r = np.hypot(loc[:, 0], loc[:, 1])
        if np.all(r >= r2):
            continue
        q, dqdr = _plateau(r, r1, r2)
        mask = r > 1e-12 * r2
        rr = np.where(mask, r, 1.0)
        gradq = np.stack([dqdr * loc[:, 0] / rr, dqdr * loc[:, 1] / rr], axis=-1)

        ux = X[model._entry_dofs(nodes, kinds, "ux")]
        uy = X[model._entry_dofs(nodes, kinds, "uy")]
        gu = np.stack([grad.transpose(0, 2, 1) @ ux, grad.transpose(0, 2, 1) @ uy], axis=1)
        gu_loc = np.einsum("ki,gkl,lj->gij", R, gu, R)
        eps = np.stack([gu[:, 0, 0], gu[:, 1, 1], gu[:, 0, 1] + gu[:, 1, 0]], axis=-1)
        theta_T = np.zeros(len(xg))
        if model.has_T:
            theta_T = phi @ X[model._entry_dofs(nodes, kinds, "T")] - model.T0
        elif model.uniform_delta_T:
            theta_T = np.full(len(xg), model.uniform_delta_T)
        sig = eps @ m.D.T - (m.beta_s * m.Kt) * theta_T[:, None] * VOIGT_ID
        sig_t = _voigt_rotate(sig, R)
        a_T = thermal_strain_coeff(m)
        a_lin = m.beta_s / 3.0
        eps_loc = np.stack(
            [gu_loc[:, 0, 0], gu_loc[:, 1, 1], gu_loc[:, 0, 1] + gu_loc[:, 1, 0]], axis=-1
        )
        em = eps_loc - a_T * theta_T[:, None] * VOIGT_ID
        w = 0.5 * (
            sig_t[:, 0] * em[:, 0] + sig_t[:, 1] * em[:, 1] + sig_t[:, 2] * em[:, 2]
        )
        tr3 = sig[:, 0] + sig[:, 1]
        if m.mode == PLANE_STRAIN:
            szz = m.nu * (sig[:, 0] + sig[:, 1]) - m.E * a_lin * theta_T
            w = w + 0.5 * szz * (-a_lin * theta_T)
            tr3 = tr3 + szz
        du1 = gu_loc[:, :, 0]
        S = _voigt_to_mat(sig_t)
        t1 = np.einsum("gij,gi->gj", S, du1)
        integrand = np.einsum("gj,gj->g", t1, gradq) - w * gradq[:, 0]
        if model.has_T:
            gT = grad.transpose(0, 2, 1) @ X[model._entry_dofs(nodes, kinds, "T")]
            gT1 = gT @ tip.xhat
            integrand = integrand + a_lin * tr3 * gT1 * q
        total += float(np.sum(integrand * detJw * mask))
    return total


def j_integral_circular(model, X: np.ndarray, tip: TipFrame, radius: float, n_points: int = 256) -> float:
    """Circular-path J-integral cross-check with basis-function field sampling."""
    theta = (np.arange(n_points) + 0.5) / n_points * 2.0 * np.pi - np.pi
    # skip points in the immediate crack wake to avoid sampling across the faces
    pts = tip.tip + radius * (
        np.outer(np.cos(theta), tip.xhat) + np.outer(np.sin(theta), tip.yhat)
    )
    fields = model.sample_fields(X, pts)
    R = tip.rotation
    sig_t = _voigt_rotate(fields["sigma"], R)
    gu_loc = np.einsum("ki,gkl,lj->gij", R, fields["grad_u"], R)
    theta_T = fields["T"] - model.T0 if model.has_T else np.full(n_points, model.uniform_delta_T)
    m = model.materials[int(model.mesh.material_ids[_tip_element(model, tip)])]
    from xthm.materials import thermal_strain_coeff

    a_T = thermal_strain_coeff(m)
    eps_loc = np.stack(
        [gu_loc[:, 0, 0], gu_loc[:, 1, 1], gu_loc[:, 0, 1] + gu_loc[:, 1, 0]], axis=-1
    )
    eps_mech = eps_loc - a_T * theta_T[:, None] * VOIGT_ID
    w_mec = 0.5 * (
        sig_t[:, 0] * eps_mech[:, 0] + sig_t[:, 1] * eps_mech[:, 1] + sig_t[:, 2] * eps_mech[:, 2]
    )
    nrm = np.column_stack([np.cos(theta), np.sin(theta)])  # outward normal, local frame
    S = _voigt_to_mat(sig_t)
    traction = np.einsum("gij,gj->gi", S, nrm)
    du1 = gu_loc[:, :, 0]
    integrand = w_mec * nrm[:, 0] - np.einsum("gi,gi->g", traction, du1)
    J = float(integrand.sum() * (2.0 * np.pi * radius / n_points))
    if model.has_T:
        J += _thermal_disk_term(model, X, tip, radius, a_T)
    return J


def _thermal_disk_term(model, X, tip: TipFrame, radius: float, a_T_unused: float) -> float:
    """Area term restoring path independence of J for non-uniform temperature.

    Elements straddling the disk boundary are re-integrated with a dense
    rule so the sharp radial cutoff does not pollute the 5% J-vs-K check.
    """
    from xthm.materials import thermal_strain_coeff
    from xthm.mesh import gauss_rule

    mesh = model.mesh
    centers = mesh.coords[mesh.elements].mean(axis=1)
    rad = np.hypot(*(centers - tip.tip).T)
    diam = np.sqrt(mesh.element_areas())
    dense = gauss_rule(10)
    total = 0.0
    for e in np.flatnonzero(rad <= radius + diam):
        xg, detJw, phi, grad, nodes, kinds, m = model.element_data(int(e))
        straddles = abs(rad[e] - radius) < diam[e]
        if straddles and len(nodes) == 4 and len(xg) < len(dense.weights):
            xg, detJw, phi, grad = _dense_element_quadrature(model, int(e), dense)
        loc = (xg - tip.tip) @ tip.rotation
        r = np.hypot(loc[:, 0], loc[:, 1])
        inside = r < radius
        if not np.any(inside):
            continue
        ux = X[model._entry_dofs(nodes, kinds, "ux")]
        uy = X[model._entry_dofs(nodes, kinds, "uy")]
        exx = grad[..., 0] @ ux
        eyy = grad[..., 1] @ uy
        gxy = grad[..., 1] @ ux + grad[..., 0] @ uy
        eps = np.stack([exx, eyy, gxy], axis=-1)
        theta_T = phi @ X[model._entry_dofs(nodes, kinds, "T")] - model.T0
        sig = eps @ m.D.T - (m.beta_s * m.Kt) * theta_T[:, None] * VOIGT_ID
        gT = grad.transpose(0, 2, 1) @ X[model._entry_dofs(nodes, kinds, "T")]
        gT1 = gT @ tip.xhat
        total += float(
            np.sum(thermal_strain_coeff(m) * (sig[:, 0] + sig[:, 1]) * gT1 * detJw * inside)
        )
    return total


def _dense_element_quadrature(model, e: int, rule):
    """Quadrature bundle at a dense rule for one element (standard basis only).

    Only used for elements without enriched basis entries; cut elements
    already carry the high-order rule.
    """
    from xthm.mesh import shape_eval_many

    mesh = model.mesh
    N, dN = shape_eval_many(rule.points)
    xy = mesh.coords[mesh.elements[e]]
    J = np.einsum("ni,gnj->gij", xy, dN)
    detJ = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
    Jinv = np.empty_like(J)
    Jinv[:, 0, 0] = J[:, 1, 1]
    Jinv[:, 1, 1] = J[:, 0, 0]
    Jinv[:, 0, 1] = -J[:, 0, 1]
    Jinv[:, 1, 0] = -J[:, 1, 0]
    Jinv /= detJ[:, None, None]
    dNdx = np.einsum("gnj,gji->gni", dN, Jinv)
    return N @ xy, detJ * rule.weights, N, dNdx
