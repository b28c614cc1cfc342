"""Gaussian two-photon spectral amplitude: assembly, evaluation, transforms.

The joint amplitude of a signal/idler pair emitted into the two
counter-propagating guided modes is Gaussian in the detunings
ds = ws - ws0, di = wi - wi0:

    Phi(ws, wi) = C * sqrt(Zp tau_p / (1 + ap^2)) * exp(-phi),
    phi = f2s ds^2 + f2i di^2 + f2si ds di + f1s ds + f1i di + f0.

The quadratic coefficients combine the pump-pulse envelope (tau_p, chirp
ap), the transverse pump profile (Zp) through group-velocity-mismatch
coefficients V_ps/V_pi, Gaussian frequency filters, and small corrections
(the G terms) from the frequency dependence of the transverse mode
overlap. All values are SI; angles are radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .constants import C_LIGHT, EPSILON_0
from .dispersion import (
    DispersionModel,
    WaveguideSpec,
    g_taylor,
    group_velocity,
    index_derivative,
    phase_match_residual,
    pump_wavevector,
    refractive_index,
    solve_phase_matching,
)
from .errors import (
    ExponentOverflow,
    NonNormalizable,
    PhaseMatchViolated,
    TotalInternalReflection,
)

_EXP_GUARD = 700.0       # |exponent| ceiling within double range
_PM_REL_TOL = 1e-6       # allowed phase-matching residual, relative to k_p0


@dataclass(frozen=True)
class PumpSpec:
    """Pump-beam parameters.

    lambda_p0: central vacuum wavelength, m.
    tau_p: pulse duration, s.  a_p: linear chirp, dimensionless.
    z_p / y_p: transverse 1/e amplitude widths along z and y, m.
    theta_p0: central propagation angle from the surface normal, rad.
    dtilde_theta: angular dispersion d(theta_p)/d(omega_p) at the
        central frequency, rad s (rotates the amplitude's axes).
    p_p: average power, W.  f_rep: pulse repetition rate, 1/s.
    """

    lambda_p0: float
    tau_p: float
    z_p: float
    y_p: float
    a_p: float = 0.0
    theta_p0: float = 0.0
    dtilde_theta: float = 0.0
    p_p: float = 1.0
    f_rep: float = 8e7

    def __post_init__(self):
        if self.lambda_p0 <= 0 or self.tau_p <= 0 or self.z_p <= 0 or self.y_p <= 0:
            raise ValueError("lambda_p0, tau_p, z_p, y_p must be positive")
        if self.p_p < 0 or self.f_rep <= 0:
            raise ValueError("p_p must be >= 0 and f_rep > 0")
        if abs(self.theta_p0) >= math.pi / 2:
            raise ValueError("|theta_p0| must be below pi/2")

    @property
    def omega_p0(self) -> float:
        return 2.0 * math.pi * C_LIGHT / self.lambda_p0


@dataclass(frozen=True)
class FilterSpec:
    """Gaussian frequency filters; None means exactly unfiltered (1/sigma^2 = 0)."""

    sigma_s: float | None = None
    sigma_i: float | None = None

    def __post_init__(self):
        for s in (self.sigma_s, self.sigma_i):
            if s is not None and s <= 0:
                raise ValueError("finite filter widths must be positive")


UNFILTERED = FilterSpec(None, None)


def _inv_sq(sigma: float | None) -> float:
    return 0.0 if sigma is None else 1.0 / sigma**2


@dataclass(frozen=True)
class VCoefficients:
    """Group-velocity-mismatch coefficients, s/m.

    v_ps = sin(th)/v_p + k_p0 cos(th) Dtheta - 1/v_s
    v_pi = sin(th)/v_p + k_p0 cos(th) Dtheta + 1/v_i
    v_si = 1/v_s + 1/v_i   (pump-independent)
    """

    v_ps: float
    v_pi: float
    v_si: float


@dataclass(frozen=True)
class GaussianTPSA:
    """Immutable value holding the full Gaussian-amplitude description.

    c_phi_sq is |C|^2 (the unobservable global phase of C is dropped);
    prefactor = sqrt(z_p tau_p / (1 + a_p^2)). Pump/filter scalars are
    carried along so downstream closed forms can be evaluated without
    re-deriving them.
    """

    omega_s0: float
    omega_i0: float
    omega_p0: float
    f2s: complex
    f2i: complex
    f2si: complex
    f1s: complex
    f1i: complex
    f0: float
    c_phi_sq: float
    prefactor: float
    v_ps: float
    v_pi: float
    v_si: float
    g_s: float
    g_i: float
    g_si: float
    tau_p: float
    a_p: float
    z_p: float
    sigma_s: float | None
    sigma_i: float | None
    f_rep: float
    include_g: bool

    def __post_init__(self):
        if abs(self.omega_p0 - self.omega_s0 - self.omega_i0) > 1e-6 * self.omega_p0:
            raise ValueError("omega_p0 must equal omega_s0 + omega_i0")
        if self.f2s.real <= 0 or self.f2i.real <= 0 or self.d_fr <= 0:
            raise NonNormalizable(
                f"quadratic form not positive definite: Re f2s = {self.f2s.real:.3g}, "
                f"Re f2i = {self.f2i.real:.3g}, D_fr = {self.d_fr:.3g}"
            )

    @property
    def d_fr(self) -> float:
        """Real-part determinant 4 f2s^r f2i^r - (f2si^r)^2, s^4."""
        return 4.0 * self.f2s.real * self.f2i.real - self.f2si.real**2

    @property
    def d_f(self) -> complex:
        """Complex determinant 4 f2s f2i - f2si^2, s^4."""
        return 4.0 * self.f2s * self.f2i - self.f2si**2

    @property
    def chirp_free(self) -> bool:
        return self.a_p == 0.0

    @property
    def symmetric(self) -> bool:
        return self.omega_s0 == self.omega_i0


@dataclass(frozen=True)
class RotatedTPSA:
    """Quadratic form in sum/difference detunings dO = (ds+di)/2, dw = (ds-di)/2.

    The exponent reads exp(-a_sum dO^2 + cross dO dw - a_diff dw^2); the
    G corrections are dropped in this representation. a_sum carries the
    pulse duration, a_diff only the transverse width and filters.
    """

    a_sum: complex
    cross: complex
    a_diff: complex
    prefactor_scale: float = 2.0


@dataclass(frozen=True)
class ExternalAngularDispersion:
    """Angular dispersion refracted out of the material.

    dtilde_out in rad s, theta_out in rad, d_out = dtilde_out w^2/(2 pi c)
    in rad/m (the per-wavelength form used for lab gratings/prisms).
    """

    dtilde_out: float
    d_out: float
    theta_out: float


def with_matched_angle(wg: WaveguideSpec, pump: PumpSpec,
                       omega_s0: float, omega_i0: float) -> PumpSpec:
    """Pump with theta_p0 replaced by the phase-matching solution."""
    return replace(pump, theta_p0=solve_phase_matching(wg, omega_s0, omega_i0))


def v_coefficients(wg: WaveguideSpec, pump: PumpSpec,
                   omega_s0: float, omega_i0: float) -> VCoefficients:
    """Group-velocity-mismatch coefficients at the central frequencies."""
    omega_p0 = omega_s0 + omega_i0
    v_s = group_velocity(wg, omega_s0, "guided")
    v_i = group_velocity(wg, omega_i0, "guided")
    v_p = group_velocity(wg, omega_p0, "pump_bulk")
    kp0 = pump_wavevector(wg.model, omega_p0)
    u = (math.sin(pump.theta_p0) / v_p
         + kp0 * math.cos(pump.theta_p0) * pump.dtilde_theta)
    return VCoefficients(v_ps=u - 1.0 / v_s, v_pi=u + 1.0 / v_i,
                         v_si=1.0 / v_s + 1.0 / v_i)


def pair_norm_constant(wg: WaveguideSpec, pump: PumpSpec,
                       omega_s0: float, omega_i0: float) -> float:
    """Squared amplitude constant |C|^2 of the Gaussian form, 1/m.

    Collects the nonlinear coefficient, the per-photon mode
    normalizations, the transverse y-aperture overlap erf(Ly/2Yp), and
    the pump power; linear in p_p.
    """
    omega_p0 = omega_s0 + omega_i0
    n_p = refractive_index(wg.model, omega_p0)
    n_s = refractive_index(wg.model, omega_s0)
    n_i = refractive_index(wg.model, omega_i0)
    v_p = group_velocity(wg, omega_p0, "pump_bulk")
    material = (math.sqrt(2.0 * math.pi) * math.pi**2 * wg.d**2
                * omega_s0 * omega_i0
                / (EPSILON_0 * C_LIGHT**2 * n_p**2 * n_s**3 * n_i**3))
    overlap = (math.sqrt(n_s * n_i * omega_s0 * omega_i0)
               / (n_s * omega_s0 + n_i * omega_i0))
    aperture = (pump.y_p / wg.ly**2) * math.erf(wg.ly / (2.0 * pump.y_p)) ** 2
    return material * overlap * aperture * pump.p_p / (v_p * math.cos(pump.theta_p0))


def build_tpsa(wg: WaveguideSpec, pump: PumpSpec, filt: FilterSpec,
               omega_s0: float, omega_i0: float, *,
               include_g: bool = True,
               filter_cross: str = "zero") -> GaussianTPSA:
    """Assemble the Gaussian amplitude for matched central frequencies.

    pump.theta_p0 must already satisfy momentum conservation (use
    with_matched_angle); pump.lambda_p0 must match omega_s0 + omega_i0.

    include_g=False drops the transverse-overlap corrections (the G
    terms) and the linear coefficients they generate, reproducing the
    simplified closed forms; the constant f0 is always kept.
    filter_cross selects the reading of the filter contribution to the
    cross coefficient: "zero" (default, self-consistent with the
    rotated form) or "sigma-cross" (2/(sigma_s sigma_i)).
    """
    if filter_cross not in ("zero", "sigma-cross"):
        raise ValueError("filter_cross must be 'zero' or 'sigma-cross'")
    omega_p0 = omega_s0 + omega_i0
    if abs(pump.omega_p0 - omega_p0) > 1e-6 * omega_p0:
        raise PhaseMatchViolated(
            f"pump.lambda_p0 = {pump.lambda_p0:.6g} m is inconsistent with "
            f"omega_s0 + omega_i0 = {omega_p0:.6g} rad/s"
        )
    kp0 = pump_wavevector(wg.model, omega_p0)
    residual = phase_match_residual(wg, pump.theta_p0, omega_s0, omega_i0)
    if abs(residual) > _PM_REL_TOL * kp0:
        raise PhaseMatchViolated(
            f"momentum mismatch {residual:.6g} rad/m exceeds "
            f"{_PM_REL_TOL:.0e} k_p0; solve the pump angle first"
        )

    vc = v_coefficients(wg, pump, omega_s0, omega_i0)
    v_p = group_velocity(wg, omega_p0, "pump_bulk")
    gt = g_taylor(wg, omega_s0, omega_i0)

    cos_t = math.cos(pump.theta_p0)
    sin_t = math.sin(pump.theta_p0)
    kc = kp0 * cos_t
    # Coefficients shared by the G corrections and the linear terms.
    b1 = cos_t / v_p - kp0 * sin_t * pump.dtilde_theta
    b2 = (cos_t / (kp0 * v_p**2)
          - 4.0 * sin_t * pump.dtilde_theta / v_p
          - kp0 * math.cos(2.0 * pump.theta_p0) / cos_t * pump.dtilde_theta**2)

    if include_g:
        g_s = (kc / 2.0) * (kc * gt.g2s + 2.0 * b1 * gt.g1s + b2 * gt.g0)
        g_i = (kc / 2.0) * (kc * gt.g2i + 2.0 * b1 * gt.g1i + b2 * gt.g0)
        g_si = (kc / 2.0) * (kc * gt.g2si + 2.0 * b1 * (gt.g1s + gt.g1i)
                             + 2.0 * b2 * gt.g0)
        f1s = complex(kc * (kc / 2.0 * gt.g1s + b1 * gt.g0))
        f1i = complex(kc * (kc / 2.0 * gt.g1i + b1 * gt.g0))
    else:
        g_s = g_i = g_si = 0.0
        f1s = f1i = 0.0 + 0.0j
    f0 = kc**2 * gt.g0 / 2.0

    chirp = 1.0 / (1.0 + 1j * pump.a_p)
    tau2 = pump.tau_p**2
    z2 = pump.z_p**2
    inv_s = _inv_sq(filt.sigma_s)
    inv_i = _inv_sq(filt.sigma_i)
    cross_filter = 0.0
    if filter_cross == "sigma-cross" and filt.sigma_s is not None and filt.sigma_i is not None:
        cross_filter = 2.0 / (filt.sigma_s * filt.sigma_i)

    f2s = tau2 * chirp / 4.0 + vc.v_ps**2 * z2 / 4.0 + inv_s + g_s
    f2i = tau2 * chirp / 4.0 + vc.v_pi**2 * z2 / 4.0 + inv_i + g_i
    f2si = tau2 * chirp / 2.0 + vc.v_ps * vc.v_pi * z2 / 2.0 + cross_filter + g_si

    return GaussianTPSA(
        omega_s0=omega_s0, omega_i0=omega_i0, omega_p0=omega_p0,
        f2s=f2s, f2i=f2i, f2si=f2si, f1s=f1s, f1i=f1i, f0=f0,
        c_phi_sq=pair_norm_constant(wg, pump, omega_s0, omega_i0),
        prefactor=math.sqrt(pump.z_p * pump.tau_p / (1.0 + pump.a_p**2)),
        v_ps=vc.v_ps, v_pi=vc.v_pi, v_si=vc.v_si,
        g_s=g_s, g_i=g_i, g_si=g_si,
        tau_p=pump.tau_p, a_p=pump.a_p, z_p=pump.z_p,
        sigma_s=filt.sigma_s, sigma_i=filt.sigma_i,
        f_rep=pump.f_rep, include_g=include_g,
    )


def evaluate(tpsa: GaussianTPSA, omega_s, omega_i):
    """Complex amplitude at (omega_s, omega_i); accepts scalars or arrays."""
    ds = np.asarray(omega_s, dtype=float) - tpsa.omega_s0
    di = np.asarray(omega_i, dtype=float) - tpsa.omega_i0
    phi = np.asarray(tpsa.f2s * ds**2 + tpsa.f2i * di**2 + tpsa.f2si * ds * di
                     + tpsa.f1s * ds + tpsa.f1i * di + tpsa.f0)
    worst = float(np.max(-phi.real))
    if worst > _EXP_GUARD:
        raise ExponentOverflow(
            f"-Re(phi) = {worst:.3g} exceeds {_EXP_GUARD}; "
            "amplitude coefficients are not credible"
        )
    out = math.sqrt(tpsa.c_phi_sq) * tpsa.prefactor * np.exp(-phi)
    return out if out.ndim else complex(out)


def e_factor(tpsa: GaussianTPSA) -> float:
    """Linear-coefficient enhancement of the squared-amplitude integral.

    exp(2 (f2s^r f1i^2 + f2i^r f1s^2 - f2si^r f1s f1i) / D_fr), using the
    real parts of the linear coefficients.
    """
    f1s, f1i = tpsa.f1s.real, tpsa.f1i.real
    num = (tpsa.f2s.real * f1i**2 + tpsa.f2i.real * f1s**2
           - tpsa.f2si.real * f1s * f1i)
    return math.exp(2.0 * num / tpsa.d_fr)


def l2_norm(tpsa: GaussianTPSA) -> float:
    """Exact integral of |Phi|^2 over both frequencies (the pair rate scale)."""
    d = tpsa.d_fr
    if d <= 0:
        raise NonNormalizable(f"D_fr = {d:.3g} <= 0")
    return (tpsa.c_phi_sq * tpsa.prefactor**2 * math.exp(-2.0 * tpsa.f0)
            * math.pi * e_factor(tpsa) / math.sqrt(d))


def normalize(tpsa: GaussianTPSA) -> GaussianTPSA:
    """Rescale the amplitude to unit L2 norm; idempotent, coefficients untouched."""
    norm = l2_norm(tpsa)
    if not (norm > 0.0 and math.isfinite(norm)):
        raise NonNormalizable(f"L2 norm {norm} is not positive and finite")
    return replace(tpsa, c_phi_sq=tpsa.c_phi_sq / norm)


def rotate(tpsa: GaussianTPSA) -> RotatedTPSA:
    """Quadratic form in sum/difference detunings (G corrections dropped).

    Sum-frequency curvature carries the pulse duration and the combined
    mismatch (v_ps + v_pi); the difference-frequency curvature carries
    only z_p and the filters through v_si.
    """
    chirp = 1.0 / (1.0 + 1j * tpsa.a_p)
    inv_plus = _inv_sq(tpsa.sigma_s) + _inv_sq(tpsa.sigma_i)
    inv_minus = _inv_sq(tpsa.sigma_s) - _inv_sq(tpsa.sigma_i)
    z2 = tpsa.z_p**2
    vsum = tpsa.v_ps + tpsa.v_pi
    return RotatedTPSA(
        a_sum=tpsa.tau_p**2 * chirp + z2 * vsum**2 / 4.0 + inv_plus,
        cross=z2 * vsum * tpsa.v_si / 2.0 - 2.0 * inv_minus,
        a_diff=z2 * tpsa.v_si**2 / 4.0 + inv_plus,
    )


def unrotate(rot: RotatedTPSA) -> tuple[complex, complex, complex]:
    """Recover the (f2s, f2i, f2si) triple from the rotated form."""
    f2si = (rot.a_sum - rot.a_diff) / 2.0
    f2s = (rot.a_sum + rot.a_diff) / 4.0 - rot.cross / 4.0
    f2i = (rot.a_sum + rot.a_diff) / 4.0 + rot.cross / 4.0
    return f2s, f2i, f2si


def external_angular_dispersion(model: DispersionModel, omega_p0: float,
                                theta_p0: float,
                                dtilde_internal: float) -> ExternalAngularDispersion:
    """Refract the internal pump angle and angular dispersion out of the material."""
    n = refractive_index(model, omega_p0)
    s_out = n * math.sin(theta_p0)
    if abs(s_out) > 1.0:
        raise TotalInternalReflection(
            f"n0 sin(theta_p0) = {s_out:.4g} has no external angle"
        )
    theta_out = math.asin(s_out)
    dndw = index_derivative(model, omega_p0)
    dtilde_out = (n * math.cos(theta_p0) / math.cos(theta_out) * dtilde_internal
                  + math.sin(theta_p0) / math.cos(theta_out) * dndw)
    d_out = dtilde_out * omega_p0**2 / (2.0 * math.pi * C_LIGHT)
    return ExternalAngularDispersion(dtilde_out=dtilde_out, d_out=d_out,
                                     theta_out=theta_out)


def internal_angular_dispersion(model: DispersionModel, omega_p0: float,
                                theta_out: float, dtilde_out: float) -> tuple[float, float]:
    """Inverse refraction: (theta_p0, dtilde_internal) from external values."""
    n = refractive_index(model, omega_p0)
    theta_p0 = math.asin(math.sin(theta_out) / n)
    dndw = index_derivative(model, omega_p0)
    dtilde = ((dtilde_out * math.cos(theta_out) - math.sin(theta_p0) * dndw)
              / (n * math.cos(theta_p0)))
    return theta_p0, dtilde


__all__ = [
    "PumpSpec", "FilterSpec", "UNFILTERED", "VCoefficients", "GaussianTPSA",
    "RotatedTPSA", "ExternalAngularDispersion", "with_matched_angle",
    "v_coefficients", "pair_norm_constant", "build_tpsa", "evaluate",
    "e_factor", "l2_norm", "normalize", "rotate", "unrotate",
    "external_angular_dispersion", "internal_angular_dispersion",
]
