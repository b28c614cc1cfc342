"""Analytic Schmidt decomposition, entanglement entropy, and separability.

Tracing the idler out of a normalized Gaussian amplitude leaves a
Gaussian reduced kernel whose eigenvalues form a geometric progression
lambda_n^2 = (1 - theta) theta^n. A single asymmetry number

    P = Re(e2)/e2c - 1

fixes theta = 1/(1 + P + sqrt(P^2 + 2P)) and with it the base-2 entropy
of entanglement and the number of modes needed to reach a target
probability. P -> infinity (e2c -> 0, i.e. f2si -> 0) is the separable
limit; P -> 0 is maximal entanglement.

Only the real part of e2 can influence the spectrum: the imaginary
diagonal parts of the kernel are a pure gauge exp(i Im(e2) w^2) that a
local unitary removes. The magnitude-based diagnostics p_from_kernel and
p_from_f (which use |e2| and agree with each other identically) are kept
for cross-checks; they coincide with P for chirp-free pumps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dispersion import WaveguideSpec, g_taylor, group_velocity, pump_wavevector
from .errors import NonNormalizable, OutOfRange
from .tpsa import GaussianTPSA, PumpSpec, l2_norm

_SEPARABLE_SNAP = 1e-14    # e2c below this fraction of |e2| is exact separability
_NORMALIZED_TOL = 1e-6


@dataclass(frozen=True)
class ReducedKernel:
    """Gaussian kernel of the reduced one-photon state.

    kernel(w', w) = c_psi_sq * exp(-e2 w'^2 - conj(e2) w^2 + 2 e2c w w')
                    * exp(-e1 w' - conj(e1) w)
    in centered signal detunings; c_psi_sq makes the trace equal 1.
    """

    e2: complex
    e2c: float
    e1: complex
    c_psi_sq: float

    def __post_init__(self):
        if self.e2c < 0 or self.e2.real <= self.e2c:
            raise NonNormalizable(
                f"reduced kernel not normalizable: Re e2 = {self.e2.real:.3g}, "
                f"e2c = {self.e2c:.3g}"
            )


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Geometric Schmidt spectrum lambda_n^2 = (1 - vartheta) vartheta^n.

    n_min is the mode count reaching probability p_min (separable -> 1);
    n_min_index = n_min - 1 is the raw index satisfying the bracketing
    inequalities on the cumulative sums.
    """

    p: float
    vartheta: float
    entropy_bits: float
    n_min: int
    n_min_index: int
    p_min: float

    def __post_init__(self):
        if not (0.0 <= self.vartheta < 1.0):
            raise ValueError("vartheta must lie in [0, 1)")

    def lambda_sq(self, n: int) -> float:
        if n < 0:
            raise ValueError("n must be >= 0")
        if self.vartheta == 0.0:
            return 1.0 if n == 0 else 0.0
        return (1.0 - self.vartheta) * self.vartheta**n

    def cumulative(self, count: int) -> float:
        """Probability captured by the first `count` modes: 1 - vartheta^count."""
        if count < 0:
            raise ValueError("count must be >= 0")
        return 1.0 - self.vartheta**count


def reduced_kernel(tpsa: GaussianTPSA) -> ReducedKernel:
    """Trace out the idler of a normalized amplitude."""
    norm = l2_norm(tpsa)
    if abs(norm - 1.0) > _NORMALIZED_TOL:
        raise NonNormalizable(
            f"amplitude L2 norm is {norm:.6g}; normalize() it before reducing"
        )
    f2i_r = tpsa.f2i.real
    e2 = tpsa.f2s - tpsa.f2si**2 / (8.0 * f2i_r)
    e2c = abs(tpsa.f2si) ** 2 / (8.0 * f2i_r)
    e1 = tpsa.f1s - tpsa.f2si * tpsa.f1i.real / (2.0 * f2i_r)
    gap = e2.real - e2c
    if gap <= 0:
        raise NonNormalizable(f"Re e2 - e2c = {gap:.3g} <= 0")
    c_psi_sq = math.sqrt(2.0 * gap / math.pi) * math.exp(-e1.real**2 / (2.0 * gap))
    return ReducedKernel(e2=e2, e2c=e2c, e1=e1, c_psi_sq=c_psi_sq)


def p_from_kernel(kernel: ReducedKernel) -> float:
    """Magnitude-based asymmetry |e2|/e2c - 1 (diagnostic; inf when separable)."""
    if kernel.e2c == 0.0:
        return math.inf
    return abs(kernel.e2) / kernel.e2c - 1.0


def p_from_f(tpsa: GaussianTPSA) -> float:
    """Magnitude-based asymmetry directly from the f coefficients (diagnostic).

    sqrt(1 + 16 f2i^r (4 |f2s|^2 f2i^r - Re(f2s conj(f2si)^2)) / |f2si|^4) - 1;
    algebraically identical to p_from_kernel.
    """
    c4 = abs(tpsa.f2si) ** 4
    if c4 == 0.0:
        return math.inf
    f2i_r = tpsa.f2i.real
    inner = (4.0 * abs(tpsa.f2s) ** 2 * f2i_r
             - (tpsa.f2s * tpsa.f2si.conjugate() ** 2).real)
    return math.sqrt(1.0 + 16.0 * f2i_r * inner / c4) - 1.0


def entropy(vartheta: float) -> float:
    """Base-2 entropy of the geometric spectrum; 0 at vartheta = 0."""
    if not (0.0 <= vartheta < 1.0):
        raise OutOfRange(f"vartheta = {vartheta} outside [0, 1)")
    if vartheta == 0.0:
        return 0.0
    return (-math.log2(1.0 - vartheta)
            - vartheta * math.log2(vartheta) / (1.0 - vartheta))


def _mode_count(vartheta: float, p_min: float) -> int:
    """Smallest m >= 1 with 1 - vartheta^m >= p_min."""
    if not (0.0 < p_min < 1.0):
        raise ValueError("p_min must lie in (0, 1)")
    if vartheta == 0.0:
        return 1
    m = max(1, math.ceil(math.log(1.0 - p_min) / math.log(vartheta)))
    while 1.0 - vartheta**m < p_min:
        m += 1
    while m > 1 and 1.0 - vartheta ** (m - 1) >= p_min:
        m -= 1
    return m


def schmidt(tpsa: GaussianTPSA, p_min: float = 0.95) -> SchmidtSpectrum:
    """Schmidt spectrum of a normalized Gaussian amplitude.

    Exactly separable kernels (e2c below 1e-14 of |e2|) snap to
    vartheta = 0 with a single unit eigenvalue.
    """
    kernel = reduced_kernel(tpsa)
    if kernel.e2c <= _SEPARABLE_SNAP * abs(kernel.e2):
        return SchmidtSpectrum(p=math.inf, vartheta=0.0, entropy_bits=0.0,
                               n_min=1, n_min_index=0, p_min=p_min)
    p = kernel.e2.real / kernel.e2c - 1.0
    vartheta = 1.0 / (1.0 + p + math.sqrt(p * p + 2.0 * p))
    n_min = _mode_count(vartheta, p_min)
    return SchmidtSpectrum(p=p, vartheta=vartheta, entropy_bits=entropy(vartheta),
                           n_min=n_min, n_min_index=n_min - 1, p_min=p_min)


def schmidt_mode(vartheta: float, n: int, x):
    """Orthonormal mode function number n in the scaled coordinate x.

    Hermite-Gaussian with scale s = sqrt((1 - vartheta^2)/vartheta);
    evaluated through the normalized-function three-term recurrence to
    stay finite for large n. Accepts scalar or array x.
    """
    if not (0.0 < vartheta < 1.0):
        raise OutOfRange(f"vartheta = {vartheta} outside (0, 1)")
    if n < 0:
        raise OutOfRange("n must be >= 0")
    s = math.sqrt((1.0 - vartheta**2) / vartheta)
    u = s * np.asarray(x, dtype=float)
    h_prev = math.pi**-0.25 * np.exp(-0.5 * u * u)
    if n == 0:
        out = math.sqrt(s) * h_prev
        return out if out.ndim else float(out)
    h = math.sqrt(2.0) * u * h_prev
    for k in range(2, n + 1):
        h, h_prev = (math.sqrt(2.0 / k) * u * h
                     - math.sqrt((k - 1.0) / k) * h_prev), h
    out = math.sqrt(s) * h
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class PrincipalAxes:
    """Eigenvalues of the real quadratic form and its axis declination.

    psi_si is reported in (-pi/4, pi/4], the declination of the nearest
    principal axis from the frequency axes; it vanishes with f2si.
    """

    mu1: float
    mu2: float
    psi_si: float


def principal_axes(tpsa: GaussianTPSA) -> PrincipalAxes:
    """Diagonalize the real part of the quadratic form (chirp-free path).

    Isotropic forms (both the cross term and the diagonal gap at noise
    level) report psi_si = 0: every axis pair is principal there.
    """
    a = tpsa.f2s.real
    b = tpsa.f2i.real
    c = tpsa.f2si.real
    root = math.hypot(a - b, c)
    if root < 1e-12 * (a + b):
        psi = 0.0
    else:
        psi = 0.5 * math.atan2(c, a - b)
        if psi > math.pi / 4.0:
            psi -= math.pi / 2.0
        elif psi < -math.pi / 4.0:
            psi += math.pi / 2.0
    return PrincipalAxes(mu1=(a + b + root) / 2.0, mu2=(a + b - root) / 2.0,
                         psi_si=psi)


@dataclass(frozen=True)
class SeparabilityRoots:
    """Angular-dispersion values cancelling the cross coefficient.

    Empty roots mean the pump beam is too narrow; min_feasible_z_p (when
    found) is the beam width at which real solutions first appear.
    """

    roots: tuple
    min_feasible_z_p: float | None


def _separability_quadratic(wg: WaveguideSpec, pump: PumpSpec,
                            omega_s0: float, omega_i0: float,
                            z_p: float, include_g: bool):
    """Coefficients (a2, a1, a0) of the cross-term condition in dtilde_theta.

    The overlap corrections are themselves quadratic in the angular
    dispersion, so the exact condition stays quadratic.
    """
    omega_p0 = omega_s0 + omega_i0
    v_s = group_velocity(wg, omega_s0, "guided")
    v_i = group_velocity(wg, omega_i0, "guided")
    v_p = group_velocity(wg, omega_p0, "pump_bulk")
    kp0 = pump_wavevector(wg.model, omega_p0)
    s = math.sin(pump.theta_p0)
    co = math.cos(pump.theta_p0)
    kc = kp0 * co
    z2 = z_p**2

    a2 = z2 * kc**2
    a1 = z2 * kc * (2.0 * s / v_p + 1.0 / v_i - 1.0 / v_s)
    a0 = (pump.tau_p**2
          + z2 * ((s / v_p) ** 2 + (s / v_p) * (1.0 / v_i - 1.0 / v_s)
                  - 1.0 / (v_s * v_i)))
    # magnitude scale of a0 before cancellation, for double-root detection
    a0_mag = (pump.tau_p**2
              + z2 * ((s / v_p) ** 2 + abs(s / v_p) * abs(1.0 / v_i - 1.0 / v_s)
                      + 1.0 / (v_s * v_i)))
    if include_g:
        gt = g_taylor(wg, omega_s0, omega_i0)
        a2 -= 2.0 * kp0**2 * math.cos(2.0 * pump.theta_p0) * gt.g0
        a1 -= 2.0 * kc * s * (kp0 * (gt.g1s + gt.g1i) + 4.0 * gt.g0 / v_p)
        g_const = (kc**2 * gt.g2si
                   + 2.0 * kc * co * (gt.g1s + gt.g1i) / v_p
                   + 2.0 * kc * co * gt.g0 / (kp0 * v_p**2))
        a0 += g_const
        a0_mag += abs(g_const)
    return a2, a1, a0, a0_mag


def separability_roots(wg: WaveguideSpec, pump: PumpSpec,
                       omega_s0: float, omega_i0: float, *,
                       include_g: bool = True) -> SeparabilityRoots:
    """Angular-dispersion roots making the amplitude factorize (chirp-free).

    In the symmetric degenerate geometry the roots reduce to
    +- (1/k_p0) sqrt(1/v_s^2 - tau_p^2/z_p^2), real only for
    z_p >= v_s tau_p.
    """
    if pump.a_p != 0.0:
        raise ValueError("separability roots are defined for chirp-free pumps")

    def quad(z_p):
        return _separability_quadratic(wg, pump, omega_s0, omega_i0, z_p, include_g)

    a2, a1, a0, a0_mag = quad(pump.z_p)
    disc = a1 * a1 - 4.0 * a2 * a0
    # cancellation-insensitive scale: |a0| can vanish at a double root
    scale = a1 * a1 + abs(4.0 * a2) * a0_mag
    if scale == 0.0:
        return SeparabilityRoots(roots=(), min_feasible_z_p=None)
    if disc / scale > 1e-12:
        sgn = 1.0 if a1 >= 0.0 else -1.0
        q = -0.5 * (a1 + sgn * math.sqrt(disc))
        roots = tuple(sorted((q / a2, a0 / q)))
        return SeparabilityRoots(roots=roots, min_feasible_z_p=None)
    if disc / scale >= -1e-12:
        return SeparabilityRoots(roots=(-a1 / (2.0 * a2),), min_feasible_z_p=None)

    # No real root at this beam width: find where the discriminant turns.
    def disc_at(z_p):
        b2, b1, b0, _ = quad(z_p)
        return b1 * b1 - 4.0 * b2 * b0

    lo, hi = pump.z_p, pump.z_p
    for _ in range(80):
        hi *= 2.0
        if disc_at(hi) >= 0.0:
            break
    else:
        return SeparabilityRoots(roots=(), min_feasible_z_p=None)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if (hi - lo) <= 1e-12 * mid:
            break
        if disc_at(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return SeparabilityRoots(roots=(), min_feasible_z_p=0.5 * (lo + hi))


@dataclass(frozen=True)
class DfDerivatives:
    """Signed sensitivities of the complex-form determinant D_f (chirp-free).

    Positive d_tau_sq / d_z_sq: lengthening the pulse or widening the
    beam separates the pair; negative filter derivatives: opening the
    filters entangles it.
    """

    d_tau_sq: float
    d_z_sq: float
    d_sigma_s_sq: float
    d_sigma_i_sq: float


def entanglement_derivatives(tpsa: GaussianTPSA) -> DfDerivatives:
    """Closed-form derivatives of D_f versus tau_p^2, z_p^2, sigma^2."""
    if not tpsa.chirp_free:
        raise ValueError("derivatives are defined for chirp-free amplitudes")
    inv_s = 0.0 if tpsa.sigma_s is None else 1.0 / tpsa.sigma_s**2
    inv_i = 0.0 if tpsa.sigma_i is None else 1.0 / tpsa.sigma_i**2
    tau2 = tpsa.tau_p**2
    z2 = tpsa.z_p**2
    d_tau = (tpsa.v_si**2 * z2 / 4.0 + inv_s + inv_i
             + tpsa.g_s + tpsa.g_i - tpsa.g_si)
    d_z = (tpsa.v_si**2 * tau2 / 4.0
           + tpsa.v_ps**2 * (inv_i + tpsa.g_i)
           + tpsa.v_pi**2 * (inv_s + tpsa.g_s)
           - tpsa.v_ps * tpsa.v_pi * tpsa.g_si)
    d_ss = 0.0
    if tpsa.sigma_s is not None:
        d_ss = -(inv_s**2) * (tau2 + tpsa.v_pi**2 * z2 + 4.0 * inv_i + 4.0 * tpsa.g_i)
    d_si = 0.0
    if tpsa.sigma_i is not None:
        d_si = -(inv_i**2) * (tau2 + tpsa.v_ps**2 * z2 + 4.0 * inv_s + 4.0 * tpsa.g_s)
    return DfDerivatives(d_tau_sq=d_tau, d_z_sq=d_z,
                         d_sigma_s_sq=d_ss, d_sigma_i_sq=d_si)
