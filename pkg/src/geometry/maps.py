"""maps between tangent planes, subspheres and spheres in R^n x R^+.

Psi sends a subsphere (psi, rho) to the (center, radius) of its
stereographic image; Psi_0 sends a surface point to the foot of its tangent
plane; Psi_1 = Psi(y/|y|, |y|); Phi_Sigma = Psi o tangent plane, which
factors as Psi_1 o Psi_0 away from Sigma_0.
"""

import logging
from dataclasses import dataclass
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel

from src.core.config import Settings, settings
from src.core.constants import GEOM_TOL, UNIT_TOL
from src.core.errors import (
    DegenerateTangent,
    DenominatorVanishes,
    NotContained,
    NotRegular,
    OnS0,
    OnSigma0,
    OnSingularSet,
    OriginUndefined,
    OutsideUnitBall,
)
from src.geometry.core import EuclideanSphere, SubsphereParam, subsphere_image
from src.geometry.surfaces import Profile, RevolutionSurface, curvature_expression, tangent_plane_at

logger = logging.getLogger(__name__)


class SpacelikeReport(BaseModel):
    """normal defects N_{n+1}^2 - sum N_i^2 of sampled surface points."""

    sampled_params: List[float]
    normal_defect: List[float]
    min_defect: float
    passed: bool
    excluded: int = 0


def psi_map(s: SubsphereParam) -> EuclideanSphere:
    """(psi* / (rho - psi_{n+1}), sqrt(1 - rho^2) / |rho - psi_{n+1}|).

    raises:
        PassesThroughNorthPole: if rho = psi_{n+1}
    """
    return subsphere_image(s)


def psi0_map(surface: RevolutionSurface, theta: float, azimuth: float = 0.0) -> np.ndarray:
    """closest point to the origin of the tangent plane at the surface point.

    raises:
        OnSigma0: if the tangent plane passes through the origin or the north pole
    """
    plane = tangent_plane_at(surface, theta, azimuth)
    if plane.rho < GEOM_TOL:
        raise OnSigma0(f"tangent plane at theta={theta!r} passes through the origin")
    if abs(plane.rho - plane.psi[-1]) < GEOM_TOL:
        raise OnSigma0(f"tangent plane at theta={theta!r} passes through the north pole")
    return plane.foot


def psi0_implicit(x: np.ndarray, gradient: np.ndarray) -> np.ndarray:
    """(x . grad F / |grad F|^2) grad F, the foot of the tangent plane of F = 0 at x.

    the result does not change when F is negated or rescaled.

    raises:
        DegenerateTangent: if grad F vanishes at x
    """
    x = np.asarray(x, dtype=float)
    gradient = np.asarray(gradient, dtype=float)
    sq = float(gradient @ gradient)
    if sq < UNIT_TOL**2:
        raise DegenerateTangent("grad F vanishes at x")
    return float(x @ gradient) / sq * gradient


def phi_implicit(x: np.ndarray, gradient: np.ndarray) -> EuclideanSphere:
    """Phi_Sigma of the surface F = 0 at x written through grad F.

    (F* / (x . grad F - F_{n+1}), sqrt(|grad F|^2 - (x . grad F)^2) / |x . grad F - F_{n+1}|)

    raises:
        DegenerateTangent: if grad F vanishes at x
        OnSingularSet: if the tangent plane at x passes through the north pole
    """
    x = np.asarray(x, dtype=float)
    gradient = np.asarray(gradient, dtype=float)
    length = float(np.linalg.norm(gradient))
    if length < UNIT_TOL:
        raise DegenerateTangent("grad F vanishes at x")
    support = float(x @ gradient)
    denominator = support - float(gradient[-1])
    if abs(denominator) < GEOM_TOL * length:
        raise OnSingularSet("tangent plane passes through the north pole")
    radius = np.sqrt(max(length**2 - support**2, 0.0)) / abs(denominator)
    return EuclideanSphere(gradient[:-1] / denominator, radius)


def _psi1_parts(y: np.ndarray) -> Tuple[float, float]:
    y = np.asarray(y, dtype=float)
    norm = float(np.linalg.norm(y))
    if norm < UNIT_TOL:
        raise OriginUndefined("the origin does not determine a hyperplane")
    if norm >= 1.0:
        raise OutsideUnitBall(f"|y| = {norm!r} is not inside the unit ball")
    gap = norm**2 - float(y[-1])
    if abs(gap) < UNIT_TOL:
        raise OnS0("point lies on S0, its hyperplane passes through the north pole")
    return norm, gap


def psi1_map(y: np.ndarray) -> EuclideanSphere:
    """Psi_1(y) = (y* / (|y|^2 - y_{n+1}), |y| sqrt(1 - |y|^2) / ||y|^2 - y_{n+1}|)."""
    y = np.asarray(y, dtype=float)
    norm, gap = _psi1_parts(y)
    return EuclideanSphere(y[:-1] / gap, norm * np.sqrt(1.0 - norm**2) / abs(gap))


def psi1_jacobian_det(y: np.ndarray) -> float:
    """closed-form |det D Psi_1(y)| = |y| / (||y|^2 - y_{n+1}|^{n+1} sqrt(1 - |y|^2))."""
    y = np.asarray(y, dtype=float)
    norm, gap = _psi1_parts(y)
    n = y.shape[0] - 1
    return norm / (abs(gap) ** (n + 1) * np.sqrt(1.0 - norm**2))


def psi1_jacobian_fd(y: np.ndarray, step: Optional[float] = None) -> float:
    """|det| of the central-difference jacobian of Psi_1."""
    y = np.asarray(y, dtype=float)
    step = step or settings.fd_step_jacobian
    dim = y.shape[0]
    jacobian = np.empty((dim, dim))
    for i in range(dim):
        shift = np.zeros(dim)
        shift[i] = step
        forward = psi1_map(y + shift).as_point()
        backward = psi1_map(y - shift).as_point()
        jacobian[:, i] = (forward - backward) / (2.0 * step)
    return float(abs(np.linalg.det(jacobian)))


def in_s0_interior(y: np.ndarray) -> np.ndarray:
    """|y|^2 < y_{n+1}, i.e. y inside S0 = S(e_{n+1}/2, 1/2)."""
    y = np.asarray(y, dtype=float)
    return np.sum(y * y, axis=-1) < y[..., -1]


def hyperboloid_side(point: np.ndarray) -> np.ndarray:
    """t^2 - |c|^2 - 1 for points (c, t) of R^n x R^+; positive above the upper hyperboloid."""
    point = np.asarray(point, dtype=float)
    return point[..., -1] ** 2 - np.sum(point[..., :-1] ** 2, axis=-1) - 1.0


def classify_psi1(y: np.ndarray) -> Literal["above", "below"]:
    return "above" if hyperboloid_side(psi1_map(y).as_point()) > 0.0 else "below"


def phi_sigma(surface: RevolutionSurface, theta: float, azimuth: float = 0.0) -> EuclideanSphere:
    """surface map: Psi of the tangent plane at the surface point.

    raises:
        OnSingularSet: if the tangent plane passes through the north pole
    """
    plane = tangent_plane_at(surface, theta, azimuth)
    if abs(plane.rho - plane.psi[-1]) < GEOM_TOL:
        raise OnSingularSet(f"theta={theta!r} lies on the singular set")
    return psi_map(SubsphereParam(plane.psi, plane.rho))


def _profile_terms(profile: Profile, t):
    g, d1 = profile.gamma(t), profile.d1(t)
    cross = g[..., 0] * d1[..., 1] - g[..., 1] * d1[..., 0]
    denominator = cross + d1[..., 0]
    radicand = d1[..., 0] ** 2 + d1[..., 1] ** 2 - cross**2
    return g, d1, cross, denominator, radicand


def phi_profile(profile: Profile, t) -> np.ndarray:
    """planar closed form of the surface map along a profile.

    (gamma_2' / delta, sqrt(gamma_1'^2 + gamma_2'^2 - m^2) / |delta|) with
    m = gamma_1 gamma_2' - gamma_2 gamma_1' and delta = m + gamma_1'.

    raises:
        DenominatorVanishes: if |delta| < 1e-12 at any t
    """
    _, d1, _, denominator, radicand = _profile_terms(profile, t)
    if np.any(np.abs(denominator) < UNIT_TOL):
        raise DenominatorVanishes("tangent line passes through the north pole")
    center = d1[..., 1] / denominator
    radius = np.sqrt(np.maximum(radicand, 0.0)) / np.abs(denominator)
    return np.stack([center, radius], axis=-1)


def h_identity_residual(profile: Profile, t) -> np.ndarray:
    """h1^2 - h2^2 - (1 - |gamma|^2) delta^2, zero for every t."""
    g, d1, cross, denominator, radicand = _profile_terms(profile, t)
    h1_sq = (1.0 - g[..., 1]) ** 2 * radicand
    h2 = g[..., 0] * cross + g[..., 0] * d1[..., 0] + g[..., 1] * d1[..., 1] - d1[..., 1]
    return h1_sq - h2**2 - (1.0 - np.sum(g * g, axis=-1)) * denominator**2


def phi_tangent_direction(profile: Profile, t: float, config: Settings = settings) -> Tuple[np.ndarray, float]:
    """derivative of phi_profile: K(t) (1 - gamma_2, -sign(delta) h2 / sqrt(radicand)).

    returns:
        (nu, K) with K = (gamma_1' gamma_2'' - gamma_1'' gamma_2') / delta^2

    raises:
        NotRegular: if the curvature expression vanishes at t
        DenominatorVanishes: if delta vanishes at t
    """
    g, d1, cross, denominator, radicand = _profile_terms(profile, t)
    curvature = float(curvature_expression(profile, t))
    if abs(curvature) <= config.regularity_threshold:
        raise NotRegular(f"profile is not regular at t={t!r}")
    denominator = float(denominator)
    if abs(denominator) < UNIT_TOL:
        raise DenominatorVanishes(f"tangent line at t={t!r} passes through the north pole")

    k = curvature / denominator**2
    h2 = float(g[0] * cross + g[0] * d1[0] + g[1] * d1[1] - d1[1])
    nu = k * np.array([1.0 - g[1], -np.sign(denominator) * h2 / np.sqrt(float(radicand))])
    return nu, k


def image_normal(nu: np.ndarray, azimuth: float = 0.0, ambient_dim: int = 2) -> np.ndarray:
    """unit normal of the image curve (n=1) or of its revolution (n=2) from the tangent nu."""
    nu = np.asarray(nu, dtype=float)
    if ambient_dim == 2:
        normal = np.array([-nu[1], nu[0]])
    else:
        normal = np.array([-nu[1] * np.cos(azimuth), -nu[1] * np.sin(azimuth), nu[0]])
    return normal / np.linalg.norm(normal)


def spacelike_verify(points: np.ndarray, normals: np.ndarray, params: Optional[List[float]] = None,
                     excluded: int = 0) -> SpacelikeReport:
    """space-like test N_{n+1}^2 >= sum N_i^2 on normalized normals.

    args:
        points: samples of the surface in R^n x R^+ (rows)
        normals: normals at the samples (rows, any scale)
        params: sample labels, defaults to the sample index
        excluded: number of samples dropped upstream

    returns:
        report that passes iff the minimal defect is >= -1e-9
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    normals = np.atleast_2d(np.asarray(normals, dtype=float))
    if points.shape != normals.shape:
        raise ValueError(f"points {points.shape} and normals {normals.shape} disagree")
    unit = normals / np.linalg.norm(normals, axis=-1, keepdims=True)
    defect = unit[:, -1] ** 2 - np.sum(unit[:, :-1] ** 2, axis=-1)
    min_defect = float(defect.min()) if defect.size else 0.0
    labels = list(params) if params is not None else [float(i) for i in range(len(defect))]
    return SpacelikeReport(
        sampled_params=[float(p) for p in labels],
        normal_defect=[float(d) for d in defect],
        min_defect=min_defect,
        passed=min_defect >= -1e-9,
        excluded=excluded,
    )


@dataclass(frozen=True)
class HyperboloidModel:
    """the image of the offset sphere |x - lam omega| = r under Phi_Sigma.

    with u = |ybar|^2 - y_{n+1}^2 and a = 1 + lam omega_{n+1}, b = 1 - lam omega_{n+1}
    every image point satisfies

        (a + b u - 2 lam omega* . ybar)^2 - r^2 (u + 1)^2 - 4 r^2 y_{n+1}^2 = 0.

    for lam = 0 this factors into the two upper hyperboloids
    A (y_{n+1} +- B)^2 - C (w . ybar)^2 - D [|ybar|^2 - (w . ybar)^2] = 1
    with w = omega* / |omega*| (w unused when omega is axial, then C = D).
    the constants follow the closed forms for every lam, but the two
    hyperboloids only carry the image when lam = 0.
    """

    Q: float
    P: float
    L: float
    A: float
    B: float
    C: float
    D: float
    omega_hat: Optional[np.ndarray]
    lam: float = 0.0
    r: float = 0.0
    omega: Optional[np.ndarray] = None

    @property
    def factors(self) -> bool:
        """whether the image is the union of the two hyperboloids."""
        return self.lam == 0.0

    def branch_residuals(self, y: np.ndarray) -> np.ndarray:
        """residuals of the + and - branch (last axis of the result)."""
        y = np.asarray(y, dtype=float)
        ybar, height = y[..., :-1], y[..., -1]
        sq = np.sum(ybar * ybar, axis=-1)
        along = ybar @ self.omega_hat if self.omega_hat is not None else np.zeros_like(height)
        lateral = self.C * along**2 + self.D * (sq - along**2)
        plus = self.A * (height + self.B) ** 2 - lateral - 1.0
        minus = self.A * (height - self.B) ** 2 - lateral - 1.0
        return np.stack([plus, minus], axis=-1)

    def image_relation(self, y: np.ndarray) -> np.ndarray:
        """left side of the image relation, zero exactly on the image."""
        y = np.asarray(y, dtype=float)
        ybar, height = y[..., :-1], y[..., -1]
        omega = self.omega if self.omega is not None else np.eye(y.shape[-1])[-1]
        u = np.sum(ybar * ybar, axis=-1) - height**2
        a = 1.0 + self.lam * omega[-1]
        b = 1.0 - self.lam * omega[-1]
        linear = a + b * u - 2.0 * self.lam * (ybar @ omega[:-1])
        return linear**2 - self.r**2 * (u + 1.0) ** 2 - 4.0 * self.r**2 * height**2

    def residual(self, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """image relation relative to max(1, |y|^2)^2 and the nearer branch (+1 or -1)."""
        y = np.asarray(y, dtype=float)
        scale = np.maximum(1.0, np.sum(y * y, axis=-1)) ** 2
        pick = np.argmin(np.abs(self.branch_residuals(y)), axis=-1)
        return self.image_relation(y) / scale, np.where(pick == 0, 1, -1)


def hyperboloid_model(lam: float, omega: np.ndarray, r: float) -> HyperboloidModel:
    """constants of the image hyperboloids of the sphere |x - lam omega| = r.

    raises:
        NotContained: if r >= 1 - lam
    """
    omega = np.asarray(omega, dtype=float)
    if r < 0.0 or r >= 1.0 - lam:
        raise NotContained(f"sphere with lam={lam!r}, r={r!r} is not inside the unit sphere")
    lw = lam * float(omega[-1])
    lateral = float(np.sqrt(max(1.0 - omega[-1] ** 2, 0.0)))

    q = np.sqrt((1.0 - r + lw) / (1.0 + r - lw))
    p = np.sqrt((1.0 + r + lw) / (1.0 - r - lw))
    ell = r + lam * lateral
    a = 4.0 / (q + p) ** 2
    b = (q - p) / 2.0
    c = (np.sqrt(1.0 - ell**2) - b * ell) ** 2 * a - ell**2
    d = (np.sqrt(1.0 - r**2) - b * r) ** 2 * a - r**2
    omega_hat = omega[:-1] / lateral if lateral > UNIT_TOL else None
    return HyperboloidModel(float(q), float(p), float(ell), float(a), float(b), float(c), float(d), omega_hat,
                            float(lam), float(r), omega)


def offset_sphere_phi(lam: float, omega: np.ndarray, r: float, x: np.ndarray) -> EuclideanSphere:
    """explicit surface map of the sphere |x - lam omega| = r.

    raises:
        OnSingularSet: if r^2 - lam^2 + lam omega.x - x_{n+1} + lam omega_{n+1} = 0
    """
    omega = np.asarray(omega, dtype=float)
    x = np.asarray(x, dtype=float)
    support = r**2 - lam**2 + lam * float(omega @ x)
    denominator = support - x[-1] + lam * omega[-1]
    if abs(denominator) < GEOM_TOL:
        raise OnSingularSet("point lies on the singular set of the offset sphere")
    center = (x[:-1] - lam * omega[:-1]) / denominator
    radius = np.sqrt(max(r**2 - support**2, 0.0)) / abs(denominator)
    return EuclideanSphere(center, radius)
