"""Flat homogeneous models and their distinguished curves.

S^m is the space of rays in R^{m+1}; the symplectic form on R^{2n+2} induces
the contact structure on S^{2n+1}.  Contact geodesics are projections of
one-parameter flows with grade -1 generator, chains those with grade -2
generator; both are great circles, tangent respectively transverse to the
contact distribution.  Curves are compared as unparametrized point sets.
"""

import csv
import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg

from . import rational as rt
from .algebra import (
    AlgebraDescriptor,
    Family,
    GradedElement,
    basis,
    grade_of,
    omega_matrix,
    sp_contact,
)
from .group import GroupElement, exp_element, nilpotency_index

DEFAULT_T = 3.0
DEFAULT_SAMPLES = 241


class CurveKind(Enum):
    CONTACT_GEODESIC = "contact_geodesic"
    CHAIN = "chain"
    GENERIC = "generic"


class TangentInContactPlane(ValueError):
    code = "TANGENT_IN_CONTACT_PLANE"


class TangentNotInContactPlane(ValueError):
    code = "TANGENT_NOT_IN_CONTACT_PLANE"


@dataclass(frozen=True)
class RayPoint:
    """A ray in R^{m+1}, stored by its unit representative (no sign quotient)."""

    rep: np.ndarray
    descriptor: AlgebraDescriptor

    def __post_init__(self):
        if abs(np.linalg.norm(self.rep) - 1.0) >= 1e-12:
            raise ValueError("representative must be a unit vector")

    def __eq__(self, other):
        return (
            isinstance(other, RayPoint)
            and self.descriptor == other.descriptor
            and np.array_equal(self.rep, other.rep)
        )


def ray(descriptor: AlgebraDescriptor, vec) -> RayPoint:
    v = np.asarray(vec, dtype=float)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise ValueError("zero vector spans no ray")
    return RayPoint(v / nrm, descriptor)


@dataclass
class ModelCurve:
    ts: np.ndarray
    points: np.ndarray    # (N, m+1)
    tangents: np.ndarray  # (N, m+1)
    kind: CurveKind
    descriptor: AlgebraDescriptor
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        dots = np.abs(np.einsum("ij,ij->i", self.points, self.tangents))
        if dots.size and dots.max() >= 1e-10:
            raise ValueError("tangents must be orthogonal to the sphere points")

    def __len__(self):
        return len(self.ts)


def project(g: GroupElement) -> RayPoint:
    """Normalized first column: the image of the base ray under g."""
    col = g.to_float()[:, 0]
    return ray(g.descriptor, col)


def first_column_ray_equal(g1: GroupElement, g2: GroupElement) -> bool:
    """Exact test that two exact group elements project to the same ray."""
    c1 = g1.entries[:, 0]
    c2 = g2.entries[:, 0]
    i = next((k for k, v in enumerate(c1) if v != 0), None)
    if i is None or c2[i] == 0:
        return False
    factor = c2[i] / c1[i]
    if factor <= 0:
        return False
    return all(c2[k] == factor * c1[k] for k in range(len(c1)))


def contact_form_value(x: RayPoint, v, tol=1e-8) -> float:
    """Omega(x.rep, v) for a tangent vector v; its kernel is the contact plane."""
    if x.descriptor.family is not Family.SP_CONTACT:
        raise ValueError("contact form lives on the symplectic model")
    v = np.asarray(v, dtype=float)
    if abs(float(np.dot(x.rep, v))) >= tol * max(1.0, np.linalg.norm(v)):
        raise ValueError("vector is not tangent to the sphere at x")
    om = rt.to_float(omega_matrix(x.descriptor))
    return float(x.rep @ om @ v)


def _nilpotent_float_powers(x: GradedElement):
    k = nilpotency_index(x)
    if k is None:
        return None
    powers = [np.eye(x.descriptor.matrix_size)]
    xf = x.to_float()
    for _ in range(k - 1):
        powers.append(powers[-1] @ xf)
    return powers


def flow_curve(
    g0: GroupElement,
    x: GradedElement,
    t_range=(-DEFAULT_T, DEFAULT_T),
    n_samples=DEFAULT_SAMPLES,
    kind=None,
) -> ModelCurve:
    """Samples of t -> project(g0 exp(t x)) with tangent data.

    kind=None infers CHAIN / CONTACT_GEODESIC / GENERIC from the grade of x;
    passing an explicit kind asserts the matching grade.
    """
    g = grade_of(x)
    inferred = {-1: CurveKind.CONTACT_GEODESIC, -2: CurveKind.CHAIN}.get(g, CurveKind.GENERIC)
    if kind is not None and kind is not CurveKind.GENERIC and kind is not inferred:
        raise ValueError(f"generator grade {g} does not produce a {kind.value}")
    kind = kind or inferred

    ts = np.linspace(t_range[0], t_range[1], n_samples)
    g0f = g0.to_float()
    xf = x.to_float()
    powers = _nilpotent_float_powers(x)
    points = np.empty((n_samples, len(xf)))
    tangents = np.empty_like(points)
    for i, t in enumerate(ts):
        if powers is not None:
            ex = powers[0].copy()
            tj = 1.0
            fact = 1.0
            for j in range(1, len(powers)):
                tj *= t
                fact *= j
                ex += (tj / fact) * powers[j]
        else:
            ex = scipy.linalg.expm(t * xf)
        gamma = g0f @ (ex[:, 0])
        dgamma = g0f @ (ex @ xf[:, 0])
        nrm = np.linalg.norm(gamma)
        p = gamma / nrm
        points[i] = p
        tangents[i] = dgamma / nrm - p * float(np.dot(p, dgamma)) / nrm
    return ModelCurve(ts, points, tangents, kind, x.descriptor, meta={"g0": g0f.tolist()})


def _omega_float(n):
    return rt.to_float(omega_matrix(sp_contact(n)))


def _darboux_basis(w_cols, om, seed_first=None):
    """Symplectic Gram-Schmidt inside the span of w_cols (Omega nondegenerate
    there); returns lists (d_1..d_n, f_1..f_n) with Omega(d_i, f_j) = delta_ij."""
    vecs = [w_cols[:, j].copy() for j in range(w_cols.shape[1])]
    if seed_first is not None:
        # replace the best-aligned column so the seed leads the recursion
        overlaps = [abs(float(np.dot(seed_first, v))) for v in vecs]
        vecs.pop(int(np.argmax(overlaps)))
        vecs.insert(0, seed_first / np.linalg.norm(seed_first))
    ds, fs = [], []
    while vecs:
        d = vecs.pop(0)
        d = d / np.linalg.norm(d)
        vals = [float(d @ om @ w) for w in vecs]
        j = int(np.argmax(np.abs(vals)))
        if abs(vals[j]) < 1e-12:
            raise np.linalg.LinAlgError("degenerate symplectic complement")
        f = vecs.pop(j) / vals[j]
        rest = []
        for w in vecs:
            w = w - float(d @ om @ w) * f + float(f @ om @ w) * d
            rest.append(w / np.linalg.norm(w))
        vecs = rest
        ds.append(d)
        fs.append(f)
    return ds, fs


def _complement_basis(u, c, om, variant=0):
    rows = np.vstack([u @ om, c @ om])
    w = scipy.linalg.null_space(rows)
    if variant:
        rng = np.random.default_rng(variant)
        q, _ = np.linalg.qr(rng.normal(size=(w.shape[1], w.shape[1])))
        w = w @ q
    return w


def symplectic_frame(u, c, variant=0) -> GroupElement:
    """g in Sp(2n+2) with first column u and last column c; needs Omega(u,c)=1.

    The middle columns are a Darboux basis of the Omega-complement of
    span{u, c}; variant>0 reshuffles the completion deterministically."""
    u = np.asarray(u, dtype=float)
    c = np.asarray(c, dtype=float)
    n = (len(u) - 2) // 2
    om = _omega_float(n)
    if abs(float(u @ om @ c) - 1.0) > 1e-9:
        raise ValueError("frame seed needs Omega(u, c) = 1")
    w = _complement_basis(u, c, om, variant)
    ds, fs = _darboux_basis(w, om)
    cols = [u] + ds + fs + [c]
    return GroupElement(sp_contact(n), np.column_stack(cols))


def chain_through(
    x: RayPoint,
    v,
    t_range=(-DEFAULT_T, DEFAULT_T),
    n_samples=DEFAULT_SAMPLES,
    variant=0,
) -> ModelCurve:
    """The chain through x tangent to v; requires v transverse to the contact
    plane.  Built as the grade -2 flow of a symplectic frame adapted to (x, v)."""
    v = np.asarray(v, dtype=float)
    if np.linalg.norm(v) == 0:
        raise ValueError("zero tangent direction")
    theta = contact_form_value(x, v)
    if abs(theta) < 1e-9:
        raise TangentInContactPlane("TANGENT_IN_CONTACT_PLANE")
    c = v / theta
    g = symplectic_frame(x.rep, c, variant)
    gen = basis(x.descriptor, -2)[0]
    curve = flow_curve(g, gen, t_range, n_samples, kind=CurveKind.CHAIN)
    curve.meta["frame"] = g.to_float().tolist()
    return curve


def contact_geodesic_through(
    x: RayPoint,
    v,
    t_range=(-DEFAULT_T, DEFAULT_T),
    n_samples=DEFAULT_SAMPLES,
) -> ModelCurve:
    """The contact geodesic through x tangent to v; v must lie in the contact
    plane.  Built as a grade -1 flow of an adapted symplectic frame."""
    v = np.asarray(v, dtype=float)
    nv = np.linalg.norm(v)
    if nv == 0:
        raise ValueError("zero tangent direction")
    theta = contact_form_value(x, v)
    if abs(theta) >= 1e-9 * nv:
        raise TangentNotInContactPlane("TANGENT_NOT_IN_CONTACT_PLANE")
    u = x.rep
    n = (len(u) - 2) // 2
    om = _omega_float(n)
    # last frame column: Omega(u, c0) = 1, Omega(v, c0) = 0 (minimum norm)
    a = np.vstack([u @ om, v @ om])
    c0, *_ = np.linalg.lstsq(a, np.array([1.0, 0.0]), rcond=None)
    w = _complement_basis(u, c0, om)
    # express v inside the complement to suppress roundoff drift
    v_in_w = w @ (w.T @ v)
    ds, fs = _darboux_basis(w, om, seed_first=v_in_w)
    cols = [u] + ds + fs + [c0]
    g = GroupElement(sp_contact(n), np.column_stack(cols))
    gen = basis(x.descriptor, -1)[0]
    curve = flow_curve(g, gen, t_range, n_samples, kind=CurveKind.CONTACT_GEODESIC)
    curve.meta["frame"] = g.to_float().tolist()
    return curve


def is_great_circle(curve: ModelCurve, tol=1e-9):
    """(flag, residual): residual is the rank-2 defect sigma_3/sigma_1 of the
    sample matrix; unit-norm samples on a plane through 0 form a great circle."""
    if len(curve) < 3:
        raise ValueError("need at least 3 samples")
    s = np.linalg.svd(curve.points, compute_uv=False)
    residual = float(s[2] / s[0])
    return residual < tol, residual


def circle_plane(points: np.ndarray) -> np.ndarray:
    """Orthonormal basis (d, 2) of the best rank-2 plane through the samples."""
    _, _, vt = np.linalg.svd(points)
    return vt[:2].T


def distance_to_circle(p: np.ndarray, plane: np.ndarray) -> float:
    """Distance from p to the unit circle in the given plane through 0."""
    proj = plane @ (plane.T @ p)
    nrm = np.linalg.norm(proj)
    if nrm < 1e-12:
        return float(np.sqrt(1.0 + float(np.dot(p, p))))
    return float(np.linalg.norm(p - proj / nrm))


def circle_hausdorff(c1: ModelCurve, c2: ModelCurve) -> float:
    """Hausdorff distance between the underlying unparametrized great circles,
    evaluated sample-against-fitted-circle in both directions."""
    p1 = circle_plane(c1.points)
    p2 = circle_plane(c2.points)
    d12 = max(distance_to_circle(p, p2) for p in c1.points)
    d21 = max(distance_to_circle(p, p1) for p in c2.points)
    return max(d12, d21)


def map_curve(g: GroupElement, curve: ModelCurve) -> ModelCurve:
    """Image of a sampled curve under the ray map of g, with tangents."""
    gf = g.to_float()
    pts = np.empty_like(curve.points)
    tans = np.empty_like(curve.tangents)
    for i in range(len(curve)):
        gp = gf @ curve.points[i]
        gv = gf @ curve.tangents[i]
        nrm = np.linalg.norm(gp)
        p = gp / nrm
        pts[i] = p
        tans[i] = gv / nrm - p * float(np.dot(p, gv)) / nrm
    return ModelCurve(curve.ts.copy(), pts, tans, curve.kind, curve.descriptor)


def theta_along(curve: ModelCurve) -> np.ndarray:
    """Contact form evaluated on the curve tangents, per sample."""
    om = _omega_float((curve.points.shape[1] - 2) // 2)
    return np.einsum("ij,jk,ik->i", curve.points, om, curve.tangents)


def curve_to_csv(curve: ModelCurve, path):
    d = curve.points.shape[1]
    theta = None
    if curve.descriptor.family is Family.SP_CONTACT:
        theta = theta_along(curve)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        header = (
            ["t"]
            + [f"rep{i}" for i in range(d)]
            + [f"tan{i}" for i in range(d)]
            + (["contact_form"] if theta is not None else [])
        )
        wr.writerow(header)
        for i in range(len(curve)):
            row = [repr(float(curve.ts[i]))]
            row += [repr(float(v)) for v in curve.points[i]]
            row += [repr(float(v)) for v in curve.tangents[i]]
            if theta is not None:
                row.append(repr(float(theta[i])))
            wr.writerow(row)


def curve_meta(curve: ModelCurve) -> dict:
    ok, residual = is_great_circle(curve)
    meta = {
        "kind": curve.kind.value,
        "family": curve.descriptor.family.value,
        "param": curve.descriptor.param,
        "n_samples": len(curve),
        "great_circle_residual": residual,
        "is_great_circle": ok,
    }
    if curve.descriptor.family is Family.SP_CONTACT:
        th = np.abs(theta_along(curve))
        meta["theta_abs_min"] = float(th.min())
        meta["theta_abs_max"] = float(th.max())
    if "frame" in curve.meta:
        meta["frame"] = curve.meta["frame"]
    return meta


def curve_meta_json(curve: ModelCurve) -> str:
    return json.dumps(curve_meta(curve), sort_keys=True, indent=2)
