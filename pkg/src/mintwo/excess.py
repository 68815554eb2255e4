"""L2 excess functionals between sampled graphs and cone supports.

One-sided excess integrates squared distance from the samples to a cone
support; the two-sided quantity adds a reverse term integrating squared
distance from the cone support back to the samples, outside a collar around
the cone axis where the sheets cross.
"""

import json

import numpy as np

from .geometry import Ball, Cylinder
from .cones import _ball_coefficients

DEFAULT_COLLAR = 1.0 / 8.0


class ExcessReport:
    """One-sided and reverse excess components over a region."""

    def __init__(self, one_sided, reverse, region_kind, collar):
        if one_sided < 0 or reverse < 0:
            raise ValueError("excess components must be nonnegative")
        self.one_sided = float(one_sided)
        self.reverse = float(reverse)
        self.region_kind = region_kind
        self.collar = float(collar)

    @property
    def q(self):
        return float(np.sqrt(self.one_sided + self.reverse))

    def to_json(self):
        return json.dumps({"one_sided": self.one_sided,
                           "reverse": self.reverse,
                           "region": self.region_kind,
                           "collar": self.collar,
                           "q": self.q}, sort_keys=True)


def excess_E(V, C, R=None):
    """One-sided excess: sum of weight * dist(X, spt C)^2 over samples in R.

    Default region is the unit ball of the ambient space.
    """
    if R is None:
        R = Ball(np.zeros(V.n + V.k), 1.0)
    keep = R.contains(V.points)
    d = C.dist_to_support(V.points[keep])
    return float(np.sum(V.weights[keep] * d ** 2))


def dist_to_varifold(V, Y):
    """Distance from query points to the sampled surface.

    Nearest-sample distance, refined through each sample's tangent patch
    when tangents are present: the patch is the piece of the tangent plane
    of extent patch_radius around the sample, so the refined value is the
    exact distance to that patch (zero for queries on a flat exactly-sampled
    sheet, instead of the O(spacing) nearest-sample bias).
    """
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    d0, idx = V.tree().query(Y)
    if V.tangents is None or V.patch_radius is None:
        return d0
    T = V.tangents[idx]
    u = Y - V.points[idx]
    par = np.einsum("mnd,md->mn", T, u)
    par2 = np.einsum("mn,mn->m", par, par)
    perp2 = np.maximum(np.einsum("md,md->m", u, u) - par2, 0.0)
    over = np.maximum(np.sqrt(par2) - V.patch_radius, 0.0)
    return np.sqrt(perp2 + over ** 2)


def _cone_cylinder_samples(C0, count_per_piece, cyl_radius, collar, seed):
    """QMC samples of spt C0 in the cylinder, outside the axis collar.

    Returns (points, weights); weight sums estimate the n-area of the
    sampled region per piece.
    """
    pts, wts = [], []
    n = C0.n
    for i, (basis, half) in enumerate(C0.piece_frames()):
        dom = basis[:, :n]
        smin = np.linalg.svd(dom, compute_uv=False).min()
        rc = min(cyl_radius / max(smin, 0.1), 16.0 * cyl_radius)
        c, w = _ball_coefficients(basis.shape[0], count_per_piece, rc,
                                  seed + i, half=half)
        X = c @ basis
        keep = np.linalg.norm(X[:, :n], axis=-1) <= cyl_radius
        keep &= C0.r(X) >= collar
        pts.append(X[keep])
        wts.append(w[keep])
    return np.vstack(pts), np.concatenate(wts)


def excess_Q(V, C0, count_per_piece=4000, collar=DEFAULT_COLLAR, seed=0,
             full_report=False):
    """Two-sided excess between a sampled graph and a cylindrical cone.

    Square root of [one-sided excess over the cylinder B_2^n x R^k] plus
    [reverse excess of the cone support back to the samples, outside the
    collar r_C0 < 1/8].  The reverse integral uses quasi-random support
    sampling.
    """
    if C0.axis() is None:
        raise ValueError("the two-sided excess needs a cone with an axis")
    cyl = Cylinder(V.n, 2.0)
    one_sided = excess_E(V, C0, cyl)
    Y, w = _cone_cylinder_samples(C0, count_per_piece, 2.0, collar, seed)
    if not np.any(cyl.contains(V.points)):
        raise ValueError("no samples in the cylinder: reverse excess "
                         "undefined")
    d = dist_to_varifold(V, Y)
    reverse = float(np.sum(w * d ** 2))
    report = ExcessReport(one_sided, reverse, "cylinder r=2", collar)
    return report if full_report else report.q


def single_plane_ratio(V, C):
    """Excess against one plane of a pair over the excess against the pair.

    Numerator: squared distance to the first plane integrated over B_{1/2};
    denominator: squared distance to the whole support over B_1.  Returns 0
    when both vanish, inf when only the denominator does.
    """
    P1 = C.pieces[0]
    d = V.n + V.k
    inner = Ball(np.zeros(d), 0.5)
    keep = inner.contains(V.points)
    # the comparison concerns the part of V lying over P1: restrict the
    # numerator to samples at least as close to P1 as to the other piece
    d1 = P1.distance(V.points[keep])
    d2 = C.pieces[1].distance(V.points[keep])
    near = d1 <= d2
    num = float(np.sum(V.weights[keep][near] * d1[near] ** 2))
    den = excess_E(V, C, Ball(np.zeros(d), 1.0))
    if den == 0.0:
        return 0.0 if num <= 1e-14 * max(V.total_mass, 1.0) else np.inf
    return num / den


def coarser_excess(V, C, C0=None, R=None, restarts=4, seed=0):
    """Best excess over plane pairs whose axis strictly contains A(C).

    Searches pairs D whose axis contains A(C) plus one extra direction u
    (with u constrained inside A(C0) when a reference cone is given);
    restarts draw u from moment-dominant and random directions.  Returns
    (excess, minimizing cone).
    """
    from .conefit import fit_pair_with_axis
    A = C.axis()
    if A is None:
        raise ValueError("coarser excess needs a cone with an axis")
    d = V.n + V.k
    if C0 is not None:
        A0 = C0.axis()
        room = A0.basis - (A0.basis @ A.basis.T) @ A.basis if A.dim \
            else A0.basis
        from .geometry import orthonormalize
        room = orthonormalize(room)
    else:
        from .geometry import orthonormalize
        eye = np.eye(d)
        room = orthonormalize(eye - (eye @ A.basis.T) @ A.basis
                              if A.dim else eye)
    if room.shape[0] == 0:
        raise ValueError("axis of C admits no strict superspace here")
    if A.dim + 1 > V.n - 1:
        raise ValueError("enlarged axis would exceed the maximal pair-axis "
                         "dimension")
    if R is None:
        R = Ball(np.zeros(d), 1.0)
    keep = R.contains(V.points)
    pts, wts = V.points[keep], V.weights[keep]
    rng = np.random.default_rng(seed)
    # candidate extra directions: dominant moment directions, then random
    M = np.einsum("m,mi,mj->ij", wts, pts, pts)
    Mr = room @ M @ room.T
    _, vecs = np.linalg.eigh(Mr)
    candidates = [vecs[:, -1] @ room, vecs[:, 0] @ room]
    for _ in range(max(restarts - 2, 0)):
        g = rng.standard_normal(room.shape[0])
        candidates.append((g / np.linalg.norm(g)) @ room)
    best = None
    for u in candidates[:restarts]:
        axis_req = np.vstack([A.basis, u[None]]) if A.dim else u[None]
        try:
            D, val = fit_pair_with_axis(pts, wts, axis_req, d, V.n)
        except ValueError:
            continue
        if best is None or val < best[0]:
            best = (val, D)
    if best is None:
        raise ValueError("no admissible coarser pair found")
    return best


def radial_homogeneity_deficit(C0, u, r_lo, r_hi, tau=0.1, rays=256,
                               radii=16, seed=0):
    """Deficit from degree-one homogeneity of a graph over a cone support.

    Integrates R^(2-n) |d/dR (u(X)/R)|^2 over the annulus r_lo < |X| < r_hi
    of spt C0, restricted to rays staying outside the axis collar
    r_C0 > tau/2.  ``u`` maps support points (m, n+k) to value arrays; the
    caller folds any additive term c into u.  Exactly zero when u is
    homogeneous of degree one along rays.
    """
    if r_lo < tau / 2:
        raise ValueError("annulus reaches into the collar r < tau/2")
    if r_lo <= 0 or r_hi <= r_lo:
        raise ValueError("need 0 < r_lo < r_hi")
    n = C0.n
    total = 0.0
    from scipy.special import gamma
    sphere_area = 2.0 * np.pi ** (n / 2.0) / gamma(n / 2.0)
    for i, (basis, half) in enumerate(C0.piece_frames()):
        c, _ = _ball_coefficients(n, rays, 1.0, seed + 7 * i, half=half)
        norms = np.linalg.norm(c, axis=1)
        good = norms > 1e-6
        dirs = (c[good] / norms[good, None]) @ basis
        if len(dirs) == 0:
            continue
        # drop rays entering the collar anywhere in the annulus (the radial
        # coordinate scales linearly along a ray)
        rad = C0.r(dirs)
        keep = rad * r_lo > tau / 2 if tau > 0 else \
            np.ones(len(dirs), dtype=bool)
        dirs = dirs[keep]
        if len(dirs) == 0:
            continue
        w_dir = (sphere_area / (2.0 if half else 1.0)) / max(len(c[good]), 1)
        Rs = np.geomspace(r_lo, r_hi, radii)
        X = dirs[:, None, :] * Rs[None, :, None]
        vals = np.asarray(u(X.reshape(-1, X.shape[-1])), dtype=float)
        vals = vals.reshape(len(dirs), radii, -1)
        q = vals / Rs[None, :, None]
        dq = np.gradient(q, Rs, axis=1)
        integrand = np.einsum("mrk,mrk->mr", dq, dq)
        # d area = R^(n-1) dR dO; weight R^(2-n) leaves R dR
        ray_int = np.trapezoid(integrand * Rs[None, :], Rs, axis=1)
        total += w_dir * float(ray_int.sum())
    return total
