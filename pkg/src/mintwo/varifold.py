"""Graphs as weighted point clouds: mass, density, tangents, axis tilt.

A two-valued graph becomes a weighted sample cloud via the area formula:
one sample per grid cell per sheet, weighted by cell volume times the
Jacobian factor sqrt(det(I + G G^T)) from finite-difference gradients.
"""

import numpy as np
from scipy.spatial import cKDTree

from .geometry import Subspace, unit_ball_volume
from .twovalued import lipschitz_estimate


class SampledVarifold:
    """Weighted point cloud on an n-dimensional graph in R^(n+k).

    Fields: points (m, n+k); weights (m,); optional tangents (m, n, n+k)
    with orthonormal rows per sample; tangent_ok reliability flags; sheet
    labels (-1 when unknown); resolution (sample spacing scale, used for
    resolution floors); patch_radius (extent of the flat patch each sample
    represents, np.inf for exactly conical/planar clouds).
    """

    def __init__(self, n, k, points, weights, tangents=None, tangent_ok=None,
                 sheet=None, provenance="", resolution=None,
                 patch_radius=None):
        self.n = int(n)
        self.k = int(k)
        self.points = np.asarray(points, dtype=float)
        self.weights = np.asarray(weights, dtype=float)
        if self.points.ndim != 2 or self.points.shape[1] != n + k:
            raise ValueError("points must have shape (m, n+k)")
        if self.weights.shape != (self.points.shape[0],):
            raise ValueError("weights must be one per point")
        if not np.all(np.isfinite(self.points)):
            raise ValueError("non-finite sample coordinates")
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")
        self.tangents = None if tangents is None else np.asarray(tangents)
        m = self.points.shape[0]
        self.tangent_ok = (np.ones(m, dtype=bool) if tangent_ok is None
                           else np.asarray(tangent_ok, dtype=bool))
        self.sheet = (np.full(m, -1, dtype=int) if sheet is None
                      else np.asarray(sheet, dtype=int))
        self.provenance = provenance
        self.resolution = resolution
        self.patch_radius = patch_radius
        self._tree = None

    @property
    def total_mass(self):
        return float(self.weights.sum())

    def tree(self):
        if self._tree is None:
            self._tree = cKDTree(self.points)
        return self._tree

    def restrict(self, region):
        """Sub-cloud of samples inside a region (shares arrays by mask)."""
        keep = region.contains(self.points)
        return SampledVarifold(
            self.n, self.k, self.points[keep], self.weights[keep],
            None if self.tangents is None else self.tangents[keep],
            self.tangent_ok[keep], self.sheet[keep], self.provenance,
            self.resolution, self.patch_radius)

    def to_csv(self, path):
        d = self.n + self.k
        cols = ["x%d" % (i + 1) for i in range(d)] + ["weight"]
        blocks = [self.points, self.weights[:, None]]
        if self.tangents is not None:
            cols += ["t%d_%d" % (i + 1, j + 1)
                     for i in range(self.n) for j in range(d)]
            blocks.append(self.tangents.reshape(len(self.weights), -1))
        cols.append("sheet")
        blocks.append(self.sheet[:, None].astype(float))
        data = np.hstack(blocks)
        np.savetxt(path, data, delimiter=",", header=",".join(cols),
                   comments="")


def _orthonormal_graph_tangents(G):
    """Batched orthonormal bases of span{(e_i, G[i])} via QR.

    G has shape (m, n, k); returns (m, n, n+k) with orthonormal rows.
    """
    m, n, k = G.shape
    cols = np.concatenate([np.broadcast_to(np.eye(n), (m, n, n)), G], axis=2)
    q, _ = np.linalg.qr(np.transpose(cols, (0, 2, 1)))
    return np.transpose(q, (0, 2, 1))


def sample_graph(f, with_tangents=True, lipschitz=None):
    """Discretize a two-valued graph as a SampledVarifold.

    One sample per grid cell per sheet, placed at the cell-midpoint graph
    point reconstructed from forward-difference gradients (exact for linear
    sheets).  Per-cell gradients use the pairing of neighboring values that
    minimizes the pair metric; cells where the two values are closer than
    2 L h (pairing ambiguous) get tangent_ok = False.
    """
    n, k, h = f.n, f.k, f.h
    if not (np.all(np.isfinite(f.a1[f.mask])) and
            np.all(np.isfinite(f.a2[f.mask]))):
        raise ValueError("grid values are not finite")
    if lipschitz is None:
        lipschitz = lipschitz_estimate(f)
    if not np.isfinite(lipschitz):
        raise ValueError("grid values are not finite")
    base = tuple(slice(None, -1) for _ in range(n))
    cell_ok = f.mask[base].copy()
    for ax in range(n):
        sl = list(base)
        sl[ax] = slice(1, None)
        cell_ok &= f.mask[tuple(sl)]
    a1, a2 = f.a1[base], f.a2[base]
    sep_ok = np.linalg.norm(a1 - a2, axis=-1) > 2.0 * lipschitz * h
    g1 = np.empty(a1.shape[:-1] + (n, k))
    g2 = np.empty_like(g1)
    for ax in range(n):
        sl = list(base)
        sl[ax] = slice(1, None)
        b1, b2 = f.a1[tuple(sl)], f.a2[tuple(sl)]
        straight = (np.linalg.norm(a1 - b1, axis=-1)
                    + np.linalg.norm(a2 - b2, axis=-1))
        crossed = (np.linalg.norm(a1 - b2, axis=-1)
                   + np.linalg.norm(a2 - b1, axis=-1))
        swap = (crossed < straight)[..., None]
        g1[..., ax, :] = (np.where(swap, b2, b1) - a1) / h
        g2[..., ax, :] = (np.where(swap, b1, b2) - a2) / h
        slsep = list(base)
        slsep[ax] = slice(1, None)
        nb_sep = np.linalg.norm(f.a1[tuple(slsep)] - f.a2[tuple(slsep)],
                                axis=-1)
        sep_ok &= nb_sep > 2.0 * lipschitz * h
    mid = f.coords[base][cell_ok] + 0.5 * h

    points, weights, tangents, tok, sheets = [], [], [], [], []
    for sheet_id, (a, g) in enumerate([(a1, g1), (a2, g2)]):
        gc = g[cell_ok]
        vals = a[cell_ok] + 0.5 * h * gc.sum(axis=1)
        gram = np.einsum("mik,mjk->mij", gc, gc)
        det = np.linalg.det(np.eye(n) + gram)
        points.append(np.hstack([mid, vals]))
        weights.append(h ** n * np.sqrt(det))
        sheets.append(np.full(len(vals), sheet_id))
        tok.append(sep_ok[cell_ok])
        if with_tangents:
            tangents.append(_orthonormal_graph_tangents(gc))
    return SampledVarifold(
        n, k, np.vstack(points), np.concatenate(weights),
        np.concatenate(tangents) if with_tangents else None,
        np.concatenate(tok), np.concatenate(sheets),
        provenance="grid h=%g radius=%g" % (h, f.radius),
        resolution=h, patch_radius=h * np.sqrt(n))


def sample_cone(C, count_per_piece=4000, radius=2.0, seed=0):
    """Exact quasi-random sampling of a cone support as a SampledVarifold.

    Samples lie exactly on the support with exact tangent planes; weights
    are QMC area weights per piece.  patch_radius is infinite because every
    piece is flat.
    """
    from .cones import _ball_coefficients
    points, weights, tangents, sheets = [], [], [], []
    bases = C.piece_tangent_bases()
    for i, frame in enumerate(C.piece_frames()):
        basis, half = frame
        c, w = _ball_coefficients(basis.shape[0], count_per_piece, radius,
                                  seed + i, half=half)
        points.append(c @ basis)
        weights.append(w)
        tangents.append(np.broadcast_to(bases[i], (len(w),) + bases[i].shape))
        sheets.append(np.full(len(w), i))
    return SampledVarifold(
        C.n, C.k, np.vstack(points), np.concatenate(weights),
        np.concatenate(tangents), None, np.concatenate(sheets),
        provenance="cone %s" % C.kind,
        resolution=radius / count_per_piece ** (1.0 / C.n),
        patch_radius=np.inf)


def mass_in(V, R):
    """Total weight of samples inside a region."""
    return float(V.weights[R.contains(V.points)].sum())


def density_ratio(V, X, rho):
    """Mass of B_rho(X) divided by the n-volume of the flat n-ball.

    rho must exceed three sample spacings when the resolution is known.
    """
    if V.resolution is not None and rho < 3 * V.resolution:
        raise ValueError("rho %g below the resolution floor %g"
                         % (rho, 3 * V.resolution))
    X = np.asarray(X, dtype=float)
    idx = V.tree().query_ball_point(X, rho)
    m = float(V.weights[idx].sum())
    return m / (unit_ball_volume(V.n) * rho ** V.n)


class DensityProfile:
    """Density ratios of one center at dyadic radii (decreasing order)."""

    def __init__(self, center, radii, ratios):
        self.center = np.asarray(center, dtype=float)
        self.radii = list(radii)
        self.ratios = list(ratios)
        if any(b >= a for a, b in zip(self.radii, self.radii[1:])):
            raise ValueError("radii must be strictly decreasing")

    @property
    def smallest_radius_ratio(self):
        return self.ratios[-1]


def density_profile(V, X, rho, levels=4):
    """Ball-count density ratios at ``levels`` dyadic radii below rho."""
    radii = [rho / 2 ** j for j in range(levels)]
    if V.resolution is not None:
        radii = [r for r in radii if r >= 3 * V.resolution]
    if not radii:
        raise ValueError("all dyadic radii fall below the resolution floor")
    ratios = [density_ratio(V, X, r) for r in radii]
    return DensityProfile(X, radii, ratios)


def tangent_estimate(V, X, rho, sheet=None, residual_threshold=0.1):
    """Principal n-plane through X of nearby samples (weighted PCA).

    Returns a Subspace through X carrying two extra attributes: ``residual``
    (rms off-plane distance over rho) and ``reliable`` (residual below the
    threshold).  Restricting to a sheet label separates sheets near
    crossings when a decomposition is available.
    """
    X = np.asarray(X, dtype=float)
    idx = np.array(V.tree().query_ball_point(X, rho), dtype=int)
    if sheet is not None:
        idx = idx[V.sheet[idx] == sheet]
    if len(idx) < 3 * V.n:
        raise ValueError("too few samples (%d) in B_rho for a tangent fit"
                         % len(idx))
    q = V.points[idx] - X
    w = V.weights[idx]
    M = np.einsum("m,mi,mj->ij", w, q, q)
    evals, evecs = np.linalg.eigh(M)
    basis = evecs[:, -V.n:].T
    off = float(np.sqrt(max(evals[:-V.n].sum(), 0.0) / w.sum()))
    S = Subspace(basis, offset=X)
    S.residual = off / rho
    S.reliable = S.residual < residual_threshold
    return S


def axis_tilt(V, C, R):
    """Integral of the squared axis-tilt over a region.

    The integrand at a sample X is the sum over an orthonormal axis basis
    of the squared norms of the components orthogonal to the sample's
    tangent plane; zero exactly when every tangent contains the axis.
    """
    A = C.axis()
    if A is None:
        raise ValueError("axis tilt requires a cone with nonempty axis")
    if V.tangents is None:
        raise ValueError("axis tilt requires per-sample tangents")
    keep = R.contains(V.points)
    if A.dim == 0:
        return 0.0
    T = V.tangents[keep]
    w = V.weights[keep]
    coeff = np.einsum("mnd,jd->mnj", T, A.basis)
    a2 = A.dim - np.einsum("mnj,mnj->m", coeff, coeff)
    return float(np.sum(w * np.maximum(a2, 0.0)))
