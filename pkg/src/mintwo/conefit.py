"""Best-fit cones, multiscale excess decay, and singular-set graph fitting.

Cone fitting is a two-cluster alternation: assign each sample to the nearer
piece, refit each piece by an exact weighted total-least-squares plane
(eigenvectors of the cluster's second-moment matrix), repeat.  Multi-start
perturbations guard against bad local minima; a fast path returns the
initial cone unchanged when it already fits to machine precision.
"""

import itertools
import json

import numpy as np

from .geometry import Ball, Subspace, orthonormalize
from .cones import Cone, nu
from .excess import excess_E, excess_Q
from .varifold import SampledVarifold, density_ratio

DELTA_THETA = 0.05
EXACT_FIT_FRACTION = 1e-12


def _top_eigvecs(M, count):
    _, vecs = np.linalg.eigh(M)
    return vecs[:, -count:].T[::-1]


def _moment(pts, wts):
    return np.einsum("m,mi,mj->ij", wts, pts, pts)


def _pair_excess(pts, wts, bases):
    ds = np.stack([np.linalg.norm(p - (p @ B.T) @ B, axis=-1)
                   for B in bases for p in [pts]])
    return float(np.sum(wts * ds.min(axis=0) ** 2)), ds.argmin(axis=0)


def _fit_pair_alternate(pts, wts, init_bases, axis_req=None, iters=40):
    """Two-plane alternation; planes through 0, optionally containing a
    required axis subspace (rows of ``axis_req``)."""
    d = pts.shape[1]
    n = init_bases[0].shape[0]
    if axis_req is not None and axis_req.size:
        Pax = axis_req.T @ axis_req
        perp = pts - pts @ Pax
        extra = n - axis_req.shape[0]
    else:
        axis_req = None
        perp = pts
        extra = n
    bases = [B.copy() for B in init_bases]
    prev_assign = None
    for _ in range(iters):
        _, assign = _pair_excess(pts, wts, bases)
        if prev_assign is not None and np.array_equal(assign, prev_assign):
            break
        prev_assign = assign
        for i in range(2):
            sel = assign == i
            if sel.sum() < n:
                continue
            M = _moment(perp[sel], wts[sel])
            if axis_req is not None:
                comp = orthonormalize(np.eye(d) - Pax)
                Mr = comp @ M @ comp.T
                vs = _top_eigvecs(Mr, extra) @ comp
                bases[i] = np.vstack([axis_req, vs])
            else:
                bases[i] = _top_eigvecs(M, n)
    val, _ = _pair_excess(pts, wts, bases)
    return bases, val


def fit_pair_with_axis(pts, wts, axis_req, d, n):
    """Fit a pair of n-planes through 0 both containing span(axis_req).

    Used by the coarser-excess search.  Returns (Cone, excess).
    """
    axis_req = orthonormalize(axis_req)
    Pax = axis_req.T @ axis_req if axis_req.size else np.zeros((d, d))
    comp = orthonormalize(np.eye(d) - Pax)
    perp = pts - pts @ Pax
    M = comp @ _moment(perp, wts) @ comp.T
    extra = n - axis_req.shape[0]
    if extra <= 0:
        raise ValueError("required axis already fills the planes")
    vs = _top_eigvecs(M, min(2 * extra, comp.shape[0])) @ comp
    if vs.shape[0] < 2 * extra:
        raise ValueError("degenerate sample moment for the axis fit")
    b1 = np.vstack([axis_req, vs[:extra]])
    b2 = np.vstack([axis_req, vs[extra:2 * extra]])
    bases, val = _fit_pair_alternate(pts, wts, [b1, b2], axis_req=axis_req)
    C = Cone.pair(Subspace(bases[0]), Subspace(bases[1]))
    return C, val


def _fit_four_hp(pts, wts, C0, iters=40):
    """Refit the four side directions of a four half-plane cone.

    The axis is held at A(C0); each cluster's side is the dominant
    eigenvector of its axis-orthogonal second moment.
    """
    A = C0.axis()
    d = pts.shape[1]
    Pax = A.basis.T @ A.basis if A.dim else np.zeros((d, d))
    q = pts - pts @ Pax
    sides = [H.side.copy() for H in C0.pieces]
    cone = C0
    prev_assign = None
    for _ in range(iters):
        ds = np.stack([H.distance(pts) for H in cone.pieces])
        assign = ds.argmin(axis=0)
        if prev_assign is not None and np.array_equal(assign, prev_assign):
            break
        prev_assign = assign
        new_sides = []
        for i in range(4):
            sel = assign == i
            if sel.sum() < 2:
                new_sides.append(sides[i])
                continue
            M = _moment(q[sel], wts[sel])
            v = _top_eigvecs(M, 1)[0]
            mean = np.average(q[sel], axis=0, weights=wts[sel])
            if v @ mean < 0:
                v = -v
            new_sides.append(v)
        sides = new_sides
        try:
            cone = Cone.four_half_planes(A, sides)
        except ValueError:
            raise ValueError("half-plane fit degenerated (sides merged)")
    d_final = cone.dist_to_support(pts)
    return cone, float(np.sum(wts * d_final ** 2))


def _perturb_basis(basis, rng, scale):
    return orthonormalize(basis + scale * rng.standard_normal(basis.shape))


def fit_cone(V, cone_class, C0, R=None, restarts=3, seed=0):
    """Cone of the given class minimizing the one-sided excess over R.

    Multi-start local alternation initialized at C0 and seeded
    perturbations of it; deterministic under a fixed seed.  When C0
    already fits to machine precision the search is skipped and C0 is
    returned unchanged.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    if cone_class not in ("pair", "four_hp"):
        raise ValueError("unknown cone class %r" % cone_class)
    d = V.n + V.k
    if R is None:
        R = Ball(np.zeros(d), 1.0)
    keep = R.contains(V.points)
    pts, wts = V.points[keep], V.weights[keep]
    if len(pts) < 2 * V.n + 2:
        raise ValueError("too few samples in the fitting region")
    mass = float(wts.sum())
    init_val = float(np.sum(wts * C0.dist_to_support(pts) ** 2))
    if init_val <= EXACT_FIT_FRACTION * mass:
        return C0, init_val
    rng = np.random.default_rng(seed)
    best = (init_val, C0)
    failures = 0
    for r in range(restarts):
        try:
            if cone_class == "pair":
                if r == 0:
                    inits = [P.basis for P in C0.pieces]
                else:
                    inits = [_perturb_basis(P.basis, rng, 0.05)
                             for P in C0.pieces]
                bases, val = _fit_pair_alternate(pts, wts, inits)
                cone = Cone.pair(Subspace(bases[0]), Subspace(bases[1]))
            elif cone_class == "four_hp":
                start = C0
                if r > 0:
                    A = C0.axis()
                    sides = [_perturb_basis(H.side[None], rng, 0.05)[0]
                             for H in C0.pieces]
                    start = Cone.four_half_planes(A, sides)
                cone, val = _fit_four_hp(pts, wts, start)
            else:
                raise ValueError("unknown cone class %r" % cone_class)
        except ValueError:
            failures += 1
            continue
        if val < best[0]:
            best = (val, cone)
    if failures == restarts and best[1] is C0:
        raise ValueError("cone fit failed on all restarts")
    return best[1], best[0]


class DecayReport:
    """Per-scale record of fitted cones and scaled excess components."""

    def __init__(self, theta, records, fitted_2alpha, truncated,
                 exact_cone, config):
        self.theta = float(theta)
        self.records = records
        self.fitted_2alpha = fitted_2alpha
        self.truncated = bool(truncated)
        self.exact_cone = bool(exact_cone)
        self.config = dict(config)

    def to_json(self):
        recs = [{"j": r["j"], "scale": r["scale"],
                 "one_sided_scaled": r["one_sided_scaled"],
                 "reverse_scaled": r["reverse_scaled"],
                 "nu_step": r["nu_step"], "rot_step": r["rot_step"],
                 "cone": json.loads(r["cone"].to_json())}
                for r in self.records]
        return json.dumps({"theta": self.theta, "records": recs,
                           "fitted_2alpha": self.fitted_2alpha,
                           "truncated": self.truncated,
                           "exact_cone": self.exact_cone,
                           "config": self.config}, sort_keys=True)

    def to_csv(self, path):
        rows = [(r["j"], r["scale"], r["one_sided_scaled"],
                 r["reverse_scaled"], r["nu_step"], r["rot_step"])
                for r in self.records]
        np.savetxt(path, np.array(rows, dtype=float), delimiter=",",
                   header="j,scale,one_sided_scaled,reverse_scaled,"
                          "nu_step,rot_step", comments="")


def _rescaled(V, center, rho, cyl=2.2):
    """Blow-up of V at center by 1/rho, restricted near the cylinder."""
    pts = (V.points - center) / rho
    keep = np.linalg.norm(pts[:, :V.n], axis=-1) <= cyl
    return SampledVarifold(
        V.n, V.k, pts[keep], V.weights[keep] / rho ** V.n,
        None if V.tangents is None else V.tangents[keep],
        V.tangent_ok[keep], V.sheet[keep], V.provenance,
        None if V.resolution is None else V.resolution / rho,
        None if V.patch_radius is None else V.patch_radius / rho)


def _axis_angle(C, D):
    """Largest principal angle between the axes of two cones (0 when the
    axes are trivial)."""
    A, B = C.axis(), D.axis()
    if A is None or B is None or A.dim == 0 or B.dim == 0:
        return 0.0
    s = np.linalg.svd(A.basis @ B.basis.T, compute_uv=False)
    return float(np.arccos(np.clip(s.min(), -1.0, 1.0)))


def decay_pipeline(V, C0, theta=0.5, J=5, center=None, cone_class="pair",
                   q_gate=np.inf, seed=0, fit_restarts=3,
                   reverse_samples=2000, fit_min_samples=4000):
    """Measure excess decay under repeated rescaling and cone refitting.

    For j = 1..J: blow up V at the center by theta^-j, fit a cone of the
    given class warm-started from the previous scale's cone, and record the
    scale-normalized one-sided and reverse excess plus the cone-step sizes.
    The decay exponent 2*alpha is the log-log slope of the one-sided series.

    Fits use the samples in the rescaled unit ball; when fewer than
    fit_min_samples remain there, the fit window is widened by one ladder
    rung (factor 1/theta), and when even the widened window is starved the
    ladder stops with the truncation flag (a starved window makes the
    fitted cone resolution-limited rather than data-driven).  Excess is
    always recorded over the unit ball regardless of the fit window.
    """
    d = V.n + V.k
    center = np.zeros(d) if center is None else np.asarray(center, float)
    rho_d = max(0.05, 0.0 if V.resolution is None else 8 * V.resolution)
    dens = density_ratio(V, center, rho_d)
    if dens < 2.0 - DELTA_THETA:
        raise ValueError("not a density >= 2 point: ratio %.3f at rho %.3g"
                         % (dens, rho_d))
    V0 = _rescaled(V, center, 1.0)
    q0 = excess_Q(V0, C0, count_per_piece=reverse_samples, seed=seed)
    if q0 > q_gate:
        raise ValueError("initial two-sided excess %.3g exceeds the gate"
                         % q0)
    mass = V0.total_mass
    records = []
    prev = C0
    truncated = False
    for j in range(1, J + 1):
        scale = theta ** j
        if V.resolution is not None and scale < 8 * V.resolution:
            truncated = True
            break
        Vj = _rescaled(V, center, scale)
        radii = np.linalg.norm(Vj.points, axis=1)
        if np.count_nonzero(radii < 1.0) >= fit_min_samples:
            fit_radius = 1.0
        elif np.count_nonzero(radii < 1.0 / theta) >= fit_min_samples:
            fit_radius = 1.0 / theta
        else:
            truncated = True
            break
        cone, _ = fit_cone(Vj, cone_class, prev,
                           R=Ball(np.zeros(d), fit_radius),
                           restarts=fit_restarts, seed=seed + j)
        one = excess_E(Vj, cone, Ball(np.zeros(d), 1.0))
        qrep = excess_Q(Vj, cone, count_per_piece=reverse_samples,
                        seed=seed + 31 * j, full_report=True)
        records.append({"j": j, "scale": scale, "fit_radius": fit_radius,
                        "one_sided_scaled": one,
                        "reverse_scaled": qrep.reverse,
                        "nu_step": nu(cone, prev, samples=800,
                                      seed=seed + 17 * j),
                        "rot_step": _axis_angle(cone, prev),
                        "cone": cone})
        prev = cone
    exact = all(r["one_sided_scaled"] <= 1e-13 * max(mass, 1.0)
                for r in records)
    fitted = None
    usable = [r for r in records
              if r["one_sided_scaled"] > 1e-13 * max(mass, 1.0)]
    if not exact and len(usable) >= 4:
        x = np.log([r["scale"] for r in usable])
        y = np.log([r["one_sided_scaled"] for r in usable])
        fitted = float(np.polyfit(x, y, 1)[0])
    config = {"theta": theta, "J": J, "center": center.tolist(),
              "cone_class": cone_class, "seed": seed,
              "q_gate": q_gate if np.isfinite(q_gate) else None,
              "initial_q": q0,
              "fit_min_samples": fit_min_samples,
              "density_ratio": dens, "density_radius": rho_d}
    return DecayReport(theta, records, fitted, truncated, exact, config)


def _poly_features(y, degree=3):
    """Multivariate polynomial features of total degree <= degree."""
    y = np.atleast_2d(y)
    m = y.shape[1]
    cols, powers = [], []
    for total in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(m),
                                                             total):
            p = np.ones(y.shape[0])
            for i in combo:
                p = p * y[:, i]
            cols.append(p)
            powers.append(combo)
    return np.column_stack(cols), powers


def detect_high_density_points(V, ball, delta=DELTA_THETA, stride=None):
    """Samples in the ball whose density ratio reaches 2 - delta.

    Candidates are samples lying close to the opposite sheet (cheap
    pre-filter); each candidate's ball-count density is then verified.
    """
    keep = np.where(ball.contains(V.points))[0]
    if stride is None:
        stride = max(1, len(keep) // 4000)
    keep = keep[::stride]
    rho_d = max(0.05, 0.0 if V.resolution is None else 8 * V.resolution)
    res = V.resolution or rho_d / 4
    other = []
    tree = V.tree()
    near = tree.query_ball_point(V.points[keep], 2.5 * res)
    for row, idx in zip(near, keep):
        if any(i != idx and V.sheet[i] != V.sheet[idx] for i in row):
            other.append(idx)
    out = []
    for idx in other:
        try:
            if density_ratio(V, V.points[idx], rho_d) >= 2.0 - delta:
                out.append(V.points[idx])
        except ValueError:
            continue
    return np.array(out).reshape(len(out), V.n + V.k)


def singular_graph_fit(V, C0, ball, delta=DELTA_THETA, alpha=0.5):
    """Fit the detected high-density set as a polynomial graph over the axis.

    Returns (coefficient table, report dict).  The detected points must be
    graphical over A(C0): two points on one axis fiber further apart than
    three sample spacings raise an error instead of being averaged away.
    """
    A = C0.axis()
    if A is None or A.dim == 0:
        raise ValueError("graph fitting needs a positive-dimensional axis")
    pts = detect_high_density_points(V, ball, delta=delta)
    if len(pts) == 0:
        raise ValueError("no density >= 2 - delta points detected")
    h = V.resolution or 1e-2
    y = pts @ A.basis.T
    perp = pts - y @ A.basis
    # graphicality: group points by axis coordinate within h
    order = np.lexsort(y.T)
    ys, ps = y[order], perp[order]
    for i in range(len(ys) - 1):
        close = np.linalg.norm(ys[i + 1:] - ys[i], axis=-1) <= h
        if close.any():
            gap = np.linalg.norm(ps[i + 1:][close] - ps[i], axis=-1)
            if np.any(gap > 3 * h):
                raise ValueError("not graphical over axis: fiber spread "
                                 "%.3g > 3h" % gap.max())
    feats, powers = _poly_features(y, degree=3)
    coef, *_ = np.linalg.lstsq(feats, perp, rcond=None)
    fit = feats @ coef
    residual = float(np.abs(fit - perp).max())
    # Holder seminorm of the derivative of the fitted polynomial on pairs
    holder = _poly_deriv_holder(coef, powers, y, alpha)
    report = {"count": int(len(pts)), "residual_sup": residual,
              "holder_alpha": alpha, "holder_seminorm": holder,
              "degree": 3}
    return coef, report


def _poly_deriv_holder(coef, powers, y, alpha):
    """Holder-alpha seminorm of the gradient of a fitted polynomial,
    evaluated on the sample axis coordinates."""
    y = np.atleast_2d(y)
    m = y.shape[1]
    grads = np.zeros((y.shape[0], m, coef.shape[1]))
    for ci, combo in enumerate(powers):
        for var in range(m):
            cnt = combo.count(var)
            if cnt == 0:
                continue
            rest = list(combo)
            rest.remove(var)
            p = np.ones(y.shape[0]) * cnt
            for i in rest:
                p = p * y[:, i]
            grads[:, var, :] += p[:, None] * coef[ci][None, :]
    best = 0.0
    g = grads.reshape(y.shape[0], -1)
    for i in range(len(y) - 1):
        dy = np.linalg.norm(y[i + 1:] - y[i], axis=-1)
        dg = np.linalg.norm(g[i + 1:] - g[i], axis=-1)
        ok = dy > 1e-12
        if ok.any():
            best = max(best, float((dg[ok] / dy[ok] ** alpha).max()))
    return best
