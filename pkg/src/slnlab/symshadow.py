"""Symmetric-space shadows: membership by constrained minimization over the chamber.

A flag belongs to the shadow of the ball B_R(q) viewed from p when the chamber ray
through the flag's frame passes within R of q. Membership reduces to minimizing
H -> d(exp(H) o, q) over the positive chamber; a coarse ray/radius grid plus a
derivative-free polytope refinement yields an upper bound for the minimum, so a
positive membership verdict is certain and a negative one is best-effort.
"""

from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .errors import MembershipUnverified, SlnLabError
from .lie import CartanVector, GroupElement, cartan_projection
from .sampling import haar_frames
from .flags import Flag, batch_act, batch_margin_to_opposite

_BIG = 1e18


def project_chamber(v):
    """Euclidean projection onto zero-sum nonincreasing vectors (pool adjacent violators)."""
    v = np.asarray(v, dtype=float)
    v = v - v.mean()
    # nonincreasing isotonic projection preserves the (zero) sum
    vals = list(-v)
    weights = [1.0] * len(vals)
    blocks = []
    for val, w in zip(vals, weights):
        blocks.append([val, w])
        while len(blocks) > 1 and blocks[-2][0] > blocks[-1][0]:
            b = blocks.pop()
            a = blocks[-1]
            tot = a[1] + b[1]
            a[0] = (a[0] * a[1] + b[0] * b[1]) / tot
            a[1] = tot
    out = []
    for val, w in blocks:
        out.extend([val] * int(round(w)))
    return -np.asarray(out)


@dataclass(frozen=True)
class SymShadowQuery:
    """Shadow of the ball B_R(target o) viewed from base o."""

    base: GroupElement
    target: GroupElement
    R: float

    def __post_init__(self):
        if self.R <= 0:
            raise SlnLabError("R must be positive")


@dataclass
class MembershipResult:
    member: bool
    achieved: float
    minimizer: CartanVector


def _chamber_rays(n, count):
    """Deterministic spread of unit directions inside the positive chamber."""
    # extreme rays of the chamber: partial-sum coweight directions
    extremes = []
    for i in range(1, n):
        v = np.array([1.0] * i + [0.0] * (n - i))
        v -= v.mean()
        extremes.append(v / np.linalg.norm(v))
    rays = []
    rng = np.random.default_rng(12345)
    while len(rays) < count:
        w = rng.dirichlet(np.ones(len(extremes)))
        v = sum(wi * e for wi, e in zip(w, extremes))
        v = project_chamber(v)
        nv = np.linalg.norm(v)
        if nv > 1e-12:
            rays.append(v / nv)
    return rays


def _objective_factory(kframe, target_entries):
    core = kframe.T @ target_entries

    def objective(h_raw):
        h = project_chamber(h_raw)
        scaled = np.exp(-h)[:, None] * core
        svals = np.linalg.svd(scaled, compute_uv=False)
        if svals[-1] <= 0 or not np.all(np.isfinite(svals)):
            return _BIG
        logs = np.log(svals)
        return float(np.linalg.norm(logs - logs.mean()))

    return objective


def sym_shadow_membership(
    query: SymShadowQuery,
    f: Flag,
    rays: int = 9,
    radii: int = 20,
    refine_iters: int = 200,
) -> MembershipResult:
    """Decide whether the flag lies in the shadow, minimizing the ray-to-ball distance.

    A general base is reduced by translation to a shadow viewed from the origin.
    The reported distance is an upper bound for the true minimum.
    """
    base_inv = query.base.inverse()
    target = base_inv.matmul(query.target)
    frame = (base_inv.entries @ f.frame)
    # re-orthonormalize after translation
    q, r = np.linalg.qr(frame)
    d = np.sign(np.diag(r))
    d[d == 0] = 1
    frame = q * d

    n = target.n
    objective = _objective_factory(frame, target.entries)
    kappa_t = cartan_projection(target).coords
    scale = max(float(np.linalg.norm(kappa_t)), 1.0)

    best_h = project_chamber(kappa_t)
    best = objective(best_h)
    if best <= query.R:
        return MembershipResult(True, best, CartanVector(best_h))

    seeds = [np.zeros(n)]
    for ray in _chamber_rays(n, rays):
        for t in np.linspace(0.0, 1.5 * scale, radii):
            seeds.append(t * ray)
    for h in seeds:
        val = objective(h)
        if val < best:
            best, best_h = val, project_chamber(h)
            if best <= query.R * 0.5:
                return MembershipResult(True, best, CartanVector(best_h))

    res = scipy.optimize.minimize(
        objective,
        best_h,
        method="Nelder-Mead",
        options={"maxiter": refine_iters, "xatol": 1e-8, "fatol": 1e-10},
    )
    if res.fun < best:
        best, best_h = float(res.fun), project_chamber(res.x)
    return MembershipResult(bool(best <= query.R), best, CartanVector(best_h))


def ray_distance_bound(f: Flag, gamma: GroupElement, R: float, tol: float = 1e-7):
    """For a member flag, the chamber point at the target's Cartan vector stays 2R-close.

    Returns (lhs, bound, holds); raises MembershipUnverified when the flag cannot
    be confirmed to lie in the shadow.
    """
    query = SymShadowQuery(GroupElement.identity(gamma.n), gamma, R)
    res = sym_shadow_membership(query, f)
    if not res.member:
        raise MembershipUnverified(f"achieved distance {res.achieved:.6f} > R={R}")
    kappa = cartan_projection(gamma).coords
    m = np.exp(-kappa)[:, None] * (f.frame.T @ gamma.entries)
    svals = np.linalg.svd(m, compute_uv=False)
    logs = np.log(svals)
    lhs = float(np.linalg.norm(logs - logs.mean()))
    return lhs, 2 * R, lhs <= 2 * R + tol


def overlap_distance_bound(
    g1: GroupElement, g2: GroupElement, R: float, probe_budget: int = 64, seed: int = 0
):
    """Probe for a flag in both shadows; any hit forces orbit points 4R-close up to
    the Cartan difference. Returns (intersects, distance_bound_holds)."""
    n = g1.n
    q1 = SymShadowQuery(GroupElement.identity(n), g1, R)
    q2 = SymShadowQuery(GroupElement.identity(n), g2, R)

    probes = [Flag(u) for u in (kak_flag(g1), kak_flag(g2))]
    rng = np.random.default_rng(seed)
    if probe_budget > 2:
        probes += [Flag(fr) for fr in haar_frames(rng, n, probe_budget - 2)]

    intersects = False
    for f in probes:
        if sym_shadow_membership(q1, f).member and sym_shadow_membership(q2, f).member:
            intersects = True
            break
    if not intersects:
        return False, True
    lhs = cartan_projection(g1.inverse().matmul(g2)).norm
    rhs = 4 * R + float(
        np.linalg.norm(cartan_projection(g1).coords - cartan_projection(g2).coords)
    )
    return True, lhs <= rhs + 1e-6


def kak_flag(g: GroupElement):
    u, _, _ = np.linalg.svd(g.entries)
    if np.linalg.det(u) < 0:
        u = u.copy()
        u[:, -1] = -u[:, -1]
    return u


def shadows_certified_disjoint(g1: GroupElement, g2: GroupElement, R: float) -> bool:
    """Sufficient disjointness: orbit points farther apart than 4R plus the Cartan
    difference cannot share a shadow point. Unknown counts as overlapping."""
    lhs = cartan_projection(g1.inverse().matmul(g2)).norm
    rhs = 4 * R + float(
        np.linalg.norm(cartan_projection(g1).coords - cartan_projection(g2).coords)
    )
    return lhs > rhs


@dataclass
class InclusionProbeReport:
    holds: bool
    violations: int
    probes: int
    vacuous: bool = False


def flag_shadow_in_sym_shadow(
    g: GroupElement,
    epsilon: float,
    R: float,
    probe_budget: int = 64,
    seed: int = 0,
    cert=None,
) -> InclusionProbeReport:
    """Probe whether the 2eps flag shadow of g sits inside the shadow of B_R(g o)."""
    from .contraction import _certify_at_eps_or_2eps  # deferred: avoids import cycle

    if cert is None:
        cert = _certify_at_eps_or_2eps(g, epsilon, 1000, 1e-6, seed)
    if probe_budget <= 0:
        return InclusionProbeReport(holds=True, violations=0, probes=0, vacuous=True)

    rng = np.random.default_rng(seed)
    frames = []
    tries = 0
    while len(frames) < probe_budget and tries < 200:
        batch = haar_frames(rng, g.n, max(probe_budget, 32))
        margins = batch_margin_to_opposite(batch, cert.repelling)
        frames.extend(batch[margins >= 2 * epsilon])
        tries += 1
    frames = np.stack(frames[:probe_budget])
    pushed = batch_act(g, frames)

    query = SymShadowQuery(GroupElement.identity(g.n), g, R)
    violations = 0
    for i in range(pushed.shape[0]):
        if not sym_shadow_membership(query, Flag(pushed[i])).member:
            violations += 1
    return InclusionProbeReport(holds=violations == 0, violations=violations, probes=pushed.shape[0])


def calibrate_radius(
    g: GroupElement, epsilon: float, radii, probe_budget: int = 48, seed: int = 0
):
    """Sweep candidate radii; report violation counts and the smallest clean radius.

    Returns (rows, r_min) where rows are (epsilon, n, R, violations, probes).
    """
    rows = []
    r_min = None
    for R in sorted(radii):
        rep = flag_shadow_in_sym_shadow(g, epsilon, R, probe_budget, seed)
        rows.append((epsilon, g.n, R, rep.violations, rep.probes))
        if rep.holds and r_min is None:
            r_min = R
    return rows, r_min
