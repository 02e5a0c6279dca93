"""The full flag variety of R^n and its opposite, as orthonormal frames.

A Flag's i-th subspace is spanned by the first i frame columns; an OppositeFlag's
i-th subspace by the last i columns. Frames are never sign-canonicalized: all
comparisons go through orthogonal projectors, which kill column signs.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NotLoxodromic, RankDeficient, SlnLabError
from .lie import GroupElement, is_loxodromic

_ORTHO_TOL = 1e-9


def _check_orthogonal(frame):
    f = np.asarray(frame, dtype=float)
    if f.ndim != 2 or f.shape[0] != f.shape[1]:
        raise SlnLabError(f"frame must be square, got {f.shape}")
    if np.max(np.abs(f.T @ f - np.eye(f.shape[0]))) > _ORTHO_TOL:
        raise SlnLabError("frame is not orthogonal within 1e-9")
    return f


@dataclass(frozen=True)
class Flag:
    frame: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "frame", _check_orthogonal(self.frame))

    @property
    def n(self):
        return self.frame.shape[0]

    @classmethod
    def _trusted(cls, frame):
        """Skip validation for frames produced by our own decompositions."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "frame", frame)
        return obj


@dataclass(frozen=True)
class OppositeFlag:
    frame: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "frame", _check_orthogonal(self.frame))

    @property
    def n(self):
        return self.frame.shape[0]

    @classmethod
    def _trusted(cls, frame):
        obj = object.__new__(cls)
        object.__setattr__(obj, "frame", frame)
        return obj


@dataclass(frozen=True)
class TransversalityMargin:
    """min over levels of the smallest singular value of the concatenated frames.

    Zero exactly when some pair of complementary subspaces fails to span R^n.
    """

    value: float


def standard_flag(n) -> Flag:
    return Flag(np.eye(n))


def standard_opposite(n) -> OppositeFlag:
    return OppositeFlag(np.eye(n))


def _qr_pos(m):
    q, r = np.linalg.qr(m)
    d = np.sign(np.diag(r))
    d[d == 0] = 1.0
    return q * d, r * d[:, None]


def _orthonormalize_front(m):
    return _qr_pos(m)[0]


def _orthonormalize_back(m):
    # orthonormalize from the last column so the trailing spans are preserved
    return _orthonormalize_front(m[:, ::-1])[:, ::-1]


def _check_full_rank(m):
    svals = np.linalg.svd(m, compute_uv=False)
    if svals[-1] <= 10 * m.shape[0] * np.finfo(float).eps * svals[0]:
        raise RankDeficient("numerical rank < n")


def flag_from_frame(m) -> Flag:
    """Orthonormalize the columns in order, preserving leading-column spans."""
    m = np.asarray(m, dtype=float)
    _check_full_rank(m)
    return Flag(_orthonormalize_front(m))


def opposite_from_frame(m) -> OppositeFlag:
    """Orthonormalize from the last column, preserving trailing-column spans."""
    m = np.asarray(m, dtype=float)
    _check_full_rank(m)
    return OppositeFlag(_orthonormalize_back(m))


def act_on_flag(g: GroupElement, f):
    """The linear action on either flag variety."""
    if isinstance(f, Flag):
        return Flag(_orthonormalize_front(g.entries @ f.frame))
    if isinstance(f, OppositeFlag):
        return OppositeFlag(_orthonormalize_back(g.entries @ f.frame))
    raise SlnLabError(f"cannot act on {type(f).__name__}")


def _projector_metric(f1, f2, reverse):
    n = f1.shape[0]
    best = 0.0
    for i in range(1, n):
        if reverse:
            b1, b2 = f1[:, n - i :], f2[:, n - i :]
        else:
            b1, b2 = f1[:, :i], f2[:, :i]
        diff = b1 @ b1.T - b2 @ b2.T
        best = max(best, float(np.linalg.norm(diff, 2)))
    return best


def flag_distance(f1: Flag, f2: Flag) -> float:
    """max over levels of the operator norm of the projector difference; in [0, 1]."""
    return _projector_metric(f1.frame, f2.frame, reverse=False)


def opposite_distance(y1: OppositeFlag, y2: OppositeFlag) -> float:
    """The projector metric on the trailing-column filtrations."""
    return _projector_metric(y1.frame, y2.frame, reverse=True)


def _margin_value(xframe, yframe):
    n = xframe.shape[0]
    worst = np.inf
    for i in range(1, n):
        m = np.concatenate([xframe[:, :i], yframe[:, i:]], axis=1)
        worst = min(worst, float(np.linalg.svd(m, compute_uv=False)[-1]))
    return max(worst, 0.0)


def transversality_margin(x: Flag, y: OppositeFlag) -> TransversalityMargin:
    """Smallest singular value over the concatenations (first i of x, last n-i of y)."""
    return TransversalityMargin(_margin_value(x.frame, y.frame))


def _sorted_eig(g: GroupElement, gap_tol):
    """Eigenvectors as columns sorted by decreasing eigenvalue modulus."""
    if not is_loxodromic(g, gap_tol):
        raise NotLoxodromic()
    w, v = np.linalg.eig(g.entries)
    if np.max(np.abs(w.imag)) > 1e-8 * np.max(np.abs(w)):
        raise NotLoxodromic("complex eigenvalues despite moduli gaps")
    order = np.argsort(-np.abs(w))
    return np.real(w[order]), np.real(v[:, order])


def attracting_flag(g: GroupElement, gap_tol: float = 1e-6) -> Flag:
    """Flag of the eigenvectors in decreasing-modulus order; fixed by the action."""
    _, v = _sorted_eig(g, gap_tol)
    return Flag(_orthonormalize_front(v))


def repelling_flag(g: GroupElement, gap_tol: float = 1e-6) -> OppositeFlag:
    """Opposite flag whose i-th subspace spans the i smallest-modulus eigenvectors."""
    _, v = _sorted_eig(g, gap_tol)
    return OppositeFlag(_orthonormalize_back(v))


def flag_to_json(f):
    kind = "flag" if isinstance(f, Flag) else "opposite"
    return {"frame": f.frame.tolist(), "kind": kind}


def flag_from_json(obj):
    frame = np.asarray(obj["frame"], dtype=float)
    if obj.get("kind") == "opposite":
        return OppositeFlag(frame)
    return Flag(frame)


# ---------------------------------------------------------------------------
# Batched helpers over stacks of frames (shape (B, n, n)). These are the hot
# paths of the samplers and certifiers; the public single-object operations
# above stay the reference implementations.
# ---------------------------------------------------------------------------


def batch_orthonormalize_front(frames):
    q, r = np.linalg.qr(frames)
    d = np.sign(np.einsum("bii->bi", r))
    d[d == 0] = 1.0
    return q * d[:, None, :]


def batch_orthonormalize_back(frames):
    return batch_orthonormalize_front(frames[:, :, ::-1])[:, :, ::-1]


def batch_act(g: GroupElement, frames):
    return batch_orthonormalize_front(g.entries[None] @ frames)


def batch_margin_to_opposite(frames, y: OppositeFlag):
    """Transversality margins of a stack of flag frames against one opposite flag."""
    n = y.n
    out = np.full(frames.shape[0], np.inf)
    for i in range(1, n):
        m = np.concatenate([frames[:, :, :i], np.broadcast_to(y.frame[:, i:], (frames.shape[0], n, n - i))], axis=2)
        out = np.minimum(out, np.linalg.svd(m, compute_uv=False)[:, -1])
    return np.maximum(out, 0.0)


def batch_distance_to_flag(frames, x: Flag):
    """Projector-metric distances of a stack of flag frames to one flag."""
    n = x.n
    out = np.zeros(frames.shape[0])
    for i in range(1, n):
        p = frames[:, :, :i] @ np.swapaxes(frames[:, :, :i], 1, 2)
        q = x.frame[:, :i] @ x.frame[:, :i].T
        out = np.maximum(out, np.linalg.svd(p - q[None], compute_uv=False)[:, 0])
    return out


def batch_pair_distance(frames_a, frames_b):
    """Projector-metric distances between paired stacks of flag frames."""
    n = frames_a.shape[1]
    out = np.zeros(frames_a.shape[0])
    for i in range(1, n):
        pa = frames_a[:, :, :i] @ np.swapaxes(frames_a[:, :, :i], 1, 2)
        pb = frames_b[:, :, :i] @ np.swapaxes(frames_b[:, :, :i], 1, 2)
        out = np.maximum(out, np.linalg.svd(pa - pb, compute_uv=False)[:, 0])
    return out
