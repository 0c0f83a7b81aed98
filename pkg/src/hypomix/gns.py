"""GNS geometry ``<A, B> = tr(sigma A^dag B)`` and superoperator matrices.

A :class:`GnsFrame` fixes an orthonormal operator basis for a full-rank
stationary state ``sigma``.  In that basis every superoperator is an ordinary
``d^2 x d^2`` matrix and its GNS adjoint is the conjugate transpose.

Basis layout, in the eigenbasis ``U`` of ``sigma`` (eigenvalues ``s``):

* off-diagonal slot ``(i, j)``: ``U E_ij U^dag / sqrt(s_j)``;
* the ``d`` diagonal slots hold ``U diag(c_k) U^dag`` where the columns
  ``sqrt(s) * c_k`` are an orthonormal basis of ``C^d`` whose first column is
  ``sqrt(s)``, so slot ``(0, 0)`` is the identity operator.

Coordinate index ``k = i * d + j``; index 0 is the identity direction.
"""

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, DimensionError, FrameError

RANK_TOL = 1e-12
STATE_TOL = 1e-10

_frame_ids = itertools.count()


def _as_square(a, name="operator"):
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def is_hermitian(a, tol=1e-12):
    a = np.asarray(a)
    return np.max(np.abs(a - a.conj().T), initial=0.0) <= tol


@dataclass(frozen=True, eq=False)
class GnsFrame:
    sigma: np.ndarray
    sigma_eigvals: np.ndarray
    eigvecs: np.ndarray
    diag_basis: np.ndarray
    frame_id: int = field(default_factory=lambda: next(_frame_ids))

    @property
    def dim(self):
        return self.sigma.shape[0]

    @property
    def size(self):
        return self.dim ** 2

    @property
    def traceless_selector(self):
        return np.arange(1, self.size)

    @property
    def identity_index(self):
        return 0

    # ---- coordinates

    def to_coords(self, a):
        """GNS coordinates of an operator, or of a stack ``(K, d, d)``."""
        a = np.asarray(a, dtype=np.complex128)
        single = a.ndim == 2
        if single:
            a = a[None]
        d = self.dim
        if a.shape[1:] != (d, d):
            raise DimensionError(f"expected ({d}, {d}) operators, got {a.shape[1:]}")
        u = self.eigvecs
        rs = np.sqrt(self.sigma_eigvals)
        ap = u.conj().T @ a @ u
        ap = ap * rs[None, None, :]
        diag = np.einsum("kii->ki", ap)
        mixed = diag @ self.diag_basis.conj()
        idx = np.arange(d)
        ap[:, idx, idx] = mixed
        out = ap.reshape(len(a), d * d)
        return out[0] if single else out

    def from_coords(self, x):
        """Inverse of :meth:`to_coords`; accepts ``(d^2,)`` or ``(K, d^2)``."""
        x = np.asarray(x, dtype=np.complex128)
        single = x.ndim == 1
        if single:
            x = x[None]
        d = self.dim
        ap = x.reshape(len(x), d, d).copy()
        idx = np.arange(d)
        ap[:, idx, idx] = ap[:, idx, idx] @ self.diag_basis.T
        ap = ap / np.sqrt(self.sigma_eigvals)[None, None, :]
        u = self.eigvecs
        out = u @ ap @ u.conj().T
        return out[0] if single else out

    def basis_operator(self, k):
        e = np.zeros(self.size, dtype=np.complex128)
        e[k] = 1.0
        return self.from_coords(e)

    @property
    def basis(self):
        """All ``d^2`` basis operators as an array ``(d^2, d, d)``."""
        return self.from_coords(np.eye(self.size, dtype=np.complex128))

    def norm(self, a):
        return float(np.linalg.norm(self.to_coords(a)))


@dataclass(frozen=True, eq=False)
class SuperOpMatrix:
    """A superoperator written in the coordinates of a :class:`GnsFrame`.

    ``restricted`` marks matrices compressed to the traceless subspace.
    """

    matrix: np.ndarray
    frame: GnsFrame
    restricted: bool = False

    def __post_init__(self):
        if not np.all(np.isfinite(self.matrix)):
            raise ValueError("superoperator matrix has non-finite entries")

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def frame_id(self):
        return self.frame.frame_id

    def _same(self, other):
        if other.frame.frame_id != self.frame.frame_id or other.restricted != self.restricted:
            raise DimensionError("superoperators live in different frames")

    def __add__(self, other):
        self._same(other)
        return SuperOpMatrix(self.matrix + other.matrix, self.frame, self.restricted)

    def __sub__(self, other):
        self._same(other)
        return SuperOpMatrix(self.matrix - other.matrix, self.frame, self.restricted)

    def __matmul__(self, other):
        if isinstance(other, SuperOpMatrix):
            self._same(other)
            return SuperOpMatrix(self.matrix @ other.matrix, self.frame, self.restricted)
        return self.matrix @ other

    def __mul__(self, scalar):
        return SuperOpMatrix(scalar * self.matrix, self.frame, self.restricted)

    __rmul__ = __mul__

    def adjoint(self):
        return adjoint_gns(self)

    def apply(self, a):
        """Act on an operator (full frames only)."""
        if self.restricted:
            raise DimensionError("apply() needs an unrestricted superoperator")
        return self.frame.from_coords(self.matrix @ self.frame.to_coords(a))

    def to_json(self):
        m = self.matrix
        return json.dumps({
            "frame_id": self.frame.frame_id,
            "restricted": self.restricted,
            "shape": list(m.shape),
            "data": [[[float(v.real), float(v.imag)] for v in row] for row in m],
        })


def gns_inner(frame, a, b):
    """``tr(sigma a^dag b)``."""
    a = _as_square(a, "a")
    b = _as_square(b, "b")
    if a.shape != frame.sigma.shape or b.shape != frame.sigma.shape:
        raise DimensionError("operator and frame dimensions differ")
    return complex(np.trace(frame.sigma @ a.conj().T @ b))


def build_frame(sigma, rank_tol=RANK_TOL):
    """Orthonormal GNS frame for a full-rank density matrix ``sigma``."""
    sigma = _as_square(sigma, "sigma")
    if not is_hermitian(sigma, STATE_TOL):
        raise FrameError("sigma is not Hermitian")
    if abs(np.trace(sigma) - 1) > STATE_TOL:
        raise FrameError(f"sigma has trace {np.trace(sigma).real:.3g}, expected 1")
    sigma = 0.5 * (sigma + sigma.conj().T)
    s, u = np.linalg.eigh(sigma)
    if s[0] < -STATE_TOL:
        raise FrameError("sigma is not positive semidefinite", s[0])
    if s[0] <= rank_tol * s[-1]:
        raise FrameError(
            f"sigma is not full rank (smallest eigenvalue {s[0]:.3e})", s[0])
    q, _ = np.linalg.qr(np.sqrt(s)[:, None], mode="complete")
    if q[0, 0] * np.sqrt(s[0]) < 0:
        q = -q
    # first column of q is sqrt(s) exactly up to rounding; pin it
    q[:, 0] = np.sqrt(s)
    return GnsFrame(sigma=sigma, sigma_eigvals=s, eigvecs=u, diag_basis=q)


def superop_to_matrix(frame, action, check=True, seed=0):
    """Matrix of a linear map ``action`` on operators, in frame coordinates.

    ``action`` must accept a stack ``(K, d, d)`` and return the same shape.
    With ``check`` on, linearity is spot-checked on a random pair and the
    reconstruction of a random operator is verified.
    """
    basis = frame.basis
    images = np.asarray(action(basis), dtype=np.complex128)
    if images.shape != basis.shape:
        raise ContractError(f"action returned shape {images.shape}, expected {basis.shape}")
    m = frame.to_coords(images).T
    if check:
        rng = np.random.default_rng(seed)
        d = frame.dim
        x, y = (rng.normal(size=(2, d, d)) + 1j * rng.normal(size=(2, d, d)))
        a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
        fx, fy, fxy = action(np.stack([x, y, a * x + b * y]))
        scale = max(np.abs(fx).max(), np.abs(fy).max(), 1.0)
        if np.abs(fxy - a * fx - b * fy).max() > 1e-9 * scale * (abs(a) + abs(b)):
            raise ContractError("action is not linear")
        recon = frame.from_coords(m @ frame.to_coords(x))
        if np.abs(recon - fx).max() > 1e-9 * scale:
            raise ContractError("matrix does not reproduce the action")
    return SuperOpMatrix(m, frame)


def adjoint_gns(m):
    return SuperOpMatrix(m.matrix.conj().T, m.frame, m.restricted)


def restrict_traceless(m, frame=None):
    """Compress to the coordinates of ``{A : tr(sigma A) = 0}``."""
    if m.restricted:
        return m
    frame = frame or m.frame
    sel = frame.traceless_selector
    return SuperOpMatrix(m.matrix[np.ix_(sel, sel)], frame, restricted=True)


def identity_superop(frame):
    return SuperOpMatrix(np.eye(frame.size, dtype=np.complex128), frame)
