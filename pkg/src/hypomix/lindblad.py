"""Lindblad generators, stationary states and the exact-spectrum reference.

Heisenberg picture::

    L A = i[H, A] + sum_j V_j^dag [A, V_j] + [V_j^dag, A] V_j

which expands to ``i[H, A] + sum_j (2 V_j^dag A V_j - V_j^dag V_j A - A V_j^dag V_j)``.
The Schrodinger generator is its Hilbert-Schmidt adjoint.

Row-major vectorisation is used for the "vec" matrices:
``vec(A X B) = (A kron B^T) vec(X)``.
"""

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DependencyError, DimensionError, ModelError, SolverError, MultiplicityWarning
from .gns import superop_to_matrix
from .pauli import MAX_QUBITS, PauliSum

HERMITIAN_TOL = 1e-10
STATIONARY_TOL = 1e-9
PSD_CLIP = 1e-10


@dataclass(frozen=True, eq=False)
class LindbladModel:
    hamiltonian: np.ndarray
    jumps: tuple
    sigma_hint: np.ndarray = None
    name: str = "model"
    params: dict = field(default_factory=dict)
    analytic: dict = field(default_factory=dict)

    def __post_init__(self):
        h = np.asarray(self.hamiltonian, dtype=np.complex128)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ModelError(f"hamiltonian must be square, got {h.shape}")
        if np.abs(h - h.conj().T).max(initial=0.0) > HERMITIAN_TOL:
            raise ModelError("hamiltonian is not Hermitian")
        d = h.shape[0]
        if d > 1 << MAX_QUBITS:
            raise ModelError(f"dimension {d} exceeds the cap {1 << MAX_QUBITS}")
        jumps = tuple(np.asarray(v, dtype=np.complex128) for v in self.jumps)
        for v in jumps:
            if v.shape != (d, d):
                raise ModelError(f"jump of shape {v.shape} in a dimension-{d} model")
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "jumps", jumps)
        if self.sigma_hint is not None:
            s = np.asarray(self.sigma_hint, dtype=np.complex128)
            if s.shape != (d, d):
                raise ModelError("sigma_hint has the wrong shape")
            object.__setattr__(self, "sigma_hint", s)

    @property
    def dim(self):
        return self.hamiltonian.shape[0]

    def _jump_sum(self):
        k = np.zeros_like(self.hamiltonian)
        for v in self.jumps:
            k += v.conj().T @ v
        return k

    # stack-aware actions, used by superop_to_matrix and for spot checks

    def hamiltonian_action(self, a):
        h = self.hamiltonian
        return 1j * (h @ a - a @ h)

    def dissipator_action(self, a):
        k = self._jump_sum()
        out = -(k @ a) - a @ k
        for v in self.jumps:
            out = out + 2.0 * (v.conj().T @ a @ v)
        return out

    def heisenberg_action(self, a):
        return self.hamiltonian_action(a) + self.dissipator_action(a)

    def schrodinger_action(self, rho):
        h = self.hamiltonian
        k = self._jump_sum()
        out = -1j * (h @ rho - rho @ h) - k @ rho - rho @ k
        for v in self.jumps:
            out = out + 2.0 * (v @ rho @ v.conj().T)
        return out


# ------------------------------------------------------------ vec matrices


def _vec_left(a):
    return np.kron(a, np.eye(a.shape[0]))


def _vec_right(b):
    return np.kron(np.eye(b.shape[0]), b.T)


def heisenberg_matrix(model, part="full"):
    """Row-major vec matrix of the Heisenberg generator (or one of its parts)."""
    h = model.hamiltonian
    out = np.zeros((model.dim ** 2,) * 2, dtype=np.complex128)
    if part in ("full", "hamiltonian"):
        out += 1j * (_vec_left(h) - _vec_right(h))
    if part in ("full", "dissipator"):
        k = model._jump_sum()
        out -= _vec_left(k) + _vec_right(k)
        for v in model.jumps:
            out += 2.0 * np.kron(v.conj().T, v.T)
    if part not in ("full", "hamiltonian", "dissipator"):
        raise ValueError(f"unknown part {part!r}")
    return out


def schrodinger_matrix(model):
    h = model.hamiltonian
    k = model._jump_sum()
    out = -1j * (_vec_left(h) - _vec_right(h)) - _vec_left(k) - _vec_right(k)
    for v in model.jumps:
        out += 2.0 * np.kron(v, v.conj())
    return out


def build_heisenberg(model, frame):
    """``(H_super, D_super)`` in the coordinates of ``frame``."""
    if frame is None:
        raise DependencyError("build_heisenberg needs a GnsFrame; see gns.build_frame")
    if frame.dim != model.dim:
        raise DimensionError("frame and model dimensions differ")
    return (superop_to_matrix(frame, model.hamiltonian_action),
            superop_to_matrix(frame, model.dissipator_action))


def build_schrodinger(model, frame):
    """The Schrodinger generator written in ``frame`` coordinates."""
    if frame is None:
        raise DependencyError("build_schrodinger needs a GnsFrame; see gns.build_frame")
    return superop_to_matrix(frame, model.schrodinger_action)


# ------------------------------------------------------- stationary states


def _max_abs(a):
    return float(np.abs(a).max(initial=0.0))


def zero_tolerance(generator):
    return 1e-9 * max(_max_abs(generator), np.finfo(float).tiny)


def psd_repair(rho, clip=PSD_CLIP):
    """Symmetrise, clip tiny negative eigenvalues and renormalise the trace."""
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if abs(tr) < 1e-300:
        raise SolverError("kernel element has zero trace")
    rho = rho / tr
    w, u = np.linalg.eigh(rho)
    if w[0] < -clip:
        raise SolverError(f"stationary candidate has eigenvalue {w[0]:.3e}", residual=w[0])
    w = np.clip(w, 0.0, None)
    rho = (u * w) @ u.conj().T
    return rho / np.trace(rho).real


def stationary_residual(model, rho):
    return _max_abs(model.schrodinger_action(np.asarray(rho, dtype=np.complex128)))


def stationary_state(model):
    """A stationary density matrix of the Schrodinger generator.

    A supplied ``sigma_hint`` is verified and returned.  Otherwise the null
    space of the vectorised generator is found by SVD; when it has more than
    one dimension the element closest to ``I/d`` is returned and a
    :class:`MultiplicityWarning` is issued.
    """
    d = model.dim
    scale = max(_max_abs(schrodinger_matrix(model)), 1e-300)
    if model.sigma_hint is not None:
        res = stationary_residual(model, model.sigma_hint)
        if res > STATIONARY_TOL * max(scale, 1.0):
            raise SolverError(f"sigma_hint is not stationary (residual {res:.3e})", res)
        return psd_repair(model.sigma_hint)
    m = schrodinger_matrix(model)
    _, sv, vh = np.linalg.svd(m)
    tol = zero_tolerance(m)
    null = vh[sv <= tol].conj()
    if len(null) == 0:
        raise SolverError(f"no stationary state (smallest singular value {sv[-1]:.3e})",
                          residual=sv[-1])
    if len(null) == 1:
        rho = null[0].reshape(d, d)
    else:
        warnings.warn(f"{len(null)} independent stationary states; choosing the one "
                      "closest to the maximally mixed state", MultiplicityWarning, stacklevel=2)
        target = np.eye(d).reshape(-1) / d
        rho = (null.T @ (null.conj() @ target)).reshape(d, d)
    rho = psd_repair(rho)
    res = stationary_residual(model, rho)
    if res > STATIONARY_TOL * max(scale, 1.0):
        raise SolverError(f"stationary residual {res:.3e} too large", res)
    return rho


# ------------------------------------------------------------ exact spectrum


@dataclass(frozen=True)
class SpectralReport:
    eigenvalues: np.ndarray
    gap: float
    kernel_dim: int
    primitive: bool
    zero_tol: float


def exact_spectrum(model):
    """Full spectrum of the Heisenberg generator and its spectral gap.

    The gap is ``min(-Re z)`` over eigenvalues ``z`` with ``|z| > zero_tol``.
    """
    m = heisenberg_matrix(model)
    if m.shape[0] > 4096:
        raise ModelError("superoperator too large for a dense eigensolve")
    try:
        ev = np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"eigensolver failed: {exc}") from exc
    tol = zero_tolerance(m)
    nonzero = np.abs(ev) > tol
    kernel_dim = int(np.count_nonzero(~nonzero))
    gap = float(np.min(-ev[nonzero].real)) if nonzero.any() else 0.0
    order = np.lexsort((ev.imag, -ev.real))
    return SpectralReport(ev[order], max(gap, 0.0), kernel_dim, kernel_dim == 1, tol)


# -------------------------------------------------------------- JSON models


def _dense_from_json(data):
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ModelError("dense matrices are row lists of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _dense_to_json(a):
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(a)]


def _operator_from_json(data, n_qubits, dim):
    if isinstance(data, list) and data and isinstance(data[0], dict):
        if n_qubits is None:
            n_qubits = len(data[0]["string"])
        s = PauliSum.from_json(data, n_qubits)
        return s.to_dense()
    if isinstance(data, list) and not data:
        if dim is None:
            raise ModelError("empty operator needs an explicit dim or n_qubits")
        return np.zeros((dim, dim), dtype=np.complex128)
    return _dense_from_json(data)


def model_from_json(data):
    """Parse a model description (dict or JSON text)."""
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ModelError(f"malformed model JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ModelError("model JSON must be an object")
    try:
        n = data.get("n_qubits")
        dim = data.get("dim") or (1 << n if n else None)
        h = _operator_from_json(data["hamiltonian"], n, dim)
        jumps = [_operator_from_json(v, n, h.shape[0]) for v in data.get("jumps", [])]
        sigma = data.get("sigma")
        sigma = _dense_from_json(sigma) if sigma is not None else None
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModelError):
            raise
        raise ModelError(f"invalid model description: {exc}") from exc
    if dim is not None and h.shape[0] != dim:
        raise ModelError(f"hamiltonian dimension {h.shape[0]} does not match dim {dim}")
    return LindbladModel(h, tuple(jumps), sigma, name=data.get("name", "model"),
                         params=dict(data.get("params", {})))


def model_to_json(model):
    out = {
        "name": model.name,
        "dim": model.dim,
        "hamiltonian": _dense_to_json(model.hamiltonian),
        "jumps": [_dense_to_json(v) for v in model.jumps],
        "params": model.params,
    }
    if model.sigma_hint is not None:
        out["sigma"] = _dense_to_json(model.sigma_hint)
    return out
