"""Built-in Lindblad models with their closed-form constants.

Each constructor returns a :class:`~hypomix.lindblad.LindbladModel` whose
``analytic`` dict carries whatever is known by hand (``sigma``, ``lambda_m``,
``lambda_M``, ``cm_prime``).  ``cm_prime`` entries are upper bounds, the rest
are exact.

Dephasing throughout means ``D A = gamma * sum_i (Z_i A Z_i - A)``, which in the
generator normalisation used here corresponds to jumps ``sqrt(gamma / 2) Z_i``.
Spin chains use open boundaries.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ModelError
from .lindblad import LindbladModel
from .pauli import PauliString, PauliSum, to_dense

MIN_QUBITS = 2
MAX_CHAIN_QUBITS = 6


def _check_gamma(gamma):
    if not (gamma > 0 and math.isfinite(gamma)):
        raise ModelError(f"gamma must be positive, got {gamma}")


def _check_n(n):
    if not (isinstance(n, (int, np.integer)) and MIN_QUBITS <= n <= MAX_CHAIN_QUBITS):
        raise ModelError(f"n must be an integer in [{MIN_QUBITS}, {MAX_CHAIN_QUBITS}], got {n}")


def dephasing_jumps(n, gamma):
    """``sqrt(gamma/2) Z_i`` for every site."""
    amp = math.sqrt(gamma / 2.0)
    return tuple(amp * PauliString.single(n, i, "Z").to_dense() for i in range(n))


def _maximally_mixed(d):
    return np.eye(d, dtype=np.complex128) / d


def toy_qubit():
    """``H = X`` with the single jump ``|0><0|``; stationary state ``I/2``."""
    h = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    v = np.array([[1, 0], [0, 0]], dtype=np.complex128)
    return LindbladModel(h, (v,), _maximally_mixed(2), name="toy", params={},
                         analytic={"sigma": _maximally_mixed(2), "gap": 0.5, "lambda_m": 1.0})


def qutrit(omega=1.0, gamma=1.0):
    """Three-level model: ``V1 = sqrt(g)|0><1|``, ``V2 = sqrt(g)|1><0|``, ``H = w(|1><2| + h.c.)``.

    With these operators the populations of ``|0>`` and ``|1>`` are exchanged
    symmetrically and ``H`` mixes ``|1>`` with ``|2>``, so the stationary state
    is ``I/3``.  The hand-derived constants for that state are
    ``lambda_m = gamma`` and ``lambda_M = 3 omega^2``.
    """
    if omega == 0 or not math.isfinite(omega):
        raise ModelError("omega must be nonzero")
    _check_gamma(gamma)
    e = np.eye(3, dtype=np.complex128)
    ket_bra = lambda i, j: np.outer(e[i], e[j])  # noqa: E731
    h = omega * (ket_bra(1, 2) + ket_bra(2, 1))
    jumps = (math.sqrt(gamma) * ket_bra(0, 1), math.sqrt(gamma) * ket_bra(1, 0))
    analytic = {"sigma": _maximally_mixed(3), "lambda_m": gamma, "lambda_M": 3.0 * omega ** 2,
                "cm_prime": 2.0 * abs(omega) * 2.0 + 4.0 * gamma}
    return LindbladModel(h, jumps, None, name="qutrit",
                         params={"omega": omega, "gamma": gamma}, analytic=analytic)


def _chain(n, couplings, field_strength):
    """Open chain: ``sum_i sum_(c, P) c P_i P_(i+1) + field * sum_i X_i``."""
    terms = []
    for i in range(n - 1):
        for c, letter in couplings:
            p = PauliString.single(n, i, letter)
            q = PauliString.single(n, i + 1, letter)
            terms.append((c, PauliString(n, p.x_mask | q.x_mask, p.z_mask | q.z_mask)))
    terms += [(field_strength, PauliString.single(n, i, "X")) for i in range(n)]
    return PauliSum(n, terms)


def tfim_dephasing(n=3, h=1.0, gamma=1.0):
    """Transverse-field Ising chain ``sum Z_i Z_(i+1) + h sum X_i`` with dephasing."""
    _check_n(n)
    _check_gamma(gamma)
    ham = _chain(n, [(1.0, "Z")], h)
    d = 1 << n
    analytic = {"sigma": _maximally_mixed(d), "lambda_m": 2.0 * gamma, "lambda_M": 4.0 * h * h,
                "cm_prime": 2.0 * ((n - 1) + n * abs(h)) + 2.0 * n * gamma}
    return LindbladModel(to_dense(ham), dephasing_jumps(n, gamma), _maximally_mixed(d),
                         name="tfim", params={"n": n, "h": h, "gamma": gamma},
                         analytic=analytic)


def heisenberg_dephasing(n=3, jx=1.0, jy=1.0, jz=1.0, h=1.0, gamma=1.0):
    """``-sum (Jx XX + Jy YY + Jz ZZ) + h sum X_i`` with dephasing.

    ``lambda_M = 4 h^2`` is a lower bound here (the exchange terms can only
    add stirring), so it is stored as ``lambda_M_lower``.
    """
    _check_n(n)
    _check_gamma(gamma)
    ham = _chain(n, [(-jx, "X"), (-jy, "Y"), (-jz, "Z")], h)
    d = 1 << n
    norm_bound = (n - 1) * (abs(jx) + abs(jy) + abs(jz)) + n * abs(h)
    analytic = {"sigma": _maximally_mixed(d), "lambda_m": 2.0 * gamma,
                "lambda_M_lower": 4.0 * h * h, "cm_prime": 2.0 * norm_bound + 2.0 * n * gamma}
    return LindbladModel(to_dense(ham), dephasing_jumps(n, gamma), _maximally_mixed(d),
                         name="heisenberg",
                         params={"n": n, "jx": jx, "jy": jy, "jz": jz, "h": h, "gamma": gamma},
                         analytic=analytic)


def laplacian_gap(adjacency):
    """Degree and second-smallest Laplacian eigenvalue of a regular graph."""
    a = np.asarray(adjacency, dtype=float)
    deg = a.sum(axis=1)
    w = np.linalg.eigvalsh(np.diag(deg) - a)
    return int(deg[0]), float(w[1])


def validate_adjacency(adjacency):
    a = np.asarray(adjacency)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ModelError("adjacency must be a square matrix")
    v = a.shape[0]
    if not np.isin(a, (0, 1)).all():
        raise ModelError("adjacency entries must be 0 or 1")
    if not np.array_equal(a, a.T):
        raise ModelError("adjacency must be symmetric")
    if np.any(np.diag(a)):
        raise ModelError("self-loops are not allowed")
    n = v.bit_length() - 1
    if v < 2 or (1 << n) != v or v > 1 << MAX_CHAIN_QUBITS:
        raise ModelError(f"vertex count must be a power of two in [2, 64], got {v}")
    deg = a.sum(axis=1)
    if not np.all(deg == deg[0]) or deg[0] == 0:
        raise ModelError("graph must be regular with positive degree")
    # connectivity by breadth-first search
    seen = np.zeros(v, dtype=bool)
    seen[0] = True
    frontier = [0]
    while frontier:
        nxt = np.nonzero(a[frontier].any(axis=0) & ~seen)[0]
        seen[nxt] = True
        frontier = list(nxt)
    if not seen.all():
        raise ModelError("graph is disconnected")
    return a.astype(float), n


def quantum_walk_dephasing(adjacency, gamma=1.0):
    """Continuous-time walk ``H = adjacency`` on ``2^N`` vertices with qubit dephasing.

    Vertex ``k`` is the computational basis state ``|k>``.  The Laplacian gap
    ``Delta`` is stored in ``params`` and ``lambda_M = 2 Delta``.
    """
    _check_gamma(gamma)
    a, n = validate_adjacency(adjacency)
    deg, delta = laplacian_gap(a)
    d = a.shape[0]
    analytic = {"sigma": _maximally_mixed(d), "lambda_m": 2.0 * gamma, "lambda_M": 2.0 * delta,
                "cm_prime": 2.0 * deg + 2.0 * n * gamma}
    return LindbladModel(a.astype(np.complex128), dephasing_jumps(n, gamma), _maximally_mixed(d),
                         name="walk",
                         params={"adjacency": a.astype(int).tolist(), "gamma": gamma,
                                 "degree": deg, "delta": delta},
                         analytic=analytic)


def cycle_graph(v):
    a = np.zeros((v, v), dtype=int)
    for i in range(v):
        a[i, (i + 1) % v] = a[(i + 1) % v, i] = 1
    return a


def complete_graph(v):
    return np.ones((v, v), dtype=int) - np.eye(v, dtype=int)


@dataclass(frozen=True)
class ModelRecipe:
    """A named constructor plus the parameters it accepts and their defaults."""

    name: str
    build: object
    defaults: dict = field(default_factory=dict)

    def __call__(self, **params):
        unknown = set(params) - set(self.defaults)
        if unknown:
            raise ModelError(f"recipe {self.name!r} does not take {sorted(unknown)}")
        kw = {**self.defaults, **params}
        return self.build(**kw)


RECIPES = {
    "toy": ModelRecipe("toy", toy_qubit, {}),
    "qutrit": ModelRecipe("qutrit", qutrit, {"omega": 1.0, "gamma": 1.0}),
    "tfim": ModelRecipe("tfim", tfim_dephasing, {"n": 3, "h": 1.0, "gamma": 1.0}),
    "heisenberg": ModelRecipe("heisenberg", heisenberg_dephasing,
                              {"n": 3, "jx": 1.0, "jy": 1.0, "jz": 1.0, "h": 1.0, "gamma": 1.0}),
    "walk": ModelRecipe("walk", quantum_walk_dephasing,
                        {"adjacency": cycle_graph(4).tolist(), "gamma": 1.0}),
}


def build_recipe(name, **params):
    try:
        recipe = RECIPES[name]
    except KeyError:
        raise ModelError(f"unknown recipe {name!r}; choose from {sorted(RECIPES)}") from None
    return recipe(**params)
