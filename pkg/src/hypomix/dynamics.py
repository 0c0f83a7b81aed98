"""Time evolution under Lindblad semigroups and envelope checks.

Observables are propagated in GNS-frame coordinates, states in row-major
vectorised form.  All exponentials are dense (``scipy.linalg.expm``), which is
cheap at the dimensions the package allows.
"""

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .certifier import lyapunov_value
from .errors import DependencyError, HorizonError
from .gns import SuperOpMatrix
from .lindblad import schrodinger_matrix

ENVELOPE_SLACK = 1e-7
CSV_COLUMNS = ("time", "gns_norm", "trace_distance", "lyapunov", "envelope_value", "envelope_ok")


def propagate(generator, x0, t):
    """``exp(t M) x0`` for a generator matrix ``M`` (columns of ``x0`` propagate together)."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    m = generator.matrix if isinstance(generator, SuperOpMatrix) else np.asarray(generator)
    x0 = np.asarray(x0, dtype=np.complex128)
    if t == 0:
        return x0.copy()
    return expm(t * m) @ x0


def propagate_grid(generator, x0, times):
    """Values at every grid time; ``times`` must be nondecreasing and start at >= 0.

    Steps between consecutive times reuse one exponential per distinct step.
    """
    times = np.asarray(times, dtype=float)
    if len(times) and (times[0] < 0 or np.any(np.diff(times) < 0)):
        raise ValueError("times must be nonnegative and nondecreasing")
    m = generator.matrix if isinstance(generator, SuperOpMatrix) else np.asarray(generator)
    x = np.asarray(x0, dtype=np.complex128)
    out = np.empty((len(times),) + x.shape, dtype=np.complex128)
    prev = 0.0
    cache = {}
    for i, t in enumerate(times):
        dt = t - prev
        if dt > 0:
            key = float(dt)
            if key not in cache:
                cache[key] = expm(dt * m)
            x = cache[key] @ x
        out[i] = x
        prev = t
    return out


def default_time_grid(t_end, n=200):
    """``0`` followed by ``n - 1`` log-spaced points on ``[1e-4 t_end, t_end]``."""
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    return np.concatenate(([0.0], np.logspace(math.log10(t_end) - 4, math.log10(t_end), n - 1)))


def trace_norm(a):
    a = np.asarray(a)
    return np.abs(np.linalg.eigvalsh(0.5 * (a + np.swapaxes(a.conj(), -1, -2)))).sum(axis=-1)


@dataclass
class Trajectory:
    times: np.ndarray
    gns_norm: np.ndarray = None
    trace_distance: np.ndarray = None
    lyapunov: np.ndarray = None
    envelope_value: np.ndarray = None
    envelope_ok: np.ndarray = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if len(t) and (t[0] != 0 or np.any(np.diff(t) <= 0)):
            raise ValueError("trajectory times must start at 0 and increase strictly")
        self.times = t

    @property
    def all_ok(self):
        return self.envelope_ok is None or bool(np.all(self.envelope_ok))

    def column(self, name):
        if name == "time":
            return self.times
        v = getattr(self, name)
        return np.full(len(self.times), np.nan) if v is None else v

    def to_csv(self, fh=None):
        """Write (or return, when ``fh`` is None) the CSV text."""
        buf = fh or io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        cols = [self.column(c) for c in CSV_COLUMNS]
        for row in zip(*cols):
            out = []
            for name, v in zip(CSV_COLUMNS, row):
                if name == "envelope_ok":
                    out.append("" if self.envelope_ok is None else str(bool(v)).lower())
                else:
                    out.append(format_float(v))
            w.writerow(out)
        if fh is None:
            return buf.getvalue()
        return None


def format_float(v):
    v = float(v)
    return "nan" if math.isnan(v) else f"{v:.17g}"


def _need(cert):
    if cert is None or not cert.passed:
        raise DependencyError("a passed certificate is required for envelope checks")
    return cert


def center_observable(sigma, a):
    """``A - tr(sigma A) I``."""
    a = np.asarray(a, dtype=np.complex128)
    return a - np.trace(sigma @ a) * np.eye(a.shape[0])


def heisenberg_decay(model, cert, a0, times, generator="full"):
    """Trajectory of ``|A(t)|`` with the envelope ``C exp(-lam t) |A0|``.

    ``generator`` selects ``"full"``, ``"dissipator"`` or ``"hamiltonian"``;
    the envelope and Lyapunov columns only apply to the full generator.
    """
    cert = _need(cert)
    frame = cert.artifacts["frame"]
    a0 = center_observable(frame.sigma, a0)
    parts = {"full": cert.artifacts["h_full"].matrix + cert.artifacts["d_full"].matrix,
             "dissipator": cert.artifacts["d_full"].matrix,
             "hamiltonian": cert.artifacts["h_full"].matrix}
    gen = parts[generator]
    x0 = frame.to_coords(a0)
    xs = propagate_grid(gen, x0, times)
    norms = np.linalg.norm(xs, axis=1)
    traj = Trajectory(times, gns_norm=norms, meta={"picture": "heisenberg",
                                                   "generator": generator})
    if generator == "full":
        n0 = float(np.linalg.norm(x0))
        env = cert.big_c * np.exp(-cert.lam * traj.times) * n0
        traj.lyapunov = lyapunov_value(xs[:, 1:], cert.epsilon, cert.artifacts["a_op"])
        traj.envelope_value = env
        traj.envelope_ok = norms <= env + ENVELOPE_SLACK * max(n0, 1.0)
    return traj


def relative_density_norm(frame, rho):
    """GNS norm of ``sigma^-1 rho``."""
    sinv_rho = np.linalg.solve(frame.sigma, rho)
    return frame.norm(sinv_rho)


def evolve_states(model, rho0, times):
    """States ``rho(t)`` for a stack of initial states ``(K, d, d)``."""
    rho0 = np.asarray(rho0, dtype=np.complex128)
    d = model.dim
    vecs = rho0.reshape(len(rho0), d * d).T
    out = propagate_grid(schrodinger_matrix(model), vecs, times)
    return out.transpose(0, 2, 1).reshape(len(times), len(rho0), d, d)


def schrodinger_decay(model, cert, rho0, times):
    """Trace distance to ``sigma`` with the envelope ``C |sigma^-1 rho0| exp(-lam t)``."""
    cert = _need(cert)
    frame = cert.artifacts["frame"]
    sigma = frame.sigma
    rhos = evolve_states(model, np.asarray(rho0)[None], times)[:, 0]
    dist = trace_norm(rhos - sigma)
    weight = relative_density_norm(frame, np.asarray(rho0, dtype=np.complex128))
    env = cert.big_c * weight * np.exp(-cert.lam * np.asarray(times, dtype=float))
    return Trajectory(times, trace_distance=dist, envelope_value=env,
                      envelope_ok=dist <= env + ENVELOPE_SLACK,
                      meta={"picture": "schrodinger", "generator": "full"})


def haar_state(d, rng):
    psi = rng.normal(size=d) + 1j * rng.normal(size=d)
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def probe_states(d, n_random=20, seed=0):
    """Computational-basis pure states followed by seeded Haar-random pure states."""
    rng = np.random.default_rng(seed)
    basis = [np.diag(np.eye(d)[k]).astype(np.complex128) for k in range(d)]
    return np.array(basis + [haar_state(d, rng) for _ in range(n_random)])


def empirical_mixing_time(model, eps_target, times, sigma=None, n_random=20, seed=0):
    """Smallest grid time after which every probe stays within ``eps_target`` of ``sigma``.

    This is an empirical lower estimate of the true mixing time (the supremum
    over all states is replaced by a finite probe set).
    """
    from .lindblad import stationary_state

    times = np.asarray(times, dtype=float)
    sigma = stationary_state(model) if sigma is None else np.asarray(sigma)
    rhos = evolve_states(model, probe_states(model.dim, n_random, seed), times)
    worst = trace_norm(rhos - sigma).max(axis=1)
    bad = np.nonzero(worst > eps_target)[0]
    if len(bad) == 0:
        return float(times[0])
    if bad[-1] == len(times) - 1:
        raise HorizonError(f"distance {worst[-1]:.3e} still above {eps_target} at the "
                           f"last grid time {times[-1]:.6g}", float(worst[-1]))
    return float(times[bad[-1] + 1])
