"""Hypocoercivity certificates for Lindblad generators ``L = H + D``.

Given the Hamiltonian part ``H`` and the dissipative part ``D`` (as matrices in
a GNS frame) the certifier checks

1. ``D`` is symmetric and ``-Re<DA, A> >= lambda_m |(I - P) A|^2``;
2. ``H`` is skew and ``|H P A|^2 >= lambda_M |P A|^2``;
3. ``P H P = 0``;
4. ``|H (I - P) A| + |D A| <= cm_prime |(I - P) A|``;

for ``tr(sigma A) = 0``, where ``P`` projects onto ``ker D``.  From the three
constants it evaluates the decay rate ``lam`` and prefactor ``C`` of
``|exp(tL) A| <= C exp(-lam t) |A|`` and the mixing-time bound
``log(C |sigma^-1|_inf / eps) / lam``.
"""

import json
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import AmbiguousKernelWarning, ConditionError, ConditioningWarning, HypomixError
from .gns import SuperOpMatrix, build_frame, restrict_traceless
from .lindblad import build_heisenberg, stationary_state

SCHEMA_VERSION = "1.0"
SYM_TOL = 1e-9
KERNEL_TOL = 1e-9
ALPHA_GRID_POINTS = 65
ALPHA_GRID_DECADES = 2.0
GOLDEN_ITERS = 80


def _mat(m):
    return m.matrix if isinstance(m, SuperOpMatrix) else np.asarray(m)


def _max_abs(a):
    return float(np.abs(a).max(initial=0.0))


def sym_tolerance(m):
    return SYM_TOL * _max_abs(_mat(m))


def _orth_complement(basis, size):
    """Orthonormal basis of the complement of the (orthonormal) columns."""
    if basis.shape[1] == 0:
        return np.eye(size, dtype=np.complex128)
    q, _ = np.linalg.qr(basis, mode="complete")
    return q[:, basis.shape[1]:]


# ---------------------------------------------------------------- projector


@dataclass(frozen=True, eq=False)
class KernelProjector:
    """Projector onto ``ker D`` (full frame coordinates, identity included).

    ``traceless_basis`` spans ``ker D`` intersected with the traceless
    coordinates; ``traceless_projector`` is the matching projector.
    """

    projector: np.ndarray
    kernel_basis: np.ndarray
    kernel_dim: int
    kernel_tol: float
    traceless_basis: np.ndarray
    ambiguous: bool = False

    @property
    def traceless_projector(self):
        kb = self.traceless_basis
        return kb @ kb.conj().T

    @property
    def complement_basis(self):
        """Orthonormal basis of the traceless range of ``I - P``."""
        return _orth_complement(self.traceless_basis, self.projector.shape[0] - 1)


def kernel_projector(d):
    """Orthogonal projector onto ``ker D`` in frame coordinates.

    ``d`` is the unrestricted dissipator.  Raises :class:`ConditionError`
    (condition 1) when it is not GNS-symmetric.
    """
    m = _mat(d)
    residual = _max_abs(m - m.conj().T)
    if residual > sym_tolerance(m):
        raise ConditionError(1, f"D is not GNS-symmetric (residual {residual:.3e})", residual)
    sym = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(sym)
    tol = KERNEL_TOL * max(np.abs(w).max(initial=0.0), np.finfo(float).tiny)
    inside = np.abs(w) <= tol
    near = (np.abs(w) > tol) & (np.abs(w) <= 10 * tol)
    if near.any():
        warnings.warn(f"{near.sum()} eigenvalue(s) of D within 10x of the kernel threshold",
                      AmbiguousKernelWarning, stacklevel=2)
    k = v[:, inside]
    # drop the identity coordinate and re-orthonormalise what is left
    u, s, _ = np.linalg.svd(k[1:, :], full_matrices=False)
    kb = u[:, s > 0.5]
    return KernelProjector(k @ k.conj().T, k, int(inside.sum()), tol, kb, bool(near.any()))


def _restricted(m, p):
    """Traceless block of ``m`` (no-op if it is already restricted)."""
    m = _mat(m)
    if m.shape[0] == p.projector.shape[0]:
        return m[1:, 1:]
    return m


# --------------------------------------------------------------- conditions


def check_condition_1(d, p):
    """``lambda_m``: smallest eigenvalue of ``-(D + D*)/2`` on the range of ``I - P``."""
    m = _restricted(d, p)
    q = p.complement_basis
    if q.shape[1] == 0:
        raise ConditionError(1, "D vanishes on the traceless space", 0.0)
    sym = -0.5 * (m + m.conj().T)
    lam = float(np.linalg.eigvalsh(q.conj().T @ sym @ q)[0])
    if lam <= p.kernel_tol:
        raise ConditionError(1, f"no dissipative gap (lambda_m = {lam:.3e})", lam)
    return lam


def check_condition_2(h, p):
    """``lambda_M``: smallest eigenvalue of ``(HP)*(HP)`` on traceless ``ker D``."""
    m = _restricted(h, p)
    skew = _max_abs(m + m.conj().T)
    if skew > sym_tolerance(m):
        raise ConditionError(2, f"H is not GNS-skew (residual {skew:.3e})", skew)
    kb = p.traceless_basis
    if kb.shape[1] == 0:
        raise ConditionError(2, "ker D is trivial on the traceless space", 0.0)
    hk = m @ kb
    lam = float(np.linalg.eigvalsh(hk.conj().T @ hk)[0])
    if lam <= KERNEL_TOL * max(_max_abs(m) ** 2, np.finfo(float).tiny):
        raise ConditionError(2, f"H does not stir ker D (lambda_M = {lam:.3e})", lam)
    return lam


def check_condition_3(h, p):
    """Spectral norm of ``P H P``."""
    m = _restricted(h, p)
    kb = p.traceless_basis
    if kb.shape[1] == 0:
        return 0.0
    return float(np.linalg.norm(kb.conj().T @ m @ kb, 2))


def check_condition_4(h, d, p):
    """``|H (I-P)| + |D (I-P)|``, operator norms on the range of ``I - P``."""
    hm, dm = _restricted(h, p), _restricted(d, p)
    q = p.complement_basis
    if q.shape[1] == 0:
        return 0.0
    return float(np.linalg.norm(hm @ q, 2) + np.linalg.norm(dm @ q, 2))


# ------------------------------------------------------ auxiliary operator


def build_A_operator(h, p, alpha):
    """``(alpha I + (HP)*(HP))^-1 (HP)*`` on the traceless coordinates."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    hm = _restricted(h, p)
    hp = hm @ p.traceless_projector
    lhs = alpha * np.eye(hm.shape[0]) + hp.conj().T @ hp
    cond = np.linalg.cond(lhs)
    if cond > 1e12:
        warnings.warn(f"A-operator solve has condition number {cond:.2e}",
                      ConditioningWarning, stacklevel=2)
    return np.linalg.solve(lhs, hp.conj().T)


def lyapunov_value(x, eps, a_op):
    """``|x|^2 / 2 - eps Re<A x, x>`` for coordinates ``x`` (or rows of a stack)."""
    x = np.asarray(x)
    ax = x @ a_op.T
    return 0.5 * np.sum(np.abs(x) ** 2, axis=-1) - eps * np.real(np.sum(ax.conj() * x, axis=-1))


def dissipation_value(x, eps, a_op, gen):
    """Minus the time derivative of the Lyapunov functional along ``gen``."""
    x = np.asarray(x)
    lx = x @ gen.T
    ax = x @ a_op.T
    alx = lx @ a_op.T

    def re_inner(u, v):
        return np.real(np.sum(u.conj() * v, axis=-1))

    return -re_inner(lx, x) + eps * re_inner(alx, x) + eps * re_inner(ax, lx)


# -------------------------------------------------------------- constants


@dataclass(frozen=True)
class Constants:
    eps: float
    kappa: float
    delta: float
    lam: float
    big_c: float
    cm_alpha: float


def bound_from_constants(lambda_m, lambda_M, cm_prime, alpha):
    """Explicit rate parameters for a given ``alpha``.

    With ``cm(alpha) = cm_prime / (2 sqrt(alpha))`` and ``r = lambda_M / (alpha + lambda_M)``::

        eps   = min(lambda_m r / (1 + cm)^2, 1) / 2
        kappa = min(lambda_m / 4, eps r / 3)
        delta = min(4 r / (3 (1 + cm)), 1)
        lam   = kappa / (1 + eps)
        C     = sqrt((1 + eps) / (1 - eps))
    """
    if lambda_m <= 0 or lambda_M <= 0 or alpha <= 0 or cm_prime < 0:
        raise ValueError("lambda_m, lambda_M and alpha must be positive, cm_prime nonnegative")
    cm = cm_prime / (2.0 * math.sqrt(alpha))
    r = lambda_M / (alpha + lambda_M)
    eps = 0.5 * min(lambda_m * r / (1.0 + cm) ** 2, 1.0)
    kappa = min(lambda_m / 4.0, eps * r / 3.0)
    delta = min(4.0 * r / (3.0 * (1.0 + cm)), 1.0)
    lam = kappa / (1.0 + eps)
    big_c = math.sqrt((1.0 + eps) / (1.0 - eps))
    return Constants(eps, kappa, delta, lam, big_c, cm)


def _rate(lambda_m, lambda_M, cm_prime, alpha):
    return bound_from_constants(lambda_m, lambda_M, cm_prime, alpha).lam


def optimize_alpha(lambda_m, lambda_M, cm_prime, trace=None):
    """Maximise the decay rate over ``alpha in [lambda_M/100, 100 lambda_M]``.

    Log-grid search (65 points, ``lambda_M`` included) refined by golden-section
    search in ``log(alpha)`` around the best grid point.  Ties go to the smaller
    ``alpha``.  If ``trace`` is a list, evaluated ``(alpha, rate)`` pairs are appended.
    """
    if lambda_m <= 0 or lambda_M <= 0:
        raise ValueError("lambda_m and lambda_M must be positive")
    logs = np.linspace(-ALPHA_GRID_DECADES, ALPHA_GRID_DECADES, ALPHA_GRID_POINTS)
    grid = lambda_M * 10.0 ** logs
    grid[ALPHA_GRID_POINTS // 2] = lambda_M
    rates = np.array([_rate(lambda_m, lambda_M, cm_prime, a) for a in grid])
    if trace is not None:
        trace.extend(zip(grid.tolist(), rates.tolist()))
    best = int(np.argmax(rates))
    lo = math.log(grid[max(best - 1, 0)])
    hi = math.log(grid[min(best + 1, len(grid) - 1)])
    f = lambda u: _rate(lambda_m, lambda_M, cm_prime, math.exp(u))  # noqa: E731
    g = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(GOLDEN_ITERS):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
        if b - a < 1e-12:
            break
    u = c if fc >= fd else d
    refined = math.exp(u)
    val = f(u)
    if trace is not None:
        trace.append((refined, val))
    return refined if val > rates[best] else float(grid[best])


def mixing_time_bound(lam, big_c, sigma, eps_target):
    """``log(C |sigma^-1|_inf / eps) / lam``, clamped at zero."""
    if lam <= 0:
        raise ValueError("decay rate must be positive")
    if not 0 < eps_target <= 1:
        raise ValueError("eps_target must lie in (0, 1]")
    s = np.linalg.eigvalsh(0.5 * (sigma + np.conj(sigma).T))
    if s[0] <= 1e-12 * s[-1]:
        raise ValueError("sigma must be full rank for a mixing-time bound")
    return max(0.0, math.log(big_c / s[0] / eps_target) / lam)


# ------------------------------------------------------------ certificate


@dataclass
class HypoCertificate:
    model: str
    params: dict
    passed: bool
    lambda_m: float = float("nan")
    lambda_M: float = float("nan")
    cm_prime: float = float("nan")
    cm_prime_numeric: float = float("nan")
    cm_alpha: dict = field(default_factory=dict)
    alpha_star: float = float("nan")
    epsilon: float = float("nan")
    kappa: float = float("nan")
    delta: float = float("nan")
    lam: float = float("nan")
    big_c: float = float("nan")
    tmix_bound: dict = field(default_factory=dict)
    kernel_dim: int = 0
    sigma_min_eig: float = float("nan")
    residuals: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    alpha_trace: list = field(default_factory=list)
    schema_version: str = SCHEMA_VERSION
    # not serialised: matrices needed by the dynamics checks
    artifacts: dict = field(default_factory=dict, repr=False, compare=False)

    def tmix(self, eps_target):
        if not self.passed:
            raise HypomixError("no mixing-time bound: certificate did not pass")
        return mixing_time_bound(self.lam, self.big_c, self.artifacts["sigma"], eps_target)

    def to_dict(self):
        out = asdict(self)
        out.pop("artifacts")
        out["tmix_bound"] = {repr(k): v for k, v in self.tmix_bound.items()}
        return _clean(out)

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def certify(model, eps_targets=(0.01,), cm_prime_override=None, sigma=None):
    """Run the full pipeline and return a :class:`HypoCertificate`.

    Condition failures are recorded on the certificate (``passed=False``);
    they never raise.  ``cm_prime_override`` is used only if it is at least the
    numerically computed constant.
    """
    cert = HypoCertificate(model=model.name, params=dict(model.params), passed=False)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        sigma = stationary_state(model) if sigma is None else np.asarray(sigma)
        frame = build_frame(sigma)
        h_full, d_full = build_heisenberg(model, frame)
        p = _projector_or_fail(d_full, cert)
        _run_conditions(cert, model, frame, h_full, d_full, p, cm_prime_override, eps_targets)
    cert.warnings = [str(w.message) for w in caught] + cert.warnings
    return cert


def _projector_or_fail(d_full, cert):
    m = d_full.matrix
    cert.residuals["d_symmetric"] = _max_abs(m - m.conj().T)
    cert.tolerances["d_symmetric"] = sym_tolerance(m)
    try:
        return kernel_projector(d_full)
    except ConditionError as exc:
        cert.failures.append(str(exc))
        return None


def _run_conditions(cert, model, frame, h_full, d_full, p, cm_override, eps_targets):
    cert.sigma_min_eig = float(frame.sigma_eigvals[0])
    cert.artifacts.update(sigma=frame.sigma, frame=frame, h_full=h_full, d_full=d_full)
    hm = h_full.matrix
    cert.residuals["h_skew"] = _max_abs(hm + hm.conj().T)
    cert.tolerances["h_skew"] = sym_tolerance(hm)
    comm = model.hamiltonian @ frame.sigma - frame.sigma @ model.hamiltonian
    cert.residuals["sigma_commutes"] = _max_abs(comm)
    cert.tolerances["sigma_commutes"] = SYM_TOL * max(_max_abs(model.hamiltonian), 1.0)
    if p is None:
        return
    cert.kernel_dim = p.kernel_dim
    h = restrict_traceless(h_full).matrix
    d = restrict_traceless(d_full).matrix
    cert.artifacts.update(h=h, d=d, projector=p)
    cert.residuals["php_zero"] = check_condition_3(h, p)
    cert.tolerances["php_zero"] = sym_tolerance(hm)
    for name in ("d_symmetric", "h_skew", "sigma_commutes", "php_zero"):
        if cert.residuals[name] > cert.tolerances[name]:
            cert.failures.append(f"residual {name} = {cert.residuals[name]:.3e} exceeds "
                                 f"{cert.tolerances[name]:.3e}")
    try:
        cert.lambda_m = check_condition_1(d, p)
    except ConditionError as exc:
        cert.lambda_m = exc.value
        cert.failures.append(str(exc))
    try:
        cert.lambda_M = check_condition_2(h, p)
    except ConditionError as exc:
        cert.lambda_M = exc.value if exc.value is not None else float("nan")
        cert.failures.append(str(exc))
    cert.cm_prime_numeric = check_condition_4(h, d, p)
    cert.cm_prime = cert.cm_prime_numeric
    if cm_override is not None:
        if cm_override >= cert.cm_prime_numeric * (1 - 1e-12):
            cert.cm_prime = float(cm_override)
        else:
            cert.warnings.append(f"cm_prime override {cm_override:.6g} is below the numeric "
                                 f"bound {cert.cm_prime_numeric:.6g}; ignored")
    if cert.failures:
        return
    trace = []
    alpha = optimize_alpha(cert.lambda_m, cert.lambda_M, cert.cm_prime, trace)
    k = bound_from_constants(cert.lambda_m, cert.lambda_M, cert.cm_prime, alpha)
    cert.alpha_trace = [list(t) for t in trace]
    cert.alpha_star = alpha
    cert.epsilon, cert.kappa, cert.delta = k.eps, k.kappa, k.delta
    cert.lam, cert.big_c = k.lam, k.big_c
    cert.cm_alpha = {"cm_prime": cert.cm_prime, "at_alpha_star": k.cm_alpha,
                     "form": "cm_prime / (2 sqrt(alpha))"}
    cert.passed = True
    cert.tmix_bound = {float(e): mixing_time_bound(k.lam, k.big_c, frame.sigma, e)
                       for e in eps_targets}
    cert.artifacts["a_op"] = build_A_operator(h, p, alpha)
