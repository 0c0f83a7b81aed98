"""Symbolic Pauli strings and Pauli sums on n qubits.

A string is stored as two bitmasks: bit ``i`` of ``x_mask`` is set when qubit
``i`` carries X or Y, bit ``i`` of ``z_mask`` when it carries Z or Y.  Labels
read left to right as qubit 0 .. n-1, so ``"XZ"`` is ``X (x) Z``.

Multiplication is a mask XOR plus a phase count; with the convention
``Y = iXZ`` every phase is one of ``1, i, -1, -i``.
"""

import json
from dataclasses import dataclass
from numbers import Number

import numpy as np

from . import _kernels
from .errors import DimensionError, SizeError

MAX_QUBITS = 6
DROP_TOL = 1e-14

_PHASES = (1, 1j, -1, -1j)
_LETTERS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


@dataclass(frozen=True, order=True)
class PauliString:
    n_qubits: int
    x_mask: int = 0
    z_mask: int = 0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        limit = 1 << self.n_qubits
        if not (0 <= self.x_mask < limit and 0 <= self.z_mask < limit):
            raise ValueError(f"masks do not fit in {self.n_qubits} bits")

    @classmethod
    def from_label(cls, label):
        label = label.strip().upper()
        if not label:
            raise ValueError("empty Pauli label")
        x = z = 0
        for i, ch in enumerate(label):
            try:
                bx, bz = _LETTERS[ch]
            except KeyError:
                raise ValueError(f"bad Pauli letter {ch!r} in {label!r}") from None
            x |= bx << i
            z |= bz << i
        return cls(len(label), x, z)

    @classmethod
    def identity(cls, n_qubits):
        return cls(n_qubits)

    @classmethod
    def single(cls, n_qubits, site, letter):
        """``letter`` on ``site``, identity elsewhere."""
        bx, bz = _LETTERS[letter.upper()]
        return cls(n_qubits, bx << site, bz << site)

    @property
    def label(self):
        out = []
        for i in range(self.n_qubits):
            bx = (self.x_mask >> i) & 1
            bz = (self.z_mask >> i) & 1
            out.append("IZXY"[bx * 2 + bz])
        return "".join(out)

    def is_identity(self):
        return self.x_mask == 0 and self.z_mask == 0

    def is_z_string(self):
        return self.x_mask == 0

    @property
    def weight(self):
        return (self.x_mask | self.z_mask).bit_count()

    def commutes_with(self, other):
        _check_same(self, other)
        s = (self.x_mask & other.z_mask).bit_count() + (self.z_mask & other.x_mask).bit_count()
        return s % 2 == 0

    def __mul__(self, other):
        if isinstance(other, PauliString):
            phase, r = multiply(self, other)
            return PauliSum(self.n_qubits, [(phase, r)])
        if isinstance(other, Number):
            return PauliSum(self.n_qubits, [(other, self)])
        return NotImplemented

    __rmul__ = __mul__

    def to_dense(self):
        return to_dense(PauliSum(self.n_qubits, [(1.0, self)]))

    def __str__(self):
        return self.label


def _check_same(p, q):
    if p.n_qubits != q.n_qubits:
        raise DimensionError(f"{p.n_qubits}-qubit and {q.n_qubits}-qubit operands")


def multiply(p, q):
    """Return ``(phase, r)`` with ``p @ q == phase * r``."""
    _check_same(p, q)
    x3 = p.x_mask ^ q.x_mask
    z3 = p.z_mask ^ q.z_mask
    e = ((p.x_mask & p.z_mask).bit_count() + (q.x_mask & q.z_mask).bit_count()
         + 2 * (p.z_mask & q.x_mask).bit_count() - (x3 & z3).bit_count())
    return _PHASES[e % 4], PauliString(p.n_qubits, x3, z3)


def commutator(p, q):
    """``[p, q]`` as a PauliSum: empty when they commute, else ``2 * p @ q``."""
    _check_same(p, q)
    if p.commutes_with(q):
        return PauliSum(p.n_qubits)
    phase, r = multiply(p, q)
    return PauliSum(p.n_qubits, [(2 * phase, r)])


def dephasing_eigenvalue(p, gamma):
    """Eigenvalue of ``A -> gamma * sum_i (Z_i A Z_i - A)`` on the string ``p``.

    Each site carrying X or Y anticommutes with its Z and contributes ``-2 gamma``.
    """
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    return -2.0 * gamma * p.x_mask.bit_count()


def dephasing_spectrum(n_qubits, gamma):
    """All ``4**n`` dephasing eigenvalues, indexed ``x_mask * 2**n + z_mask``."""
    dim = 1 << n_qubits
    x = np.arange(dim * dim) >> n_qubits
    return -2.0 * gamma * np.bitwise_count(x).astype(float)


class PauliSum:
    """Immutable linear combination of Pauli strings, kept in canonical form.

    Duplicate strings are merged and coefficients with modulus below
    ``DROP_TOL`` are dropped; terms are ordered by ``(x_mask, z_mask)``.
    """

    __slots__ = ("n_qubits", "_terms")

    def __init__(self, n_qubits, terms=()):
        if n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        acc = {}
        for coeff, s in terms:
            if s.n_qubits != n_qubits:
                raise DimensionError(f"{s.n_qubits}-qubit term in a {n_qubits}-qubit sum")
            acc[s] = acc.get(s, 0) + complex(coeff)
        self.n_qubits = n_qubits
        self._terms = tuple(
            (c, s) for s, c in sorted(acc.items()) if abs(c) >= DROP_TOL
        )

    @property
    def terms(self):
        return self._terms

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def __eq__(self, other):
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n_qubits == other.n_qubits and self._terms == other._terms

    def __hash__(self):
        return hash((self.n_qubits, self._terms))

    def __repr__(self):
        body = " + ".join(f"({c:.6g})*{s.label}" for c, s in self._terms) or "0"
        return f"PauliSum[{self.n_qubits}]({body})"

    @classmethod
    def from_terms(cls, pairs, n_qubits=None):
        """Build from ``[(coeff, "XZI"), ...]``."""
        strings = [(c, PauliString.from_label(lbl)) for c, lbl in pairs]
        if n_qubits is None:
            if not strings:
                raise ValueError("n_qubits required for an empty sum")
            n_qubits = strings[0][1].n_qubits
        return cls(n_qubits, strings)

    def coefficient(self, s):
        for c, t in self._terms:
            if t == s:
                return c
        return 0j

    def is_hermitian(self, tol=DROP_TOL):
        # every Pauli string is Hermitian, so only the coefficients matter
        return all(abs(c.imag) <= tol for c, _ in self._terms)

    def _coerce(self, other):
        if isinstance(other, PauliString):
            other = PauliSum(other.n_qubits, [(1.0, other)])
        if not isinstance(other, PauliSum):
            return None
        if other.n_qubits != self.n_qubits:
            raise DimensionError(f"{self.n_qubits}-qubit and {other.n_qubits}-qubit operands")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return PauliSum(self.n_qubits, self._terms + other._terms)

    __radd__ = __add__

    def __neg__(self):
        return PauliSum(self.n_qubits, [(-c, s) for c, s in self._terms])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Number):
            return PauliSum(self.n_qubits, [(other * c, s) for c, s in self._terms])
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = []
        for c1, s1 in self._terms:
            for c2, s2 in other._terms:
                phase, r = multiply(s1, s2)
                out.append((c1 * c2 * phase, r))
        return PauliSum(self.n_qubits, out)

    def __rmul__(self, other):
        if isinstance(other, Number):
            return self * other
        return NotImplemented

    def commutator(self, other):
        other = self._coerce(other)
        out = []
        for c1, s1 in self._terms:
            for c2, s2 in other._terms:
                if not s1.commutes_with(s2):
                    phase, r = multiply(s1, s2)
                    out.append((2 * c1 * c2 * phase, r))
        return PauliSum(self.n_qubits, out)

    def masks(self):
        """Arrays ``(x_masks, z_masks, coeffs)`` for the kernels."""
        xs = np.array([s.x_mask for _, s in self._terms], dtype=np.int64)
        zs = np.array([s.z_mask for _, s in self._terms], dtype=np.int64)
        cs = np.array([c for c, _ in self._terms], dtype=np.complex128)
        return xs, zs, cs

    def to_dense(self):
        return to_dense(self)

    def to_json(self):
        return [{"coeff": [c.real, c.imag], "string": s.label} for c, s in self._terms]

    @classmethod
    def from_json(cls, data, n_qubits=None):
        if isinstance(data, str):
            data = json.loads(data)
        pairs = []
        for item in data:
            re, im = item["coeff"]
            pairs.append((complex(re, im), PauliString.from_label(item["string"])))
        if n_qubits is None:
            if not pairs:
                raise ValueError("n_qubits required for an empty sum")
            n_qubits = pairs[0][1].n_qubits
        return cls(n_qubits, pairs)


def to_dense(s):
    """Dense ``2**n x 2**n`` matrix of a PauliSum (or PauliString)."""
    if isinstance(s, PauliString):
        s = PauliSum(s.n_qubits, [(1.0, s)])
    if s.n_qubits > MAX_QUBITS:
        raise SizeError(f"{s.n_qubits} qubits exceeds the dense cap of {MAX_QUBITS}")
    xs, zs, cs = s.masks()
    if len(cs) == 0:
        return np.zeros((1 << s.n_qubits,) * 2, dtype=np.complex128)
    return _kernels.pauli_terms_to_dense(s.n_qubits, xs, zs, cs)


def from_dense(a, tol=DROP_TOL):
    """Expand a ``2**n`` square matrix in Pauli strings."""
    a = np.asarray(a, dtype=np.complex128)
    dim = a.shape[0]
    n = dim.bit_length() - 1
    if a.shape != (dim, dim) or (1 << n) != dim:
        raise DimensionError(f"shape {a.shape} is not 2**n square")
    if n > MAX_QUBITS:
        raise SizeError(f"{n} qubits exceeds the dense cap of {MAX_QUBITS}")
    coeffs = _kernels.pauli_coefficients(a, n)
    xs, zs = np.nonzero(np.abs(coeffs) >= tol)
    return PauliSum(n, [(coeffs[x, z], PauliString(n, int(x), int(z))) for x, z in zip(xs, zs)])


def pauli_index(s):
    """Position of ``s`` in the ``4**n`` normalised Pauli basis."""
    return (s.x_mask << s.n_qubits) | s.z_mask


def hamiltonian_superop(h):
    """Matrix of ``A -> i[H, A]`` in the normalised Pauli basis (``4**n`` square)."""
    if h.n_qubits > MAX_QUBITS:
        raise SizeError(f"{h.n_qubits} qubits exceeds the dense cap of {MAX_QUBITS}")
    xs, zs, cs = h.masks()
    size = 1 << (2 * h.n_qubits)
    if len(cs) == 0:
        return np.zeros((size, size), dtype=np.complex128)
    return _kernels.commutator_superop(h.n_qubits, xs, zs, cs)

