"""Bit-twiddling kernels for Pauli strings on n qubits.

Every kernel has two implementations with the same signature:

* ``*_numba``: explicit loops compiled with ``numba.njit``;
* ``*_numpy``: vectorised numpy, always available.

The public names (without suffix) are bound to the numba version when numba
imports cleanly and ``HYPOMIX_DISABLE_NUMBA`` is unset (or ``0``); otherwise
to the numpy version.  ``benchmarks/bench_kernels.py`` times both.

Mask convention: bit ``i`` of a mask refers to qubit ``i`` (qubit 0 is the
leftmost tensor factor, i.e. the most significant bit of a basis index).
Strings are ``i**popcount(x & z) * X**x Z**z`` so that ``Y = iXZ``.
"""

import os

import numpy as np

_FLAG = os.environ.get("HYPOMIX_DISABLE_NUMBA", "").strip().lower()
_DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError("numba disabled by HYPOMIX_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f


BACKEND = "numba" if HAVE_NUMBA else "numpy"

_IPOW = np.array([1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j])


# ---------------------------------------------------------------- helpers


def reverse_bits(value, n):
    out = 0
    for _ in range(n):
        out = (out << 1) | (value & 1)
        value >>= 1
    return out


def _reverse_table(n):
    idx = np.arange(1 << n, dtype=np.int64)
    out = np.zeros_like(idx)
    for i in range(n):
        out |= ((idx >> i) & 1) << (n - 1 - i)
    return out


def _popcount_np(a):
    return np.bitwise_count(np.asarray(a, dtype=np.int64)).astype(np.int64)


@njit(cache=True)
def _popcount(v):
    c = 0
    while v:
        v &= v - 1
        c += 1
    return c


@njit(cache=True)
def _reverse(v, n):
    out = 0
    for _ in range(n):
        out = (out << 1) | (v & 1)
        v >>= 1
    return out


# ------------------------------------------------------- sum -> dense matrix


@njit(cache=True)
def pauli_terms_to_dense_numba(n, xs, zs, coeffs):
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=np.complex128)
    for t in range(xs.shape[0]):
        xr = _reverse(xs[t], n)
        zr = _reverse(zs[t], n)
        ph = _IPOW[_popcount(xs[t] & zs[t]) & 3] * coeffs[t]
        for c in range(dim):
            if _popcount(zr & c) & 1:
                out[c ^ xr, c] -= ph
            else:
                out[c ^ xr, c] += ph
    return out


def pauli_terms_to_dense_numpy(n, xs, zs, coeffs):
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=np.complex128)
    cols = np.arange(dim, dtype=np.int64)
    for x, z, c in zip(np.asarray(xs), np.asarray(zs), np.asarray(coeffs)):
        xr = reverse_bits(int(x), n)
        zr = reverse_bits(int(z), n)
        ph = _IPOW[int(x & z).bit_count() & 3] * c
        sign = 1 - 2 * (_popcount_np(zr & cols) & 1)
        out[cols ^ xr, cols] += ph * sign
    return out


# ------------------------------------------------- dense -> Pauli coefficients


@njit(cache=True)
def pauli_coefficients_numba(a, n):
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=np.complex128)
    v = np.empty(dim, dtype=np.complex128)
    rev = np.empty(dim, dtype=np.int64)
    for m in range(dim):
        rev[m] = _reverse(m, n)
    for x in range(dim):
        xr = rev[x]
        for b in range(dim):
            v[b] = a[b, b ^ xr]
        h = 1
        while h < dim:
            for start in range(0, dim, 2 * h):
                for j in range(start, start + h):
                    p = v[j]
                    q = v[j + h]
                    v[j] = p + q
                    v[j + h] = p - q
            h *= 2
        for z in range(dim):
            out[x, z] = _IPOW[_popcount(x & z) & 3] * v[rev[z]] / dim
    return out


def _fwht_rows(v):
    rows, dim = v.shape
    h = 1
    while h < dim:
        w = v.reshape(rows, dim // (2 * h), 2, h)
        p = w[:, :, 0, :]
        q = w[:, :, 1, :]
        v = np.stack((p + q, p - q), axis=2).reshape(rows, dim)
        h *= 2
    return v


def pauli_coefficients_numpy(a, n):
    dim = 1 << n
    a = np.asarray(a, dtype=np.complex128)
    rev = _reverse_table(n)
    b = np.arange(dim, dtype=np.int64)
    v = a[b[None, :], b[None, :] ^ rev[:, None]]
    w = _fwht_rows(v)[:, rev]
    x = b[:, None]
    z = b[None, :]
    return _IPOW[_popcount_np(x & z) & 3] * w / dim


# ------------------------------------ i[H, .] in the normalised Pauli basis


@njit(cache=True)
def commutator_superop_numba(n, xs, zs, coeffs):
    dim = 1 << n
    size = dim * dim
    out = np.zeros((size, size), dtype=np.complex128)
    for k in range(size):
        x = k >> n
        z = k & (dim - 1)
        for t in range(xs.shape[0]):
            xk = xs[t]
            zk = zs[t]
            if (_popcount(xk & z) + _popcount(zk & x)) & 1 == 0:
                continue
            x3 = xk ^ x
            z3 = zk ^ z
            e = _popcount(xk & zk) + _popcount(x & z) + 2 * _popcount(zk & x) - _popcount(x3 & z3)
            out[(x3 << n) | z3, k] += 2.0j * coeffs[t] * _IPOW[e & 3]
    return out


def commutator_superop_numpy(n, xs, zs, coeffs):
    dim = 1 << n
    size = dim * dim
    out = np.zeros((size, size), dtype=np.complex128)
    k = np.arange(size, dtype=np.int64)
    x = k >> n
    z = k & (dim - 1)
    for xk, zk, c in zip(np.asarray(xs), np.asarray(zs), np.asarray(coeffs)):
        anti = ((_popcount_np(xk & z) + _popcount_np(zk & x)) & 1).astype(bool)
        if not anti.any():
            continue
        xa, za, ka = x[anti], z[anti], k[anti]
        x3 = xk ^ xa
        z3 = zk ^ za
        e = (int(xk & zk).bit_count() + _popcount_np(xa & za)
             + 2 * _popcount_np(zk & xa) - _popcount_np(x3 & z3))
        out[(x3 << n) | z3, ka] += 2.0j * c * _IPOW[e & 3]
    return out


if HAVE_NUMBA:
    pauli_terms_to_dense = pauli_terms_to_dense_numba
    pauli_coefficients = pauli_coefficients_numba
    commutator_superop = commutator_superop_numba
else:
    pauli_terms_to_dense = pauli_terms_to_dense_numpy
    pauli_coefficients = pauli_coefficients_numpy
    commutator_superop = commutator_superop_numpy

KERNELS = {
    "pauli_terms_to_dense": (pauli_terms_to_dense_numba, pauli_terms_to_dense_numpy),
    "pauli_coefficients": (pauli_coefficients_numba, pauli_coefficients_numpy),
    "commutator_superop": (commutator_superop_numba, commutator_superop_numpy),
}
