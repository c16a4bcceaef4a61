"""Dense complex linear algebra and structural matrix constructions.

Everything here works on plain numpy arrays.  Matrices are complex 2-D
arrays; "vec" is column stacking throughout, so vec/kron identities follow
the usual Magnus-Neudecker conventions.  All log-determinants are natural
logs; conversion to bits happens at the model/reporting layer.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla

HERM_TOL = 1e-9


class DimensionMismatch(ValueError):
    pass


class NotPositiveDefinite(ValueError):
    pass


class IndexOutOfRange(IndexError):
    pass


class ConvergenceFailure(RuntimeError):
    pass


def as_cmat(a, rows=None, cols=None):
    """Validate and return a finite complex 2-D array."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected 2-D matrix, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    if rows is not None and a.shape[0] != rows:
        raise DimensionMismatch(f"expected {rows} rows, got {a.shape[0]}")
    if cols is not None and a.shape[1] != cols:
        raise DimensionMismatch(f"expected {cols} cols, got {a.shape[1]}")
    return a


def herm(a, tol=HERM_TOL):
    """Check A is Hermitian within ``tol`` and return the symmetrized copy."""
    a = as_cmat(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch("Hermitian matrix must be square")
    dev = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if dev > tol:
        raise ValueError(f"matrix not Hermitian: max |A - A^H| = {dev:.3e} > {tol:.3e}")
    return 0.5 * (a + a.conj().T)


def kron(a, b):
    return np.kron(as_cmat(a), as_cmat(b))


def vec(a):
    """Column-stacking vectorization, returned as a 1-D array."""
    return as_cmat(a).flatten(order="F")


def unvec(p, rows, cols):
    p = np.asarray(p, dtype=complex).reshape(-1)
    if p.size != rows * cols:
        raise DimensionMismatch(f"cannot reshape length {p.size} into {rows}x{cols}")
    return p.reshape((rows, cols), order="F")


def logdet_psd(a, tol=HERM_TOL):
    """ln det of a Hermitian positive definite matrix via Cholesky (nats)."""
    a = herm(a, tol)
    try:
        c = sla.cholesky(a, lower=True, check_finite=False)
    except sla.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc
    return 2.0 * float(np.sum(np.log(np.real(np.diag(c)))))


def svd(a):
    """SVD A = U diag(s) V^H with a deterministic phase convention.

    The first entry of largest modulus in each column of U is rotated to be
    real nonnegative (the matching column of V gets the inverse rotation),
    so repeated runs produce identical factors.
    """
    a = as_cmat(a)
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    v = vh.conj().T
    k = min(u.shape[1], v.shape[1])
    for j in range(k):
        col = u[:, j]
        i = int(np.argmax(np.abs(col)))
        if np.abs(col[i]) > 0:
            phase = col[i] / np.abs(col[i])
            u[:, j] = col / phase
            v[:, j] = v[:, j] / phase
    return u, s, v


def selection_matrix(i, n_r, n_t):
    """E_i = [0  I_{N_r}  0] picking rows (i-1)N_r .. iN_r; i is 1-based."""
    if not 1 <= i <= n_t:
        raise IndexOutOfRange(f"i={i} outside 1..{n_t}")
    e = np.zeros((n_r, n_t * n_r), dtype=complex)
    e[:, (i - 1) * n_r : i * n_r] = np.eye(n_r)
    return e


def real_embed(a, tol=HERM_TOL):
    """Map Hermitian A to the real symmetric [[Re A, -Im A], [Im A, Re A]].

    The embedding is PSD iff A is PSD and its log-determinant is twice that
    of A.
    """
    a = herm(a, tol)
    re, im = a.real, a.imag
    return np.block([[re, -im], [im, re]])


def herm_basis(n):
    """Real basis of the n x n Hermitian matrices (n^2 directions).

    Ordering: for each i <= j, the diagonal unit (i == j), else the
    symmetric pair followed by the antisymmetric-imaginary pair.
    """
    basis = []
    for i in range(n):
        for j in range(i, n):
            if i == j:
                b = np.zeros((n, n), dtype=complex)
                b[i, i] = 1.0
                basis.append(b)
            else:
                b = np.zeros((n, n), dtype=complex)
                b[i, j] = 1.0
                b[j, i] = 1.0
                basis.append(b)
                b = np.zeros((n, n), dtype=complex)
                b[i, j] = 1.0j
                b[j, i] = -1.0j
                basis.append(b)
    return basis


def herm_params(a):
    """Coordinates of Hermitian A in the ``herm_basis`` ordering."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    out = []
    for i in range(n):
        for j in range(i, n):
            if i == j:
                out.append(a[i, i].real)
            else:
                out.append(a[i, j].real)
                out.append(a[i, j].imag)
    return np.array(out)


def herm_from_params(v, n):
    v = np.asarray(v, dtype=float)
    a = np.zeros((n, n), dtype=complex)
    k = 0
    for i in range(n):
        for j in range(i, n):
            if i == j:
                a[i, i] = v[k]
                k += 1
            else:
                a[i, j] = v[k] + 1j * v[k + 1]
                a[j, i] = v[k] - 1j * v[k + 1]
                k += 2
    return a
