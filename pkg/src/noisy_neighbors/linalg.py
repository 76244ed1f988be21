"""Leading eigenpairs of small symmetric matrices by shifted subspace iteration."""
from __future__ import annotations

import numpy as np


class Degenerate(ArithmeticError):
    """The requested eigenvectors are not identifiable (tied eigenvalues, rank zero)."""


def top_eigenpairs(A, k=1, tol=1e-10, max_iter=10_000, block=None, rel_gap=1e-12, psd=False):
    """Largest ``k`` algebraic eigenpairs of a symmetric matrix.

    Subspace iteration on ``A + c*I`` with a Gershgorin shift ``c`` that
    makes the iterated matrix positive semidefinite (skipped when the caller
    passes ``psd=True``), followed by a
    Rayleigh-Ritz step on the block each sweep. Convergence is declared
    once every requested vector moves by less than ``tol`` (in angle)
    between sweeps.

    Returns
    -------
    values : (k,) array, descending
    vectors : (n, k) array with orthonormal columns
    info : dict with ``iterations`` and ``converged``

    Raises
    ------
    Degenerate
        If a requested eigenvalue is tied (relative gap below ``rel_gap``)
        with its successor, which leaves its eigenvector undetermined.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("matrix must be square")
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}]")
    A = 0.5 * (A + A.T)
    p = min(n, block or k + 8)

    shift = 0.0
    if not psd:
        radius = np.sum(np.abs(A), axis=1) - np.abs(np.diag(A))
        shift = max(0.0, -float(np.min(np.diag(A) - radius)))
    M = A + shift * np.eye(n)

    rng = np.random.default_rng(0)
    Q, _ = np.linalg.qr(rng.standard_normal((n, p)))
    prev = None
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        Q, _ = np.linalg.qr(M @ Q)
        w, V = np.linalg.eigh(Q.T @ A @ Q)
        order = np.argsort(w)[::-1]
        w, Q = w[order], Q @ V[:, order]
        if prev is not None:
            lead = Q[:, :k]
            signs = np.sign(np.sum(lead * prev, axis=0))
            signs[signs == 0] = 1.0
            moved = np.linalg.norm(lead - prev * signs, axis=0)
            if np.all(moved < tol):
                converged = True
                break
        prev = Q[:, :k].copy()
        if p == n and it > 1:
            # the block spans the whole space: Rayleigh-Ritz is already exact
            converged = True
            break

    scale = max(float(np.max(np.abs(w))), np.finfo(float).tiny)
    for j in range(min(k, p - 1)):
        if abs(w[j] - w[j + 1]) < rel_gap * scale:
            raise Degenerate(f"eigenvalues {j} and {j + 1} are tied ({w[j]!r})")
    return w[:k], Q[:, :k], {"iterations": it, "converged": converged}


def orient(v: np.ndarray) -> np.ndarray:
    """Flip the sign so the entry of largest magnitude is positive."""
    i = int(np.argmax(np.abs(v)))
    return -v if v[i] < 0 else v
