"""Dense real-symmetric eigensolvers.

Two independent methods are provided:

``"ql"`` (default)
    Householder reduction to tridiagonal form followed by the implicit-shift
    QL iteration. O(n^3) once, fast enough for the few-hundred-dimensional
    product spaces of the cavity model.
``"jacobi"``
    Cyclic Jacobi with round-robin (tournament) ordering: every round applies
    n/2 disjoint plane rotations at once. Disjoint rotations commute, so a
    round equals applying them one after the other. Slower, but unconditionally
    convergent and a useful cross-check.

Matrices whose sparsity pattern splits into independent blocks (parity
sectors, conserved excitation number) are split first and each block is
diagonalized on its own.
"""

import math

import numpy as np

from .errors import ContractViolationError, ConvergenceError, DomainError

SYMMETRY_RTOL = 1e-12
_MAX_SWEEPS = 60


def _round_robin(n):
    """Label layouts for one Jacobi sweep (n even).

    In each layout the label at position i is paired with the label at
    position i + n/2; the n-1 layouts cover every pair exactly once.
    """
    players = list(range(n))
    half = n // 2
    layouts = []
    for _ in range(n - 1):
        layouts.append(np.array(players[:half] + players[half:][::-1]))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return layouts


def _jacobi(a, want_vectors):
    n = a.shape[0]
    if n == 1:
        return a.diagonal().copy(), np.ones((1, 1))
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return np.zeros(n), np.eye(n)
    m = n + (n % 2)
    h = m // 2
    A = np.zeros((m, m))
    A[:n, :n] = a
    V = np.eye(m) if want_vectors else None
    layouts = _round_robin(m)
    # moves[k] re-indexes layout k-1 into layout k (layout -1 is the identity)
    moves = []
    pos = np.arange(m)
    for lay in layouts + [np.arange(m)]:
        moves.append(pos[lay])
        pos = np.empty(m, dtype=int)
        pos[lay] = np.arange(m)
    offmask = ~np.eye(m, dtype=bool)
    tol = (1e-15 * scale) ** 2
    for _ in range(_MAX_SWEEPS):
        if np.sum(A[offmask] ** 2) <= tol:
            break
        for idx in moves[:-1]:
            A = A[np.ix_(idx, idx)]
            if want_vectors:
                V = V[:, idx]
            d = A.diagonal()
            app = d[:h]
            aqq = d[h:]
            apq = A[np.arange(h), np.arange(h, m)]
            active = apq != 0.0
            apq_safe = np.where(active, apq, 1.0)
            theta = (aqq - app) / (2.0 * apq_safe)
            t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            t = np.where(theta == 0.0, 1.0, t)
            cs = np.where(active, 1.0 / np.sqrt(t * t + 1.0), 1.0)
            sn = np.where(active, t * cs, 0.0)
            # A <- J^T A J, pair i rotates rows/columns i and i + h
            top = A[:h].copy()
            bot = A[h:]
            A[:h] = cs[:, None] * top - sn[:, None] * bot
            A[h:] = sn[:, None] * top + cs[:, None] * bot
            left = A[:, :h].copy()
            right = A[:, h:]
            A[:, :h] = left * cs - right * sn
            A[:, h:] = left * sn + right * cs
            A[np.arange(h), np.arange(h, m)] = 0.0
            A[np.arange(h, m), np.arange(h)] = 0.0
            if want_vectors:
                vl = V[:, :h].copy()
                vr = V[:, h:]
                V[:, :h] = vl * cs - vr * sn
                V[:, h:] = vl * sn + vr * cs
        idx = moves[-1]
        A = A[np.ix_(idx, idx)]
        if want_vectors:
            V = V[:, idx]
    w = A.diagonal()[:n].copy()
    if want_vectors:
        V = V[:n, :n]
    return w, V


def _tridiagonalize(a, want_vectors):
    """Householder reduction ``Q^T a Q = T``; returns (diag, offdiag, Q)."""
    A = a.copy()
    n = A.shape[0]
    Q = np.eye(n) if want_vectors else None
    for k in range(n - 2):
        x = A[k + 1:, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0 or np.all(x[1:] == 0.0):
            continue
        if x[0] > 0:
            alpha = -alpha
        v = x.copy()
        v[0] -= alpha
        beta = 2.0 / np.dot(v, v)
        sub = A[k + 1:, k + 1:]
        p = beta * (sub @ v)
        w = p - (0.5 * beta * np.dot(p, v)) * v
        sub -= np.outer(v, w) + np.outer(w, v)
        A[k + 1:, k] = 0.0
        A[k, k + 1:] = 0.0
        A[k + 1, k] = alpha
        A[k, k + 1] = alpha
        if want_vectors:
            Q[:, k + 1:] -= beta * np.outer(Q[:, k + 1:] @ v, v)
    d = A.diagonal().copy()
    e = np.zeros(n)
    e[:-1] = A.diagonal(1)
    return d, e, Q


def _ql_implicit(d, e, zt, max_iter=60):
    """Implicit-shift QL on a symmetric tridiagonal matrix, in place.

    ``e[i]`` couples ``d[i]`` and ``d[i+1]``; ``e[-1]`` is ignored. Rows of
    ``zt`` are rotated along with the iteration.
    """
    n = len(d)
    d = d.tolist()
    e = e.tolist()
    e[n - 1] = 0.0
    eps = np.finfo(float).eps
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > max_iter:
                raise ConvergenceError(f"QL iteration did not converge for eigenvalue {l}")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if zt is not None:
                    zi = zt[i].copy()
                    zt[i] = c * zi - s * zt[i + 1]
                    zt[i + 1] = s * zi + c * zt[i + 1]
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return np.array(d), zt


def _ql(a, want_vectors):
    n = a.shape[0]
    if n == 1:
        return a.diagonal().copy(), np.ones((1, 1))
    d, e, Q = _tridiagonalize(a, want_vectors)
    w, zt = _ql_implicit(d, e, Q.T.copy() if want_vectors else None)
    return w, (zt.T if want_vectors else None)


_METHODS = {"ql": _ql, "jacobi": _jacobi}


def blocks(H):
    """Index sets of the connected components of the nonzero pattern of ``H``."""
    n = H.shape[0]
    linked = H != 0.0
    seen = np.zeros(n, dtype=bool)
    out = []
    for start in range(n):
        if seen[start]:
            continue
        members = [start]
        seen[start] = True
        frontier = [start]
        while frontier:
            nxt = np.flatnonzero(linked[frontier].any(axis=0) & ~seen)
            seen[nxt] = True
            members.extend(nxt.tolist())
            frontier = nxt.tolist()
        out.append(np.sort(np.array(members)))
    return out


def check_symmetric(H):
    H = np.asarray(H, dtype=float)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ContractViolationError(f"expected a square matrix, got shape {H.shape}")
    if not np.all(np.isfinite(H)):
        raise ContractViolationError("matrix has non-finite entries")
    scale = max(np.max(np.abs(H)), np.finfo(float).tiny)
    asym = np.max(np.abs(H - H.T))
    if asym > SYMMETRY_RTOL * scale:
        raise ContractViolationError(
            f"matrix is not symmetric (max |H - H^T| = {asym:.3g}, scale {scale:.3g})"
        )
    return H


def eig_sym(H, vectors=False, method="ql"):
    """Eigenvalues of a real symmetric matrix in ascending order.

    With ``vectors=True`` returns ``(w, V)`` where column ``V[:, k]``
    belongs to ``w[k]``. ``method`` is ``"ql"`` or ``"jacobi"``.
    """
    solve = _METHODS.get(method)
    if solve is None:
        raise DomainError(f"unknown eigensolver {method!r}; choose from {sorted(_METHODS)}")
    H = check_symmetric(H)
    H = 0.5 * (H + H.T)
    n = H.shape[0]
    w = np.empty(n)
    V = np.zeros((n, n)) if vectors else None
    for idx in blocks(H):
        wb, Vb = solve(H[np.ix_(idx, idx)], vectors)
        w[idx] = wb
        if vectors:
            V[np.ix_(idx, idx)] = Vb
    order = np.argsort(w, kind="stable")
    if vectors:
        return w[order], V[:, order]
    return w[order]
