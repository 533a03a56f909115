"""Floating-point hot loops: complex Hermitian Jacobi and product-vector descent.

Every kernel exists twice, once as an explicit-loop body compiled with
``numba.njit`` and once as a vectorised pure-numpy body.  Both perform the
same rotations in the same order, so they agree to rounding.  The numba path
is used when numba imports and ``WITNESSFORGE_DISABLE_NUMBA`` is unset or
``0``; callers can also pick a backend explicitly.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAVE_NUMBA = False

_flag = os.environ.get("WITNESSFORGE_DISABLE_NUMBA", "").strip().lower()
USE_NUMBA = HAVE_NUMBA and _flag in ("", "0", "false", "no")

DEGENERACY_TOL = 1e-12


def _njit(fn):
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


# --------------------------------------------------------------------------
# explicit-loop bodies (numba-compiled when available)


@_njit
def _offdiag_max(a):
    n = a.shape[0]
    m = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                v = abs(a[i, j])
                if v > m:
                    m = v
    return m


@_njit
def _inf_norm(a):
    n = a.shape[0]
    best = 0.0
    for i in range(n):
        s = 0.0
        for j in range(n):
            s += abs(a[i, j])
        if s > best:
            best = s
    return best


@_njit
def _jacobi(A, tol, max_sweeps):
    n = A.shape[0]
    a = A.copy()
    v = np.eye(n, dtype=np.complex128)
    scale = _inf_norm(a)
    thresh = tol * scale
    off = _offdiag_max(a)
    sweeps = 0
    while off > thresh and sweeps < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                ph = apq / mag
                phc = ph.conjugate()
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # G = [[c, s], [-s·conj(ph), c·conj(ph)]] on (p, q)
                for r in range(n):
                    arp = a[r, p]
                    arq = a[r, q]
                    a[r, p] = c * arp - s * phc * arq
                    a[r, q] = s * arp + c * phc * arq
                for r in range(n):
                    apr = a[p, r]
                    aqr = a[q, r]
                    a[p, r] = c * apr - s * ph * aqr
                    a[q, r] = s * apr + c * ph * aqr
                for r in range(n):
                    vrp = v[r, p]
                    vrq = v[r, q]
                    v[r, p] = c * vrp - s * phc * vrq
                    v[r, q] = s * vrp + c * phc * vrq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
        sweeps += 1
        off = _offdiag_max(a)
    w = np.empty(n)
    for i in range(n):
        w[i] = a[i, i].real
    order = np.argsort(w, kind="mergesort")
    return w[order], v[:, order], off, sweeps


@_njit
def _pick_min_vector(M, w, V):
    # degenerate minimum: smallest Rayleigh quotient, then lowest index
    best = 0
    best_val = np.inf
    lo = w[0]
    limit = DEGENERACY_TOL * max(1.0, abs(lo))
    for i in range(w.shape[0]):
        if w[i] - lo > limit:
            break
        x = np.ascontiguousarray(V[:, i])
        val = np.real(np.vdot(x, M @ x))
        if val < best_val:
            best_val = val
            best = i
    return V[:, best].copy()


@_njit
def _contract_second(W4, phi):
    dA = W4.shape[0]
    dB = W4.shape[1]
    M = np.zeros((dA, dA), dtype=np.complex128)
    for a in range(dA):
        for ap in range(dA):
            acc = 0.0 + 0.0j
            for b in range(dB):
                cb = phi[b].conjugate()
                for bp in range(dB):
                    acc += cb * W4[a, b, ap, bp] * phi[bp]
            M[a, ap] = acc
    return M


@_njit
def _contract_first(W4, psi):
    dA = W4.shape[0]
    dB = W4.shape[1]
    M = np.zeros((dB, dB), dtype=np.complex128)
    for b in range(dB):
        for bp in range(dB):
            acc = 0.0 + 0.0j
            for a in range(dA):
                ca = psi[a].conjugate()
                for ap in range(dA):
                    acc += ca * W4[a, b, ap, bp] * psi[ap]
            M[b, bp] = acc
    return M


@_njit
def _altmin_nb(W4, phi0, iters, rtol, jtol, max_sweeps):
    phi = phi0 / np.sqrt(np.real(np.vdot(phi0, phi0)))
    psi = np.zeros(W4.shape[0], dtype=np.complex128)
    val = np.inf
    converged = False
    used = 0
    for it in range(iters):
        used = it + 1
        MA = _contract_second(W4, phi)
        w, V, _, _ = _jacobi(MA, jtol, max_sweeps)
        psi = _pick_min_vector(MA, w, V)
        MB = _contract_first(W4, psi)
        w, V, _, _ = _jacobi(MB, jtol, max_sweeps)
        phi = _pick_min_vector(MB, w, V)
        new = w[0]
        if abs(val - new) <= rtol * max(1.0, abs(new)):
            val = new
            converged = True
            break
        val = new
    return val, psi, phi, used, converged


# --------------------------------------------------------------------------
# pure-numpy bodies


def jacobi_eigh_numpy(A, tol=1e-12, max_sweeps=100):
    a = np.array(A, dtype=np.complex128, copy=True)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    offmask = ~np.eye(n, dtype=bool)
    scale = np.abs(a).sum(axis=1).max() if n else 0.0
    thresh = tol * scale
    off = np.abs(a[offmask]).max() if n > 1 else 0.0
    sweeps = 0
    while off > thresh and sweeps < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                ph = apq / mag
                phc = ph.conjugate()
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                colp = a[:, p].copy()
                colq = a[:, q]
                a[:, p] = c * colp - s * phc * colq
                a[:, q] = s * colp + c * phc * colq
                rowp = a[p, :].copy()
                rowq = a[q, :]
                a[p, :] = c * rowp - s * ph * rowq
                a[q, :] = s * rowp + c * ph * rowq
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * phc * vq
                v[:, q] = s * vp + c * phc * vq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
        sweeps += 1
        off = np.abs(a[offmask]).max() if n > 1 else 0.0
    w = np.real(np.diagonal(a)).copy()
    order = np.argsort(w, kind="mergesort")
    return w[order], v[:, order], float(off), sweeps


def _pick_min_vector_numpy(M, w, V):
    lo = w[0]
    limit = DEGENERACY_TOL * max(1.0, abs(lo))
    cands = np.nonzero(w - lo <= limit)[0]
    vals = [np.real(np.vdot(V[:, i], M @ V[:, i])) for i in cands]
    return V[:, cands[int(np.argmin(vals))]].copy()


def altmin_numpy(W4, phi0, iters, rtol=1e-12, jtol=1e-12, max_sweeps=100):
    phi = phi0 / np.linalg.norm(phi0)
    psi = np.zeros(W4.shape[0], dtype=np.complex128)
    val = np.inf
    converged = False
    used = 0
    for it in range(iters):
        used = it + 1
        MA = np.einsum("b,abcd,d->ac", phi.conj(), W4, phi)
        w, V, _, _ = jacobi_eigh_numpy(MA, jtol, max_sweeps)
        psi = _pick_min_vector_numpy(MA, w, V)
        MB = np.einsum("a,abcd,c->bd", psi.conj(), W4, psi)
        w, V, _, _ = jacobi_eigh_numpy(MB, jtol, max_sweeps)
        phi = _pick_min_vector_numpy(MB, w, V)
        new = w[0]
        if abs(val - new) <= rtol * max(1.0, abs(new)):
            val = new
            converged = True
            break
        val = new
    return float(val), psi, phi, used, converged


# --------------------------------------------------------------------------
# dispatch


def _resolve(backend):
    if backend is None:
        return "numba" if USE_NUMBA else "numpy"
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    return backend


def jacobi_eigh(A, tol=1e-12, max_sweeps=100, backend=None):
    """Eigen-decompose Hermitian ``A``; returns (w ascending, V, residual, sweeps)."""
    A = np.ascontiguousarray(A, dtype=np.complex128)
    if _resolve(backend) == "numba":
        w, V, off, sweeps = _jacobi(A, float(tol), int(max_sweeps))
        return w, V, float(off), int(sweeps)
    return jacobi_eigh_numpy(A, tol, max_sweeps)


def altmin(W4, phi0, iters, rtol=1e-12, jtol=1e-12, max_sweeps=100, backend=None):
    """One alternating-minimisation descent from starting vector ``phi0``."""
    W4 = np.ascontiguousarray(W4, dtype=np.complex128)
    phi0 = np.ascontiguousarray(phi0, dtype=np.complex128)
    if _resolve(backend) == "numba":
        val, psi, phi, used, conv = _altmin_nb(W4, phi0, int(iters), float(rtol), float(jtol), int(max_sweeps))
        return float(val), psi, phi, int(used), bool(conv)
    return altmin_numpy(W4, phi0, iters, rtol, jtol, max_sweeps)


def active_backend() -> str:
    return _resolve(None)
