"""Brute-force reference implementations used as test oracles.

Everything here is written with plain loops over cells and edges and
shares no assembly code with the package, so agreement is meaningful.
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla


def fine_tpfa(nx, ny, h, k, dirichlet, neumann, f):
    """Global cell-centred solve.

    ``k`` is (ny, nx); ``dirichlet`` / ``neumann`` map a side name to a
    function of the edge midpoint coordinate along the side (neumann gives
    the outward flux).  Sides not listed are zero-flux.  Returns p (ny, nx).
    """
    n = nx * ny
    idx = lambda i, j: j * nx + i  # noqa: E731
    a = sp.lil_matrix((n, n))
    b = np.zeros(n)
    for j in range(ny):
        for i in range(nx):
            c = idx(i, j)
            b[c] += f[j, i] * h * h
            for di, dj, side in ((-1, 0, "left"), (1, 0, "right"), (0, -1, "bottom"), (0, 1, "top")):
                ii, jj = i + di, j + dj
                if 0 <= ii < nx and 0 <= jj < ny:
                    t = 2 * k[j, i] * k[jj, ii] / (k[j, i] + k[jj, ii])
                    a[c, c] += t
                    a[c, idx(ii, jj)] -= t
                    continue
                s = (j + 0.5) * h if di else (i + 0.5) * h
                if side in dirichlet:
                    t = 2 * k[j, i]
                    a[c, c] += t
                    b[c] += t * dirichlet[side](s)
                elif side in neumann:
                    b[c] -= neumann[side](s) * h
    a = a.tocsc()
    if not dirichlet:
        a = sp.bmat([[a, np.ones((n, 1))], [np.ones((1, n)), None]]).tocsc()
        b = np.append(b, 0.0)
        return spla.spsolve(a, b)[:n].reshape(ny, nx)
    return spla.spsolve(a, b).reshape(ny, nx)


def coupled_mrcm(nx, ny, h, k, dirichlet, f, mx, my, d, alpha):
    """Classical polynomial-Robin coupled method solved monolithically.

    Unknowns: every cell pressure plus the Robin coefficients of every
    subdomain face.  Equations: cell balances inside each subdomain (Robin
    closure on interface edges) plus weak flux and pressure continuity on
    each face against the same polynomials.  Sides not in ``dirichlet`` are
    zero-flux.  Returns (p (ny, nx), one-sided interface fluxes dict).
    """
    lx, ly = nx // mx, ny // my
    hh = min(lx, ly) * h
    n = nx * ny
    idx = lambda i, j: j * nx + i  # noqa: E731
    sub = lambda i, j: (j // ly) * mx + (i // lx)  # noqa: E731

    def modes(t, length):
        s = (t + 0.5 - length / 2) / (length / 2)
        return [1.0, s][:d]

    # faces: key (I, J, axis) = face between block (I,J) and its +axis neighbour
    faces = []
    for jb in range(my):
        for ib in range(mx - 1):
            faces.append((ib, jb, 0))
    for jb in range(my - 1):
        for ib in range(mx):
            faces.append((ib, jb, 1))
    # Robin coefficient columns: (face, side 0=lo/1=hi, mode)
    col = {}
    for fi in range(len(faces)):
        for s in (0, 1):
            for m in range(d):
                col[(fi, s, m)] = n + len(col)
    nx_total = n + len(col)
    a = sp.lil_matrix((nx_total, nx_total))
    b = np.zeros(nx_total)
    # per interface edge records: (face, t, cell_lo, cell_hi, beta, coef_lo, coef_hi, len)
    edges = []
    for fi, (ib, jb, ax) in enumerate(faces):
        length = ly if ax == 0 else lx
        for t in range(length):
            if ax == 0:
                i, j = (ib + 1) * lx - 1, jb * ly + t
                ci, cj = idx(i, j), idx(i + 1, j)
                kl, kr = k[j, i], k[j, i + 1]
            else:
                i, j = ib * lx + t, (jb + 1) * ly - 1
                ci, cj = idx(i, j), idx(i, j + 1)
                kl, kr = k[j, i], k[j + 1, i]
            beta = alpha * hh / (2 * kl * kr / (kl + kr))
            edges.append((fi, t, ci, cj, beta, h / (beta + h / (2 * kl)),
                          h / (beta + h / (2 * kr)), length))
    # cell balances
    for j in range(ny):
        for i in range(nx):
            c = idx(i, j)
            b[c] += f[j, i] * h * h
            for di, dj, side in ((-1, 0, "left"), (1, 0, "right"), (0, -1, "bottom"), (0, 1, "top")):
                ii, jj = i + di, j + dj
                if 0 <= ii < nx and 0 <= jj < ny:
                    if sub(i, j) == sub(ii, jj):
                        t = 2 * k[j, i] * k[jj, ii] / (k[j, i] + k[jj, ii])
                        a[c, c] += t
                        a[c, idx(ii, jj)] -= t
                    continue
                if side in dirichlet:
                    s = (j + 0.5) * h if di else (i + 0.5) * h
                    a[c, c] += 2 * k[j, i]
                    b[c] += 2 * k[j, i] * dirichlet[side](s)
    # Robin closures: outward flux * h = coef (p_c - lambda)
    for fi, t, ci, cj, beta, cl, cr, length in edges:
        m = modes(t, length)
        for side, c, coef in ((0, ci, cl), (1, cj, cr)):
            a[c, c] += coef
            for q in range(d):
                a[c, col[(fi, side, q)]] -= coef * m[q]
    # continuity rows
    row = n
    for fi in range(len(faces)):
        fe = [e for e in edges if e[0] == fi]
        for q in range(d):
            # flux: sum over both sides of outward flux * h * mode
            for _, t, ci, cj, beta, cl, cr, length in fe:
                m = modes(t, length)
                for side, c, coef in ((0, ci, cl), (1, cj, cr)):
                    a[row, c] += coef * m[q]
                    for r in range(d):
                        a[row, col[(fi, side, r)]] -= coef * m[q] * m[r]
            row += 1
        for q in range(d):
            # pressure: Robin trace p_e = lambda + beta u_out, lo minus hi
            for _, t, ci, cj, beta, cl, cr, length in fe:
                m = modes(t, length)
                for side, c, coef, sg in ((0, ci, cl, 1.0), (1, cj, cr, -1.0)):
                    w = beta * coef / h
                    a[row, c] += sg * h * w * m[q]
                    for r in range(d):
                        a[row, col[(fi, side, r)]] += sg * h * (1 - w) * m[q] * m[r]
            row += 1
    a = a.tocsc()
    if not dirichlet:
        border = np.zeros((nx_total, 1))
        border[:n] = 1.0
        a = sp.bmat([[a, border], [border.T, None]]).tocsc()
        b = np.append(b, 0.0)
        x = spla.spsolve(a, b)[:nx_total]
    else:
        x = spla.spsolve(a, b)
    p = x[:n]
    out = {}
    for fi, t, ci, cj, beta, cl, cr, length in edges:
        m = modes(t, length)
        lam = [sum(x[col[(fi, s, r)]] * m[r] for r in range(d)) for s in (0, 1)]
        out[(fi, t)] = ((p[ci] - lam[0]) * cl / h, (p[cj] - lam[1]) * cr / h)
    return p.reshape(ny, nx), out, faces
