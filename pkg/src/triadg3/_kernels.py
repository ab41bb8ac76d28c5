"""Hot numeric kernels, each in a loop form (compiled by numba) and a numpy form.

All kernels work on batches. Shapes use ``n`` for the batch axis:

- ``U``: (n, 3, 3) complex transfer matrices, row = output port, column = input.
- ``x``: (n, 3) mean intensities.
- ``v``: (n, 3) intensity variances (may be negative for the substituted
  quantum moments).
- ``w``: (n, 3) excess third moments ``<I^3> - <I>^3``.
- ``r2``: (n, 3) squared overlap moduli ordered (r12, r23, r31).
- ``tri``: (n,) complex triad product ``r12 r23 r31 exp(i psi)``.

The dispatching wrappers at the bottom pick numba or numpy according to
``triadg3._accel.USE_NUMBA``.
"""

import numpy as np

from ._accel import USE_NUMBA, njit

# pair index k -> (alpha, beta); matches the (r12, r23, r31) ordering
PAIRS = ((0, 1), (1, 2), (2, 0))
PAIR_A = np.array([0, 1, 2])
PAIR_B = np.array([1, 2, 0])
# column map used by the triad permanent: column a of U is paired with column a-1
TRIAD_COLS = np.array([2, 0, 1])
_PERMS = np.array([[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]])


# ---------------------------------------------------------------- loop forms


@njit
def _pair_index(a, b):
    if (a == 0 and b == 1) or (a == 1 and b == 0):
        return 0
    if (a == 1 and b == 2) or (a == 2 and b == 1):
        return 1
    return 2


@njit
def _g3_classical_loop(U, x, v, w, r2, tri):
    n = U.shape[0]
    out = np.empty(n)
    for s in range(n):
        u = U[s]
        p = np.empty((3, 3))
        for i in range(3):
            for a in range(3):
                p[i, a] = u[i, a].real ** 2 + u[i, a].imag ** 2
        d = np.zeros(3)
        for i in range(3):
            for a in range(3):
                d[i] += p[i, a] * x[s, a]
        den = d[0] * d[1] * d[2]

        f1 = 0.0
        for a in range(3):
            f1 += p[0, a] * p[1, a] * p[2, a] * w[s, a]

        f2 = 0.0
        f3 = 0.0
        for a in range(3):
            for b in range(3):
                if a == b:
                    continue
                f2 += v[s, a] * x[s, b] * (
                    p[0, b] * p[1, a] * p[2, a]
                    + p[1, b] * p[2, a] * p[0, a]
                    + p[2, b] * p[0, a] * p[1, a]
                )
                acc = 0.0
                for i in range(3):
                    j = (i + 1) % 3
                    k = (i + 2) % 3
                    acc += (p[i, a] * u[j, a] * np.conj(u[j, b]) * u[k, b] * np.conj(u[k, a])).real
                f3 += 2.0 * r2[s, _pair_index(a, b)] * v[s, a] * x[s, b] * acc

        pair = 0.0
        for k in range(3):
            a = PAIRS[k][0]
            b = PAIRS[k][1]
            acc = 0.0
            for i in range(3):
                for j in range(3):
                    if i == j:
                        continue
                    acc += (u[i, a] * np.conj(u[i, b]) * u[j, b] * np.conj(u[j, a])).real / (d[i] * d[j])
            pair += r2[s, k] * acc * x[s, a] * x[s, b]

        perm = 0.0 + 0.0j
        for q in range(6):
            term = 1.0 + 0.0j
            for j in range(3):
                c = _PERMS[q, j]
                term *= u[j, c] * np.conj(u[j, (c + 2) % 3])
            perm += term
        triad = 2.0 * (tri[s] * perm).real * x[s, 0] * x[s, 1] * x[s, 2]

        out[s] = 1.0 + (f1 + f2 + f3 + triad) / den + pair
    return out


@njit
def _quantum_correction_loop(U, en, n1, n2, r2):
    # numerator of the three normal-ordering correction sums
    n = U.shape[0]
    out = np.empty(n)
    for s in range(n):
        u = U[s]
        p = np.empty((3, 3))
        for i in range(3):
            for a in range(3):
                p[i, a] = u[i, a].real ** 2 + u[i, a].imag ** 2
        c1 = 0.0
        for a in range(3):
            c1 += en[s, a] ** 3 * p[0, a] * p[1, a] * p[2, a] * (3.0 * n2[s, a] - 2.0 * n1[s, a])
        c2 = 0.0
        c3 = 0.0
        for a in range(3):
            for b in range(3):
                if a == b:
                    continue
                wgt = en[s, a] ** 2 * en[s, b] * n1[s, a] * n1[s, b]
                c2 += wgt * (
                    p[0, b] * p[1, a] * p[2, a]
                    + p[1, b] * p[2, a] * p[0, a]
                    + p[2, b] * p[0, a] * p[1, a]
                )
                acc = 0.0
                for i in range(3):
                    j = (i + 1) % 3
                    k = (i + 2) % 3
                    acc += (p[i, a] * u[j, a] * np.conj(u[j, b]) * u[k, b] * np.conj(u[k, a])).real
                c3 += 2.0 * r2[s, _pair_index(a, b)] * wgt * acc
        out[s] = c1 + c2 + c3
    return out


@njit
def _mc_block_sums_loop(U, phi, amp, phase):
    """Per-sample output intensities; returns (sum I1 I2 I3, sum I1, sum I2, sum I3)."""
    n = amp.shape[0]
    sums = np.zeros(4)
    field = np.empty((3, 3), dtype=np.complex128)
    for s in range(n):
        for a in range(3):
            c = amp[s, a] * np.exp(1j * phase[s, a])
            for m in range(3):
                field[a, m] = c * phi[a, m]
        prod = 1.0
        for i in range(3):
            inten = 0.0
            for m in range(3):
                e = 0.0 + 0.0j
                for a in range(3):
                    e += U[i, a] * field[a, m]
                inten += e.real ** 2 + e.imag ** 2
            sums[i + 1] += inten
            prod *= inten
        sums[0] += prod
    return sums


# --------------------------------------------------------------- numpy forms


def _cp_two_one(p):
    # [|U_1b|^2 |U_2a|^2 |U_3a|^2 + c.p.] as an (n, a, b) array
    out = 0.0
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        out = out + p[:, i, None, :] * (p[:, j, :] * p[:, k, :])[:, :, None]
    return out


def _cp_exchange(U, p):
    # Re[|U_1a|^2 U_2a U*_2b U_3b U*_3a + c.p.] as an (n, a, b) array
    out = 0.0
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        t = (
            p[:, i, :, None]
            * U[:, j, :, None]
            * np.conj(U[:, j, None, :])
            * U[:, k, None, :]
            * np.conj(U[:, k, :, None])
        )
        out = out + t.real
    return out


def _r2_matrix(r2):
    n = r2.shape[0]
    m = np.zeros((n, 3, 3))
    m[:, PAIR_A, PAIR_B] = r2
    m[:, PAIR_B, PAIR_A] = r2
    return m


def _g3_classical_numpy(U, x, v, w, r2, tri):
    p = np.abs(U) ** 2
    d = np.einsum("nia,na->ni", p, x)
    den = d.prod(axis=1)
    offdiag = ~np.eye(3, dtype=bool)

    f1 = np.einsum("na,na->n", p.prod(axis=1), w)
    f2 = np.einsum("nab,na,nb->n", _cp_two_one(p) * offdiag, v, x)
    f3 = np.einsum("nab,na,nb->n", 2.0 * _r2_matrix(r2) * _cp_exchange(U, p), v, x)

    # ordered port pairs i != j, source pairs (12, 23, 31)
    ua, ub = U[:, :, PAIR_A], U[:, :, PAIR_B]  # (n, port, k)
    e = ua * np.conj(ub)
    cross = (e[:, :, None, :] * np.conj(e[:, None, :, :])).real / (d[:, :, None, None] * d[:, None, :, None])
    cross = (cross * offdiag[None, :, :, None]).sum(axis=(1, 2))
    pair = np.einsum("nk,nk,nk,nk->n", r2, cross, x[:, PAIR_A], x[:, PAIR_B])

    m = U * np.conj(U[:, :, TRIAD_COLS])
    perm = np.zeros(U.shape[0], dtype=complex)
    for q in _PERMS:
        perm = perm + m[:, 0, q[0]] * m[:, 1, q[1]] * m[:, 2, q[2]]
    triad = 2.0 * (tri * perm).real * x.prod(axis=1)

    return 1.0 + (f1 + f2 + f3 + triad) / den + pair


def _quantum_correction_numpy(U, en, n1, n2, r2):
    p = np.abs(U) ** 2
    offdiag = ~np.eye(3, dtype=bool)
    c1 = np.einsum("na,na->n", p.prod(axis=1), en**3 * (3.0 * n2 - 2.0 * n1))
    wgt = (en**2 * n1)[:, :, None] * (en * n1)[:, None, :]
    c2 = (wgt * _cp_two_one(p) * offdiag).sum(axis=(1, 2))
    c3 = (2.0 * _r2_matrix(r2) * wgt * _cp_exchange(U, p)).sum(axis=(1, 2))
    return c1 + c2 + c3


def _mc_block_sums_numpy(U, phi, amp, phase):
    coef = amp * np.exp(1j * phase)  # (n, a)
    # output field of port i in internal mode m
    field = np.einsum("ia,na,am->nim", U, coef, phi)
    inten = (field.real**2 + field.imag**2).sum(axis=2)
    return np.concatenate([[inten.prod(axis=1).sum()], inten.sum(axis=0)])


# ---------------------------------------------------------------- dispatch


def g3_classical_batch(U, x, v, w, r2, tri):
    """Closed-form classical G3 for a batch; denominators must be nonzero."""
    args = (
        np.ascontiguousarray(U, dtype=np.complex128),
        np.ascontiguousarray(x, dtype=np.float64),
        np.ascontiguousarray(v, dtype=np.float64),
        np.ascontiguousarray(w, dtype=np.float64),
        np.ascontiguousarray(r2, dtype=np.float64),
        np.ascontiguousarray(tri, dtype=np.complex128),
    )
    if USE_NUMBA:
        return _g3_classical_loop(*args)
    return _g3_classical_numpy(*args)


def quantum_correction_batch(U, en, n1, n2, r2):
    """Numerators of the three normal-ordering corrections, one per batch row."""
    args = (
        np.ascontiguousarray(U, dtype=np.complex128),
        np.ascontiguousarray(en, dtype=np.float64),
        np.ascontiguousarray(n1, dtype=np.float64),
        np.ascontiguousarray(n2, dtype=np.float64),
        np.ascontiguousarray(r2, dtype=np.float64),
    )
    if USE_NUMBA:
        return _quantum_correction_loop(*args)
    return _quantum_correction_numpy(*args)


def mc_block_sums(U, phi, amp, phase):
    """Sums of I1*I2*I3 and of each I_j over one block of field samples."""
    args = (
        np.ascontiguousarray(U, dtype=np.complex128),
        np.ascontiguousarray(phi, dtype=np.complex128),
        np.ascontiguousarray(amp, dtype=np.float64),
        np.ascontiguousarray(phase, dtype=np.float64),
    )
    if USE_NUMBA:
        return _mc_block_sums_loop(*args)
    return _mc_block_sums_numpy(*args)
