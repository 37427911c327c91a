"""Numba state-vector kernels.

All kernels mutate ``psi`` (complex128, length ``2**n``) in place. Basis
index bit ``q`` is qubit ``q``. Masks are passed as int64 (n <= 62).

Inner loops run on the interleaved float64 view with unsigned indices so
LLVM can drop negative-index wraparound and vectorize. No fast-math flags
are used: results do not depend on vector width or thread count.

``prange`` indices are unsigned in parallel mode, so every parallel loop
rebinds its index as int64 first (mixed-sign arithmetic would otherwise
promote to float).

Worker count is fixed at import time from ``SIMDIAG_WORKERS`` (default 1).
With more than one worker the kernels are compiled with ``parallel=True``;
every parallel loop partitions the index space so that no two iterations
write the same amplitude, which keeps results bit-identical across worker
counts.

Kernels taking a ``counts`` array record one read and one write per
amplitude access in ``counts[0, b]`` / ``counts[1, b]`` when the array is
non-empty (shape ``(2, 2**n)``); pass ``NO_COUNTS`` otherwise.
"""
from __future__ import annotations

import math
import os

import numba
import numpy as np
from numba import njit, prange, types
from numba.extending import intrinsic

numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

WORKERS = max(1, int(os.environ.get("SIMDIAG_WORKERS", "1")))
PARALLEL = WORKERS > 1
if PARALLEL:
    numba.set_num_threads(min(WORKERS, numba.config.NUMBA_NUM_THREADS))

_jit = njit(parallel=PARALLEL, cache=not PARALLEL, nogil=True)
_inline = njit(inline="always", cache=not PARALLEL, nogil=True)
_seq = njit(cache=not PARALLEL, nogil=True)

NO_COUNTS = np.zeros((2, 0), dtype=np.int64)
PHASE_BLOCK_BITS = 8   # low-bit table size of the phase layer
WHT_BLOCK_BITS = 10    # in-cache transform size of the diagonal kernel

OP_H, OP_CNOT, OP_PHASE, OP_DIAG, OP_DIAG_WHT, OP_DIAG_TABLE, OP_PERM = 0, 1, 2, 3, 4, 5, 6

U = np.uint64
_I_RE = np.array([1.0, 0.0, -1.0, 0.0])
_I_IM = np.array([0.0, 1.0, 0.0, -1.0])


@intrinsic
def popcount(typingctx, v):
    if not isinstance(v, types.Integer):
        return None
    sig = v(v)

    def codegen(context, builder, signature, args):
        return builder.ctpop(args[0])

    return sig, codegen


@_inline
def parity(v):
    return popcount(v) & 1


@_inline
def insert_zero(i, q):
    """Insert a 0 bit at position q of i."""
    lo = i & ((1 << q) - 1)
    return ((i >> q) << (q + 1)) | lo


@_inline
def n_bits(size):
    n = 0
    while (1 << n) < size:
        n += 1
    return n


# Cody-Waite split of pi/2 and Taylor coefficients; |error| ~ 1 ulp for |x| < 1e5.
_PIO2_1 = 1.5707963267341256e+00
_PIO2_2 = 6.077100506506192e-11
_PIO2_3 = 2.0222662487959506e-21
_TWO_OVER_PI = 0.6366197723675814


@_inline
def sincos(x):
    k = np.floor(x * _TWO_OVER_PI + 0.5)
    r = ((x - k * _PIO2_1) - k * _PIO2_2) - k * _PIO2_3
    r2 = r * r
    s = r * (1.0 + r2 * (-1.6666666666666666e-01 + r2 * (8.3333333333333332e-03 + r2 * (
        -1.9841269841269841e-04 + r2 * (2.7557319223985893e-06 + r2 * (-2.5052108385441720e-08 + r2 * (
            1.6059043836821613e-10 + r2 * (-7.6471637318198164e-13 + r2 * 2.8114572543455206e-15))))))))
    c = 1.0 + r2 * (-0.5 + r2 * (4.1666666666666664e-02 + r2 * (-1.3888888888888889e-03 + r2 * (
        2.4801587301587302e-05 + r2 * (-2.7557319223985888e-07 + r2 * (2.0876756987868099e-09 + r2 * (
            -1.1470745597729725e-11 + r2 * 4.7794773323873853e-14)))))))
    # quadrant select without branches: (s, c), (c, -s), (-s, -c), (-c, s)
    q = np.int64(k) & 3
    swap = q & 1
    sn = c if swap else s
    cs = s if swap else c
    sn = sn * (1.0 - 2.0 * ((q >> 1) & 1))
    cs = cs * (1.0 - 2.0 * (((q + 1) >> 1) & 1))
    return sn, cs


@_jit
def sincos_array(x, s_out, c_out):
    for i_ in prange(x.shape[0]):
        i = np.int64(i_)
        s_out[i], c_out[i] = sincos(x[i])


# -- generic gates --------------------------------------------------------------

@_jit
def single_qubit(psi, u, q):
    u00, u01, u10, u11 = u[0, 0], u[0, 1], u[1, 0], u[1, 1]
    bit = 1 << q
    for i_ in prange(psi.shape[0] >> 1):
        i = np.int64(i_)
        b0 = insert_zero(i, q)
        b1 = b0 | bit
        a0 = psi[b0]
        a1 = psi[b1]
        psi[b0] = u00 * a0 + u01 * a1
        psi[b1] = u10 * a0 + u11 * a1


@_jit
def two_qubit(psi, u, q0, q1):
    """``u`` acts on local index ``b_q0 + 2 * b_q1``."""
    lo, hi = min(q0, q1), max(q0, q1)
    m0, m1 = 1 << q0, 1 << q1
    for i_ in prange(psi.shape[0] >> 2):
        i = np.int64(i_)
        base = insert_zero(insert_zero(i, lo), hi)
        idx0 = base
        idx1 = base | m0
        idx2 = base | m1
        idx3 = base | m0 | m1
        a0 = psi[idx0]
        a1 = psi[idx1]
        a2 = psi[idx2]
        a3 = psi[idx3]
        psi[idx0] = u[0, 0] * a0 + u[0, 1] * a1 + u[0, 2] * a2 + u[0, 3] * a3
        psi[idx1] = u[1, 0] * a0 + u[1, 1] * a1 + u[1, 2] * a2 + u[1, 3] * a3
        psi[idx2] = u[2, 0] * a0 + u[2, 1] * a1 + u[2, 2] * a2 + u[2, 3] * a3
        psi[idx3] = u[3, 0] * a0 + u[3, 1] * a1 + u[3, 2] * a2 + u[3, 3] * a3


@_jit
def hadamard(psi, q):
    r = 1.0 / math.sqrt(2.0)
    f = psi.view(np.float64)
    if q == 0:
        for i_ in prange(psi.shape[0] >> 1):
            i = np.int64(i_)
            k = U(i) << U(2)
            x0, y0, x1, y1 = f[k], f[k + U(1)], f[k + U(2)], f[k + U(3)]
            f[k] = (x0 + x1) * r
            f[k + U(1)] = (y0 + y1) * r
            f[k + U(2)] = (x0 - x1) * r
            f[k + U(3)] = (y0 - y1) * r
        return
    step = U(2) << U(q)  # in floats
    for blk_ in prange(psi.shape[0] >> (q + 1)):
        blk = np.int64(blk_)
        base = U(blk) * (step + step)
        for j in range(base, base + step):
            a0 = f[j]
            a1 = f[j + step]
            f[j] = (a0 + a1) * r
            f[j + step] = (a0 - a1) * r


# -- fused Clifford layers ------------------------------------------------------

@_jit
def cnot_batch(psi, c, tmask, counts):
    """CNOT(c, t) for every t in tmask as one swap pass.

    Pairs are (b, b ^ tmask) with bit c set; the representative has the
    lowest target bit clear, so each pair is swapped exactly once.
    """
    track = counts.shape[1] > 0
    low = tmask & -tmask
    lt = 0
    while (1 << lt) != low:
        lt += 1
    lo, hi = min(c, lt), max(c, lt)
    cbit = 1 << c
    for i_ in prange(psi.shape[0] >> 2):
        i = np.int64(i_)
        b = U(insert_zero(insert_zero(i, lo), hi) | cbit)
        b2 = b ^ U(tmask)
        a = psi[b]
        psi[b] = psi[b2]
        psi[b2] = a
        if track:
            counts[0, b] += 1
            counts[1, b] += 1
            counts[0, b2] += 1
            counts[1, b2] += 1


@_inline
def _phase_exponent(v, smask, s_sign, nbr):
    """``s_sign * |v & smask| + 2 * sum_{a in v} |v & nbr[a]|`` mod 4."""
    k = popcount(v & smask) * s_sign
    w = v
    while w:
        a = n_bits((w & -w) + 1) - 1
        k += 2 * popcount(v & nbr[a])
        w &= w - 1
    return k & 3


@_jit
def phase_layer(psi, smask, s_sign, nbr, counts):
    """Multiply amplitude b by ``i**(s_sign * |b & smask|) * (-1)**cz(b)``.

    ``nbr[a]`` is the mask of CZ partners of qubit ``a`` with index above
    ``a``, so ``cz(b) = sum_a b_a |b & nbr[a]|``. ``s_sign`` is +1 for S and
    -1 for S^dagger. With ``b = hi | lo`` the exponent splits into a table
    over ``lo``, a per-block constant, and the cross term ``parity(lo & M(hi))``.
    """
    track = counts.shape[1] > 0
    n = nbr.shape[0]
    nlo = min(n, PHASE_BLOCK_BITS)
    width = 1 << nlo
    klo = np.empty(width, dtype=np.int64)
    for lo in range(width):
        klo[lo] = _phase_exponent(lo, smask, s_sign, nbr)
    f = psi.view(np.float64)
    for blk_ in prange(psi.shape[0] >> nlo):
        blk = np.int64(blk_)
        hi = blk << nlo
        khi = _phase_exponent(hi, smask, s_sign, nbr)
        cross = 0
        for a in range(nlo):
            cross |= parity(hi & nbr[a]) << a
        base = U(hi)
        for lo in range(width):
            k = (khi + klo[lo] + 2 * parity(lo & cross)) & 3
            cr = _I_RE[k]
            ci = _I_IM[k]
            j = (base + U(lo)) << U(1)
            re = f[j]
            im = f[j + U(1)]
            f[j] = re * cr - im * ci
            f[j + U(1)] = re * ci + im * cr
            if track:
                counts[0, hi + lo] += 1
                counts[1, hi + lo] += 1


@_jit
def permute_phase(src, dst, plo, phi, klo, khi, mhi):
    """dst[b] = i**kappa(b) * src[pi(b)] for linear pi and quadratic kappa.

    With ``b = (h << L) | lo``: ``pi(b) = phi[h] ^ plo[lo]`` and
    ``kappa(b) = khi[h] + klo[lo] + 2 * parity(lo & mhi[h])`` (mod 4).
    A CNOT layer followed by an S/CZ layer is one such map.
    """
    width = plo.shape[0]
    nlo = n_bits(width)
    d = dst.view(np.float64)
    sv = src.view(np.float64)
    for h_ in prange(src.shape[0] >> nlo):
        h = np.int64(h_)
        ph = phi[h]
        kh = khi[h]
        m = mhi[h]
        base = U(h) << U(nlo)
        for lo in range(width):
            k = (kh + klo[lo] + 2 * parity(lo & m)) & 3
            cr = _I_RE[k]
            ci = _I_IM[k]
            js = U(ph ^ plo[lo]) << U(1)
            jd = (base + U(lo)) << U(1)
            re = sv[js]
            im = sv[js + U(1)]
            d[jd] = re * cr - im * ci
            d[jd + U(1)] = re * ci + im * cr


# -- diagonal exponentials --------------------------------------------------------

@_inline
def _rotate_block(f, start, theta, width, dt):
    for j in range(width):
        s, c = sincos(-dt * theta[j])
        k = (U(start) + U(j)) << U(1)
        re = f[k]
        im = f[k + U(1)]
        f[k] = re * c - im * s
        f[k + U(1)] = re * s + im * c


@_jit
def diag_exp(psi, zmasks, coeffs, dt, counts):
    """psi[b] *= exp(-i dt sum_k coeffs[k] (-1)^{|zmasks[k] & b|}).

    Per basis state the phase angle is accumulated term by term in a small
    scratch buffer, then every amplitude is read and written once.
    """
    track = counts.shape[1] > 0
    n_amp = psi.shape[0]
    width = min(n_amp, 1 << WHT_BLOCK_BITS)
    f = psi.view(np.float64)
    for blk_ in prange(n_amp // width):
        blk = np.int64(blk_)
        start = blk * width
        theta = np.zeros(width)
        for k in range(zmasks.shape[0]):
            zm = U(zmasks[k])
            ck = coeffs[k]
            for j in range(width):
                p = parity(zm & (U(start) + U(j)))
                theta[j] += ck - 2.0 * ck * p
        _rotate_block(f, start, theta, width, dt)
        if track:
            for j in range(width):
                counts[0, start + j] += 1
                counts[1, start + j] += 1


@_jit
def diag_wht(psi, zmasks, coeffs, dt, counts):
    """Same result as :func:`diag_exp`, phase angles from a blocked Walsh-Hadamard transform.

    For a block ``b = hi | lo`` of ``2**L`` consecutive states the angle is
    the transform over ``lo`` of ``w[v] = sum_{k: z_k,lo = v} c_k (-1)^{|z_k,hi & hi|}``,
    so the arithmetic per amplitude is ``L`` additions instead of one term
    evaluation per group member. The transform lives in a cache-sized
    scratch buffer; the state is still read and written once.
    """
    track = counts.shape[1] > 0
    n_amp = psi.shape[0]
    nlo = min(n_bits(n_amp), WHT_BLOCK_BITS)
    width = 1 << nlo
    lomask = width - 1
    f = psi.view(np.float64)
    for blk_ in prange(n_amp >> nlo):
        blk = np.int64(blk_)
        start = blk << nlo
        theta = np.zeros(width)
        for k in range(zmasks.shape[0]):
            zm = zmasks[k]
            ck = coeffs[k]
            if parity(zm & start):
                ck = -ck
            theta[zm & lomask] += ck
        h = 1
        while h < width:
            for i0 in range(0, width, 2 * h):
                for j in range(i0, i0 + h):
                    a = theta[j]
                    b = theta[j + h]
                    theta[j] = a + b
                    theta[j + h] = a - b
            h *= 2
        _rotate_block(f, start, theta, width, dt)
        if track:
            for j in range(width):
                counts[0, start + j] += 1
                counts[1, start + j] += 1


@_jit
def diag_table(psi, ylo, yhi, table, counts):
    """psi[hi | lo] *= table[yhi[hi] ^ ylo[lo]] with ``len(ylo) = 2**L``."""
    track = counts.shape[1] > 0
    width = ylo.shape[0]
    nlo = n_bits(width)
    f = psi.view(np.float64)
    t = table.view(np.float64)
    for blk_ in prange(psi.shape[0] >> nlo):
        blk = np.int64(blk_)
        start = blk << nlo
        yh = yhi[blk]
        for lo in range(width):
            y = U(yh ^ ylo[lo]) << U(1)
            cr = t[y]
            ci = t[y + U(1)]
            k = (U(start) + U(lo)) << U(1)
            re = f[k]
            im = f[k + U(1)]
            f[k] = re * cr - im * ci
            f[k + U(1)] = re * ci + im * cr
            if track:
                counts[0, start + lo] += 1
                counts[1, start + lo] += 1


@_jit
def pauli_rotation(psi, x, z, ny, theta):
    """psi <- exp(-i theta P) psi for P = i^ny X^x Z^z (Hermitian)."""
    c = math.cos(theta)
    s = math.sin(theta)
    f = psi.view(np.float64)
    zu = U(z)
    if x == 0:
        for b_ in prange(psi.shape[0]):
            b = np.int64(b_)
            ss = -s if parity(zu & U(b)) else s
            k = U(b) << U(1)
            re = f[k]
            im = f[k + U(1)]
            f[k] = re * c + im * ss
            f[k + U(1)] = im * c - re * ss
        return
    # <b ^ x| P |b> = i^ny (-1)^{|z & b|}; fold -i * i^ny into w = s * i^k
    k4 = (ny + 3) & 3
    wr = s * _I_RE[k4]
    wi = s * _I_IM[k4]
    low = x & -x
    lt = n_bits(low)
    run = U(low)
    xu = U(x)
    for o_ in prange(psi.shape[0] >> (lt + 1)):
        o = np.int64(o_)
        base0 = U(o) << U(lt + 1)
        base1 = base0 ^ xu
        for j in range(run):
            b0 = base0 + U(j)
            b1 = base1 + U(j)
            s0 = 1.0 - 2.0 * parity(zu & b0)
            s1 = 1.0 - 2.0 * parity(zu & b1)
            k0 = b0 << U(1)
            k1 = b1 << U(1)
            r0, i0 = f[k0], f[k0 + U(1)]
            r1, i1 = f[k1], f[k1 + U(1)]
            f[k0] = c * r0 + s1 * (wr * r1 - wi * i1)
            f[k0 + U(1)] = c * i0 + s1 * (wr * i1 + wi * r1)
            f[k1] = c * r1 + s0 * (wr * r0 - wi * i0)
            f[k1 + U(1)] = c * i1 + s0 * (wr * i0 + wi * r0)


# -- compiled Trotter drivers -----------------------------------------------------

@_seq
def run_rotations(psi, xs, zs, nys, thetas, n_steps):
    """n_steps sweeps of pauli_rotation over the term list."""
    for _ in range(n_steps):
        for k in range(xs.shape[0]):
            pauli_rotation(psi, xs[k], zs[k], nys[k], thetas[k])


@_seq
def run_program(psi, scratch, ops, ints, reals, table, dt, n_steps):
    """Execute an op program ``n_steps`` times.

    Each row of ``ops`` is ``(opcode, a, b, c)``:
      OP_H          a = qubit
      OP_CNOT       a = control, b = target mask
      OP_PHASE      a = S mask, b = +1 / -1, c = offset of n neighbour masks in ints
      OP_DIAG       a = offset, b = count of (ints, reals) z-mask / coefficient pairs
      OP_DIAG_WHT   as OP_DIAG
      OP_DIAG_TABLE a = offset of ylo then yhi in ints, b = len(ylo), c = offset in table
      OP_PERM       a = offset of plo, phi, klo, khi, mhi in ints, b = len(plo)

    ``scratch`` is a second state-sized buffer for OP_PERM; the result always
    ends up in ``psi``.
    """
    n = n_bits(psi.shape[0])
    cur = psi
    other = scratch
    swapped = False
    no_counts = np.zeros((2, 0), dtype=np.int64)
    for _ in range(n_steps):
        for r in range(ops.shape[0]):
            op = ops[r, 0]
            a = ops[r, 1]
            b = ops[r, 2]
            c = ops[r, 3]
            if op == OP_H:
                hadamard(cur, a)
            elif op == OP_CNOT:
                cnot_batch(cur, a, b, no_counts)
            elif op == OP_PHASE:
                phase_layer(cur, a, b, ints[c:c + n], no_counts)
            elif op == OP_DIAG:
                diag_exp(cur, ints[a:a + b], reals[a:a + b], dt, no_counts)
            elif op == OP_DIAG_WHT:
                diag_wht(cur, ints[a:a + b], reals[a:a + b], dt, no_counts)
            elif op == OP_DIAG_TABLE:
                n_hi = psi.shape[0] // b
                diag_table(cur, ints[a:a + b], ints[a + b:a + b + n_hi], table[c:], no_counts)
            else:
                n_hi = psi.shape[0] // b
                o1 = a + b
                o2 = o1 + n_hi
                o3 = o2 + b
                o4 = o3 + n_hi
                permute_phase(cur, other, ints[a:o1], ints[o1:o2], ints[o2:o3], ints[o3:o4],
                              ints[o4:o4 + n_hi])
                cur, other = other, cur
                swapped = not swapped
    if swapped:
        psi[:] = cur


@_seq
def pauli_expectation(psi, x, z, ny):
    """<psi| P |psi> for P = i^ny X^x Z^z."""
    acc = complex(0.0, 0.0)
    for b in range(psi.shape[0]):
        v = psi[b]
        if parity(z & b):
            v = -v
        acc += psi[b ^ x].conjugate() * v
    k = ny & 3
    if k == 1:
        return complex(-acc.imag, acc.real)
    if k == 2:
        return -acc
    if k == 3:
        return complex(acc.imag, -acc.real)
    return acc
