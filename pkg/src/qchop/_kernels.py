"""Fused inner loops for the Hamiltonian actions, compiled with numba.

The numpy implementations in :mod:`qchop.hamiltonians` stay the reference;
these kernels compute the identical arithmetic in one pass per term family
and exist purely because the integrator calls the action hundreds of
thousands of times per run.  When numba is unavailable the programs fall
back to the numpy path.

Reduction order is fixed (plain nested loops), so results are bitwise
deterministic.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    READY = True
except ImportError:  # pragma: no cover - exercised only without numba
    READY = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        return wrap if not (args and callable(args[0])) else args[0]


@njit(cache=True)
def qchop_rhs(amps, con, diag_q, gmat, gbits, cos_t, sin_t, inv_lam,
              mixing, qdim, cd_coef, all_bits):
    """out = con*amps - inv_lam * [cos*diag + sin*sum_j G_j X_j](mixed) + cd * S_y amps.

    ``mixed`` is amps plus sin_t times the all-slack sum when mixing is on.
    ``gmat[k]`` is the diagonal weight (over the qubit factor) attached to
    the X flip of bit ``gbits[k]``.
    """
    dim = amps.shape[0]
    sdim = dim // qdim
    nflip = gbits.shape[0]
    out = np.empty_like(amps)

    if mixing and sin_t != 0.0:
        colsum = np.zeros(qdim, np.complex128)
        for s in range(sdim):
            base = s * qdim
            for q in range(qdim):
                colsum[q] += amps[base + q]
        mixed = np.empty_like(amps)
        for s in range(sdim):
            base = s * qdim
            for q in range(qdim):
                mixed[base + q] = amps[base + q] + sin_t * colsum[q]
    else:
        mixed = amps

    for s in range(sdim):
        base = s * qdim
        for q in range(qdim):
            i = base + q
            ramp = cos_t * diag_q[q] * mixed[i]
            for k in range(nflip):
                ramp += sin_t * gmat[k, q] * mixed[base + (q ^ gbits[k])]
            out[i] = con[i] * amps[i] - inv_lam * ramp

    if cd_coef != 0.0:
        half = 0.5 * cd_coef
        for s in range(sdim):
            base = s * qdim
            for q in range(qdim):
                acc = 0.0j
                for b in all_bits:
                    partner = amps[base + (q ^ b)]
                    if q & b:
                        acc += 1j * partner
                    else:
                        acc -= 1j * partner
                out[base + q] += half * acc
    return out


@njit(cache=True)
def saa_rhs(amps, con, obj_q, all_bits, slack_dims, slack_strides, u, inv_lam, qdim):
    """out = (u-1) * [S_x + sum_D P_D^+] amps + u * [con + inv_lam*obj] amps."""
    dim = amps.shape[0]
    sdim = dim // qdim
    out = np.empty_like(amps)
    for s in range(sdim):
        base = s * qdim
        for q in range(qdim):
            i = base + q
            acc = 0.0j
            for b in all_bits:
                acc += amps[base + (q ^ b)]
            drive = 0.5 * acc
            out[i] = (u - 1.0) * drive + u * (con[i] + inv_lam * obj_q[q]) * amps[i]
    for k in range(slack_dims.shape[0]):
        d = slack_dims[k]
        stride = slack_strides[k]
        inv_d = 1.0 / d
        for i in range(dim):
            digit = (i // stride) % d
            root = i - digit * stride
            acc = 0.0j
            for m in range(d):
                acc += amps[root + m * stride]
            out[i] += (u - 1.0) * inv_d * acc
    return out
