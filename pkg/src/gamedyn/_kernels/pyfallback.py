"""Pure numpy implementations of the hot kernels.

Mirrors the compiled module in `_core.pyx`.  The sampling functions are
bit-for-bit identical to the compiled ones; the gradient loop matches only
to rounding (summation order differs), which the callers treat as the
contract.
"""

from __future__ import annotations

import math

import numpy as np

from ..rng import uniforms_block

BACKEND_NAME = "python"

# Wichura's PPND16 rational approximations (|err| < 1e-15 over (0,1)).
_A = (3.3871328727963666080e0, 1.3314166789178437745e2, 1.9715909503065514427e3,
      1.3731693765509461125e4, 4.5921953931549871457e4, 6.7265770927008700853e4,
      3.3430575583588128105e4, 2.5090809287301226727e3)
_B = (1.0, 4.2313330701600911252e1, 6.8718700749205790830e2,
      5.3941960214247511077e3, 2.1213794301586595867e4, 3.9307895800092710610e4,
      2.8729085735721942674e4, 5.2264952788528545610e3)
_C = (1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
      3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
      2.27238449892691845833e-2, 7.74545014278341407640e-4)
_D = (1.0, 2.05319162663775882187e0, 1.67638483018380384940e0,
      6.89767334985100004550e-1, 1.48103976427480074590e-1, 1.51986665636164571966e-2,
      5.47593808499534494600e-4, 1.05075007164441684324e-9)
_E = (6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
      2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
      2.71155556874348757815e-5, 2.01033439929228813265e-7)
_F = (1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1,
      1.48753612908506148525e-2, 7.86869131145613259100e-4, 1.84631831751005468180e-5,
      1.42151175831644588870e-7, 2.04426310338993978564e-15)


def _horner(coef, r):
    acc = np.full_like(r, coef[7])
    for c in coef[6::-1]:
        acc = acc * r + c
    return acc


def inverse_normal_cdf(p: np.ndarray) -> np.ndarray:
    """Standard normal quantile, elementwise, for p strictly inside (0, 1)."""
    p = np.asarray(p, dtype=np.float64)
    out = np.empty_like(p)
    q = p - 0.5
    central = np.abs(q) <= 0.425
    if central.any():
        qc = q[central]
        r = 0.180625 - qc * qc
        out[central] = qc * _horner(_A, r) / _horner(_B, r)
    tail = ~central
    if tail.any():
        qt = q[tail]
        rt = np.where(qt < 0.0, p[tail], 1.0 - p[tail])
        # scalar libm log: np.log disagrees with the compiled kernel in the
        # last ulp for a small fraction of arguments, math.log does not
        logs = np.fromiter((math.log(v) for v in rt), dtype=np.float64,
                           count=rt.size)
        r = np.sqrt(-logs)
        near = r <= 5.0
        rr = np.where(near, r - 1.6, r - 5.0)
        num = np.where(near, _horner(_C, rr), _horner(_E, rr))
        den = np.where(near, _horner(_D, rr), _horner(_F, rr))
        val = num / den
        out[tail] = np.where(qt < 0.0, -val, val)
    return out


def normals_block(seed: int, offset: int, count: int) -> np.ndarray:
    """Standard normal draws offset..offset+count-1 of counter stream `seed`."""
    return inverse_normal_cdf(uniforms_block(seed, offset, count))


def sample_tables(seed: int, n: int, m: int, lam: float) -> list[np.ndarray]:
    """Payoff tables u_i = sqrt(lam)*Z + sqrt(1-lam)*W_i, flat, C order.

    Counter layout: Z occupies [0, P), W_i occupies [(i+1)*P, (i+2)*P).
    At lam == 1 the returned list holds the same array n times.
    """
    num_profiles = m ** n
    if lam == 1.0:
        shared = normals_block(seed, 0, num_profiles)
        return [shared] * n
    if lam == 0.0:
        return [normals_block(seed, (i + 1) * num_profiles, num_profiles)
                for i in range(n)]
    c_common = math.sqrt(lam)
    c_own = math.sqrt(1.0 - lam)
    common = normals_block(seed, 0, num_profiles)
    tables = []
    for i in range(n):
        own = normals_block(seed, (i + 1) * num_profiles, num_profiles)
        tables.append(c_common * common + c_own * own)
    return tables


# dynamics status codes shared with the compiled module
STATUS_FIXED_POINT = 0
STATUS_CYCLE = 1
STATUS_TRUNCATED = 2
STATUS_EXHAUSTED = 3


def sbrd_path(tables, m: int, start_index: int, max_steps: int):
    """Simultaneous best-response walk from a profile index.

    Returns (status, first_visit, trajectory) where trajectory is an int64
    array of profile indices x^0..x^L, L the number of executed steps.  On a
    revisit the repeated index is the last entry and first_visit is the step
    it was first seen at; otherwise first_visit is -1.
    """
    n = len(tables)
    strides = [m ** (n - 1 - i) for i in range(n)]
    traj = [start_index]
    seen = {start_index: 0}
    idx = start_index
    for step in range(1, max_steps + 1):
        nxt = 0
        rem = idx
        for i in range(n):
            stride = strides[i]
            a_i = (rem // stride) % m
            base = idx - a_i * stride
            row = tables[i][base:base + m * stride:stride]
            nxt += int(np.argmax(row)) * stride
        traj.append(nxt)
        if nxt in seen:
            s = seen[nxt]
            status = STATUS_FIXED_POINT if step - s == 1 else STATUS_CYCLE
            return status, s, np.asarray(traj, dtype=np.int64)
        seen[nxt] = step
        idx = nxt
    return STATUS_TRUNCATED, -1, np.asarray(traj, dtype=np.int64)


def indd_path(table0, table1, m: int, a_start: int, b_start: int,
              max_steps: int):
    """Two-player independent dynamic; both players move every step.

    At step t a player may pick any never-played action, or its own action
    from step t-2 (step 1: anything except the start).  Within the eligible
    set the best response to the opponent's last action wins, ties to the
    lowest index.  Same return convention as `sbrd_path`, with profile
    indices a*m + b.
    """
    played = (np.zeros(m, dtype=bool), np.zeros(m, dtype=bool))
    played[0][a_start] = True
    played[1][b_start] = True
    prev = (a_start, b_start)
    prev2 = (-1, -1)
    traj = [a_start * m + b_start]
    seen = {traj[0]: 0}
    for step in range(1, max_steps + 1):
        cur = []
        for i in range(2):
            if i == 0:
                row = table0[prev[1]::m]
            else:
                row = table1[prev[0] * m:(prev[0] + 1) * m]
            eligible = ~played[i]
            if prev2[i] >= 0:
                eligible = eligible.copy()
                eligible[prev2[i]] = True
            if not eligible.any():
                return STATUS_EXHAUSTED, -1, np.asarray(traj, dtype=np.int64)
            masked = np.where(eligible, row, -np.inf)
            cur.append(int(np.argmax(masked)))
        played[0][cur[0]] = True
        played[1][cur[1]] = True
        idx = cur[0] * m + cur[1]
        traj.append(idx)
        if idx in seen:
            s = seen[idx]
            status = STATUS_FIXED_POINT if step - s == 1 else STATUS_CYCLE
            return status, s, np.asarray(traj, dtype=np.int64)
        seen[idx] = step
        prev2 = prev
        prev = (cur[0], cur[1])
    return STATUS_TRUNCATED, -1, np.asarray(traj, dtype=np.int64)


def _marginals(tables, x, q):
    n, m = x.shape
    for i in range(n):
        t = tables[i].reshape((m,) * n)
        for j in range(n - 1, i, -1):
            t = t @ x[j]
        for j in range(i):
            t = np.tensordot(x[j], t, axes=(0, 0))
        q[i] = t


SPGD_OK = 0
SPGD_DIVERGED = 1


def spgd_loop(tables, z, eta: float, gap_tol: float, max_iters: int,
              record_every: int):
    """Softmax policy gradient ascent on logits z, simultaneous updates.

    Returns (status, iters, converged, gap, x, expected_payoffs,
    payoff_sum, payoff_count) where payoff_sum/payoff_count accumulate the
    player-mean expected payoff at every `record_every`-th iteration.
    """
    n, m = z.shape
    z = z.copy()
    q = np.empty_like(z)
    payoff_sum = 0.0
    payoff_count = 0
    it = 0
    while True:
        zmax = z.max(axis=1, keepdims=True)
        x = np.exp(z - zmax)
        x /= x.sum(axis=1, keepdims=True)
        _marginals(tables, x, q)
        u = np.einsum("ij,ij->i", q, x)
        gap = float((q.max(axis=1) - u).max())
        if it % record_every == 0:
            payoff_sum += float(u.mean())
            payoff_count += 1
        if gap < gap_tol:
            return SPGD_OK, it, True, gap, x, u, payoff_sum, payoff_count
        if it >= max_iters:
            return SPGD_OK, it, False, gap, x, u, payoff_sum, payoff_count
        with np.errstate(over="ignore"):
            z += eta * x * (q - u[:, None])
        if not np.isfinite(z).all():
            return SPGD_DIVERGED, it, False, gap, x, u, payoff_sum, payoff_count
        it += 1
