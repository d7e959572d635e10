"""Tape interpreters: numba-compiled hot path, numpy fallback.

Set ``PHI3HOPF_BACKEND=numpy`` to skip numba entirely (useful for debugging
and as a guaranteed-available path); any other value, or an import failure,
falls back accordingly.  Both paths produce identical results up to IEEE
rounding; ``benchmarks/bench_kernels.py`` compares their throughput.
"""

from __future__ import annotations

import os

import numpy as np

from .tape import OP_ADD, OP_CONST, OP_DOT, OP_MUL, OP_POW, Tape

_requested = os.environ.get("PHI3HOPF_BACKEND", "numba").strip().lower()

_njit_kernel = None
if _requested != "numpy":
    try:
        import numba

        @numba.njit(cache=True, parallel=True)
        def _kernel(samples, instrs, consts, dot_coeffs, out):  # pragma: no cover
            n_samples = samples.shape[0]
            n_instr = instrs.shape[0]
            basis, dim = samples.shape[1], samples.shape[2]
            for s in numba.prange(n_samples):
                regs = np.empty(n_instr)
                for t in range(n_instr):
                    op = instrs[t, 0]
                    a = instrs[t, 1]
                    b = instrs[t, 2]
                    if op == OP_CONST:
                        regs[t] = consts[a]
                    elif op == OP_DOT:
                        acc = 0.0
                        for d in range(dim):
                            va = 0.0
                            vb = 0.0
                            for j in range(basis):
                                va += dot_coeffs[a, 0, j] * samples[s, j, d]
                                vb += dot_coeffs[a, 1, j] * samples[s, j, d]
                            acc += va * vb
                        regs[t] = acc
                    elif op == OP_ADD:
                        regs[t] = regs[a] + regs[b]
                    elif op == OP_MUL:
                        regs[t] = regs[a] * regs[b]
                    else:  # OP_POW
                        regs[t] = regs[a] ** b
                out[s] = regs[n_instr - 1]

        _njit_kernel = _kernel
    except Exception:  # numba unavailable or failed to compile
        _njit_kernel = None


def active_backend() -> str:
    return "numba" if _njit_kernel is not None else "numpy"


def _evaluate_numpy(tape: Tape, samples: np.ndarray) -> np.ndarray:
    n = samples.shape[0]
    regs: list[np.ndarray] = []
    # momenta contracted once per dot: (dots, 2, basis) x (n, basis, dim)
    if len(tape.dot_coeffs):
        combos = np.einsum("kab,nbd->knad", tape.dot_coeffs, samples)
        dot_vals = np.einsum("knd,knd->kn", combos[:, :, 0, :], combos[:, :, 1, :])
    else:
        dot_vals = np.zeros((0, n))
    for op, a, b in tape.instrs:
        if op == OP_CONST:
            regs.append(np.full(n, tape.consts[a]))
        elif op == OP_DOT:
            regs.append(dot_vals[a])
        elif op == OP_ADD:
            regs.append(regs[a] + regs[b])
        elif op == OP_MUL:
            regs.append(regs[a] * regs[b])
        else:
            regs.append(regs[a] ** float(b))
    return regs[-1]


def evaluate_tape(tape: Tape, samples: np.ndarray, chunk: int = 0) -> np.ndarray:
    """Evaluate a tape over samples of shape (n, basis, dim), chunked."""
    samples = np.ascontiguousarray(samples, dtype=np.float64)
    n = samples.shape[0]
    if chunk <= 0:
        # the fallback holds one register array per instruction; keep it lean
        chunk = 1 << 18 if _njit_kernel is not None else max((1 << 22) // max(tape.n_regs, 1), 1024)
    out = np.empty(n)
    for start in range(0, n, chunk):
        block = samples[start : start + chunk]
        if _njit_kernel is not None:
            res = np.empty(block.shape[0])
            _njit_kernel(block, tape.instrs, tape.consts, tape.dot_coeffs, res)
            out[start : start + chunk] = res
        else:
            out[start : start + chunk] = _evaluate_numpy(tape, block)
    return out
