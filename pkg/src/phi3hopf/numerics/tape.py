"""Flatten integrand DAGs into straight-line tapes.

A tape is a register program over per-sample scalars: every unique DAG node
becomes one instruction producing one register.  Dot products read the
momentum samples through small integer coefficient matrices; everything else
is plain scalar arithmetic, so a single interpreter (numba or numpy) covers
all integrands.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..integrand import Node

OP_CONST = 0
OP_DOT = 1
OP_ADD = 2
OP_MUL = 3
OP_POW = 4


@dataclass
class Tape:
    instrs: np.ndarray  # (n, 3) int64: opcode, arg1, arg2
    consts: np.ndarray  # float64 constants, arg1 indexes for OP_CONST
    dot_coeffs: np.ndarray  # (n_dots, 2, basis) float64, arg1 indexes for OP_DOT
    n_regs: int
    basis_size: int

    def __len__(self) -> int:
        return self.n_regs


def compile_node(node: Node, basis_size: int) -> Tape:
    """Topological flattening with common-subexpression sharing.

    N-ary sums and products are lowered into chains of binary ops; integer
    powers keep their exponent in arg2 (negative exponents are propagator
    reciprocals).
    """
    reg_of: dict[Node, int] = {}
    instrs: list[tuple[int, int, int]] = []
    consts: list[float] = []
    dots: list[np.ndarray] = []

    def emit(op: int, a: int, b: int) -> int:
        instrs.append((op, a, b))
        return len(instrs) - 1

    def go(n: Node) -> int:
        if n in reg_of:
            return reg_of[n]
        if n.op == "const":
            consts.append(float(n.value))
            reg = emit(OP_CONST, len(consts) - 1, 0)
        elif n.op == "dot":
            mat = np.zeros((2, basis_size))
            for j, c in enumerate(n.vec_a):
                mat[0, j] = c
            for j, c in enumerate(n.vec_b):
                mat[1, j] = c
            dots.append(mat)
            reg = emit(OP_DOT, len(dots) - 1, 0)
        elif n.op in ("add", "mul"):
            op = OP_ADD if n.op == "add" else OP_MUL
            regs = [go(c) for c in n.children]
            acc = regs[0]
            for r in regs[1:]:
                acc = emit(op, acc, r)
            reg_of[n] = acc
            return acc
        elif n.op == "pow":
            base = go(n.children[0])
            reg = emit(OP_POW, base, n.exponent)
        else:
            raise ValueError(n.op)
        reg_of[n] = reg
        return reg

    go(node)
    return Tape(
        instrs=np.asarray(instrs, dtype=np.int64),
        consts=np.asarray(consts, dtype=np.float64),
        dot_coeffs=(
            np.stack(dots) if dots else np.zeros((0, 2, basis_size))
        ),
        n_regs=len(instrs),
        basis_size=basis_size,
    )
