"""Pure-Python evaluator for solution programs; used when the compiled
extension is unavailable or SYMIK_PURE_PYTHON is set."""
from __future__ import annotations

import math

import numpy as np

# opcodes mirror program.Op
CONST, ADD, MUL, NEG, POWI, SIN, COS, TAN, ATAN2, ASIN, ACOS, SQRT, RECIP = range(13)


def run_batch(ops, dst, a, b, imm, guard, n_regs, n_guards, outs, x, clamp_eps, zero_eps):
    n_rows, n_in = x.shape
    ops, dst, a, b, guard = (v.tolist() for v in (ops, dst, a, b, guard))
    imm = imm.tolist()
    outs = outs.tolist()
    values = np.zeros((n_rows, len(outs)))
    flags = np.zeros((n_rows, n_guards), dtype=np.uint8)
    prog = list(zip(ops, dst, a, b, imm, guard))
    for row in range(n_rows):
        r = [0.0] * n_regs
        r[:n_in] = x[row].tolist()
        f = flags[row]
        for op, d, ia, ib, c, g in prog:
            if op == CONST:
                v = c
            elif op == ADD:
                v = r[ia] + r[ib]
            elif op == MUL:
                v = r[ia] * r[ib]
            elif op == NEG:
                v = -r[ia]
            elif op == POWI:
                v = r[ia] ** int(c)
            elif op == SIN:
                v = math.sin(r[ia])
            elif op == COS:
                v = math.cos(r[ia])
            elif op == TAN:
                v = math.tan(r[ia])
            elif op == ATAN2:
                y, z = r[ia], r[ib]
                if abs(y) <= zero_eps and abs(z) <= zero_eps:
                    f[g] = 1
                    v = 0.0
                else:
                    v = math.atan2(y, z)
                    if v == -math.pi:
                        v = math.pi
            elif op == ASIN or op == ACOS:
                t = r[ia]
                if not (-1.0 - clamp_eps <= t <= 1.0 + clamp_eps):
                    f[g] = 1
                    v = 0.0
                else:
                    t = min(1.0, max(-1.0, t))
                    v = math.asin(t) if op == ASIN else math.acos(t)
            elif op == SQRT:
                t = r[ia]
                if not t >= -clamp_eps:
                    f[g] = 1
                    v = 0.0
                else:
                    v = math.sqrt(t) if t > 0.0 else 0.0
            elif op == RECIP:
                t = r[ia]
                if not abs(t) > zero_eps:
                    f[g] = 1
                    v = 0.0
                else:
                    v = 1.0 / t
            else:
                raise ValueError(f"bad opcode {op}")
            r[d] = v
        for k, o in enumerate(outs):
            values[row, k] = r[o]
    return values, flags
