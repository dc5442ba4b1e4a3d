# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluator for solution programs; same semantics as _evalcore_py."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, tan, atan2, asin, acos, sqrt, fabs, pow, M_PI

cnp.import_array()

cdef enum:
    CONST, ADD, MUL, NEG, POWI, SIN, COS, TAN, ATAN2, ASIN, ACOS, SQRT, RECIP


def run_batch(const int[:] ops, const int[:] dst, const int[:] a, const int[:] b,
              const double[:] imm, const int[:] guard, int n_regs, int n_guards,
              const int[:] outs, const double[:, :] x, double clamp_eps, double zero_eps):
    cdef Py_ssize_t n_rows = x.shape[0], n_in = x.shape[1]
    cdef Py_ssize_t n_ins = ops.shape[0], n_out = outs.shape[0]
    values_arr = np.zeros((n_rows, n_out), dtype=np.float64)
    flags_arr = np.zeros((n_rows, n_guards), dtype=np.uint8)
    regs_arr = np.zeros(n_regs, dtype=np.float64)
    cdef double[:, :] values = values_arr
    cdef unsigned char[:, :] flags = flags_arr
    cdef double[:] r = regs_arr
    cdef Py_ssize_t row, i, k
    cdef int op, g
    cdef double v, y, z, t
    for row in range(n_rows):
        for k in range(n_in):
            r[k] = x[row, k]
        for i in range(n_ins):
            op = ops[i]
            g = guard[i]
            if op == CONST:
                v = imm[i]
            elif op == ADD:
                v = r[a[i]] + r[b[i]]
            elif op == MUL:
                v = r[a[i]] * r[b[i]]
            elif op == NEG:
                v = -r[a[i]]
            elif op == POWI:
                v = pow(r[a[i]], imm[i])
            elif op == SIN:
                v = sin(r[a[i]])
            elif op == COS:
                v = cos(r[a[i]])
            elif op == TAN:
                v = tan(r[a[i]])
            elif op == ATAN2:
                y = r[a[i]]
                z = r[b[i]]
                if fabs(y) <= zero_eps and fabs(z) <= zero_eps:
                    flags[row, g] = 1
                    v = 0.0
                else:
                    v = atan2(y, z)
                    if v == -M_PI:
                        v = M_PI
            elif op == ASIN or op == ACOS:
                t = r[a[i]]
                if not (-1.0 - clamp_eps <= t <= 1.0 + clamp_eps):
                    flags[row, g] = 1
                    v = 0.0
                else:
                    if t > 1.0:
                        t = 1.0
                    elif t < -1.0:
                        t = -1.0
                    v = asin(t) if op == ASIN else acos(t)
            elif op == SQRT:
                t = r[a[i]]
                if not t >= -clamp_eps:
                    flags[row, g] = 1
                    v = 0.0
                else:
                    v = sqrt(t) if t > 0.0 else 0.0
            elif op == RECIP:
                t = r[a[i]]
                if not fabs(t) > zero_eps:
                    flags[row, g] = 1
                    v = 0.0
                else:
                    v = 1.0 / t
            else:
                raise ValueError("bad opcode")
            r[dst[i]] = v
        for k in range(n_out):
            values[row, k] = r[outs[k]]
    return values_arr, flags_arr
