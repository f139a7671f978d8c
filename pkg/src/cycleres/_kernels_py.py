"""Pure numpy fallback for the sequence kernel.

Same contract as the compiled extension `cycleres._kernels`: drive the packed
system through all inputs, write post-washout concatenated states into `out`,
mutate `x` to the final state, and return -1 (or the first timestep at which
any state component went non-finite).

Packed-system convention (shared by both backends):
  x          (k, n) float64   state, updated in place
  drive      (k,)   float64   d_i * s_i, premultiplied
  v_in       (k, n) float64   external-input sign columns
  bias_eff   (k, n) float64   bias_scale * bias signs, zeros when disabled
  edge_ptr   (k+1,) int64     CSR offsets indexed by *eval-order position*
  edge_src   (E,)   int64     source encoder per edge
  edge_signs (E,n,n) int8     cross-coupling sign matrices, transposed:
                              edge_signs[e, c, r] couples source dim c to
                              destination dim r (axpy-friendly layout)
  edge_gain  (E,)   float64   inter-encoder scaling per edge
  order      (k,)   int64     topological evaluation order
  activation 0 = identity, 1 = tanh
"""
from __future__ import annotations

import numpy as np

NAME = "python"


def run_sequence(x, inputs, rho, drive, v_in, bias_eff, edge_ptr, edge_src,
                 edge_signs, edge_gain, order, activation, washout, out):
    k, n = x.shape
    total = inputs.shape[0]
    # Fold the gain into float matrices once per call; the per-step loop
    # then accumulates in the same term order as the compiled kernel.
    edge_mats = [edge_gain[e] * edge_signs[e].astype(np.float64) for e in range(edge_src.shape[0])]
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(total):
            u = inputs[t]
            for oi in range(k):
                i = order[oi]
                tmp = rho * np.roll(x[i], 1)
                tmp += (drive[i] * u) * v_in[i]
                for e in range(edge_ptr[oi], edge_ptr[oi + 1]):
                    tmp += x[edge_src[e]] @ edge_mats[e]
                tmp += bias_eff[i]
                x[i] = np.tanh(tmp) if activation == 1 else tmp
            if not np.isfinite(x).all():
                return t
            if t >= washout:
                out[t - washout] = x.reshape(-1)
    return -1
