#!/usr/bin/env python3
"""Reservoirs exactly on the spectral boundary, and the two classic checks.

C1 (necessary):  largest |eigenvalue| < 1.
C2 (sufficient): largest singular value < 1.

Orthogonal recurrent weights have every singular value and |eigenvalue|
equal to 1, which is the critical configuration: C2 no longer certifies
contraction, and whether the network forgets depends entirely on the
transfer function.
"""

import numpy as np

from critical_esn import (
    LINEAR,
    TANH,
    Reservoir,
    check_esc,
    make_orthogonal_reservoir,
    scale_to_spectrum,
    spectral_summary,
)

res = make_orthogonal_reservoir(k=6, n=1, input_scale=0.5, seed=7)
s = spectral_summary(res.W)
print("orthogonal reservoir, k=6:")
print(f"  max |eigenvalue|     = {s.max_abs_eigenvalue:.15f}")
print(f"  max singular value   = {s.max_singular_value:.15f}")
print(f"  normal (W W' = W'W)? = {s.is_normal}")
print(f"  singular values      = {np.round(s.singular_values, 12).tolist()}")

print()
print("verdicts at three spectral placements (tanh transfer):")
for target in (0.9, 1.0, 1.1):
    W = scale_to_spectrum(res.W, target)
    v = check_esc(Reservoir(W=W, w_in=res.w_in, tf=TANH))
    print(
        f"  S={target}: C1={v.c1_necessary}  C2={v.c2_sufficient}  "
        f"boundary={v.critical_boundary}  covered={v.covered_by_theorem}"
    )

print()
print("the boundary verdict depends on the transfer function:")
for tf in (TANH, LINEAR):
    v = check_esc(Reservoir(W=res.W, w_in=res.w_in, tf=tf))
    print(f"  S=1 with {tf.kind:6s}: covered_by_theorem={v.covered_by_theorem}")
print("  (identity transfer at the boundary never forgets; see demo 03)")
