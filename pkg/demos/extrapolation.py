"""
Learning a short window and extrapolating
=========================================

Two emitters share one lossy cavity mode (Tavis-Cummings, N=2, fully
excited).  We compute exact dynamical maps over a short learning window,
turn them into transfer tensors, and let the tensors carry the reduced
dynamics far past the window.  The exact propagation is the reference.

The window has to outlast the cavity memory.  Too short a window and the
tensors miss part of the kernel; the error is visible right away.

Run:  python3 demos/extrapolation.py
"""

import numpy as np

from polariton_ttm import (ModelSpec, dynamical_maps, initial_state, observable_trajectory,
                           propagate_exact, tls_observable, tls_state, transfer_tensors, ttm_propagate)

DT = 0.01
HORIZON = 20.0

spec = ModelSpec.create("TC", 2)  # g = 10/sqrt(2), kappa = 1
sz = tls_observable("sz:1", 2)
rho0 = tls_state("fully_excited", 2)
steps = int(round(HORIZON / DT))

# ------------------------------------------------------------
# 1. reference: propagate the full system and trace out the cavity
# ------------------------------------------------------------
exact = propagate_exact(spec, initial_state("fully_excited", spec), DT, steps, reduced=True)
sz_exact = observable_trajectory(exact, None, sz)

# ------------------------------------------------------------
# 2. learn maps once over the longest window, then truncate
# ------------------------------------------------------------
maps = dynamical_maps(spec, DT, 600)
print(f"{'window':>8} {'tensors':>8} {'max |error|':>12} {'tail converged':>15}")
for window in (1.5, 3.5, 6.0):
    K = int(round(window / DT))
    T = transfer_tensors(maps.truncate(K))
    traj = ttm_propagate(T, rho0, steps, max_drift=np.inf)
    err = np.max(np.abs(observable_trajectory(traj, None, sz) - sz_exact))
    print(f"{window:8.1f} {K:8d} {err:12.2e} {str(T.converged()):>15}")

# ------------------------------------------------------------
# 3. a few points of the trajectory at the good window
# ------------------------------------------------------------
T = transfer_tensors(maps)
sz_ttm = observable_trajectory(ttm_propagate(T, rho0, steps), None, sz)
print("\n  t     <sz> ttm    <sz> exact")
for t in (0, 1, 2, 5, 10, 20):
    k = int(round(t / DT))
    print(f"{t:4d}  {sz_ttm[k]:+.6f}   {sz_exact[k]:+.6f}")
