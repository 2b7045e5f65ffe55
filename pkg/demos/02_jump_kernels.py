# Nonlocal jump kernels sampled on a grid become ordinary weighted graphs.
import numpy as np

from dirichlet_spectra import (
    GridSpec,
    KernelSpec,
    LowerBoundViolated,
    assemble,
    fractional_graph,
    fractional_kernel,
    general_jump_graph,
    restrict,
    spectrum_dense,
)

# %% the alpha-stable kernel on 11 points of [0, 1]
grid = GridSpec(1, (11,), h=0.1)
g = fractional_graph(grid, alpha=1.0)
print("measure per point:", g.measure[0], " b(0,1) =", g.weight(0, 1), " b(0,10) =", g.weight(0, 10))

# %% any symmetric kernel dominating c|x-y|^(-d-alpha) is accepted
base = fractional_kernel(1, 1.0)


def heavier(x, y):
    return base(x, y) * (1.0 + np.exp(-np.linalg.norm(x - y, axis=-1)))


g2, ratio = general_jump_graph(grid, KernelSpec(1.0, 1.0, heavier), return_ratio=True)
print("worst ratio to the stable lower bound:", round(ratio, 4))

# a kernel that is too light is refused with the offending pair
try:
    general_jump_graph(grid, KernelSpec(1.0, 1.0, lambda x, y: 0.5 * base(x, y)))
except LowerBoundViolated as exc:
    print("refused, witness pair", exc.witness)

# %% Dirichlet ground values shrink as the retained interval grows
h, n = 0.01, 201
fs = assemble(fractional_graph(GridSpec(1, (n,), h, origin=(-0.5,)), 1.0))
x = -0.5 + h * np.arange(n)
for half in (0.1, 0.2, 0.3, 0.4, 0.5):
    outside = np.flatnonzero(np.abs(x - 0.5) > half + 1e-9)
    lam = spectrum_dense(restrict(fs, outside.tolist()).S).eigenvalues[0]
    print(f"interval length {2 * half:.1f}: ground value {lam:8.4f}, times length {2 * half * lam:.3f}")
