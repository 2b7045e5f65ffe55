# Jump-process simulation checked against exact linear algebra.
import numpy as np
from scipy.linalg import expm

from dirichlet_spectra import (
    assemble,
    build_graph,
    equilibrium_potential,
    mc_feynman_kac_potential,
    mc_hitting_laplace,
    mc_killed_semigroup,
    mc_semigroup,
    restrict,
    semigroup_matrix,
    simulate_path,
)

g = build_graph(5, [(0, 1, 1.0), (1, 2, 0.7), (2, 3, 1.2), (3, 4, 0.4), (1, 3, 0.3)],
                kill=[0.0, 0.1, 0.0, 0.0, 0.2], measure=[1.0, 1.5, 0.8, 1.0, 2.0])
fs = assemble(g)
N, seed = 100_000, 2024

# %% one trajectory
path = simulate_path(fs, 0, 5.0, seed, watch={"far end": [4]})
print("states:", path.states[:10], "...  killed:", path.killed_flag)
print("first visit to vertex 4:", path.hit_times["far end"])

# %% free and killed semigroups
f = np.array([1.0, 0.0, 0.5, 0.0, 2.0])
t = 1.0
exact = semigroup_matrix(fs, t) @ f
est = mc_semigroup(fs, f, 0, t, N, seed)
print(f"E_0 f(X_t): MC {est.mean:.4f} +- {est.std_error:.4f}, exact {exact[0]:.4f}")

B = [3]
exact = semigroup_matrix(restrict(fs, B), t) @ f
est = mc_killed_semigroup(fs, B, f, 0, t, N, seed)
print(f"killed at B: MC {est.mean:.4f} +- {est.std_error:.4f}, exact {exact[0]:.4f}")

# %% potential weight exp(-int W)
W = np.array([0.5, 0.0, 1.0, 0.0, 0.0])
L = fs.Q.toarray() / fs.m[:, None] + np.diag(W)
exact = expm(-t * L) @ f
est = mc_feynman_kac_potential(fs, [], W, f, 0, t, N, seed)
print(f"potential weight: MC {est.mean:.4f} +- {est.std_error:.4f}, exact {exact[0]:.4f}")

# %% equilibrium potential as E_x[exp(-sigma_B)]
eq = equilibrium_potential(fs, B)
est = mc_hitting_laplace(fs, B, 0, N, seed)
print(f"e_B(0): MC {est.mean:.4f} +- {est.std_error:.4f}, linear solve {eq.e_B[0]:.4f}")
print("truncation bias at most", est.bias_bound)
