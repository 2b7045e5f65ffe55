# Equilibrium potentials, capacities and what they say about hitting times.
import numpy as np

from dirichlet_spectra import (
    assemble,
    capacity_qp,
    equilibrium_potential,
    hitting_laplace_exact,
    hitting_probability_exact,
    kato_constant,
    lattice_path,
    tail_sets,
)

fs = assemble(lattice_path(8))
B = [7]

# %% e_B solves a Dirichlet problem; capacity is its energy plus mass, square-rooted
eq = equilibrium_potential(fs, B)
print("e_B:", np.round(eq.e_B, 5))
print("cap =", eq.cap, " cap^2 =", eq.cap_squared)
print("same value from the constrained minimization:", capacity_qp(fs, B))

# %% e_B(x) is the Laplace transform of the hitting time at rate 1
print("resolvent route:", np.round(hitting_laplace_exact(fs, B), 5))

# P{sigma_B <= t} <= e^t e_B(x)
for t in (0.5, 2.0, 8.0):
    p = hitting_probability_exact(fs, B, t)
    print(f"t={t}: P(hit by t) from 0 = {p[0]:.5f}, e^t e_B(0) = {np.exp(t) * eq.e_B[0]:.5f}")

# %% superlevel sets of e_B shrink towards B
for n in (1, 2, 10, 100, 10_000):
    print(f"n={n:>6}: {{e_B > 1/n}} = {tail_sets(eq, n)}")

# %% Kato constant of a bump potential
V = np.zeros(8)
V[3:5] = 1.0
for alpha in (0.5, 2.0, 10.0):
    print(f"alpha={alpha}: c_alpha = {kato_constant(fs, V, alpha).c_alpha:.4f}")
