# Ground values along exhaustions: the free line versus a confining potential.
import numpy as np

from dirichlet_spectra import (
    assemble,
    ball_exhaustion,
    bound_check,
    confining_potential,
    lattice_path,
    persson_sweep,
    restrict,
    tail_bound_profile,
    variational_chain,
    weyl_upper_bound,
)

n, center = 2001, 1000

# %% free path: removing bigger balls barely moves the bottom of the spectrum
free = lattice_path(n)
fs = assemble(free)
sweep = persson_sweep(fs, ball_exhaustion(free, center, range(0, 201, 20)))
print("free path ground values:", np.round(sweep.ground_values, 8))
print("lambda0 =", sweep.lambda0, " monotone:", sweep.monotone_flag)

# bump functions far from the centre give an upper certificate
bumps = []
exhaustion = ball_exhaustion(free, center, range(0, 201, 20))
for K in exhaustion:
    f = np.zeros(n)
    start = max(K) + 1
    f[start:start + 300] = np.sin(np.pi * np.arange(1, 301) / 301)
    bumps.append(f)
print("Rayleigh certificate:", weyl_upper_bound(fs, bumps, exhaustion))

# %% confining potential dist^2: ground values grow like M^2
conf = confining_potential(free, center, 2)
sweep = persson_sweep(assemble(conf), ball_exhaustion(conf, center, range(21)))
for M in (0, 5, 10, 20):
    print(f"M={M:2d}: lambda_M = {sweep.ground_values[M]:9.3f} >= {M * M}")

# %% removing a finite set inside the core does not change the limit
B = [center - 1, center, center + 1]
ex = ball_exhaustion(free, center, range(5, 60, 5))
print("same lambda0 after removing B first:",
      persson_sweep(fs, ex).lambda0 == persson_sweep(restrict(fs, B), ex).lambda0)

# %% three readings of the limit on a small graph
small = assemble(lattice_path(30).with_kill(np.linspace(0, 1, 30)))
print("variational chain:", variational_chain(small, [[0], [0, 1], [0, 1, 2, 3]]))

# %% semigroup difference bounds on a short path
short = assemble(lattice_path(6))
print(bound_check(short, [5], [3, 4], 1.0).to_dict())
print("tail profile (lhs, rhs):", tail_bound_profile(short, [5], 1.0, [1, 2, 4, 8]))
