# Potentials added to the generator, with a Kato-gated negative part.
import numpy as np

from dirichlet_spectra import (
    InadmissiblePerturbation,
    assemble,
    ball_exhaustion,
    confining_potential,
    domination_check,
    l1_bound_check,
    lattice_path,
    make_perturbation,
    perturbed_bound_check,
    perturbed_persson,
    perturbed_system,
    truncation_resolvent_gaps,
)

fs = assemble(lattice_path(2))

# %% the gate: c_alpha(mu_-) < 1/2
for minus, alpha in (([1.0, 0.0], 10.0), ([1.0, 1.0], 1.0)):
    p = make_perturbation(fs, minus=minus, alpha=alpha)
    print(f"minus={minus} alpha={alpha}: c_alpha={p.kato.c_alpha:.4f}, admissible={p.admissible_flag}")

bad = make_perturbation(fs, minus=[1.0, 1.0])
try:
    perturbed_system(fs, bad)
except InadmissiblePerturbation as exc:
    print("refused:", exc)
print("forced through:", perturbed_system(fs, bad, override=True).override)

# %% domination and the perturbed norm bound
pert = make_perturbation(fs, plus=[0.5, 0.0], minus=[0.1, 0.0], alpha=10.0)
print("domination passed:", domination_check(fs, [1], pert, [1.0, -1.0], 1.0).passed)
print(perturbed_bound_check(fs, [1], [0], pert, 1.0).to_dict())

# a constant negative shift only rescales the semigroup
shift = make_perturbation(fs, minus=[0.1, 0.1])
print("l1 norm:", l1_bound_check(fs, shift, 1.0), " e^0.1 =", np.exp(0.1))

# %% a confining positive part behaves like killing
base = lattice_path(2001)
plus = confining_potential(base, 1000, 2).kill
big = assemble(base)
sweep = perturbed_persson(big, make_perturbation(big, plus=plus), ball_exhaustion(base, 1000, range(0, 21, 5)))
print("ground values:", np.round(sweep.ground_values, 2))

# %% truncating mu_- converges in resolvent norm
p3 = assemble(lattice_path(3))
pert = make_perturbation(p3, minus=[0.3, 0.1, 0.0], alpha=2.0)
print("resolvent gaps:", truncation_resolvent_gaps(p3, pert, [0.0, 0.1, 0.2, 0.3]))
