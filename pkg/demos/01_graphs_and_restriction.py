# Weighted graphs, their form matrices and Dirichlet restriction.
import numpy as np

from dirichlet_spectra import assemble, build_graph, extend_by_zero, form_eval, restrict

# %% a small weighted graph with a non-uniform measure and some killing
g = build_graph(
    4,
    [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 0.5), (0, 3, 1.5)],
    kill=[0.0, 0.2, 0.0, 0.0],
    measure=[1.0, 2.0, 0.5, 1.0],
)
print("edges (x, y, b):", g.edges())

# %% the form matrix Q and its symmetrized version S = M^-1/2 Q M^-1/2
fs = assemble(g)
print("Q =\n", fs.Q.toarray())
print("S =\n", np.round(fs.S.toarray(), 4))

# the form can be evaluated directly from the edge list or through Q
u = np.array([1.0, -1.0, 0.5, 0.0])
print("E(u, u) direct:", form_eval(g, u, u), " via Q:", fs.form(u))

# %% removing a vertex set keeps the degrees of the survivors (Dirichlet condition)
rs = restrict(fs, [1])
print("kept vertices:", rs.kept.tolist())
print("Q_U =\n", rs.Q_U.toarray())

# functions on U live on X after extension by zero, with the same energy
v = np.array([0.3, 1.0, -0.2])
ext = extend_by_zero(rs, v)
print("extended:", ext, " energies:", rs.form(v), fs.form(ext))
