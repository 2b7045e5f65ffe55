import numpy as np
import pytest
from hypothesis import given, strategies as st

from dirichlet_spectra import (
    AsymmetricKernel,
    DisconnectedFromCenter,
    GridSpec,
    InvalidAlpha,
    KernelSpec,
    LowerBoundViolated,
    ValidationError,
    assemble,
    build_graph,
    confining_potential,
    fractional_graph,
    fractional_kernel,
    general_jump_graph,
    kernel_from_config,
    lattice_grid,
    lattice_path,
    lower_bound_ratio,
    table_kernel,
)


def test_fractional_weights_unit_spacing():
    g = fractional_graph(GridSpec(1, (3,), 1.0), 1.0)
    assert g.weight(0, 1) == 1.0 and g.weight(1, 2) == 1.0 and g.weight(0, 2) == 0.25
    assert np.array_equal(g.measure, np.ones(3))


def test_fractional_weight_half_spacing():
    g = fractional_graph(GridSpec(1, (2,), 0.5), 1.0)
    assert g.weight(0, 1) == 1.0
    assert np.array_equal(g.measure, [0.5, 0.5])


def test_single_point_has_no_edges():
    g = fractional_graph(GridSpec(2, (1, 1)), 0.5)
    assert g.n == 1 and g.weights.nnz == 0


@pytest.mark.parametrize("alpha", [0.0, 2.0, -1.0, 2.5])
def test_alpha_range(alpha):
    with pytest.raises(InvalidAlpha):
        fractional_graph(GridSpec(1, (3,)), alpha)
    with pytest.raises(InvalidAlpha):
        KernelSpec(alpha, 1.0, fractional_kernel(1, 1.0))


def test_two_d_diagonal_weight():
    g = fractional_graph(GridSpec(2, (2, 2), 1.0), 1.0)
    # points (0,0) and (1,1) are sqrt(2) apart
    assert np.isclose(g.weight(0, 3), 2.0 ** (-1.5), rtol=1e-15)


def test_scaled_kernel_accepted_with_ratio_two():
    grid = GridSpec(1, (4,), 0.5)
    base = fractional_kernel(1, 0.7)
    g, ratio = general_jump_graph(
        grid, KernelSpec(0.7, 1.0, lambda x, y: 2 * base(x, y)), return_ratio=True
    )
    assert np.isclose(ratio, 2.0, rtol=1e-14)
    assert g.n == 4


def test_zero_kernel_violates_lower_bound():
    grid = GridSpec(1, (3,))
    with pytest.raises(LowerBoundViolated) as info:
        general_jump_graph(grid, KernelSpec(1.0, 1.0, lambda x, y: np.zeros(len(x))))
    assert info.value.witness is not None


def test_perturbed_kernel_accepted():
    grid = GridSpec(1, (4,))
    base = fractional_kernel(1, 1.0)

    def j(x, y):
        return base(x, y) * (1 + np.exp(-np.linalg.norm(x - y, axis=-1)))

    ratio, _ = lower_bound_ratio(grid, KernelSpec(1.0, 1.0, j))
    assert ratio >= 1
    general_jump_graph(grid, KernelSpec(1.0, 1.0, j))


def test_asymmetric_table_rejected():
    table = table_kernel(3, [(0, 1, 1.0), (1, 0, 2.0)])
    with pytest.raises(AsymmetricKernel):
        general_jump_graph(GridSpec(1, (3,)), KernelSpec(1.0, 0.0, table))


def test_table_kernel_graph():
    table = table_kernel(3, [(0, 2, 0.5), (2, 0, 0.5)])
    g = general_jump_graph(GridSpec(1, (3,)), KernelSpec(1.0, 0.0, table))
    assert g.weight(0, 2) == 0.5 and g.weight(0, 1) == 0.0


@given(
    st.integers(1, 2),
    st.integers(1, 5),
    st.floats(0.05, 1.95),
    st.floats(0.1, 2.0),
)
def test_fractional_equals_general_bitwise(dim, side, alpha, h):
    grid = GridSpec(dim, (side,) * dim, h)
    spec = KernelSpec(alpha, 1.0, fractional_kernel(dim, alpha))
    assert fractional_graph(grid, alpha) == general_jump_graph(grid, spec)


def test_lattice_examples():
    assert np.array_equal(
        assemble(lattice_path(3)).Q.toarray(), [[1, -1, 0], [-1, 2, -1], [0, -1, 1]]
    )
    assert assemble(lattice_path(1)).Q.toarray().tolist() == [[0.0]]
    assert lattice_path(2, 3.0).weight(0, 1) == 3.0
    grid = lattice_grid((2, 3))
    assert grid.n == 6 and len(grid.edges()) == 7


def test_confining_examples():
    assert confining_potential(lattice_path(5), 2, 2).kill.tolist() == [4, 1, 0, 1, 4]
    assert confining_potential(lattice_path(3), 0, 1).kill.tolist() == [0, 1, 2]
    assert confining_potential(lattice_path(1), 0, 2).kill.tolist() == [0]
    with pytest.raises(DisconnectedFromCenter):
        confining_potential(build_graph(3, [(0, 1, 1.0)]), 0, 2)


def test_kernel_from_config():
    g = kernel_from_config({"dim": 1, "extent": [3], "h": 1.0}, {"type": "fractional", "alpha": 1.0})
    assert g == fractional_graph(GridSpec(1, (3,)), 1.0)
    t = kernel_from_config(
        {"dim": 1, "extent": [2]}, {"type": "table", "pairs": [[0, 1, 2.0], [1, 0, 2.0]]}
    )
    assert t.weight(0, 1) == 2.0
    with pytest.raises(ValidationError):
        kernel_from_config({"dim": 1, "extent": [2], "bogus": 1}, {"type": "fractional", "alpha": 1})
    with pytest.raises(ValidationError):
        kernel_from_config({"dim": 1, "extent": [2]}, {"type": "gaussian"})
