import pytest

from acfront import BistableNonlinearity, adjoint_solve, compute_d, solve_r, solve_wave


@pytest.fixture(scope="session")
def wave03():
    """Solved a=0.3 wave with adjoint, d and corrector, shared per session."""
    w = solve_wave(BistableNonlinearity(a=0.3))
    adjoint_solve(w)
    compute_d(w)
    solve_r(w)
    return w
