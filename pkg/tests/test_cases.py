import numpy as np
import pytest

from congestfv import CASE_IDS, ConfigurationError, make_case
from congestfv.runner import build_problem


def test_ids():
    assert CASE_IDS == ("ex1", "ex2", "ex3", "ex4", "ex5", "ex6", "ex7")
    with pytest.raises(ConfigurationError, match="ex1"):
        make_case("ex9")


@pytest.mark.parametrize("cid", CASE_IDS)
def test_all_cases_construct(cid):
    case = make_case(cid)
    for eps in case.epsilon_list:
        case.check(eps)


@pytest.mark.parametrize("cid", CASE_IDS)
def test_initial_states_admissible(cid):
    case = make_case(cid)
    cells = None if case.dimension == 1 else 40
    _, grid, law, st0 = build_problem(case, case.epsilon_list[0], cells)
    assert st0.rho.min() >= 0 and st0.rho.max() < 1


def test_ex1_momentum():
    rho0, u0 = make_case("ex1").fields(1e-4)
    assert rho0(np.array(0.25)) * u0(np.array(0.25)) == pytest.approx(0.8, rel=1e-15)
    assert rho0(np.array(0.75)) * u0(np.array(0.75)) == pytest.approx(-0.8, rel=1e-15)


def test_ex1_ex2_mirror():
    a, b = make_case("ex1").fields(1e-4), make_case("ex2").fields(1e-4)
    x = np.linspace(0.001, 0.999, 101)
    np.testing.assert_array_equal(a[0](x), b[0](x))
    np.testing.assert_array_equal(a[1](x), -b[1](x))


def test_ex6_regions():
    rho0 = make_case("ex6").fields(1e-6)[0]
    assert rho0(np.array(0.0), np.array(0.0)) == 0.2
    assert rho0(np.array(-31.0), np.array(1.0)) == 0.2
    assert rho0(np.array(20.0), np.array(20.0)) == 0.8


def test_ex7_density():
    rho0 = make_case("ex7").fields(1e-6)[0]
    assert rho0(0.0, 0.0) == pytest.approx(1 - 1e-6, abs=1e-16)
    gaps = [1 - make_case("ex7").fields(e)[0](0.3, 0.2) for e in (1e-3, 1e-6, 1e-9)]
    assert gaps[0] > gaps[1] > gaps[2] > 0


def test_ex5_initial_point_symmetry():
    from congestfv.acceptance import point_symmetry_errors

    _, _, _, st0 = build_problem("ex5", 1e-4, 60)
    e_rho, e_q = point_symmetry_errors(st0)
    assert e_rho < 1e-13 and e_q < 1e-13


def test_ex1_plateaus_exact():
    _, grid, _, st0 = build_problem("ex1", 1e-4)
    np.testing.assert_allclose(st0.rho, 0.7, rtol=1e-15)


def test_mesh_dimension_mismatch():
    with pytest.raises(ConfigurationError):
        build_problem("ex1", 1e-4, (10, 10))
    with pytest.raises(ConfigurationError):
        build_problem("ex1", -1.0)
