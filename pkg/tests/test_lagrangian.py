"""The derived data of a Lagrangian: momentum forms, energy, field
equations, regularity, and the solved dynamics."""

from fractions import Fraction

import pytest

from supermech import (
    Chart,
    GradedForm,
    LagrangianError,
    NotRegular,
    OrderExceeded,
    Parity,
    Regularity,
    SuperExpr,
    SuperLagrangian,
    cartan_data,
    cartan_one_form,
    cartan_two_form,
    check_constant_of_motion,
    conservation_witness,
    energy,
    euler_lagrange_form,
    exterior_d,
    interior,
    is_sode,
    liouville_field,
    regularity,
    semibasic_check,
    solve_dynamics,
    total_derivative,
    total_derivative_field,
    variational_derivative,
)
from supermech.lagrangian import NoWitness


def make(even, odd, order, build):
    chart = Chart.create(even, odd, order)
    return SuperLagrangian(chart, build(chart))


def oscillator():
    return make(["q"], [], 1, lambda c: (
        Fraction(1, 2) * c.coord("q", 1) ** 2 - Fraction(1, 2) * c.coord("q", 0) ** 2
    ))


def free_particle():
    return make(["q"], [], 1, lambda c: Fraction(1, 2) * c.coord("q", 1) ** 2)


def superparticle():
    return make(["q"], ["th"], 1, lambda c: (
        Fraction(1, 2) * c.coord("q", 1) ** 2
        + Fraction(1, 2) * c.coord("th", 0) * c.coord("th", 1)
    ))


def second_order_chain():
    return make(["q"], [], 2, lambda c: Fraction(1, 2) * c.coord("q", 2) ** 2)


# -- construction ----------------------------------------------------------


def test_lagrangian_validates_order_and_parity():
    chart = Chart.create(["q"], ["th"], 1)
    assert SuperLagrangian(chart, chart.coord("q", 1) ** 2).order == 1
    with pytest.raises(OrderExceeded):
        SuperLagrangian(chart.at_order(0), chart.coord("q", 1))
    with pytest.raises(LagrangianError):
        SuperLagrangian(chart, chart.coord("th", 0))
    with pytest.raises(OrderExceeded):
        SuperLagrangian(chart.at_order(0), chart.coord("q", 0))


# -- variational derivative ------------------------------------------------


def test_variational_derivative_oscillator():
    lag = oscillator()
    wide = lag.chart.at_order(2)
    vd = variational_derivative(lag.expr, wide.gen("q", 0))
    assert vd == -wide.coord("q", 0) - wide.coord("q", 2)


def test_variational_derivative_kills_total_derivatives():
    chart = Chart.create(["q"], ["th"], 2)
    for f in (chart.coord("q", 0) ** 3, chart.coord("q", 0) * chart.coord("th", 0)):
        exact = total_derivative(f)
        for base in chart.at_order(0).coordinates():
            assert variational_derivative(exact, base).is_zero()


# -- canonical systems, frozen ---------------------------------------------


def test_oscillator_cartan_package():
    lag = oscillator()
    data = cartan_data(lag)
    assert str(data.theta) == "q[1]*d(q[0])"
    assert str(data.omega) == "d(q[0])^d(q[1])"
    assert str(data.energy) == "1/2*q[0]^2 + 1/2*q[1]^2"
    assert str(data.delta) == "(-q[0] - q[2])*d(q[0])"


def test_superparticle_cartan_package():
    lag = superparticle()
    data = cartan_data(lag)
    assert str(data.theta) == "q[1]*d(q[0]) + 1/2*th[0]*d(th[0])"
    assert str(data.omega) == "d(q[0])^d(q[1]) - 1/2*d(th[0])^d(th[0])"
    assert str(data.energy) == "1/2*q[1]^2"
    assert str(data.delta) == "-q[2]*d(q[0]) - th[1]*d(th[0])"


def test_second_order_chain_cartan_package():
    lag = second_order_chain()
    data = cartan_data(lag)
    assert str(data.theta) == "-q[3]*d(q[0]) + q[2]*d(q[1])"
    assert str(data.energy) == "-q[1]*q[3] + 1/2*q[2]^2"
    assert str(data.delta) == "q[4]*d(q[0])"


def test_single_entry_points_match_cartan_data():
    lag = superparticle()
    data = cartan_data(lag)
    assert cartan_one_form(lag) == data.theta
    assert cartan_two_form(lag) == data.omega
    assert energy(lag) == data.energy
    assert euler_lagrange_form(lag) == data.delta


# -- structural identities -------------------------------------------------


@pytest.mark.parametrize(
    "build", [oscillator, free_particle, superparticle, second_order_chain]
)
def test_structural_identities(build):
    lag = build()
    k = lag.order
    data = cartan_data(lag)
    assert exterior_d(data.omega).is_zero()
    # the field equations equal i_T Omega - dE
    t_field = total_derivative_field(lag.chart, 2 * k - 1)
    chain = interior(t_field, data.omega) - exterior_d(
        GradedForm.from_function(data.energy)
    )
    assert chain == data.delta
    # momentum form is semibasic at level k-1, field equations at level 0
    semibasic_check(data.theta, k - 1)
    semibasic_check(data.delta, 0)


# -- regularity ------------------------------------------------------------


def test_regularity_verdicts():
    assert regularity(superparticle()).verdict is Regularity.REGULAR
    assert regularity(oscillator()).verdict is Regularity.REGULAR
    assert regularity(second_order_chain()).verdict is Regularity.REGULAR

    linear = make(["q"], [], 1, lambda c: c.coord("q", 1))
    assert regularity(linear).verdict is Regularity.DEGENERATE

    coupled = make(["q"], [], 1, lambda c: (
        Fraction(1, 2) * c.coord("q", 0) ** 2 * c.coord("q", 1) ** 2
    ))
    assert regularity(coupled).verdict is Regularity.INDETERMINATE


def test_solve_dynamics_refuses_non_regular():
    linear = make(["q"], [], 1, lambda c: c.coord("q", 1))
    with pytest.raises(NotRegular) as info:
        solve_dynamics(linear)
    assert info.value.report.verdict is Regularity.DEGENERATE


# -- solved dynamics -------------------------------------------------------


def test_oscillator_dynamics():
    lag = oscillator()
    dyn = solve_dynamics(lag)
    wide = lag.chart.at_order(2)
    assert dict(dyn.forces) == {wide.gen("q", 2): -wide.coord("q", 0)}
    assert not dyn.constraints
    field = dyn.field()
    assert field.parity is Parity.EVEN
    assert is_sode(field)
    assert field.component(wide.gen("q", 0)) == wide.coord("q", 1)
    assert field.component(wide.gen("q", 1)) == -wide.coord("q", 0)


def test_superparticle_dynamics():
    lag = superparticle()
    dyn = solve_dynamics(lag)
    chart = lag.chart
    assert {str(g): str(e) for g, e in dyn.forces.items()} == {
        "q[2]": "0",
        "th[2]": "0",
    }
    assert {str(g): str(e) for g, e in dyn.constraints.items()} == {"th[1]": "0"}
    assert is_sode(dyn.field())
    # reduction substitutes the constraints
    assert dyn.reduce(chart.coord("th", 1) * chart.coord("q", 1)).is_zero()


def test_second_order_chain_dynamics():
    lag = second_order_chain()
    dyn = solve_dynamics(lag)
    wide = lag.chart.at_order(4)
    assert dict(dyn.forces) == {wide.gen("q", 4): SuperExpr.zero()}
    assert is_sode(dyn.field())


@pytest.mark.parametrize(
    "build", [oscillator, free_particle, superparticle, second_order_chain]
)
def test_dynamics_satisfy_field_equations(build):
    lag = build()
    data = cartan_data(lag)
    dyn = solve_dynamics(lag, data)
    # every field-equation component vanishes after substituting the motion
    for base in lag.chart.at_order(0).coordinates():
        assert dyn.on_shell(data.delta_check.component(base)).is_zero()
    # the solved field satisfies the symplectic equation modulo constraints
    residual = dyn.reduce_form(
        interior(dyn.field(), data.omega)
        - exterior_d(GradedForm.from_function(data.energy))
    )
    assert residual.is_zero()


def test_is_sode_rejects_the_dilation_field():
    chart = Chart.create(["q"], [], 1)
    assert not is_sode(liouville_field(chart, 1))


def test_check_constant_of_motion():
    lag = oscillator()
    dyn = solve_dynamics(lag)
    chart = lag.chart
    e = cartan_data(lag).energy
    assert check_constant_of_motion(e, dyn)
    assert not check_constant_of_motion(chart.coord("q", 0), dyn)


# -- conservation witnesses ------------------------------------------------


def test_witness_for_oscillator_energy():
    lag = oscillator()
    chart = lag.chart
    e = cartan_data(lag).energy
    witness = conservation_witness(e, lag)
    assert dict(witness.components) == {chart.gen("q", 0): chart.coord("q", 1)}
    assert witness.parity is Parity.EVEN


def test_witness_for_free_particle_momentum():
    lag = free_particle()
    chart = lag.chart
    witness = conservation_witness(chart.coord("q", 1), lag)
    assert dict(witness.components) == {chart.gen("q", 0): SuperExpr.constant(1)}


def test_witness_of_zero_is_the_zero_field():
    lag = free_particle()
    witness = conservation_witness(SuperExpr.zero(), lag)
    assert not witness.components
    assert witness.parity is Parity.EVEN


def test_no_witness_for_non_conserved_quantity():
    lag = free_particle()
    chart = lag.chart
    with pytest.raises(NoWitness):
        conservation_witness(chart.coord("q", 0), lag, max_degree=3)


def test_witness_for_susy_charge_is_odd():
    lag = superparticle()
    chart = lag.chart
    charge = chart.coord("q", 1) * chart.coord("th", 0)
    witness = conservation_witness(charge, lag)
    assert witness.parity is Parity.ODD
    assert witness.component(chart.gen("q", 0)) == chart.coord("th", 0)
    assert witness.component(chart.gen("th", 0)) == -chart.coord("q", 1)
