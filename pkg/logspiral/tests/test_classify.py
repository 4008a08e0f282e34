"""Test classify.py"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ..classify import (
    FINITE_TIME_CASES,
    INVARIANT_LINE,
    SADDLE_DESTINED,
    asymptotic_rate_table,
    basin_sweep,
    blowup_expected,
    case_of_destination,
    case_rates,
    classify_behavior,
    invariant_line_edges,
    predicted_heteroclinic_graph,
    resolve_n_jobs,
    sheet_attractors,
)
from ..criticality import solve_asymmetric_fixed_point, solve_critical_betas
from ..dynamics import BLOWUP_DETECTED, integrate, reverse_direction
from ..equilibria import ATTRACTOR, equilibria_by_id, jacobian_reparam
from ..kernel import eval_kernel, kernel_limits
from ..utils._errors import (
    NearCriticalError,
    SpiralDomainError,
    UnresolvedDestinationError,
)

TWO_PI = 2.0 * math.pi


def test_symmetric_case():
    result = classify_behavior(0.3, 1.0, 1.0, 3.14159)
    assert result["case_id"] == "1"
    assert result["destination"] == "(1,pi)"
    assert result["theorem_bullet"] == 1
    assert result["t_star"] is None
    assert result["band"] == "(0,beta0)"
    assert result["reflected"] is False and result["negated"] is False
    assert result["destination_theta"] == pytest.approx(math.pi)


def test_negated_datum():
    direct = classify_behavior(0.3, 1.0, 1.0, 3.14159)
    result = classify_behavior(0.3, -1.0, -1.0, 3.14159, "backward")
    assert result["negated"] is True
    assert result["reduced"]["direction"] == "forward"
    assert result["case_id"] == "1"
    for a, b in zip(direct["rates"], result["rates"]):
        assert b["coefficient"] == pytest.approx(-a["coefficient"])


def test_reflected_beta():
    result = classify_behavior(-0.3, 1.0, 1.0, TWO_PI - 3.14159, "backward")
    assert result["reflected"] is True
    assert result["case_id"] == "1"
    assert "reflected_beta" in result["flags"]
    assert result["beta"] == -0.3
    assert result["reduced"]["theta"] == pytest.approx(3.14159)


def test_invariant_line_decay():
    result = classify_behavior(0.3, 0.0, 1.0, 5.5)
    assert result["case_id"] == "i2_only"
    assert result["theorem_bullet"] == INVARIANT_LINE
    assert result["destination"] == "(0,2pi)"
    assert result["t_star"] is None
    assert result["rates"][0]["exponent"] == -1.0


def test_invariant_line_blowup():
    beta = 0.3
    result = classify_behavior(beta, 0.0, -1.0, 5.5)
    assert result["destination"] == "(0,theta3)"
    assert result["t_star"] == pytest.approx(-1.0 / (2.0 * kernel_limits(beta)["k1_zero"]))
    assert result["t_star"] > 0
    assert blowup_expected(result)


def test_boundary_destined_case():
    result = classify_behavior(0.3, 0.01, 1.0, 5.5)
    assert result["destination"] == "(0,2pi)"
    assert result["case_id"] == "3"
    assert result["theorem_bullet"] == 2


def test_inputs_rejected():
    with pytest.raises(SpiralDomainError):
        classify_behavior(0.3, 0.0, 0.0, 1.0)
    with pytest.raises(SpiralDomainError):
        classify_behavior(0.3, 1.0, 1.0, TWO_PI)
    beta = solve_critical_betas()["beta2"] + 5e-5
    with pytest.raises(NearCriticalError):
        classify_behavior(beta, 1.0, 1.0, 1.0)


def test_symmetric_case_rate():
    # t * I2 tends to the case coefficient
    beta = 0.3
    traj = integrate(beta, "original", (1.0, 1.0, 3.1), controls={"horizon": 1e4})
    t, _, i2, _ = traj["samples"][-1]
    rates, _ = case_rates(beta, "1")
    assert rates[1]["coefficient"] == pytest.approx(0.772, abs=1e-3)
    assert t * i2 == pytest.approx(rates[1]["coefficient"], rel=0.02)


def test_slow_decay_exponent():
    # log I1 / log t tends to -K'(-0)/K'(0) on approach to (0, 2*pi)
    beta = 0.3
    traj = integrate(
        beta,
        "original",
        (0.01, 1.0, 5.5),
        controls={"horizon": 1e4, "atol": 1e-20},
    )
    samples = traj["samples"]
    keep = samples[:, 0] >= 1e3
    assert keep.sum() >= 3
    slope = np.polyfit(np.log(samples[keep, 0]), np.log(samples[keep, 1]), 1)[0]

    rates, _ = case_rates(beta, "3")
    exponent = [r for r in rates if r["quantity"] == "i1"][0]["exponent"]
    assert exponent == pytest.approx(-1.9544, abs=1e-3)
    assert slope == pytest.approx(exponent, rel=0.02)


@pytest.mark.parametrize("beta", [0.3, 0.5])
def test_asymmetric_case_coefficients(beta):
    point = solve_asymmetric_fixed_point(beta)
    rates, bullet = case_rates(beta, "2")
    c_i1, c_i2 = rates[0]["coefficient"], rates[1]["coefficient"]
    assert bullet == 1
    assert c_i1 / c_i2 == pytest.approx(point["r_bar"], rel=1e-8)

    k10 = kernel_limits(beta)["k1_zero"]
    k1m = eval_kernel(beta, TWO_PI - point["theta_bar"])["K1"]
    assert c_i2 == pytest.approx(1.0 / (-2.0 * (k10 + k1m * point["r_bar"])), rel=1e-8)

    swapped, _ = case_rates(beta, "2'")
    assert swapped[0]["coefficient"] == pytest.approx(c_i2)
    assert swapped[1]["coefficient"] == pytest.approx(c_i1)


def test_asymmetric_case_along_stable_direction():
    # start on the stable eigenvector of the saddle and fit t*I = c + b/t
    beta = 0.3
    point = solve_asymmetric_fixed_point(beta)
    r_bar, theta_bar = point["r_bar"], point["theta_bar"]
    values, vectors = np.linalg.eig(jacobian_reparam(beta, r_bar, theta_bar))
    stable = int(np.argmin(values.real))
    assert values[stable].real < 0
    dr, dtheta = 1e-7 * vectors[:, stable].real

    controls = {"horizon": 100.0, "rtol": 1e-12, "atol": 1e-14}
    traj = integrate(beta, "original", (r_bar + dr, 1.0, theta_bar + dtheta), controls=controls)
    samples = traj["samples"]
    assert samples[-1, 0] == pytest.approx(100.0)
    keep = samples[:, 0] >= 20.0
    assert keep.sum() >= 5

    t = samples[keep, 0]
    rates, _ = case_rates(beta, "2")
    for column, rate in zip((1, 2), rates):
        intercept = np.polyfit(1.0 / t, t * samples[keep, column], 1)[1]
        assert intercept == pytest.approx(rate["coefficient"], rel=0.05)
    assert samples[-1, 3] == pytest.approx(theta_bar, abs=1e-3)


def test_case_rates_errors():
    with pytest.raises(SpiralDomainError):
        case_rates(0.3, "11")
    with pytest.raises(SpiralDomainError, match="destination"):
        case_rates(0.3, "5")


@pytest.mark.parametrize(
    "destination, direction, case_id",
    [
        ("(1,pi)", "forward", "1"),
        ("(1/Rbar,2pi-thetabar)", "forward", "2'"),
        ("(+inf,0)", "forward", "3'"),
        ("(-inf,2pi-theta3)", "forward", "5"),
        ("(1,pi)", "backward", "6"),
        ("(0,theta1)", "backward", "8"),
        ("(0,0)", "backward", "8"),
        ("(+inf,2pi)", "backward", "8'"),
        ("(-inf,0)", "backward", "10"),
        ("(0,theta2)", "forward", None),
    ],
)
def test_case_of_destination(destination, direction, case_id):
    assert case_of_destination(destination, direction) == case_id


def _random_seeds(n, seed):
    rng = np.random.default_rng(seed)
    seeds = []
    while len(seeds) < n:
        i1, i2 = rng.uniform(-3.0, 3.0, size=2)
        if min(abs(i1), abs(i2)) < 0.05:
            continue
        seeds.append(
            (
                float(rng.choice([0.3, 0.8, 2.0])),
                float(i1),
                float(i2),
                float(rng.uniform(0.05, TWO_PI - 0.05)),
                str(rng.choice(["forward", "backward"])),
            )
        )
    return seeds


@pytest.mark.parametrize("beta, i1, i2, theta, direction", _random_seeds(100, 20240607))
def test_blowup_criterion(beta, i1, i2, theta, direction):
    result = classify_behavior(beta, i1, i2, theta, direction, return_trajectory=True)
    if result["case_id"] is None:
        assert result["theorem_bullet"] == SADDLE_DESTINED
        return
    blows_up = result["case_id"] in FINITE_TIME_CASES
    assert blows_up == (result["t_star"] is not None)
    assert blows_up == blowup_expected(result)
    if not blows_up:
        return

    assert result["t_star"] * (1 if direction == "forward" else -1) > 0
    direct = integrate(beta, "original", (i1, i2, theta), direction)
    event = direct["terminal_event"]
    if event["type"] != BLOWUP_DETECTED:
        return
    assert result["t_star"] == pytest.approx(event["t_star"], rel=1e-2)
    if abs(direct["samples"][-1, 1]) > 1e6 and event["t_star_extrapolated"] is not None:
        assert event["t_star_extrapolated"] == pytest.approx(event["t_star"], rel=1e-2)


def test_backward_blowup_through_the_line():
    beta, i1, i2, theta = 2.0, -2.904, 1.548, 3.219
    result = classify_behavior(beta, i1, i2, theta, "backward")
    assert result["case_id"] == "8"
    assert result["destination"] == "(0,0)"
    assert result["terminal_event"]["via"] == "invariant_line"
    assert result["t_star"] == pytest.approx(-2.8605, rel=1e-2)

    direct = integrate(beta, "original", (i1, i2, theta), "backward")
    assert direct["terminal_event"]["type"] == BLOWUP_DETECTED
    assert result["t_star"] == pytest.approx(direct["terminal_event"]["t_star"], rel=1e-2)


# one or two seeds (R, theta) per region of the beta = 0.3 phase portrait,
# with the forward attractor and the backward limit of each region
PARTITION_SEEDS = [
    (1e-3, 0.4, "(+inf,0)", "(0,theta1)"),
    (0.1, 0.5, "(+inf,0)", "(0,theta1)"),
    (1e-3, 2.0, "(1,pi)", "(0,theta1)"),
    (1e-3, 3.7, "(1,pi)", "(0,theta3)"),
    (0.5, 4.0, "(1,pi)", "(0,theta3)"),
    (1e-3, 5.5, "(0,2pi)", "(0,theta3)"),
    (1e3, 0.9, "(+inf,0)", "(+inf,2pi-theta3)"),
    (1e3, 2.5, "(1,pi)", "(+inf,2pi-theta3)"),
    (1e3, 4.4, "(1,pi)", "(+inf,2pi-theta1)"),
    (100.0, 4.8, "(1,pi)", "(+inf,2pi-theta1)"),
    (1e3, 5.9, "(0,2pi)", "(+inf,2pi-theta1)"),
    (10.0, 5.0, "(0,2pi)", "(+inf,2pi-theta1)"),
    (-1e-3, 0.4, "(-inf,2pi-theta3)", "(0,theta1)"),
    (-0.5, 1.0, "(-inf,2pi-theta3)", "(0,theta1)"),
    (-1e3, 0.9, "(-inf,2pi-theta3)", "(-inf,0)"),
    (-3.0, 0.5, "(-inf,2pi-theta3)", "(-inf,0)"),
    (-1e-3, 3.7, "(-inf,2pi-theta3)", "(0,theta3)"),
    (-1e3, 2.6, "(-inf,2pi-theta3)", "(0,theta3)"),
    (-1e-3, 5.5, "(0,2pi)", "(0,theta3)"),
    (-1e3, 4.4, "(-inf,2pi-theta1)", "(0,theta3)"),
]


@pytest.mark.parametrize("r, theta, forward, backward", PARTITION_SEEDS)
def test_partition_destinations(r, theta, forward, backward):
    graph = predicted_heteroclinic_graph(0.3)
    sheet = "+" if r > 0 else "-"
    assert forward in sheet_attractors(graph, sheet)

    ahead = classify_behavior(0.3, r, 1.0, theta, "forward")
    assert ahead["destination"] == forward
    assert (ahead["t_star"] is not None) == forward.startswith("(-inf")

    assert backward in sheet_attractors(graph, sheet, "backward")
    behind = classify_behavior(0.3, r, 1.0, theta, "backward")
    assert behind["destination"] == backward
    assert behind["case_id"] is not None


data = st.tuples(
    st.sampled_from([0.3, 0.8, 2.0]),
    st.floats(min_value=0.05, max_value=3.0),
    st.floats(min_value=0.05, max_value=3.0),
    st.sampled_from([(1, 1), (1, -1), (-1, 1), (-1, -1)]),
    st.floats(min_value=0.05, max_value=TWO_PI - 0.05),
    st.sampled_from(["forward", "backward"]),
)


def _unpack(datum):
    beta, a, b, (sa, sb), theta, direction = datum
    return beta, sa * a, sb * b, theta, direction


@settings(max_examples=50, deadline=None)
@given(datum=data)
def test_swap_coherence(datum):
    beta, i1, i2, theta, direction = _unpack(datum)
    result = classify_behavior(beta, i1, i2, theta, direction)
    swapped = classify_behavior(beta, i2, i1, TWO_PI - theta, direction)
    assert swapped["theorem_bullet"] == result["theorem_bullet"]
    assert (swapped["t_star"] is None) == (result["t_star"] is None)
    if result["t_star"] is not None:
        assert swapped["t_star"] == pytest.approx(result["t_star"], rel=1e-2)
    quantities = {"i1": "i2", "i2": "i1"}
    assert sorted((quantities[r["quantity"]], r["kind"]) for r in swapped["rates"]) == sorted(
        (r["quantity"], r["kind"]) for r in result["rates"]
    )


@settings(max_examples=50, deadline=None)
@given(datum=data)
def test_time_reversal_coherence(datum):
    beta, i1, i2, theta, direction = _unpack(datum)
    result = classify_behavior(beta, i1, i2, theta, direction)
    reversed_ = classify_behavior(beta, -i1, -i2, theta, reverse_direction(direction))
    assert reversed_["case_id"] == result["case_id"]
    assert reversed_["destination"] == result["destination"]
    assert reversed_["theorem_bullet"] == result["theorem_bullet"]
    if result["t_star"] is None:
        assert reversed_["t_star"] is None
    else:
        assert reversed_["t_star"] == pytest.approx(-result["t_star"])


GRAPH_BETAS = [0.3, 0.5, 0.63, 0.8, 0.93, 1.2, 1.8]


@pytest.mark.parametrize("beta", GRAPH_BETAS)
def test_graph_has_no_edge_out_of_attractors(beta):
    graph = predicted_heteroclinic_graph(beta)
    kinds = {n["id"]: n["kind"] for n in graph["nodes"]}
    for source, target in graph["edges"]:
        assert kinds[source] != ATTRACTOR, (source, target)
        assert source != target


@pytest.mark.parametrize("beta", GRAPH_BETAS)
def test_graph_nodes_match_equilibria(beta):
    graph = predicted_heteroclinic_graph(beta)
    by_id = equilibria_by_id(beta)
    assert {n["id"] for n in graph["nodes"]} == set(by_id)
    for node in graph["nodes"]:
        assert node["kind"] == by_id[node["id"]]["kind"]


def test_graph_bands_share_topology():
    lower = predicted_heteroclinic_graph(0.93)
    upper = predicted_heteroclinic_graph(1.2)
    assert lower["band"] == "(beta2,1)" and upper["band"] == "(1,beta3)"
    assert sorted(map(tuple, lower["edges"])) == sorted(map(tuple, upper["edges"]))


def test_invariant_line_edges():
    edges = invariant_line_edges(0.3)
    assert ("(0,theta1)", "(0,0)") in edges
    assert ("(0,theta3)", "(0,2pi)") in edges
    assert ("(+inf,2pi-theta3)", "(+inf,0)") in edges
    assert ("(-inf,0)", "(-inf,2pi-theta3)") in edges


def test_sheet_attractors():
    graph = predicted_heteroclinic_graph(0.3)
    assert sheet_attractors(graph, "+") == {"(1,pi)", "(0,2pi)", "(+inf,0)"}
    assert sheet_attractors(graph, "0") == {"(0,0)", "(0,theta2)", "(0,2pi)"}
    assert sheet_attractors(graph, "0", "backward") == {"(0,theta1)", "(0,theta3)"}


def test_basin_sweep():
    beta = 0.3
    graph = predicted_heteroclinic_graph(beta)
    known = {n["id"] for n in graph["nodes"]}
    sweep = basin_sweep(beta, width=5, height=3, sheets=("+", "0"))

    assert sweep["cells"] == 5 * 3 + 5
    assert sweep["columns"] == ["a_or_r", "theta", "sheet", "destination_id", "case_id"]
    assert sweep["unresolved"] == sum(1 for row in sweep["rows"] if row[3] == "unresolved")

    line_sinks = sheet_attractors(graph, "0")
    for a_or_r, theta, sheet, destination, _ in sweep["rows"]:
        if destination == "unresolved":
            continue
        assert destination in known
        if sheet == "0":
            assert destination in line_sinks

    # the cell at R = 1, theta = pi sits on the attractor
    centre = [row for row in sweep["rows"] if row[2] == "+" and row[0] == 0.0]
    assert "(1,pi)" in {row[3] for row in centre}


def test_basin_sweep_rejects_sheet():
    with pytest.raises(SpiralDomainError):
        basin_sweep(0.3, width=2, height=2, sheets=("x",))


def test_rate_table():
    table = asymptotic_rate_table(0.3)
    assert table["c1"] == pytest.approx(1.9544, abs=1e-3)
    assert len(table["c2"]) == 2 and len(table["decay_exponents"]) == 2
    cases = [row["case"] for row in table["rows"] if row["theta0"] is None]
    assert cases == ["1", "2", "2'", "3", "3'", "4", "6", "7", "7'", "9", "10"]

    table = asymptotic_rate_table(1.2)
    cases = [row["case"] for row in table["rows"] if row["theta0"] is None]
    assert cases == ["1", "3", "3'", "4", "6", "9", "10"]
    # two angles on the line (0 and theta3), three cases each
    assert len(table["rows"]) == 7 + 2 * 3


def test_resolve_n_jobs():
    assert resolve_n_jobs(1) == 1
    assert resolve_n_jobs(-1) >= 1
    with pytest.raises(SpiralDomainError):
        resolve_n_jobs(0)


def test_sweep_cell_only_absorbs_unresolved(monkeypatch):
    from .. import classify
    from ..utils._errors import StepSizeError

    def failing(error):
        def run(*args, **kwargs):
            raise error

        return run

    cell = (0.3, 0.0, 2.0, "+", "forward", None)
    for error in (UnresolvedDestinationError("ERROR: horizon"), StepSizeError("ERROR: step")):
        monkeypatch.setattr(classify, "classify_behavior", failing(error))
        assert classify._sweep_cell(cell)[3:] == ("unresolved", "unresolved")

    monkeypatch.setattr(classify, "classify_behavior", failing(RuntimeError("bug")))
    with pytest.raises(RuntimeError, match="bug"):
        classify._sweep_cell(cell)
