"""Encoders, oracle, polynomial algebra, generators, and instance files."""

import json

import numpy as np
import pytest

from oracles import TRUTHS, weighted_mis_optimum
from qchop.problems import (
    AffineForm,
    ConstrainedProblem,
    InstanceRejected,
    ParseError,
    PatternProjector,
    ZPolynomial,
    brute_force_solve,
    encode_auction,
    encode_dmds,
    encode_etf,
    encode_knapsack,
    encode_mis,
    gen_auction_instance,
    gen_dmds_instance,
    gen_erdos_renyi,
    gen_etf_instance,
    gen_knapsack_instance,
    gen_mis_instance,
    load_instance,
    save_instance,
    slack_value_set,
)


class TestZPolynomial:
    def test_evaluation_convention(self):
        # f(x) = (1/2) sum_S c_S prod_{j in S} (1 - 2 x_j)
        poly = ZPolynomial({frozenset(): 4.0, frozenset({0}): 2.0, frozenset({0, 1}): 6.0})
        assert poly.value(0b00) == 0.5 * (4 + 2 + 6)
        assert poly.value(0b01) == 0.5 * (4 - 2 - 6)
        assert poly.value(0b10) == 0.5 * (4 + 2 - 6)
        assert poly.value(0b11) == 0.5 * (4 - 2 + 6)

    def test_from_x_linear(self):
        poly = ZPolynomial.from_x_linear(3.0, {0: -1.0, 2: 2.0})
        for x in range(8):
            expected = 3.0 - ((x >> 0) & 1) + 2.0 * ((x >> 2) & 1)
            assert poly.value(x) == pytest.approx(expected)

    def test_diagonal_matches_value(self):
        rng = np.random.default_rng(0)
        coeffs = {frozenset({0}): 1.3, frozenset({1, 3}): -0.7,
                  frozenset({0, 1, 2}): 2.2, frozenset(): 0.4}
        poly = ZPolynomial(coeffs)
        diag = poly.diagonal(4)
        for x in range(16):
            assert diag[x] == pytest.approx(poly.value(x), abs=1e-12)

    def test_product_matches_pointwise(self):
        rng = np.random.default_rng(1)
        subsets = [frozenset(), frozenset({0}), frozenset({1}), frozenset({0, 2})]
        a = ZPolynomial({s: rng.normal() for s in subsets})
        b = ZPolynomial({s: rng.normal() for s in subsets})
        prod = a * b
        for x in range(8):
            assert prod.value(x) == pytest.approx(a.value(x) * b.value(x), abs=1e-12)

    def test_squared_and_negation(self):
        poly = ZPolynomial.from_x_linear(1.0, {0: -2.0})
        sq = -(poly.squared())
        for x in range(2):
            assert sq.value(x) == pytest.approx(-poly.value(x) ** 2)

    def test_no_zero_coefficients_stored(self):
        poly = ZPolynomial({frozenset({0}): 1.0}) + ZPolynomial({frozenset({0}): -1.0})
        assert poly.coeffs == {}

    def test_plus_constant(self):
        poly = ZPolynomial({frozenset({0}): 1.0})
        shifted = poly.plus_constant(2.5)
        assert shifted.value(0) == poly.value(0) + 2.5

    def test_is_odd(self):
        assert ZPolynomial({frozenset({0}): 1.0, frozenset(): 3.0}).is_odd()
        assert not ZPolynomial({frozenset({0, 1}): 1.0}).is_odd()


class TestAffineForm:
    def test_value_and_bounds(self):
        form = AffineForm(6, {0: -2, 1: -4})
        assert form.value(0b00) == 6
        assert form.value(0b11) == 0
        assert form.upper_bound() == 6
        assert form.coefficient_gcd() == 2

    def test_reduced(self):
        form = AffineForm(6, {0: -2, 1: -4}).reduced()
        assert form.constant == 3
        assert form.coeffs == {0: -1, 1: -2}

    def test_reduced_gcd_includes_constant(self):
        form = AffineForm(3, {0: -1, 1: -1}).reduced()
        assert form.constant == 3 and form.coeffs == {0: -1, 1: -1}

    def test_zero_coefficients_dropped(self):
        assert AffineForm(1, {0: 0, 1: 2}).coeffs == {1: 2}


class TestSlackValueSet:
    def test_gcd_pruning(self):
        assert slack_value_set(AffineForm(6, {0: -2, 1: -4})) == [0, 2, 4, 6]

    def test_binary_slack(self):
        assert slack_value_set(AffineForm(1, {0: -1})) == [0, 1]

    def test_keeps_unreachable_residues(self):
        # attainable values are {1, 2, 3} but 0 stays in the residue class
        assert slack_value_set(AffineForm(3, {0: -1, 1: -1})) == [0, 1, 2, 3]

    def test_constant_constraint_rejected(self):
        with pytest.raises(InstanceRejected):
            slack_value_set(AffineForm(3, {}))


class TestBruteForce:
    def test_mis_triangle(self):
        problem = encode_mis(3, [(0, 1), (1, 2), (0, 2)])
        oracle = brute_force_solve(problem)
        assert sorted(oracle.feasible.tolist()) == [0b000, 0b001, 0b010, 0b100]
        assert oracle.e_best == -1.0
        assert oracle.e_worst == 0.0
        assert sorted(oracle.best.tolist()) == [1, 2, 4]
        assert oracle.worst.tolist() == [0]

    def test_mis_path(self):
        problem = encode_mis(3, [(0, 1), (1, 2)])
        oracle = brute_force_solve(problem)
        assert oracle.best.tolist() == [0b101]
        assert oracle.e_best == -2.0

    def test_knapsack_degenerate_rejected(self):
        # a single item that fits makes the objective two-valued; shrink the
        # capacity below the weight and the encoder itself refuses
        with pytest.raises(InstanceRejected):
            encode_knapsack([5], [3], 2)
        problem = ConstrainedProblem(
            n_vars=1, objective=ZPolynomial({frozenset({0}): 1.0}),
            inequality_constraints=(AffineForm(0, {0: -1}),))
        with pytest.raises(InstanceRejected):
            brute_force_solve(problem)  # only x=0 is feasible: constant objective

    def test_all_feasible_rejected(self):
        problem = encode_mis(3, [])
        with pytest.raises(InstanceRejected):
            brute_force_solve(problem)
        oracle = brute_force_solve(problem, reject_degenerate=False)
        assert oracle.best.tolist() == [0b111]

    def test_no_feasible_rejected(self):
        problem = ConstrainedProblem(
            n_vars=1, objective=ZPolynomial({frozenset({0}): 1.0}),
            equality_constraints=(PatternProjector((0,), (0,)),
                                  PatternProjector((0,), (1,))))
        with pytest.raises(InstanceRejected):
            brute_force_solve(problem)


class TestEncodeMis:
    def test_objective_coefficients(self):
        problem = encode_mis(3, [])
        assert problem.objective.coeffs[frozenset({0})] == 1.0
        assert problem.objective.coeffs[frozenset()] == -3.0
        for x in range(8):
            assert problem.objective.value(x) == -bin(x).count("1")

    def test_triangle_constraint_energy(self):
        problem = encode_mis(3, [(0, 1), (1, 2), (0, 2)])
        assert len(problem.equality_constraints) == 3
        for x in (0b011, 0b111):
            assert problem.equality_violation(x) >= 1

    def test_single_edge(self):
        oracle = brute_force_solve(encode_mis(2, [(0, 1)]))
        assert sorted(oracle.feasible.tolist()) == [0, 1, 2]
        assert oracle.e_best == -1.0

    def test_self_loop_rejected(self):
        with pytest.raises(ValueError):
            encode_mis(2, [(1, 1)])

    def test_worst_is_empty_set(self):
        assert encode_mis(4, [(0, 1)]).worst_feasible == 0


class TestEncodeDmds:
    def test_two_vertex_chain(self):
        problem = encode_dmds(2, [(0, 1)])
        oracle = brute_force_solve(problem)
        # vertex 0 has no in-neighbor, so x_0 = 1 is forced
        assert sorted(oracle.feasible.tolist()) == [0b01, 0b11]
        assert oracle.e_best == 1.0
        assert oracle.best.tolist() == [0b01]

    def test_isolated_vertex_forced(self):
        problem = encode_dmds(1, [])
        assert not problem.is_feasible(0)
        assert problem.is_feasible(1)

    def test_all_ones_always_feasible(self):
        for seed in range(3):
            edges = gen_erdos_renyi(5, 0.5, seed, directed=True)
            problem = encode_dmds(5, edges)
            assert problem.is_feasible(0b11111)

    def test_worst_is_full_set(self):
        assert encode_dmds(3, [(0, 1)]).worst_feasible == 0b111


class TestEncodeKnapsack:
    def test_two_items(self):
        oracle = brute_force_solve(encode_knapsack([5, 4], [3, 4], 6))
        assert oracle.e_best == -5.0
        assert oracle.best.tolist() == [0b01]

    def test_affine_form_read_off(self):
        problem = encode_knapsack([1, 1], [2, 4], 6)
        form = problem.inequality_constraints[0]
        assert form.constant == 6
        assert form.coeffs == {0: -2, 1: -4}

    def test_loose_capacity_all_feasible(self):
        problem = encode_knapsack([1, 2], [1, 1], 5)
        assert all(problem.is_feasible(x) for x in range(4))
        with pytest.raises(InstanceRejected):
            brute_force_solve(problem)

    def test_overweight_item_rejected(self):
        with pytest.raises(InstanceRejected):
            encode_knapsack([5], [3], 2)


class TestEncodeAuction:
    def test_two_bids_one_item(self):
        problem = encode_auction([3.0, 5.0], [[1], [1]], [1])
        oracle = brute_force_solve(problem)
        assert sorted(oracle.feasible.tolist()) == [0b00, 0b01, 0b10]
        assert oracle.e_best == -5.0
        assert oracle.best.tolist() == [0b10]

    def test_unit_multiplicity_reduces_to_weighted_mis(self):
        for seed in range(8):
            problem = gen_auction_instance(6, seed)
            src = problem.source
            edges = []
            n = src["n"]
            for a in range(n):
                for b in range(a + 1, n):
                    if any(src["quantities"][a][i] and src["quantities"][b][i]
                           for i in range(len(src["multiplicities"]))):
                        edges.append((a, b))
            oracle = brute_force_solve(problem)
            assert -oracle.e_best == pytest.approx(
                weighted_mis_optimum(src["payments"], edges))

    def test_zero_bids_rejected(self):
        with pytest.raises(InstanceRejected):
            encode_auction([], [], [1])

    def test_greedy_bid_rejected(self):
        with pytest.raises(InstanceRejected):
            encode_auction([1.0, 2.0], [[1, 0], [3, 1]], [2, 1])


class TestEncodeEtf:
    def test_mismatch_squared_values(self):
        problem = encode_etf([0.5, 0.5], [1.0, 1.0], [0, 1], shares=2, band=0.1)
        assert problem.objective.value(0b00) == pytest.approx(4.0)
        assert problem.objective.value(0b11) == pytest.approx(0.0)

    def test_objective_has_even_terms(self):
        problem = encode_etf([0.5, 0.5], [1.0, 1.0], [0, 1], shares=2, band=0.1)
        assert not problem.objective.is_odd()
        assert frozenset({0, 1}) in problem.objective.coeffs

    def test_empty_basket_feasible(self):
        problem = encode_etf([0.5, 0.5], [1.0, 1.0], [0, 1], shares=2, band=0.1)
        form = problem.inequality_constraints[0]
        assert form.value(0) == 0
        assert problem.is_feasible(0)

    def test_epsilon_default(self):
        problem = encode_etf([0.5, 0.5], [1.0, 1.0], [0, 1], shares=2, band=0.1)
        assert problem.epsilon == 0.01

    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError):
            encode_etf([0.5, 0.6], [1.0, 1.0], [0, 1], shares=2, band=0.1)

    def test_degenerate_rejected(self):
        # one shared sector: the exposure bound can never bind
        with pytest.raises(InstanceRejected):
            encode_etf([0.5, 0.5], [1.0, 1.0], [0, 0], shares=2, band=0.1)


class TestGenerators:
    def test_erdos_renyi_extremes(self):
        assert gen_erdos_renyi(4, 0.0, 0) == []
        assert gen_erdos_renyi(3, 1.0, 0) == [(0, 1), (0, 2), (1, 2)]

    def test_erdos_renyi_deterministic(self):
        a = gen_erdos_renyi(8, 0.3, 42)
        b = gen_erdos_renyi(8, 0.3, 42)
        assert a == b
        assert gen_erdos_renyi(8, 0.3, 43) != a

    def test_directed_orientation_deterministic(self):
        a = gen_erdos_renyi(8, 0.5, 7, directed=True)
        assert a == gen_erdos_renyi(8, 0.5, 7, directed=True)
        assert any(u > v for u, v in a)

    def test_etf_recipe(self):
        problem = gen_etf_instance(8, seed=0)
        assert problem.source["shares"] == 5
        assert sum(problem.source["weights"]) == pytest.approx(1.0)
        assert problem.meta["seed"] == 0
        assert problem.meta["attempts"] >= 1

    def test_generated_instances_not_degenerate(self):
        for gen, n in [(gen_mis_instance, 6), (gen_dmds_instance, 6),
                       (gen_knapsack_instance, 5), (gen_auction_instance, 5),
                       (gen_etf_instance, 5)]:
            problem = gen(n, seed=3)
            oracle = brute_force_solve(problem)  # must not raise
            assert oracle.e_best < oracle.e_worst

    def test_deterministic_instances(self):
        a = gen_knapsack_instance(5, seed=9)
        b = gen_knapsack_instance(5, seed=9)
        assert a.source == b.source


class TestEncoderAgainstIndependentOracle:
    @pytest.mark.parametrize("kind,gen,n", [
        ("mis", gen_mis_instance, 7),
        ("dmds", gen_dmds_instance, 7),
        ("knapsack", gen_knapsack_instance, 6),
        ("auction", gen_auction_instance, 6),
        ("etf", gen_etf_instance, 6),
    ])
    def test_feasible_set_and_extremes(self, kind, gen, n):
        for seed in range(6):
            problem = gen(n, seed=seed)
            oracle = brute_force_solve(problem)
            feasible, energy = TRUTHS[kind](problem.source)
            assert oracle.feasible.tolist() == feasible
            assert oracle.e_best == pytest.approx(min(energy.values()), abs=1e-9)
            assert oracle.e_worst == pytest.approx(max(energy.values()), abs=1e-9)
            assert problem.worst_feasible in feasible
            assert energy[problem.worst_feasible] == pytest.approx(
                oracle.e_worst, abs=1e-9)

    def test_objective_matches_energy(self):
        for seed in range(3):
            problem = gen_knapsack_instance(5, seed=seed)
            _, energy = TRUTHS["knapsack"](problem.source)
            for x, e in energy.items():
                assert problem.objective.value(x) == pytest.approx(e)


class TestInstanceFiles:
    def test_roundtrip_all_kinds(self, tmp_path):
        problems = [
            encode_mis(3, [(0, 1), (1, 2), (0, 2)]),
            encode_dmds(3, [(0, 1), (2, 1)]),
            encode_knapsack([5, 4], [3, 4], 6),
            encode_auction([3.0, 5.0], [[1], [1]], [1]),
            gen_etf_instance(4, seed=1),
        ]
        for problem in problems:
            path = tmp_path / f"{problem.source['kind']}.json"
            save_instance(problem, path)
            loaded = load_instance(path)
            assert loaded.objective.coeffs == problem.objective.coeffs
            assert loaded.inequality_constraints == problem.inequality_constraints
            assert loaded.worst_feasible == problem.worst_feasible
            assert loaded.source == problem.source

    def test_unknown_kind(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"kind": "sudoku", "n": 2}))
        with pytest.raises(ParseError, match="kind"):
            load_instance(path)

    def test_missing_field(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"kind": "knapsack", "n": 1, "values": [1]}))
        with pytest.raises(ParseError, match="weights"):
            load_instance(path)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ParseError, match="line"):
            load_instance(path)

    def test_overweight_file_rejected_on_encode(self, tmp_path):
        path = tmp_path / "heavy.json"
        path.write_text(json.dumps(
            {"kind": "knapsack", "n": 1, "values": [5], "weights": [3], "capacity": 2}))
        with pytest.raises(InstanceRejected):
            load_instance(path)

    def test_save_requires_payload(self, tmp_path):
        problem = ConstrainedProblem(1, ZPolynomial({frozenset({0}): 1.0}))
        with pytest.raises(ValueError):
            save_instance(problem, tmp_path / "x.json")


class TestProblemInvariants:
    def test_worst_feasible_checked_at_construction(self):
        with pytest.raises(ValueError):
            ConstrainedProblem(
                n_vars=2, objective=ZPolynomial({frozenset({0}): 1.0}),
                equality_constraints=(PatternProjector((0,), (1,)),),
                worst_feasible=0b01)

    def test_feasible_mask_matches_scalar_path(self):
        for seed in range(4):
            problem = gen_auction_instance(5, seed=seed)
            mask = problem.feasible_mask()
            for x in range(1 << problem.n_vars):
                assert mask[x] == problem.is_feasible(x)
