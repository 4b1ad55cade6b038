import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from conftest import binary_uniform, decodable_partition, random_spec
from leakage_lab.mechanism import joint_distribution
from leakage_lab.polymatroid import (
    CONSTRAINT_TOL,
    build_program,
    decoding_rows,
    entropy_witness,
    lam,
    mask,
    solve,
    theorem2,
    theorem2_bound,
)
from leakage_lab.prob import conditional_mutual_information
from leakage_lab.simplex import solve_lp
from leakage_lab.system import SystemSpec, UserSpec


def highs(program):
    res = linprog(program.objective, A_ub=-program.A_ge, b_ub=np.zeros(len(program.A_ge)),
                  A_eq=program.A_eq, b_eq=program.b_eq, bounds=(0, None), method="highs")
    assert res.status == 0
    return res.fun


class TestProgramShape:
    def test_single_source(self):
        spec = SystemSpec(binary_uniform(1), (UserSpec(set(), {0}),), set())
        assert build_program(spec, {0}, set()).n_variables == 2

    def test_two_sources_row_counts(self):
        spec = SystemSpec(binary_uniform(2), (UserSpec(set(), set()),), set())
        prog = build_program(spec, {0}, set())
        mono = [lab for lab in prog.ge_labels if lab.startswith("mono")]
        submod = [lab for lab in prog.ge_labels if lab.startswith("submod")]
        assert len(mono) == 4
        assert len(submod) == 1

    @pytest.mark.parametrize("n", [3, 4])
    def test_elemental_row_counts(self, n):
        spec = SystemSpec(binary_uniform(n), (UserSpec(set(), set()),), set())
        prog = build_program(spec, {0}, set())
        assert len(prog.ge_labels) == n * 2 ** (n - 1) + n * (n - 1) // 2 * 2 ** (n - 2)

    def test_overlapping_sets_rejected(self, T1):
        with pytest.raises(ValueError):
            build_program(T1, {0}, {0, 1})

    def test_objective(self, T1):
        # Z = {2}: g({1}) - g({})
        c = build_program(T1, {0}, {1}).objective
        assert c.tolist() == [-1.0, 1.0, 0.0, 0.0]

    def test_text_dump(self, T3):
        text = build_program(T3, {1}, {0}).to_text()
        assert text.startswith("minimize -1 g{} +1 g{2}\n")
        assert "[g(empty)=0] +1 g{} = 0" in text
        assert text.count(">= 0") == 5


class TestDecodingRows:
    def test_t3(self, T3):
        rows, rhs, _ = decoding_rows(T3)
        got = sorted((tuple(np.flatnonzero(r > 0)), tuple(np.flatnonzero(r < 0))) for r in rows)
        # g({1}) - g({}) = 1 and g({1,2}) - g({2}) = 1
        assert got == [((1,), (0,)), ((3,), (2,))]
        assert rhs == [pytest.approx(1.0)] * 2

    def test_deduplicated_across_identical_users(self, T3):
        twice = SystemSpec(T3.sources, T3.users * 2, T3.P)
        assert len(decoding_rows(twice)[0]) == 2

    def test_nothing_to_decode(self):
        spec = SystemSpec(binary_uniform(3), (UserSpec({0}, set()),), set())
        assert decoding_rows(spec)[0] == []


class TestLambda:
    def test_no_users_constraint(self):
        spec = SystemSpec(binary_uniform(2), (UserSpec(set(), set()),), set())
        assert lam(spec, {0, 1}, set()) == pytest.approx(0.0, abs=1e-9)

    def test_t1(self, T1):
        assert lam(T1, {0}, {1}) == pytest.approx(1.0)

    def test_t3(self, T3):
        assert lam(T3, {1}, {0}) == pytest.approx(0.0, abs=1e-9)

    def test_empty_target(self, T3):
        assert lam(T3, set(), {0}) == 0.0

    def test_solution_is_feasible(self, T3):
        prog = build_program(T3, {1}, {0})
        sol = solve(prog)
        assert sol.status == "optimal"
        assert prog.residual(sol.g_values) <= CONSTRAINT_TOL


class TestPolymatroidBound:
    def test_t1(self, T1):
        res = theorem2(T1)
        assert res.bound == pytest.approx(1.0)
        assert res.lambda_QP == pytest.approx(1.0)

    def test_t3(self, T3):
        res = theorem2(T3)
        assert res.bound == pytest.approx(0.5)
        assert res.per_user == (pytest.approx(0.5),)

    def test_nothing_hidden(self):
        spec = SystemSpec(binary_uniform(), (UserSpec({1}, {0}),), {0, 1})
        assert theorem2_bound(spec) == 0.0

    def test_user_with_visible_guess_set_skipped(self):
        spec = SystemSpec(binary_uniform(3), (UserSpec(set(), {0}, 0.2),), {1})
        res = theorem2(spec)
        assert res.per_user == (None,)
        assert res.to_dict()["per_user"] == [None]


seeds = st.integers(0, 2 ** 32 - 1)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_simplex_matches_highs(seed):
    rng = np.random.default_rng(seed)
    spec = random_spec(rng, n_max=4)
    V = frozenset(i for i in spec.Q if rng.random() < 0.7)
    prog = build_program(spec, V, spec.P)
    sol = solve(prog)
    assert sol.status == "optimal"
    assert sol.optimal_value == pytest.approx(highs(prog), abs=1e-7)
    assert prog.residual(sol.g_values) <= CONSTRAINT_TOL


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_entropy_witness_is_feasible_and_bounds_lambda(seed):
    rng = np.random.default_rng(seed)
    spec = random_spec(rng, n_max=4)
    mech = decodable_partition(rng, spec)
    g = entropy_witness(spec, mech)
    prog = build_program(spec, spec.Q, spec.P)
    assert prog.residual(g) <= CONSTRAINT_TOL
    # at the witness the objective is I(X_Q; Y | X_P)
    cmi = conditional_mutual_information(
        joint_distribution(spec, mech), sorted(spec.Q), ["y"], sorted(spec.P))
    assert float(prog.objective @ g) == pytest.approx(cmi, abs=1e-9)
    assert lam(spec, spec.Q, spec.P) <= cmi + 1e-7


def test_elemental_and_full_formulations_agree():
    rng = np.random.default_rng(13)
    for _ in range(40):
        spec = random_spec(rng, n_max=4)
        V = frozenset(i for i in spec.Q if rng.random() < 0.7)
        assert lam(spec, V, spec.P, elemental=True) == pytest.approx(
            lam(spec, V, spec.P, elemental=False), abs=1e-7)


def test_mask_roundtrip():
    assert mask({0, 2}) == 5
    assert mask(()) == 0


class TestSimplex:
    def test_optimal(self):
        res = solve_lp(np.array([-1.0, -2.0]), A_ub=np.array([[1.0, 1.0]]), b_ub=np.array([3.0]))
        assert res.status == "optimal"
        assert res.fun == pytest.approx(-6.0)

    def test_infeasible(self):
        res = solve_lp(np.array([1.0]), A_eq=np.array([[1.0]]), b_eq=np.array([-1.0]))
        assert res.status == "infeasible"

    def test_unbounded(self):
        res = solve_lp(np.array([-1.0, 0.0]), A_ub=np.array([[1.0, -1.0]]), b_ub=np.array([1.0]))
        assert res.status == "unbounded"

    def test_redundant_equalities(self):
        A = np.array([[1.0, 1.0], [2.0, 2.0]])
        res = solve_lp(np.array([1.0, 3.0]), A_eq=A, b_eq=np.array([1.0, 2.0]))
        assert res.status == "optimal"
        assert res.fun == pytest.approx(1.0)

    def test_random_bounded_programs(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            k, r = int(rng.integers(1, 6)), int(rng.integers(1, 6))
            A = rng.normal(size=(r, k))
            b = A @ rng.random(k) + rng.random(r)
            c = rng.random(k) - 0.3
            A_all = np.vstack([A, np.ones((1, k))])
            b_all = np.append(b, 10.0)
            mine = solve_lp(c, A_ub=A_all, b_ub=b_all)
            ref = linprog(c, A_ub=A_all, b_ub=b_all, bounds=(0, None), method="highs")
            assert mine.status == "optimal"
            assert mine.fun == pytest.approx(ref.fun, abs=1e-8)
