import itertools
import math

import numpy as np
import pytest

from qconf import linalg
from qconf.errors import BudgetError, InputError
from qconf.families import example_against_co, example_ghz
from qconf.linalg import DimProfile
from qconf.rates import (
    RateConstraint,
    co_constraints_c,
    co_constraints_cq,
    combing_ghz_rate,
    cq_conditional_entropy,
    eoa_lower_bound,
    ghz_rate_c,
    ghz_rate_cq,
    ghz_rate_cq_single_copy,
    key_rate_c,
    key_rate_cq,
    min_cut_coherent_information,
    min_sum_rate,
)
from qconf.states import CqState, Instrument, MultipartiteState, apply_instruments, random_instrument, random_state
from qconf.trees import tree_ghz_rate_from_state

import oracles


def classical_state(p, eve_copy=False):
    """Diagonal state of a joint distribution over parties (optionally with Eve holding a copy)."""
    p = np.asarray(p, dtype=float)
    dims = list(p.shape)
    labels = [f"A{i + 1}" for i in range(len(dims))]
    if not eve_copy:
        return MultipartiteState(np.diag(p.ravel()).astype(complex), DimProfile(dims, labels))
    n = p.size
    rho = np.zeros((n * n, n * n))
    for i, v in enumerate(p.ravel()):
        rho[i * n + i, i * n + i] = v
    return MultipartiteState(rho, DimProfile(dims + [n], labels + ["E"]), eve_index=len(dims))


def bases(state):
    return [Instrument.basis(l, state.profile.dims[state.profile.index(l)]) for l in state.party_labels]


def h2(q):
    return -q * math.log2(q) - (1 - q) * math.log2(1 - q)


CORR = np.array([[0.5, 0.0], [0.0, 0.5]])
INDEP = np.full((2, 2), 0.25)


class TestConstraints:
    def test_corr_bit_zero_bounds(self):
        st = classical_state(CORR)
        cons = co_constraints_cq(apply_instruments(st, bases(st)))
        assert len(cons) == 2 and all(abs(c.bound) < 1e-12 for c in cons)

    def test_indep_singletons_one(self):
        st = classical_state(INDEP)
        cons = co_constraints_cq(apply_instruments(st, bases(st)))
        for c in cons:
            oracle = oracles.shannon(INDEP) - oracles.shannon(INDEP.sum(axis=tuple(c.subset)))
            assert abs(c.bound - oracle) < 1e-12 and abs(c.bound - 1) < 1e-12

    def test_ghz3_all_zero(self):
        g = example_ghz(3)
        cons = co_constraints_cq(apply_instruments(g, bases(g)))
        assert len(cons) == 3 * 3 and all(abs(c.bound) < 1e-9 for c in cons)

    def test_classical_generator(self):
        assert [c.bound for c in co_constraints_c(CORR)] == pytest.approx([0, 0], abs=1e-12)
        assert [c.bound for c in co_constraints_c(INDEP)] == pytest.approx([1, 1], abs=1e-12)
        p = np.zeros((2, 2, 2))
        for x, z in itertools.product(range(2), repeat=2):
            p[x, x, z] = 0.25
        bounds = {tuple(sorted(c.subset)): c.bound for c in co_constraints_c(p)}
        assert abs(bounds[(2,)] - 1) < 1e-12 and abs(bounds[(0,)]) < 1e-12
        assert len(bounds) == 6

    def test_classical_not_normalized(self):
        with pytest.raises(InputError):
            co_constraints_c(np.full((2, 2), 0.3))

    def test_cq_party_budget(self):
        cq = CqState(
            tuple(f"P{i}" for i in range(11)),
            tuple(("0",) for _ in range(11)),
            DimProfile([1] * 12, [f"P{i}'" for i in range(11)] + ["E"]),
            {(0,) * 11: np.ones((1, 1), dtype=complex)},
        )
        with pytest.raises(BudgetError):
            co_constraints_cq(cq)


class TestMinSumRate:
    def test_no_binding(self):
        region = min_sum_rate([RateConstraint(frozenset({0}), -0.5)], 2)
        assert region.total == 0 and np.allclose(region.rates, 0)

    def test_indep_bits(self):
        region = min_sum_rate(co_constraints_c(INDEP), 2)
        assert abs(region.total - 2) < 1e-9

    def test_dsbs(self):
        q = 0.11
        p = np.array([[(1 - q) / 2, q / 2], [q / 2, (1 - q) / 2]])
        cons = co_constraints_c(p)
        region = min_sum_rate(cons, 2)
        oracle = oracles.lp_vertex_enumeration([(c.subset, c.bound) for c in cons], 2)
        assert abs(region.total - oracle) < 1e-9
        assert abs(region.total - 2 * h2(q)) < 1e-9
        assert abs(region.total - 0.9998) < 1e-4

    def test_lexicographic_tie_break(self):
        cons = [RateConstraint(frozenset({0, 1}), 1.0)]
        region = min_sum_rate(cons, 2)
        assert np.allclose(region.rates, [0, 1], atol=1e-9)
        assert region.is_feasible(region.rates)


class TestKeyRates:
    def test_corr_bit(self):
        st = classical_state(CORR)
        rep = key_rate_cq(st, bases(st))
        assert abs(rep.raw - 1) < 1e-9 and abs(rep.r_co) < 1e-12

    def test_indep_bits(self):
        st = classical_state(INDEP)
        rep = key_rate_cq(st, bases(st))
        assert abs(rep.raw) < 1e-9 and abs(rep.r_co - 2) < 1e-9

    def test_eve_copy(self):
        st = classical_state(INDEP, eve_copy=True)
        rep = key_rate_cq(st, bases(st))
        assert abs(rep.raw + rep.r_co) < 1e-9 and rep.raw <= 0 and rep.clamped == 0

    def test_key_c_eve_copy(self):
        st = classical_state(CORR, eve_copy=True)
        assert abs(key_rate_c(st, bases(st)).raw) < 1e-9

    def test_key_c_corr(self):
        st = classical_state(CORR)
        assert abs(key_rate_c(st, bases(st)).raw - 1) < 1e-9

    def test_key_c_rejects_quantum_output(self):
        g = example_ghz(2)
        with pytest.raises(InputError, match="nontrivial quantum output"):
            key_rate_c(g, [Instrument.identity("A1", 2), Instrument.basis("A2", 2)])

    def test_against_co_measure_everything(self):
        st = example_against_co(2, 2)
        rep = key_rate_c(st, bases(st))
        # Eve's register is classical, so the whole problem is a classical distribution
        diag = np.real(np.diag(st.matrix)).reshape(4, 4, 4, 8)
        s_x_e = oracles.shannon(diag) - oracles.shannon(diag.sum(axis=(0, 1, 2)))
        px = diag.sum(axis=3)
        cons = []
        for r in (1, 2):
            for sub in itertools.combinations(range(3), r):
                rest = tuple(k for k in range(3) if k not in sub)
                cons.append((sub, oracles.shannon(px) - oracles.shannon(px.sum(axis=sub))))
        r_co = oracles.lp_vertex_enumeration(cons, 3)
        assert abs(rep.raw - (s_x_e - r_co)) < 1e-9
        assert abs(rep.raw - (-2.6875)) < 1e-9
        assert rep.raw <= 0.5 * math.log2(2) + 1

    def test_report_dict(self):
        st = classical_state(INDEP)
        d = key_rate_cq(st, bases(st)).to_dict()
        assert set(d) == {"theorem", "raw", "clamped", "R_CO", "optimal_rates", "binding_constraints", "witness"}
        assert {tuple(c["subset"]) for c in d["binding_constraints"]} <= {("A1",), ("A2",), ("A1", "A2")}


class TestGhzRates:
    def test_ghz3_basis(self):
        g = example_ghz(3)
        rep = ghz_rate_cq(g, bases(g))
        assert abs(rep.raw - 1) < 1e-9

    def test_single_copy_alias(self):
        assert ghz_rate_cq_single_copy is ghz_rate_cq

    def test_requires_pure(self):
        g = example_ghz(2)
        mixed = Instrument("A1", [("0", [np.diag([1, 0]), np.diag([0, 1]) / math.sqrt(2)]), ("1", [np.diag([0, 1]) / math.sqrt(2)])])
        with pytest.raises(InputError, match="not rank one"):
            ghz_rate_cq(g, [mixed, Instrument.basis("A2", 2)])

    def test_eve_copy_nonpositive(self):
        st = classical_state(CORR, eve_copy=True)
        assert ghz_rate_cq(st, bases(st)).raw <= 1e-9

    def test_ghz_c_values(self):
        g = example_ghz(3)
        assert abs(ghz_rate_c(g, bases(g)).raw - 1) < 1e-9
        e = example_ghz(2)
        assert abs(ghz_rate_c(e, bases(e)).raw - 1) < 1e-9

    def test_ghz_c_mixed_input(self):
        st = MultipartiteState(np.eye(8) / 8, DimProfile([2, 2, 2]))
        assert ghz_rate_c(st, bases(st)).raw <= 1e-9

    def test_ghz_c_rank_check(self):
        g = example_ghz(2)
        coarse = Instrument.from_povm("A1", [np.eye(2)])
        with pytest.raises(InputError, match="not rank one"):
            ghz_rate_c(g, [coarse, Instrument.basis("A2", 2)])

    def test_distinguished_player(self):
        g = example_ghz(3)
        rep = ghz_rate_cq(g, bases(g), j="A2")
        assert rep.witness["distinguished_player"] == "A2"


class TestMinCut:
    def test_epr(self):
        assert abs(min_cut_coherent_information(example_ghz(2), 0, 1) - 1) < 1e-12

    def test_ghz3(self):
        g = example_ghz(3)
        # oracle: J = {} gives S(A2 A3) - S(all); J = {3} gives S(A2) - S(all)
        vals = [
            oracles.subset_entropy(g.matrix, [2, 2, 2], [1, 2]) - oracles.subset_entropy(g.matrix, [2, 2, 2], [0, 1, 2]),
            oracles.subset_entropy(g.matrix, [2, 2, 2], [1]) - oracles.subset_entropy(g.matrix, [2, 2, 2], [0, 1, 2]),
        ]
        assert vals == pytest.approx([1, 1], abs=1e-9)
        assert abs(min_cut_coherent_information(g, 0, 1) - min(vals)) < 1e-9

    def test_product(self):
        st = MultipartiteState(np.eye(8) / 8, DimProfile([2, 2, 2]))
        assert min_cut_coherent_information(st, 0, 2) <= 0

    def test_eoa(self):
        assert abs(eoa_lower_bound(example_ghz(2), 0, 1) - 1) < 1e-12
        g = example_ghz(3)
        for i, j in itertools.combinations(range(3), 2):
            assert abs(eoa_lower_bound(g, i, j) - 1) < 1e-9
        assert eoa_lower_bound(MultipartiteState(np.eye(4) / 4, DimProfile([2, 2])), 0, 1) <= 0

    def test_same_party_rejected(self):
        with pytest.raises(InputError):
            min_cut_coherent_information(example_ghz(2), 1, 1)

    def test_bounded_by_full_cut(self):
        for seed in range(20):
            st = random_state(DimProfile([2, 2, 2, 2]), rank=2, seed=seed)
            full = linalg.coherent_information(st.matrix, st.profile, [0], [1, 2, 3])
            assert min_cut_coherent_information(st, 0, 1) <= full + 1e-9


class TestCombing:
    def test_ghz3(self):
        g = example_ghz(3)
        res = combing_ghz_rate(g)
        s_all = oracles.subset_entropy(g.matrix, [2, 2, 2], [0, 1, 2])
        oracle = max(
            min(
                (oracles.subset_entropy(g.matrix, [2, 2, 2], [k for k in range(3) if k not in sub]) - s_all) / len(sub)
                for r in (1, 2)
                for sub in itertools.combinations([k for k in range(3) if k != i], r)
            )
            for i in range(3)
        )
        assert abs(oracle - 0.5) < 1e-9
        assert abs(res.rate - oracle) < 1e-9 and len(res.binding_subset) == 2

    def test_epr(self):
        assert abs(combing_ghz_rate(example_ghz(2)).rate - 1) < 1e-9

    def test_product(self):
        res = combing_ghz_rate(MultipartiteState(np.eye(8) / 8, DimProfile([2, 2, 2])))
        assert res.raw <= 0 and res.rate == 0


class TestTreeFromState:
    def test_ghz3(self):
        assert abs(tree_ghz_rate_from_state(example_ghz(3)).rate - 0.5) < 1e-9

    def test_epr(self):
        assert abs(tree_ghz_rate_from_state(example_ghz(2)).rate - 1) < 1e-9

    def test_epr_plus_spectator(self):
        v = np.zeros(8)
        v[0] = v[6] = 1 / math.sqrt(2)
        st = MultipartiteState(linalg.projector(v), DimProfile([2, 2, 2]))
        res = tree_ghz_rate_from_state(st)
        assert res.rate == 0 and res.tree == []


class TestOrderings:
    def test_side_information_lowers_entropy(self):
        for seed in range(30):
            rng = np.random.default_rng(seed)
            st = random_state(DimProfile([2, 2, 2], ["A", "B", "E"]), rank=int(rng.integers(1, 9)), seed=seed, eve_index=2)
            ins = [random_instrument(l, 2, 2, 2, rng, pure=True) for l in ("A", "B")]
            cq = apply_instruments(st, ins)
            assert cq_conditional_entropy(cq, [0, 1, 2]) <= cq_conditional_entropy(cq, [2]) + 1e-8

    def test_permutation_invariance(self):
        rng = np.random.default_rng(17)
        st = random_state(DimProfile([2, 2, 2, 2], ["A", "B", "C", "E"]), rank=3, seed=17, eve_index=3)
        ins = [random_instrument(l, 2, 2, 2, rng, pure=True) for l in ("A", "B", "C")]
        perm = [2, 0, 1, 3]
        pst = st.permuted(perm)
        pins = [ins[p] for p in perm[:3]]
        assert abs(key_rate_cq(st, ins).raw - key_rate_cq(pst, pins).raw) < 1e-8
        assert abs(ghz_rate_cq(st, ins, "B").raw - ghz_rate_cq(pst, pins, "B").raw) < 1e-8
        assert abs(combing_ghz_rate(st).raw - combing_ghz_rate(pst).raw) < 1e-8
