import numpy as np
import pytest

from portmoea.encoding import CCS, DCS, Genotype, decode, random_genotype
from portmoea.operators import (
    OPERATORS,
    OperatorConfig,
    op_de_polymut,
    op_power,
    op_swap,
    polynomial_mutation,
    select_operator,
    swap_partner,
)
from portmoea.problem import ConstraintSet
from portmoea.synthetic import synthetic_instance


class FixedUniform:
    """Stub random stream returning queued values from random()."""

    def __init__(self, *values):
        self.values = list(values)

    def random(self):
        return self.values.pop(0)


def genotype(values, scheme=CCS):
    return Genotype(np.asarray(values, dtype=float), scheme)


class TestOperatorConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            OperatorConfig(f=0.0)
        with pytest.raises(ValueError):
            OperatorConfig(cr=1.5)
        with pytest.raises(ValueError):
            OperatorConfig(op_weights=(0.5, 0.5, 0.5))

    def test_resolved_fills_mutation_rate(self):
        cfg = OperatorConfig()
        assert cfg.p_m is None
        assert cfg.resolved(100).p_m == 0.01
        assert OperatorConfig(p_m=0.2).resolved(100).p_m == 0.2


class TestSelectOperator:
    def test_degenerate_weights(self, rng):
        only_de = OperatorConfig(op_weights=(1, 0, 0))
        only_swap = OperatorConfig(op_weights=(0, 0, 1))
        assert all(select_operator(only_de, rng) == "de" for _ in range(20))
        assert all(select_operator(only_swap, rng) == "swap" for _ in range(20))

    def test_uniform_frequencies(self, rng):
        cfg = OperatorConfig()
        draws = [select_operator(cfg, rng) for _ in range(100_000)]
        for tag in OPERATORS:
            freq = draws.count(tag) / len(draws)
            assert abs(freq - 1 / 3) < 0.01


class TestPolynomialMutation:
    def test_branch_midpoint_leaves_gene_unchanged(self):
        assert polynomial_mutation(0.5, 20.0, FixedUniform(0.5)) == 0.5

    def test_lower_bound_binds(self):
        assert polynomial_mutation(0.0, 20.0, FixedUniform(0.2)) == 0.0

    def test_upper_bound_binds(self):
        assert polynomial_mutation(1.0, 20.0, FixedUniform(0.8)) == 1.0

    def test_rejects_out_of_bounds_gene(self):
        with pytest.raises(ValueError):
            polynomial_mutation(1.5, 20.0, FixedUniform(0.5))

    def test_matches_quantile_function_oracle(self):
        # independent closed-form quantile of the bounded mutation at x=0.5
        eta = 20.0
        x = 0.5

        def quantile(u):
            if u < 0.5:
                val = 2 * u + (1 - 2 * u) * (1 - x) ** (eta + 1)
                return x + val ** (1 / (eta + 1)) - 1
            val = 2 * (1 - u) + 2 * (u - 0.5) * x ** (eta + 1)
            return x + 1 - val ** (1 / (eta + 1))

        rng = np.random.default_rng(2024)
        samples = np.sort([polynomial_mutation(x, eta, rng) for _ in range(100_000)])
        grid = (np.arange(999) + 1) / 1000
        theo = np.array([quantile(q) for q in grid])
        empirical = np.searchsorted(samples, theo, side="right") / len(samples)
        assert np.max(np.abs(empirical - grid)) < 0.01

    def test_mean_displacement_symmetric(self):
        rng = np.random.default_rng(99)
        deltas = np.array(
            [polynomial_mutation(0.5, 20.0, rng) - 0.5 for _ in range(100_000)]
        )
        se = deltas.std(ddof=1) / np.sqrt(len(deltas))
        assert abs(deltas.mean()) < 3 * se


class TestDePolymut:
    def setup_method(self):
        self.cfg = OperatorConfig(p_m=0.1).resolved(100)

    def test_equal_donors_collapse_to_base(self):
        rng = np.random.default_rng(5)
        cfg = OperatorConfig(cr=1.0, p_m=0.0)
        t = genotype([0.1, 0.2, 0.3])
        c12 = genotype([0.7, 0.8, 0.9])
        c3 = genotype([0.4, 0.5, 0.6])
        child = op_de_polymut(t, c12, c12, c3, cfg, rng)
        assert np.array_equal(child.genes, c3.genes)

    def test_zero_f_full_cr_no_mutation_returns_base(self):
        rng = np.random.default_rng(6)
        cfg = OperatorConfig(f=1e-300, cr=1.0, p_m=0.0)  # f must stay positive
        t = genotype([0.1, 0.2, 0.3])
        c1 = genotype([0.9, 0.1, 0.5])
        c2 = genotype([0.3, 0.3, 0.3])
        c3 = genotype([0.4, 0.5, 0.6])
        child = op_de_polymut(t, c1, c2, c3, cfg, rng)
        assert np.allclose(child.genes, c3.genes, atol=1e-12)

    def test_seeded_children_identical(self, synth31):
        cfg = OperatorConfig().resolved(100)
        parents = [random_genotype(CCS, 31, np.random.default_rng(i)) for i in range(4)]
        a = op_de_polymut(*parents, cfg, np.random.default_rng(42))
        b = op_de_polymut(*parents, cfg, np.random.default_rng(42))
        assert np.array_equal(a.genes, b.genes)

    def test_output_always_in_bounds(self, rng):
        cfg = OperatorConfig(f=0.9, p_m=0.3)
        for _ in range(200):
            parents = [Genotype(rng.random(17), CCS) for _ in range(4)]
            child = op_de_polymut(*parents, cfg, rng)
            assert np.all((child.genes >= 0) & (child.genes <= 1))

    def test_length_mismatch_rejected(self, rng):
        with pytest.raises(ValueError, match="share scheme and length"):
            op_de_polymut(
                genotype([0.1, 0.2]),
                genotype([0.1, 0.2, 0.3]),
                genotype([0.1, 0.2]),
                genotype([0.1, 0.2]),
                self.cfg,
                rng,
            )

    def test_unresolved_mutation_rate_rejected(self, rng):
        g = genotype([0.1, 0.2])
        with pytest.raises(ValueError, match="unresolved"):
            op_de_polymut(g, g, g, g, OperatorConfig(), rng)


class TestPower:
    def test_fixpoints(self, rng):
        child = op_power(genotype([0.0, 1.0]), rng)
        assert child.genes.tolist() == [0.0, 1.0]

    def test_order_preserved(self, rng):
        for _ in range(50):
            genes = rng.random(9)
            child = op_power(Genotype(genes, CCS), rng)
            assert np.array_equal(np.argsort(genes), np.argsort(child.genes))

    def test_pinned_seed_matches_direct_power(self):
        child = op_power(genotype([0.25]), np.random.default_rng(314))
        r = np.random.default_rng(314).uniform(1.0, 2.0)
        assert child.genes[0] == 0.25**r

    def test_selection_unchanged_after_power(self, rng):
        c = ConstraintSet.uniform(9, cardinality=4, floor=0.0, lot=0.008)
        for _ in range(50):
            g = Genotype(rng.random(9), CCS)
            before = decode(g, c).selection
            after = decode(op_power(g, rng), c).selection
            assert np.array_equal(before, after)


class TestSwap:
    def setup_method(self):
        self.inst = synthetic_instance(5, seed=8)
        self.c = ConstraintSet.uniform(5, cardinality=2, floor=0.0, lot=0.008)

    def test_partner_highest_return(self):
        inst = synthetic_instance(5, seed=8)
        mu = np.array([0.01, 0.02, 0.05, 0.03, 0.04])
        inst = type(inst)(
            name="mu5", n_assets=5, mu=mu, sigma=inst.sigma, rho=inst.rho
        )
        selection = np.array([False, True, False, True, False])
        # highest return among non-selected assets {1, 3, 5} is asset 3 (1-based)
        assert swap_partner(2, 1, selection, inst) == 2

    def test_partner_lowest_risk(self):
        selection = np.array([False, True, False, True, False])
        candidates = np.array([0, 2, 4])
        expected = int(candidates[np.argmin(self.inst.sigma[candidates])])
        assert swap_partner(1, 1, selection, self.inst) == expected

    def test_partner_least_correlated_matches_exhaustive_scan(self):
        inst = synthetic_instance(31, seed=11)
        c = ConstraintSet.uniform(31, cardinality=10, floor=0.0, lot=0.008)
        rng = np.random.default_rng(17)
        g = random_genotype(CCS, 31, rng)
        selection = decode(g, c).selection
        i = int(np.flatnonzero(selection)[3])
        j = swap_partner(3, i, selection, inst)
        best, best_score = None, np.inf
        for cand in np.flatnonzero(~selection):
            score = sum(
                inst.rho[k, cand] for k in np.flatnonzero(selection) if k != i
            )
            if score < best_score:
                best, best_score = int(cand), score
        assert j == best

    def test_strategy_targets_respect_selection_membership(self):
        selection = np.array([True, True, False, False, False])
        for strategy in (1, 2, 3):
            j = swap_partner(strategy, 0, selection, self.inst)
            assert not selection[j]

    def test_swap_exchanges_exactly_two_genes(self, rng):
        g = Genotype(np.array([0.9, 0.8, 0.1, 0.2, 0.3]), CCS)
        decoded = decode(g, self.c)
        for _ in range(50):
            child = op_swap(g, decoded, self.inst, self.c, rng)
            changed = np.flatnonzero(child.genes != g.genes)
            if len(changed) == 0:
                continue  # swap hit an equal-valued pair
            assert len(changed) == 2
            i, j = changed
            assert child.genes[i] == g.genes[j]
            assert child.genes[j] == g.genes[i]
            # i comes from the selection; a selected j means the selection
            # set cannot change, a non-selected j comes from strategies 2-4
            assert decoded.selection[i] or decoded.selection[j]
            if decoded.selection[i] and decoded.selection[j]:
                after = decode(child, self.c).selection
                assert np.array_equal(after, decoded.selection)

    def test_dcs_swaps_paired_weight_genes(self, rng):
        genes = np.array([0.9, 0.8, 0.1, 0.2, 0.3, 0.11, 0.22, 0.33, 0.44, 0.55])
        g = Genotype(genes, DCS)
        decoded = decode(g, self.c)
        saw_swap = False
        for _ in range(50):
            child = op_swap(g, decoded, self.inst, self.c, rng)
            changed = np.flatnonzero(child.genes != g.genes)
            if len(changed) == 0:
                continue
            assert len(changed) == 4
            i, j = int(changed[0]), int(changed[1])
            assert changed.tolist() == [i, j, i + 5, j + 5]
            assert child.genes[i + 5] == g.genes[j + 5]
            assert child.genes[j + 5] == g.genes[i + 5]
            saw_swap = True
        assert saw_swap

    def test_all_preassigned_returns_unchanged(self, rng):
        c = ConstraintSet.uniform(5, cardinality=2, floor=0.0, preassigned=(1, 3), lot=0.008)
        g = Genotype(np.array([0.9, 0.8, 0.1, 0.2, 0.3]), CCS)
        decoded = decode(g, c)
        child = op_swap(g, decoded, self.inst, c, rng)
        assert child is g
