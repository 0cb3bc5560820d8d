from fractions import Fraction as F

import pytest

from erasurechain.exact_arith import Poly
from erasurechain.erasure_model import (
    ClassUnsound,
    Classification,
    EquivClass,
    Erasure,
    Model,
    ModelParams,
    all_patterns,
    build_classes,
    classify,
    enumerate_patterns,
    format_pattern,
    infer_model,
    initial_distribution,
    parse_pattern,
    pattern_counts,
    pattern_probability,
    pattern_support,
    pattern_weight,
    verify_class_soundness,
)
from erasurechain.pauli_algebra import all_supports, code_automorphisms, supports_logical


class TestPatternText:
    def test_roundtrip(self):
        for text in (".......", "M......", "..Z..E.", "EEEEEEE"):
            assert format_pattern(parse_pattern(text)) == text

    def test_bad_length(self):
        with pytest.raises(ValueError):
            parse_pattern("...")

    def test_bad_character(self):
        with pytest.raises(ValueError):
            parse_pattern("..Q....")

    def test_weight_and_support(self):
        p = parse_pattern(".M...E.")
        assert pattern_weight(p) == 2
        assert pattern_support(p) == frozenset({2, 6})
        assert pattern_counts(p) == (1, 0, 1)

    def test_model_inference(self):
        assert infer_model(parse_pattern("M.M....")) is Model.IDEAL
        assert infer_model(parse_pattern("Z.E....")) is Model.LOSSY
        assert infer_model(parse_pattern(".......")) is None
        with pytest.raises(ValueError):
            infer_model(parse_pattern("M.E...."))


class TestClassify:
    def test_all_weight_two_correctable(self):
        for p in all_patterns(Model.LOSSY):
            if pattern_weight(p) == 2:
                assert classify(p) is Classification.CORRECTABLE

    def test_weight_three_split_28_7(self):
        counts = {Classification.CORRECTABLE: set(), Classification.PROCEDURE_FAIL: set()}
        for p in all_patterns(Model.IDEAL):
            if pattern_weight(p) == 3:
                counts[classify(p)].add(pattern_support(p))
        assert len(counts[Classification.CORRECTABLE]) == 28
        assert len(counts[Classification.PROCEDURE_FAIL]) == 7

    def test_classification_matches_logical_cover_on_triples(self):
        for s in all_supports(3):
            p = tuple(
                Erasure.Z_MEASURED if q + 1 in s else Erasure.NONE for q in range(7)
            )
            expected = (
                Classification.PROCEDURE_FAIL
                if supports_logical(s)
                else Classification.CORRECTABLE
            )
            assert classify(p) is expected

    def test_weight_four_fails_even_on_harmless_support(self):
        # {1,2,3,4} covers no logical operator, yet the single-target
        # procedure does not apply to weight-4 patterns.
        assert not supports_logical({1, 2, 3, 4})
        p = parse_pattern("MMMM...")
        assert classify(p) is Classification.PROCEDURE_FAIL

    def test_permutation_invariance(self):
        autos = code_automorphisms()
        for p in all_patterns(Model.IDEAL):
            c = classify(p)
            for perm in autos[::17]:
                q = [Erasure.NONE] * 7
                for k in range(7):
                    q[perm[k] - 1] = p[k]
                assert classify(tuple(q)) is c


class TestCensus:
    def test_ideal_totals(self):
        census = enumerate_patterns(Model.IDEAL)
        assert census.total == 128
        assert census.by_weight[3] == 35
        assert census.by_weight == {k: v for k, v in zip(range(8), (1, 7, 21, 35, 35, 21, 7, 1))}

    def test_lossy_totals(self):
        census = enumerate_patterns(Model.LOSSY)
        assert census.total == 3**7
        # weight w splits over full/Z assignments
        assert census.by_weight[3] == 35 * 8
        assert census.by_composition[(1, 1, 0)] == 42

    def test_correctable_counts(self):
        ideal = enumerate_patterns(Model.IDEAL)
        assert ideal.correctable == 1 + 7 + 21 + 28
        lossy = enumerate_patterns(Model.LOSSY)
        assert lossy.correctable == 1 + 7 * 2 + 21 * 4 + 28 * 8


class TestBuildClasses:
    def test_trivial_symmetry_is_degenerate_baseline(self):
        table = build_classes(Model.IDEAL, merge=False)
        assert len(table.classes) == 128
        assert table.classes[table.clean_id].size == 1

    def test_ideal_reduces_to_five(self):
        table = build_classes(Model.IDEAL)
        assert [c.label for c in table.classes] == ["clean", "w1", "w2", "w3", "fail"]
        assert [c.size for c in table.classes] == [1, 7, 21, 28, 71]

    def test_lossy_reduces_to_eleven(self):
        table = build_classes(Model.LOSSY)
        labels = [c.label for c in table.classes]
        assert labels == [
            "clean",
            "[0,1]",
            "[1,0]",
            "[0,2]",
            "[1,1]",
            "[2,0]",
            "[0,3]",
            "[1,2]",
            "[2,1]",
            "[3,0]",
            "fail",
        ]
        assert sum(c.size for c in table.classes) == 3**7

    def test_lossy_labels_bounded_composition(self):
        table = build_classes(Model.LOSSY)
        for c in table.classes:
            if c.label.startswith("["):
                m, n, _ = pattern_counts(c.representative)
                assert c.label.startswith(f"[{m},{n}]")
                assert m + n <= 3

    def test_classes_partition_pattern_space(self):
        for model in Model:
            table = build_classes(model)
            assert sorted(p for c in table.classes for p in c.members) == sorted(
                all_patterns(model)
            )

    def test_soundness_verifier_accepts_reduced_tables(self):
        for model, params in (
            (Model.IDEAL, ModelParams.ideal()),
            (Model.LOSSY, ModelParams.lossy()),
        ):
            verify_class_soundness(build_classes(model), params)

    def test_soundness_verifier_rejects_bad_merge(self):
        table = build_classes(Model.IDEAL)
        w1 = table.classes[1]
        w2 = table.classes[2]
        merged = EquivClass(
            id=w1.id,
            label="bogus",
            representative=w1.representative,
            size=w1.size + w2.size,
            members=w1.members + w2.members,
        )
        bad_classes = [table.classes[0], merged, table.classes[3], table.classes[4]]
        bad_index = {}
        for new_id, c in enumerate(bad_classes):
            for p in c.members:
                bad_index[p] = new_id
        bad = type(table)(
            model=table.model,
            classes=[
                EquivClass(new_id, c.label, c.representative, c.size, c.members)
                for new_id, c in enumerate(bad_classes)
            ],
            index=bad_index,
            clean_id=0,
            fail_id=3,
        )
        with pytest.raises(ClassUnsound):
            verify_class_soundness(bad, ModelParams.ideal())


class TestInitialDistribution:
    def test_sums_to_one_symbolically(self):
        for model, params in (
            (Model.IDEAL, ModelParams.ideal()),
            (Model.LOSSY, ModelParams.lossy()),
        ):
            table = build_classes(model)
            dist = initial_distribution(params, table)
            total = Poly.zero()
            for p in dist.values():
                total = total + p
            assert total == Poly.one()

    def test_ideal_clean_mass(self):
        params = ModelParams.ideal()
        table = build_classes(Model.IDEAL)
        dist = initial_distribution(params, table)
        one_minus_eps = Poly.one() - Poly.eps()
        expected = Poly.one()
        for _ in range(7):
            expected = expected * one_minus_eps
        assert dist[table.clean_id] == expected

    def test_ideal_weight_three_mass(self):
        # Oracle: binomial count over the 35 supports.
        params = ModelParams.ideal()
        eps, one = Poly.eps(), Poly.one()
        expected = Poly.constant(35) * eps * eps * eps
        for _ in range(4):
            expected = expected * (one - eps)
        w3_mass = Poly.zero()
        for p in all_patterns(Model.IDEAL):
            if pattern_weight(p) == 3:
                w3_mass = w3_mass + pattern_probability(p, params)
        assert w3_mass == expected

    def test_lossy_full_erasure_marginal_is_half_eps(self):
        # P(a given qubit fully erased) = eps/2.
        params = ModelParams.lossy()
        target = parse_pattern("E......")
        marginal = Poly.zero()
        for p in all_patterns(Model.LOSSY):
            if p[0] == Erasure.FULL:
                marginal = marginal + pattern_probability(p, params)
        assert marginal == Poly.monomial(1, 0, F(1, 2))
        assert pattern_probability(target, params).coefficient(1, 0) == F(1, 2)

    def test_probability_valued_on_grid(self):
        # Evaluations on a [0, 1/4]^2 grid stay inside [0, 1].
        grid = [F(k, 40) for k in range(0, 11, 2)]
        for model, params in (
            (Model.IDEAL, ModelParams.ideal()),
            (Model.LOSSY, ModelParams.lossy()),
        ):
            table = build_classes(model)
            dist = initial_distribution(params, table)
            for mass in dist.values():
                for e in grid:
                    for d in grid[:2]:
                        v = mass.evaluate(e, d)
                        assert 0 <= v <= 1


class TestModelParams:
    def test_ideal_forces_delta_zero(self):
        assert ModelParams.ideal().delta.is_zero()

    def test_lossy_diagonal_shares_variable(self):
        params = ModelParams.lossy_diagonal()
        assert params.eps == params.delta == Poly.eps()
