from __future__ import annotations

import itertools
import random

import pytest

from galmod.errors import (
    HypothesisError,
    IndexDomainError,
    ModelInconsistencyError,
)
from galmod.extgroup import ExtFlavor
from galmod.gring import RingParams
from galmod.jmodel import (
    NEG_INF,
    FieldModel,
    JModel,
    chi_length,
    enumerate_lines,
    free_rank2_model,
    gaussian_binomial,
    load_model,
    model_from_dict,
    model_to_dict,
    no_embedding_model,
    save_model,
    standard_tail,
)
from galmod.pmodule import act_t

P31 = RingParams(3, 1)
P32 = RingParams(3, 2)
P51 = RingParams(5, 1)

SPLIT = ExtFlavor.SPLIT
BULLET = ExtFlavor.BULLET


def brute_count(model: JModel, ell: int, flavor) -> int:
    """Independent oracle: enumerate the whole module and tally generators."""
    p = model.params.p
    raw = 0
    for m, L, idx in model.element_stats():
        if L != ell:
            continue
        if ell == model.params.order:
            raw += 1
        elif flavor is SPLIT and idx == 0:
            raw += 1
        elif flavor is BULLET and idx is not None and idx != 0:
            raw += 1
    assert raw % (p ** ell - p ** (ell - 1)) == 0
    return raw // (p ** ell - p ** (ell - 1))


def small_models():
    yield JModel(P31, NEG_INF, (0, 1))
    yield JModel(P31, NEG_INF, (1, 1))
    yield JModel(P31, 0, (1, 1))
    yield JModel(P31, 0, (0, 0))
    yield JModel(P31, NEG_INF, (2, 1))
    yield JModel(P31, 0, (2, 1))
    yield JModel(P32, NEG_INF, (0, 1, 0))
    yield JModel(P32, NEG_INF, (0, 0, 1))
    yield JModel(P32, 0, (1, 1, 0))
    yield JModel(P32, 1, (1, 0, 0))
    yield JModel(P51, NEG_INF, (0, 1))
    yield JModel(P51, 0, (1, 1))


def test_shape_layout():
    m = JModel(P32, 1, (1, 2, 1))
    assert m.chi_len == 4
    assert m.shape.blocks == (4, 1, 3, 3, 9)
    assert m.roles == (("chi", 0), ("y", 0), ("y", 1), ("y", 1), ("y", 2))
    assert chi_length(P32, NEG_INF) == 1


def test_validate_standard_models():
    for m in small_models():
        report = m.validate()
        assert report.ok, report.violation


def test_validate_violations():
    m = JModel(P31, NEG_INF, (1, 1))
    bad = m.replace_e_value(1, 0, 1)  # block 1 is the rank-0 free block
    rep = bad.validate()
    assert not rep.ok and "Y_i" in rep.violation

    # a tail value below the length of chi breaks minimality
    bad_tail = JModel(P31, 0, (0, 1), e_tail={"1": 1, "2": 1})
    rep = bad_tail.validate()
    assert not rep.ok and "chi-minimality" in rep.violation

    bad_norm = m.replace_e_value(0, 0, 2)
    rep = bad_norm.validate()
    assert not rep.ok and "normalization" in rep.violation

    deep = JModel(P32, 0, (0, 0, 1)).replace_e_value(0, 1, 1)
    rep = deep.validate()
    assert not rep.ok and "(sigma-1)<chi>" in rep.violation


def test_nonzero_index_forces_length_at_least_chi():
    for m in small_models():
        if not m.validate().ok:
            continue
        for el, L, idx in m.element_stats():
            if idx is not None and idx != 0:
                assert L >= m.chi_len


def test_index_examples():
    m = JModel(P31, NEG_INF, (1, 1))
    assert m.index(m.chi()) == 1
    y0 = m.shape.generator(1)
    assert m.index(y0) == 0
    alpha = m.shape.generator(2)
    with pytest.raises(IndexDomainError):
        m.index(alpha)
    assert m.index(act_t(alpha)) == 1  # standard tail at depth one


def test_index_linear():
    rng = random.Random(0)
    m = JModel(P32, 0, (1, 1, 1))
    elems = [el for el, L, idx in m.element_stats() if idx is not None]
    for _ in range(200):
        a = rng.choice(elems)
        b = rng.choice(elems)
        if m.in_domain(a + b):
            assert m.index(a + b) == (m.index(a) + m.index(b)) % 3


def test_count_solutions_frozen_values():
    m = JModel(P31, NEG_INF, (0, 1))
    assert m.count_solutions(2, SPLIT).count == 1
    assert m.count_solutions(2, BULLET).count == 2
    assert m.count_solutions(3, SPLIT).count == 3
    assert m.count_solutions(3, SPLIT).raw == 54


def test_count_solutions_matches_enumeration():
    for m in small_models():
        if m.size() > 3 ** 9:
            continue
        for ell in range(1, m.params.order + 1):
            flavors = [SPLIT] if ell == m.params.order else [SPLIT, BULLET]
            for flavor in flavors:
                assert m.count_solutions(ell, flavor).count == brute_count(m, ell, flavor), (
                    m.describe(), ell, flavor,
                )


def test_count_solutions_bullet_full_length_rejected():
    m = JModel(P31, NEG_INF, (0, 1))
    with pytest.raises(ValueError):
        m.count_solutions(3, BULLET)
    with pytest.raises(ValueError):
        m.count_solutions(0, SPLIT)


def test_count_solutions_large_model_blockwise():
    # dimension 13; far beyond enumeration, exercised through the blockwise path
    m = JModel(P51, 0, (1, 2))
    res = m.theorem_5_4_check(4)
    assert not res.range_empty
    assert res.ratio_ok
    assert res.bullet_count == 4 * res.split_count


def test_verify_eq_5_2_both_branches():
    frozen = [
        (JModel(P31, NEG_INF, (1, 1)), 1),
        (JModel(P31, 0, (1, 1)), 2),
        (JModel(P31, 0, (0, 0)), 2),
    ]
    for m, branch in frozen:
        rep = m.verify_eq_5_2()
        assert rep.equal and rep.branch == branch
    edge = JModel(P31, 0, (0, 0)).verify_eq_5_2()
    assert edge.lhs_size == edge.rhs_size == 6  # (p-1) * p


def test_verify_eq_5_2_requires_n1():
    with pytest.raises(HypothesisError):
        JModel(P32, NEG_INF, (0, 1, 0)).verify_eq_5_2()


def test_cor_3_6_witness():
    m = JModel(P31, NEG_INF, (0, 1))
    level, w = m.cor_3_6_witness()
    assert level is NEG_INF and w.length() == 1 and m.index(w) == 1
    m2 = JModel(P31, 0, (1, 1))
    level, w = m2.cor_3_6_witness()
    assert level == 0 and w.length() == 2 and m2.index(w) != 0


def test_cor_3_7_witness():
    m = JModel(P31, NEG_INF, (0, 1))
    gi = m.chi()
    gj = act_t(m.shape.generator(1))   # depth-one element, index 1, length 2
    c, w = m.cor_3_7_witness(gi, gj)
    assert c == 2
    assert m.index(w) == 0 and w.length() == 2
    with pytest.raises(HypothesisError):
        m.cor_3_7_witness(gj, gi)
    with pytest.raises(HypothesisError):
        m.cor_3_7_witness(gi, 2 * gi)


def test_auto_realize_4_1_1():
    m = JModel(P32, NEG_INF, (0, 0, 1))
    gamma = m.shape.element_from_flat([0] + [0] * 5 + [1, 0, 0, 0])  # t^5 alpha
    assert gamma.length() == 4
    rec = m.auto_realize("4.1.1", gamma)
    assert rec.predicates_ok and rec.oracle_exists and rec.oracle_agrees
    assert rec.witness_length == 5 and rec.witness_index == 0


def test_auto_realize_4_1_1_tail_correction():
    m = JModel(P51, NEG_INF, (0, 1))
    alpha = m.shape.generator(1)
    gamma = act_t(alpha, 2)
    assert m.index(gamma) == 0 and gamma.length() == 3
    rec = m.auto_realize("4.1.1", gamma)
    assert rec.predicates_ok
    # the naive step-up t*alpha has index 1; the witness must be chi-corrected
    assert rec.witness.vectors[0] != (0,)


def test_auto_realize_4_1_2():
    m = JModel(P51, NEG_INF, (0, 1))
    gamma = act_t(m.shape.generator(1))
    assert m.index(gamma) == 1 and gamma.length() == 4
    rec = m.auto_realize("4.1.2", gamma)
    assert rec.predicates_ok and rec.witness_length == 4 and rec.witness_index == 0
    assert rec.witness == 4 * m.chi() + gamma


def test_auto_realize_4_1_3():
    m = JModel(P51, NEG_INF, (0, 1))
    gamma = act_t(m.shape.generator(1))
    rec = m.auto_realize("4.1.3", gamma)
    assert rec.predicates_ok and rec.witness_length == 3
    assert rec.witness_index != 0
    # when chi already has the target length it is itself the witness
    m2 = JModel(P51, 0, (1, 1))
    gamma2 = next(
        el for el, L, idx in m2.element_stats() if L == 3 and idx == 1
    )
    rec2 = m2.auto_realize("4.1.3", gamma2)
    assert rec2.predicates_ok and rec2.witness == m2.chi()


def test_auto_realize_4_1_4():
    m = JModel(P31, NEG_INF, (0, 1))
    gamma = 2 * m.chi() + act_t(m.shape.generator(1))
    assert gamma.length() == 2 and m.index(gamma) == 0
    rec = m.auto_realize("4.1.4", gamma, k=1)
    assert rec.predicates_ok and rec.witness_length == 2 and rec.witness_index != 0
    m5 = JModel(P51, NEG_INF, (0, 1))
    gamma5 = next(el for el, L, idx in m5.element_stats() if L == 2 and idx == 0)
    rec5 = m5.auto_realize("4.1.4", gamma5, k=3)
    assert rec5.predicates_ok and rec5.witness_length == 4 and rec5.witness_index != 0


def test_auto_realize_4_2():
    m = JModel(P32, NEG_INF, (0, 0, 1))
    gamma = m.shape.element_from_flat([0] + [0, 0, 0, 0, 1, 0, 0, 0, 0])  # t^4 alpha
    assert gamma.length() == 5 and m.index(gamma) == 0
    rec = m.auto_realize("4.2", gamma, i=1)
    assert rec.predicates_ok and rec.witness_length == 5 and rec.witness_index != 0


def test_auto_realize_hypothesis_violations():
    m = JModel(P31, NEG_INF, (0, 1))
    chi = m.chi()
    with pytest.raises(HypothesisError):
        m.auto_realize("4.1.1", chi)              # length 1 = p^0
    with pytest.raises(HypothesisError):
        m.auto_realize("4.1.2", chi)              # length 1 excluded
    with pytest.raises(HypothesisError):
        m.auto_realize("4.1.2", act_t(m.shape.generator(1)))  # length 2 = p^0 + 1
    with pytest.raises(HypothesisError):
        m.auto_realize("4.1.4", m.shape.generator(1) - m.chi())  # wrong length
    m2 = JModel(P32, 1, (1, 0, 1))
    gamma = next(el for el, L, idx in m2.element_stats() if L == 4 and idx == 0)
    with pytest.raises(HypothesisError):
        m2.auto_realize("4.2", gamma, i=0)        # chi level above i
    with pytest.raises(ValueError):
        m.auto_realize("9.9", chi)


def test_theorem_5_4():
    res = JModel(P51, NEG_INF, (0, 1)).theorem_5_4_check(4)
    assert res.ratio_ok and not res.range_empty
    res_empty = JModel(P31, 0, (1, 1)).theorem_5_4_check()
    assert res_empty.range_empty
    with pytest.raises(HypothesisError):
        JModel(P51, NEG_INF, (0, 1)).theorem_5_4_check(2)


def test_theorem_5_4_exhaustive_small():
    for m in [JModel(P51, NEG_INF, (1, 1)), JModel(P51, 0, (0, 1)),
              JModel(P51, NEG_INF, (0, 1)), JModel(P51, 0, (2, 1))]:
        assert m.validate().ok
        for i in (3, 4):
            res = m.theorem_5_4_check(i)
            assert res.ratio_ok, (m.describe(), i)


def test_theorem_5_5_frozen():
    m = JModel(P51, NEG_INF, (1, 1))
    res = m.theorem_5_5_check(3)
    assert res.equal and res.lhs == res.rhs == 5
    m31 = JModel(P31, NEG_INF, (0, 1))
    res31 = m31.theorem_5_5_check(2)
    assert res31.equal and res31.lhs == res31.rhs == 1
    # the exponent vanishes at ell = 2, so the closed form is the split count itself
    assert res31.rhs == m31.count_solutions(2, SPLIT).count


def test_theorem_5_5_range_and_preconditions():
    with pytest.raises(HypothesisError):
        JModel(P31, NEG_INF, (0, 1)).theorem_5_5_check(3)
    with pytest.raises(HypothesisError):
        JModel(P32, NEG_INF, (0, 0, 1)).theorem_5_5_check(2)


def test_ker_count_formula():
    # bottom-level chi: |{gamma in ker e, length <= ell}| = p^(d0 + ell*d1)
    for p, params in ((3, P31), (5, P51)):
        for d0, d1 in itertools.product(range(3), range(1, 3)):
            if d0 + p * d1 > 8:
                continue
            m = JModel(params, NEG_INF, (d0, d1))
            for ell in range(1, p):
                assert m.ker_count(ell) == p ** (d0 + ell * d1)


def test_ker_count_matches_enumeration():
    m = JModel(P31, NEG_INF, (1, 1))
    for ell in range(0, 3):
        expected = sum(
            1 for el, L, idx in m.element_stats() if L <= ell and idx == 0
        )
        assert m.ker_count(ell) == expected


def test_ker_e_structure_flag():
    rep = JModel(P31, NEG_INF, (1, 1)).ker_e_structure()
    assert rep.actual == (2, 1)
    assert rep.displayed == (1, 1)
    assert not rep.matches
    rep5 = JModel(P51, NEG_INF, (1, 1)).ker_e_structure()
    assert rep5.actual == (4, 1)
    assert rep5.displayed == (3, 1)
    assert not rep5.matches
    # with no full blocks the discrepancy vanishes
    rep0 = JModel(P31, NEG_INF, (2, 0)).ker_e_structure()
    assert rep0.matches


def test_gaussian_binomial():
    assert gaussian_binomial(4, 2, 3) == 130
    assert gaussian_binomial(4, 0, 3) == 1
    assert gaussian_binomial(4, 4, 3) == 1
    for n in range(1, 6):
        assert gaussian_binomial(n, 1, 3) == (3 ** n - 1) // 2
        assert gaussian_binomial(n, 1, 5) == (5 ** n - 1) // 4
    with pytest.raises(ValueError):
        gaussian_binomial(2, 3, 3)


def test_enumerate_lines():
    lines = enumerate_lines(2, 3)
    assert lines == ((1, 0), (1, 1), (1, 2), (0, 1))
    assert len(lines) == 4
    assert enumerate_lines(1, 3) == ((1,),)
    # representatives are pairwise non-proportional
    for a, b in itertools.combinations(enumerate_lines(3, 3), 2):
        for c in range(1, 3):
            assert tuple((c * x) % 3 for x in a) != b


def test_field_model_presets_validate():
    for p in (3, 5):
        assert free_rank2_model(p).validate().ok
        assert no_embedding_model(p).validate().ok


def test_field_model_validation_failures():
    p = 3
    params = RingParams(p, 1)
    lines = enumerate_lines(2, p)
    # wrong fixed-space dimension on one line
    models = {rep: JModel(params, NEG_INF, (0, 1)) for rep in lines}
    models[(1, 0)] = JModel(params, NEG_INF, (1, 1))
    fm = FieldModel(p, 2, [(1, 0), (0, 1)], models)
    rep = fm.validate()
    assert not rep.ok and "fixed-space" in rep.violation
    # chi level must track membership in the marked subspace
    models = {rep: JModel(params, NEG_INF, (0, 1)) for rep in lines}
    fm2 = FieldModel(p, 2, [], models)
    rep2 = fm2.validate()
    assert not rep2.ok and "chi level" in rep2.violation
    # missing line
    some = dict(list(models.items())[:3])
    fm3 = FieldModel(p, 2, [(1, 0), (0, 1)], some)
    assert not fm3.validate().ok


def test_theorem_5_1_free_rank2():
    fm = free_rank2_model(3)
    res = fm.theorem_5_1_check()
    assert res.nu_h == 1 and res.nu_m == 8 and res.correction == 0 and res.equal


def test_theorem_5_1_no_embedding():
    fm = no_embedding_model(3)
    res = fm.theorem_5_1_check()
    assert res.nu_h == 0 and res.nu_m == 4 and res.correction == 4 and res.equal


def test_theorem_5_1_p5():
    res = free_rank2_model(5).theorem_5_1_check()
    assert res.nu_h == 1 and res.nu_m == 24 and res.correction == 0 and res.equal


def test_cor_5_7_report():
    rep = free_rank2_model(3).cor_5_7_report()
    assert rep.nu_h == 1
    assert rep.per_line_ap == (3, 3, 3, 3)
    assert rep.ap_split_total == 12
    assert rep.ap_split_stated == 8
    assert rep.ap_split_proof_bound == 12
    assert rep.flagged
    assert rep.len2_split_total == 4  # p + 1 split solutions at length 2, summed over lines


def test_cor_5_7_mid_range_p7():
    rep = free_rank2_model(7).cor_5_7_report()
    # between the bottom and full lengths every line carries one split solution
    for i, total in rep.mid_range_split.items():
        assert total == 8  # p + 1 lines, one per line
    for i, total in rep.mid_range_bullet.items():
        assert total == 48  # (p - 1) per line


def test_json_round_trip(tmp_path):
    m = JModel(P32, 1, (1, 0, 2), e_tails=[{"1": 1}, {"1": 1, "4": 2}])
    doc = model_to_dict(m)
    m2 = model_from_dict(doc)
    assert m2.params == m.params and m2.chi_level == m.chi_level
    assert m2.d == m.d and m2.e_tails == m.e_tails
    fm = free_rank2_model(3)
    doc = model_to_dict(fm)
    fm2 = model_from_dict(doc)
    assert fm2.validate().ok
    assert fm2.theorem_5_1_check() == fm.theorem_5_1_check()
    path = tmp_path / "model.json"
    save_model(fm, path)
    fm3 = load_model(path)
    assert fm3.theorem_5_1_check().equal


def test_tail_normalization_and_errors():
    assert standard_tail(P31) == (1, 0)
    m = JModel(P31, NEG_INF, (0, 1), e_tail=(1, 0))
    assert m.e_tails == ((1, 0),)
    with pytest.raises(ValueError):
        JModel(P31, NEG_INF, (0, 1), e_tail={"5": 1})
    with pytest.raises(ValueError):
        JModel(P31, NEG_INF, (0, 1), e_tails=[(1, 0), (1, 0)])
    with pytest.raises(ValueError):
        JModel(P31, 1, (0, 1))  # chi level beyond n - 1
