"""Evaluator tests: exact small prefixes, invariants, determinism, errors."""

import json
import math

import pytest

from tmprod.tm_core import Substitution, stuttered, thue_morse, zero_substitution
from tmprod.product_engine import (
    EvalOptions,
    InvalidFamilyError,
    NonCancellableZeroError,
    OnePlusOverOdd,
    RationalExponent,
    alignment_block,
    eval_I1,
    eval_I2,
    eval_product,
    eval_ratio_I2_I1,
    eval_rational_exponent,
    intro_products,
    snapped_terms,
)

SQRT2 = math.sqrt(2.0)


def one_plus_brute(combo, start, stop):
    prod = 1.0
    for n in range(start, stop):
        j, k = divmod(n, combo.q)
        entry = combo.plus_image[k] if thue_morse(j) == 1 else combo.minus_image[k]
        prod *= 1.0 + entry / (2 * n + 1)
    return prod


def test_two_term_prefix_is_four_thirds():
    report = eval_I1(zero_substitution(1), EvalOptions(n_terms=2))
    assert report.value == pytest.approx(4.0 / 3.0, rel=1e-14)
    assert report.sign == 1
    assert report.n_terms_used == 2
    assert report.zero_term_indices == ()


def test_four_term_prefixes_are_64_over_35():
    # q=2 with zero phi and the doubled stuttered at q=1 share the first block
    r1 = eval_I1(zero_substitution(2), EvalOptions(n_terms=4))
    r2 = eval_I2(zero_substitution(1), zero_substitution(1), EvalOptions(n_terms=4))
    assert r1.value == pytest.approx(64.0 / 35.0, rel=1e-14)
    assert r2.value == pytest.approx(64.0 / 35.0, rel=1e-14)


def test_brute_force_agreement_on_a_mixed_family():
    phi = Substitution(q=3, plus_image=(0.5, 1.0, 0.5), minus_image=(-0.5, -1.0, -0.5))
    combo1 = Substitution(
        q=3,
        plus_image=(1.5, 2.0, 1.5),
        minus_image=(-1.5, -2.0, -1.5),
    )  # equals phi + T_3
    report = eval_product(OnePlusOverOdd(combo=combo1), EvalOptions(n_terms=500))
    assert report.value == pytest.approx(one_plus_brute(combo1, 0, 500), rel=1e-12)
    rep1 = eval_I1(phi, EvalOptions(n_terms=500))
    assert rep1.value == pytest.approx(report.value, rel=1e-14)


def test_all_zero_combo_evaluates_to_exactly_one():
    fam = OnePlusOverOdd(combo=zero_substitution(2))
    report = eval_product(fam, EvalOptions(n_terms=1 << 14))
    assert report.value == 1.0
    assert report.log_abs_value == 0.0
    assert report.tail_estimate == 0.0


def test_zero_factors_are_recorded_and_value_is_zero():
    combo = Substitution(q=1, plus_image=(-1.0,), minus_image=(-3.0,))
    # n=0 (letter +1): 1 - 1/1 = 0; n=1 (letter -1): 1 - 3/3 = 0
    report = eval_product(OnePlusOverOdd(combo=combo), EvalOptions(n_terms=64))
    assert report.value == 0.0
    assert report.sign == 0
    assert report.zero_term_indices == (0, 1)
    stripped = one_plus_brute(combo, 2, 64)
    assert math.exp(report.log_abs_value) == pytest.approx(abs(stripped), rel=1e-12)


def test_negative_prefix_flips_the_sign():
    combo = Substitution(q=1, plus_image=(-5.0,), minus_image=(5.0,))
    report = eval_product(OnePlusOverOdd(combo=combo), EvalOptions(n_terms=64))
    assert report.negative_prefix_count == 1
    assert report.sign == -1
    assert report.value < 0.0
    assert report.value == pytest.approx(one_plus_brute(combo, 0, 64), rel=1e-12)


@pytest.mark.parametrize("l,k,b", [(1, 2, 1), (2, 2, 1), (1, 4, 3)])
def test_pairing_consistency_of_log_factor_sums(l, k, b):
    # direct log-sum over [2M, 2M') equals the sum of letter pairs over
    # [M, M'): a_{2n} = a_n and a_{2n+1} = -a_n regroup the same factors
    M, M2 = 1 << 12, 1 << 13
    direct = math.fsum(
        math.log(1.0 + thue_morse(n) * l / (k * n + b)) for n in range(2 * M, 2 * M2)
    )
    paired = math.fsum(
        math.log(1.0 + thue_morse(n) * l / (k * 2 * n + b))
        + math.log(1.0 - thue_morse(n) * l / (k * (2 * n + 1) + b))
        for n in range(M, M2)
    )
    assert direct == pytest.approx(paired, abs=1e-12)


def test_tail_estimate_decays_like_one_over_n():
    phi = zero_substitution(1)
    sizes = [1 << e for e in range(16, 23)]
    tails = []
    for n in sizes:
        rep = eval_I1(phi, EvalOptions(n_terms=n))
        assert rep.tail_estimate > 0.0
        tails.append(rep.tail_estimate)
    xs = [math.log(n) for n in sizes]
    ys = [math.log(t) for t in tails]
    xbar = sum(xs) / len(xs)
    ybar = sum(ys) / len(ys)
    slope = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys)) / sum(
        (x - xbar) ** 2 for x in xs
    )
    assert -slope >= 0.9


def test_snapping_rounds_up_to_whole_blocks():
    fam = OnePlusOverOdd(combo=stuttered(3))
    block = alignment_block(fam)
    assert block == 3 * 4096
    assert snapped_terms(fam, block) == block
    assert snapped_terms(fam, block + 1) == 2 * block
    assert snapped_terms(fam, block - 1) == block - 1  # below one block: verbatim
    report = eval_product(fam, EvalOptions(n_terms=block + 1))
    assert report.n_terms_used == 2 * block


def test_snapped_value_extends_by_the_literal_extra_factors():
    fam = OnePlusOverOdd(combo=stuttered(3))
    block = alignment_block(fam)
    small = eval_product(fam, EvalOptions(n_terms=block))
    big = eval_product(fam, EvalOptions(n_terms=2 * block))
    extra = math.fsum(
        math.log(1.0 + thue_morse(n // 3) / (2 * n + 1)) for n in range(block, 2 * block)
    )
    assert big.log_abs_value == pytest.approx(small.log_abs_value + extra, abs=1e-12)


def test_parallel_blocks_do_not_change_any_bit():
    phi = Substitution(q=2, plus_image=(1.0, 1.0), minus_image=(-1.0, -1.0))
    reports = [
        eval_I1(phi, EvalOptions(n_terms=1 << 16, parallel_blocks=blocks))
        for blocks in (1, 4, 16)
    ]
    texts = [rep.to_json() for rep in reports]
    assert texts[0] == texts[1] == texts[2]


def test_report_json_has_the_fixed_key_set():
    rep = eval_I1(zero_substitution(1), EvalOptions(n_terms=8))
    payload = json.loads(rep.to_json())
    assert list(payload) == [
        "value", "log_abs_value", "sign", "n_terms_used",
        "zero_term_indices", "tail_estimate",
    ]
    assert payload["n_terms_used"] == 8
    assert payload["zero_term_indices"] == []


def rational_brute(fam, start, stop):
    prod = 1.0
    for n in range(start, stop):
        if thue_morse(n) == 1:
            numer, denom = fam.plus_numer, fam.plus_denom
        else:
            numer, denom = fam.minus_numer, fam.minus_denom
        top = math.prod(a * n + b for a, b in numer)
        bot = math.prod(a * n + b for a, b in denom)
        prod *= top / bot
    return prod


def test_rational_family_matches_brute_force():
    fam = RationalExponent(
        plus_numer=((2.0, 0.3), (2.0, 1.7)),
        plus_denom=((2.0, 0.5), (2.0, 1.5)),
        minus_numer=((2.0, 0.5), (2.0, 1.5)),
        minus_denom=((2.0, 0.3), (2.0, 1.7)),
        start_index=0,
    )
    report = eval_rational_exponent(fam, EvalOptions(n_terms=700))
    assert report.value == pytest.approx(rational_brute(fam, 0, 700), rel=1e-12)


def test_rational_zero_factor_from_an_integer_numerator_root():
    fam = RationalExponent(
        plus_numer=((1.0, -2.0),),
        plus_denom=((1.0, 0.5),),
        minus_numer=((1.0, -2.0),),
        minus_denom=((1.0, 0.5),),
        start_index=0,
    )
    report = eval_rational_exponent(fam, EvalOptions(n_terms=32))
    assert report.sign == 0
    assert report.value == 0.0
    assert report.zero_term_indices == (2,)


def test_invalid_families_are_rejected():
    with pytest.raises(InvalidFamilyError):
        RationalExponent(((-1.0, 3.0),), ((1.0, 1.0),), ((1.0, 1.0),), ((1.0, 1.0),))
    with pytest.raises(InvalidFamilyError):
        RationalExponent(((0.0, 0.0),), ((1.0, 1.0),), ((1.0, 1.0),), ((1.0, 1.0),))
    with pytest.raises(InvalidFamilyError):
        # denominator root at n = 2 is a pole
        RationalExponent(((1.0, 1.0),), ((1.0, -2.0),), ((1.0, 1.0),), ((1.0, 1.0),))
    with pytest.raises(InvalidFamilyError):
        OnePlusOverOdd(combo=zero_substitution(1), start_index=-1)
    with pytest.raises(ValueError):
        EvalOptions(n_terms=0)
    with pytest.raises(ValueError):
        EvalOptions(n_terms=4, parallel_blocks=0)


def test_eval_i1_rejects_inadmissible_phi():
    lopsided = Substitution(q=2, plus_image=(1.0, 2.0), minus_image=(-1.0, -2.0))
    with pytest.raises(ValueError):
        eval_I1(lopsided, EvalOptions(n_terms=8))
    periodic = Substitution(q=1, plus_image=(1.0,), minus_image=(1.0,))
    with pytest.raises(ValueError):
        eval_I1(periodic, EvalOptions(n_terms=8))
    with pytest.raises(ValueError):
        eval_I2(zero_substitution(2), periodic, EvalOptions(n_terms=8))


def test_ratio_cancels_matched_zero_pairs():
    # l = (2): I1 dies at n=1 (1 - 3/3), I2 at the doubled index 2
    phi = Substitution(q=1, plus_image=(2.0,), minus_image=(-2.0,))
    psi = zero_substitution(1)
    report = eval_ratio_I2_I1(phi, psi, EvalOptions(n_terms=1 << 18))
    assert report.sign == 1
    assert report.zero_term_indices == ()
    assert report.value == pytest.approx(SQRT2, abs=1e-3)


def test_ratio_zero_pair_slope_factor_against_raw_cofactors():
    phi = Substitution(q=1, plus_image=(2.0,), minus_image=(-2.0,))
    psi = zero_substitution(1)
    n1 = 1 << 13
    r1 = eval_I1(phi, EvalOptions(n_terms=n1))
    r2 = eval_I2(phi, psi, EvalOptions(n_terms=2 * n1))
    assert r1.zero_term_indices == (1,)
    assert r2.zero_term_indices == (2,)
    ratio = eval_ratio_I2_I1(phi, psi, EvalOptions(n_terms=n1))
    stripped = r2.log_abs_value - r1.log_abs_value
    slope = math.log(2.0 * 3.0 / 5.0)  # pair limit 2(2k+1)/(2m+1) at k=1, m=2
    assert ratio.log_abs_value == pytest.approx(stripped + slope, abs=1e-12)


def test_ratio_raises_on_unmatched_zero():
    # psi alone can zero an I2 factor; nothing in I1 can match it
    phi = zero_substitution(3)
    psi = Substitution(q=3, plus_image=(11.0, 0.0, -11.0), minus_image=(11.0, 0.0, -11.0))
    with pytest.raises(NonCancellableZeroError):
        eval_ratio_I2_I1(phi, psi, EvalOptions(n_terms=1 << 13))


def test_intro_products_hit_their_classical_limits():
    p1, p2, wallis, woods = intro_products(10**6)
    assert wallis.n_terms_used == 10**6
    assert abs(wallis.value - math.pi / 4.0) <= 1e-6
    assert abs(woods.value - SQRT2 / 2.0) <= 1e-6
    assert abs(p1.value * p2.value**2 - math.pi * SQRT2 / 8.0) <= 2e-6
    with pytest.raises(ValueError):
        intro_products(1)
