"""Acceptance gate: the nine headline checks, one test and one printed
pass/fail line per criterion.

Tolerances are pinned here as constants; each criterion computes its own
evidence from the public API (plus the library verification suites for the
determinism check).
"""

import math
import time

from tmprod.tm_core import zero_substitution
from tmprod.product_engine import (
    EvalOptions,
    eval_I1,
    eval_I2,
    eval_ratio_I2_I1,
    eval_rational_exponent,
    intro_products,
)
from tmprod.closed_forms import (
    AdmissiblePair,
    SUITES,
    corollary2_family,
    corollary2_rhs,
    corollary3_family,
    corollary3_value,
    r_gamma_form,
    r_sine_form,
    ratio_squared_invariant,
    results_to_json,
    verify,
)
from tmprod.special_functions import (
    gamma_row_product,
    gamma_row_product_closed_form,
    reflection_check,
    sine_multiplication,
)

SQRT2 = math.sqrt(2.0)

TOL_RATIO_INVARIANT = 1e-10   # criterion 1
TOL_FORM_EQUIVALENCE = 1e-10  # criterion 2
TOL_SQRT2 = 5e-4              # criterion 3
TIME_BUDGET_PER_Q = 10.0      # criterion 3, seconds per block length
TOL_ENDPOINT = 1e-3           # criterion 4
TOL_ENDPOINT_SPREAD = 2e-3    # criterion 4
TOL_SINE_RATIO = 1e-3         # criterion 5
TOL_WALLIS = 1e-4             # criterion 6
TOL_WOODS = 1e-4              # criterion 6
TOL_CHAIN = 2e-4              # criterion 6
TOL_ROW_PRODUCT = 1e-11       # criterion 7
TOL_REFLECTION = 1e-12        # criterion 7
TOL_SINE_MULT = 1e-12         # criterion 7
TOL_ZERO_CANCEL = 1e-3        # criterion 8

N_TERMS_DEFAULT = 1 << 22
N_TERMS_DOUBLE = 1 << 23
N_TERMS_ZERO_CANCEL = 1 << 20
N_TERMS_DETERMINISM = 1 << 18


def report(criterion: str, ok: bool, detail: str):
    print(f"{criterion}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"{criterion} failed: {detail}"


def acceptance_grid():
    pairs = []
    for q in (1, 2, 3, 4):
        phis = [[0.0] * q, [1.0] * q]
        psis = [[0.0] * q]
        if q >= 2:
            quarter = [0.0] * q
            quarter[0], quarter[q - 1] = 0.25, -0.25
            psis.append(quarter)
        pairs.extend(AdmissiblePair.from_entries(l, s) for l in phis for s in psis)
    return pairs


def test_criterion_1_squared_level_ratio_invariant():
    worst = 0.0
    for pair in acceptance_grid():
        for n in (1, 2, 3):
            lhs, rhs = ratio_squared_invariant(pair, n)
            worst = max(worst, abs(lhs - rhs) / abs(rhs))
    report(
        "criterion 1",
        worst <= TOL_RATIO_INVARIANT,
        f"squared level ratio vs sine product on the full grid, worst rel err {worst:.3e}",
    )


def test_criterion_2_gamma_and_sine_forms_agree():
    worst = 0.0
    for pair in acceptance_grid():
        for level in (3, 5):
            gamma = r_gamma_form(pair, level)
            sine = r_sine_form(pair, level)
            worst = max(worst, abs(gamma.value - sine.value) / abs(sine.value))
    report(
        "criterion 2",
        worst <= TOL_FORM_EQUIVALENCE,
        f"gamma form vs sine form at levels 3 and 5, worst rel err {worst:.3e}",
    )


def test_criterion_3_stuttered_ratio_reaches_sqrt2():
    ok = True
    details = []
    for q in (1, 2, 3, 4):
        zero = zero_substitution(q)
        t0 = time.perf_counter()
        base = eval_ratio_I2_I1(zero, zero, EvalOptions(n_terms=N_TERMS_DEFAULT))
        elapsed = time.perf_counter() - t0
        err = abs(base.value - SQRT2)
        refined = eval_ratio_I2_I1(zero, zero, EvalOptions(n_terms=N_TERMS_DOUBLE))
        err2 = abs(refined.value - SQRT2)
        ok = ok and err <= TOL_SQRT2 and err2 < err and elapsed <= TIME_BUDGET_PER_Q
        details.append(f"q={q} err {err:.2e} -> {err2:.2e} in {elapsed:.1f}s")
    report("criterion 3", ok, "sqrt(2) ratio: " + "; ".join(details))


COROLLARY3_GRID = ((2, 0), (3, 0), (3, 1), (4, 0), (4, 1), (4, 2))


def test_criterion_4_endpoint_grid():
    ok = True
    details = []
    for q, r in COROLLARY3_GRID:
        target = corollary3_value(q, r)
        values = []
        for i in (-1, 0, 1):
            fam = corollary3_family(q, r, i)
            if target == 0.0:
                octaves = [
                    abs(
                        eval_rational_exponent(
                            fam, EvalOptions(n_terms=N_TERMS_DEFAULT // d)
                        ).value
                    )
                    for d in (4, 2, 1)
                ]
                ok = ok and octaves[0] >= octaves[1] >= octaves[2]
                ok = ok and octaves[-1] <= TOL_ENDPOINT
                values.append(octaves[-1])
            else:
                value = eval_rational_exponent(
                    fam, EvalOptions(n_terms=N_TERMS_DEFAULT)
                ).value
                ok = ok and abs(value - target) <= TOL_ENDPOINT
                values.append(value)
        spread = max(values) - min(values)
        ok = ok and spread <= TOL_ENDPOINT_SPREAD
        details.append(f"({q},{r}) spread {spread:.1e}")
    report("criterion 4", ok, "2cos endpoints incl. the degenerate cell: " + "; ".join(details))


def test_criterion_5_sine_ratio_family():
    value = eval_rational_exponent(
        corollary2_family(2, 0, 0.3), EvalOptions(n_terms=N_TERMS_DEFAULT)
    ).value
    target = corollary2_rhs(2, 0, 0.3)
    err = abs(value - target)
    report(
        "criterion 5",
        err <= TOL_SINE_RATIO,
        f"(q, r, s) = (2, 0, 0.3): {value:.9f} vs {target:.9f}, err {err:.2e}",
    )


def test_criterion_6_intro_chain():
    p1, p2, wallis, woods = intro_products(10**7)
    err_w = abs(wallis.value - math.pi / 4.0)
    err_r = abs(woods.value - SQRT2 / 2.0)
    err_c = abs(p1.value * p2.value**2 - math.pi * SQRT2 / 8.0)
    ok = err_w <= TOL_WALLIS and err_r <= TOL_WOODS and err_c <= TOL_CHAIN
    report(
        "criterion 6",
        ok,
        f"intro chain at 10^7 terms: wallis {err_w:.1e}, woods-robbins {err_r:.1e}, "
        f"chain {err_c:.1e}",
    )


def test_criterion_7_special_function_identities():
    import random

    worst_row = max(
        abs(gamma_row_product(m) - gamma_row_product_closed_form(m))
        for m in range(2, 129)
    )
    rng = random.Random(91)
    worst_refl = 0.0
    for _ in range(1000):
        lhs, rhs = reflection_check(rng.uniform(0.001, 0.999))
        worst_refl = max(worst_refl, abs(lhs - rhs))
    worst_sine = 0.0
    for n in range(1, 65):
        for _ in range(100):
            lhs, rhs = sine_multiplication(n, rng.uniform(-math.pi, math.pi))
            worst_sine = max(worst_sine, abs(lhs - rhs))
    ok = (
        worst_row <= TOL_ROW_PRODUCT
        and worst_refl <= TOL_REFLECTION
        and worst_sine <= TOL_SINE_MULT
    )
    report(
        "criterion 7",
        ok,
        f"row product {worst_row:.1e}, reflection {worst_refl:.1e}, "
        f"sine multiplication {worst_sine:.1e}",
    )


def test_criterion_8_zero_factor_cancellation():
    phi = AdmissiblePair.from_entries([2.0], [0.0]).phi
    psi = zero_substitution(1)
    opts = EvalOptions(n_terms=N_TERMS_ZERO_CANCEL)
    r1 = eval_I1(phi, opts)
    r2 = eval_I2(phi, psi, EvalOptions(n_terms=2 * N_TERMS_ZERO_CANCEL))
    ratio = eval_ratio_I2_I1(phi, psi, opts)
    ok = (
        r1.zero_term_indices == (1,)
        and r2.zero_term_indices == (2,)
        and r1.value == 0.0
        and r2.value == 0.0
        and math.isfinite(ratio.value)
        and ratio.sign == 1
        and abs(ratio.value - SQRT2) <= TOL_ZERO_CANCEL
    )
    report(
        "criterion 8",
        ok,
        f"matched zeros at 1 and 2 cancel; ratio {ratio.value:.6f} vs sqrt(2), "
        f"err {abs(ratio.value - SQRT2):.1e}",
    )


def test_criterion_9_parallel_determinism():
    mismatched = []
    for suite in SUITES:
        texts = []
        for blocks in (1, 4, 16):
            rows = verify(
                suite,
                params={"q_max": 4},
                opts=EvalOptions(n_terms=N_TERMS_DETERMINISM, parallel_blocks=blocks),
            )
            texts.append(results_to_json(rows, include_timing=False))
        if not (texts[0] == texts[1] == texts[2]):
            mismatched.append(suite)
    report(
        "criterion 9",
        not mismatched,
        "bit-identical suite output for 1/4/16 parallel blocks"
        + (f"; mismatches: {mismatched}" if mismatched else " across all 9 suites"),
    )
