"""Thue-Morse substitution algebra and numerical evaluation of the attached infinite products.

The package has four layers:

* ``tm_core``: the +/-1 Thue-Morse sequence, finite substitutions over it, and the
  operators (shuffle, add, scale, stuttering) that build new substitutions from old.
* ``product_engine``: deterministic, compensated evaluation of the infinite products
  whose n-th factor is driven by a substituted Thue-Morse sequence.
* ``special_functions``: the log-Gamma and sine identities the closed forms rest on.
* ``closed_forms``: finite sine/Gamma product forms at each truncation level, the exact
  ratio invariants they satisfy, and the verification suites tying numerics to closed
  forms.
"""

from tmprod.tm_core import (
    Substitution,
    SubstitutionClass,
    add,
    classify,
    scale,
    shuffle,
    stuttered,
    thue_morse,
    thue_morse_prefix,
    tm_signs,
)
from tmprod.product_engine import (
    EvalOptions,
    EvalReport,
    OnePlusOverOdd,
    RationalExponent,
    eval_I1,
    eval_I2,
    eval_product,
    eval_ratio_I2_I1,
    eval_rational_exponent,
    intro_products,
)
from tmprod.special_functions import (
    gamma_row_product,
    gamma_row_product_closed_form,
    log_gamma,
    reflection_check,
    sine_multiplication,
)
from tmprod.closed_forms import (
    AdmissiblePair,
    FiniteForm,
    VerificationResult,
    corollary2_family,
    corollary2_rhs,
    corollary3_family,
    corollary3_s,
    corollary3_value,
    r_def_truncated,
    r_gamma_form,
    r_sine_form,
    ratio_squared_invariant,
    rprime_sine_form,
    t_count,
    theorem1_rhs,
    verify,
)

__version__ = "0.1.0"

__all__ = [
    "Substitution",
    "SubstitutionClass",
    "add",
    "classify",
    "scale",
    "shuffle",
    "stuttered",
    "thue_morse",
    "thue_morse_prefix",
    "tm_signs",
    "EvalOptions",
    "EvalReport",
    "OnePlusOverOdd",
    "RationalExponent",
    "eval_I1",
    "eval_I2",
    "eval_product",
    "eval_ratio_I2_I1",
    "eval_rational_exponent",
    "intro_products",
    "gamma_row_product",
    "gamma_row_product_closed_form",
    "log_gamma",
    "reflection_check",
    "sine_multiplication",
    "AdmissiblePair",
    "FiniteForm",
    "VerificationResult",
    "corollary2_family",
    "corollary2_rhs",
    "corollary3_family",
    "corollary3_s",
    "corollary3_value",
    "r_def_truncated",
    "r_gamma_form",
    "r_sine_form",
    "ratio_squared_invariant",
    "rprime_sine_form",
    "t_count",
    "theorem1_rhs",
    "verify",
]
