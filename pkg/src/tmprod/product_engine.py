"""Numerical evaluation of the Thue-Morse driven infinite products.

Two factor families are supported:

* OnePlusOverOdd: factor n is 1 + c_n/(2n+1) where c_n is a substituted
  Thue-Morse sequence.  This covers I1 (combo phi + T_q), I2 (combo
  2 psi shuffled with phi, plus T_2q), and the one-plus form of the intro
  products.
* RationalExponent: factor n is R(n) when a_n = +1 and S(n) when a_n = -1,
  with R and S ratios of products of affine forms alpha*n + beta.  This
  covers the rational families behind the sine-ratio identities and the
  classical Wallis / Woods-Robbins products.

Evaluation is done in log space.  The index range is cut into fixed chunks
(a multiple of the substitution block, at least 1024 factors each); each
chunk's log-factors are summed with math.fsum (exactly rounded, so the chunk
sum does not depend on how numpy filled the array), and the chunk sums are
combined with one more fsum in index order.  The chunk partition depends only
on the family and the term count, never on parallel_blocks, so results are
bit-identical whether chunks are processed serially or on a thread pool.

Factors that are exactly zero are legal: they are recorded in
zero_term_indices, the reported value is 0, and log_abs_value carries the
log of the product with the zero factors removed (the zero-stripped
cofactor), which is exactly what the cancellation machinery in
eval_ratio_I2_I1 needs.  Negative factors are legal as well (they occur for
finitely many small n when image entries are large, or in rational families
whose affine forms have negative values early on); they only flip the sign.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from tmprod.tm_core import (
    Substitution,
    add,
    scale,
    shuffle,
    stuttered,
    substituted_values,
    thue_morse,
    tm_signs,
    zero_substitution,
)

_BLOCK_SHIFT = 12  # chunk = block-length * 2**12 indices, so >= 1024 factors


class InvalidFamilyError(ValueError):
    """The term family cannot describe a convergent positive-tailed product."""


class NonCancellableZeroError(ArithmeticError):
    """A zero factor in one product of a ratio has no matched zero in the other."""


AffineForm = tuple[float, float]  # (alpha, beta) standing for alpha*n + beta


@dataclass(frozen=True)
class OnePlusOverOdd:
    """Factors 1 + combo(a)_n / (2n+1) for n >= start_index."""

    combo: Substitution
    start_index: int = 0

    def __post_init__(self):
        if self.start_index < 0:
            raise InvalidFamilyError("start_index must be nonnegative")


@dataclass(frozen=True)
class RationalExponent:
    """Factors R(n)^((a_n+1)/2) * S(n)^((1-a_n)/2) for n >= start_index.

    R(n) multiplies the plus_numer forms over the plus_denom forms; S(n) does
    the same with the minus forms.  Every affine form must have a positive
    leading coefficient (or be a positive constant), so factors are positive
    for all large n; finitely many early factors may be negative or zero and
    are handled by the evaluator's diagnostics.  A denominator form with an
    integer root inside the evaluation range is rejected, since the factor
    would be a pole rather than a zero.
    """

    plus_numer: tuple[AffineForm, ...]
    plus_denom: tuple[AffineForm, ...]
    minus_numer: tuple[AffineForm, ...]
    minus_denom: tuple[AffineForm, ...]
    start_index: int = 0

    def __post_init__(self):
        if self.start_index < 0:
            raise InvalidFamilyError("start_index must be nonnegative")
        for group in (self.plus_numer, self.plus_denom, self.minus_numer, self.minus_denom):
            for alpha, beta in group:
                if alpha < 0 or (alpha == 0 and beta <= 0):
                    raise InvalidFamilyError(
                        "affine forms need a positive leading coefficient "
                        f"(got {alpha}*n + {beta})"
                    )
        for alpha, beta in self.plus_denom + self.minus_denom:
            if alpha > 0:
                root = -beta / alpha
                near = round(root)
                if near >= self.start_index and alpha * near + beta == 0.0:
                    raise InvalidFamilyError(
                        f"denominator form {alpha}*n + {beta} vanishes at n = {near}"
                    )


TermFamily = OnePlusOverOdd | RationalExponent


@dataclass(frozen=True)
class EvalOptions:
    """Truncation and execution settings.

    n_terms is snapped up to a multiple of the family's alignment block when
    it is at least one block long (Thue-Morse aligned prefixes oscillate
    least); shorter requests are evaluated verbatim.  compensated selects
    exactly rounded fsum accumulation (the default) over plain pairwise
    summation.  parallel_blocks only controls how many chunks are in flight
    at once; it never changes the result.
    """

    n_terms: int
    compensated: bool = True
    parallel_blocks: int = 1

    def __post_init__(self):
        if self.n_terms < 1:
            raise ValueError("n_terms must be positive")
        if self.parallel_blocks < 1:
            raise ValueError("parallel_blocks must be positive")


@dataclass(frozen=True)
class EvalReport:
    """Result of one product evaluation.

    sign is 0 exactly when zero_term_indices is nonempty, and then value is
    0.0 while log_abs_value still holds the log of the zero-stripped cofactor
    product.  Otherwise value = sign * exp(log_abs_value).
    negative_prefix_count is the number of strictly negative factors met
    (they all live in the finite prefix for well-formed families).
    tail_estimate is a heuristic Richardson-style bound on |log of the
    omitted tail|, calibrated from the last two octave block sums; it is not
    a proven bound.
    """

    value: float
    log_abs_value: float
    sign: int
    n_terms_used: int
    zero_term_indices: tuple[int, ...]
    negative_prefix_count: int
    tail_estimate: float

    def to_json(self) -> str:
        zeros = "[" + ", ".join(str(int(i)) for i in self.zero_term_indices) + "]"
        return (
            "{"
            f'"value": {float_17g(self.value)}, '
            f'"log_abs_value": {float_17g(self.log_abs_value)}, '
            f'"sign": {self.sign}, '
            f'"n_terms_used": {self.n_terms_used}, '
            f'"zero_term_indices": {zeros}, '
            f'"tail_estimate": {float_17g(self.tail_estimate)}'
            "}"
        )


def float_17g(x: float) -> str:
    """Decimal text with 17 significant digits; round-trips any double."""
    if not math.isfinite(x):
        raise ValueError("reports must contain finite numbers only")
    return format(float(x), ".17g")


def alignment_block(family: TermFamily) -> int:
    if isinstance(family, OnePlusOverOdd):
        return family.combo.q << _BLOCK_SHIFT
    return 1 << _BLOCK_SHIFT


def snapped_terms(family: TermFamily, n_terms: int) -> int:
    """Term count snapped up to the alignment block, once past one block."""
    block = alignment_block(family)
    if n_terms < block:
        return n_terms
    return -(-n_terms // block) * block


def positivity_threshold(family: TermFamily) -> int:
    """Smallest index from which on every factor is strictly positive."""
    if isinstance(family, OnePlusOverOdd):
        bound = family.combo.max_abs_entry()
        # 2n+1 > bound + 1 makes |c/(2n+1)| < 1
        n0 = int(math.floor(bound / 2.0)) + 1
        return max(family.start_index, n0)
    n0 = family.start_index
    for alpha, beta in (
        family.plus_numer + family.plus_denom + family.minus_numer + family.minus_denom
    ):
        if alpha > 0:
            n0 = max(n0, int(math.floor(-beta / alpha)) + 1)
    return n0


def _chunk_stats(family, lo, hi, compensated):
    """(fsum of log|factor| with zeros skipped, zero indices, negative count)
    for factor indices [lo, hi)."""
    if isinstance(family, OnePlusOverOdd):
        logs, zero_mask, neg_mask = _one_plus_logs(family, lo, hi)
    else:
        logs, zero_mask, neg_mask = _rational_logs(family, lo, hi)
    if compensated:
        total = math.fsum(logs.tolist())
    else:
        total = float(np.sum(logs))
    zeros = (lo + np.nonzero(zero_mask)[0]).tolist()
    return total, zeros, int(np.count_nonzero(neg_mask))


def _one_plus_logs(family, lo, hi):
    c = substituted_values(family.combo, lo, hi)
    idx = np.arange(lo, hi, dtype=np.float64)
    t = c / (2.0 * idx + 1.0)
    f = 1.0 + t
    zero_mask = f == 0.0
    neg_mask = f < 0.0
    logs = np.zeros(hi - lo, dtype=np.float64)
    ok = ~(zero_mask | neg_mask)
    logs[ok] = np.log1p(t[ok])
    if neg_mask.any():
        logs[neg_mask] = np.log(-f[neg_mask])
    return logs, zero_mask, neg_mask


def _rational_logs(family, lo, hi):
    idxf = np.arange(lo, hi, dtype=np.float64)
    plus_mask = tm_signs(lo, hi) == 1
    logs = np.zeros(hi - lo, dtype=np.float64)
    neg_mask = np.zeros(hi - lo, dtype=bool)
    zero_mask = np.zeros(hi - lo, dtype=bool)
    for mask, numer, denom in (
        (plus_mask, family.plus_numer, family.plus_denom),
        (~plus_mask, family.minus_numer, family.minus_denom),
    ):
        sub = idxf[mask]
        if sub.size == 0:
            continue
        acc = np.zeros(sub.size, dtype=np.float64)
        parity = np.zeros(sub.size, dtype=bool)
        zero = np.zeros(sub.size, dtype=bool)
        with np.errstate(divide="ignore"):
            for alpha, beta in numer:
                v = alpha * sub + beta
                zero |= v == 0.0
                parity ^= v < 0.0
                acc += np.log(np.abs(v))
            for alpha, beta in denom:
                v = alpha * sub + beta
                if np.any(v == 0.0):
                    raise InvalidFamilyError("denominator form vanishes inside the range")
                parity ^= v < 0.0
                acc -= np.log(np.abs(v))
        acc[zero] = 0.0
        logs[mask] = acc
        neg_mask[mask] = parity & ~zero
        zero_mask[mask] = zero
    return logs, zero_mask, neg_mask


def _thread_cap(parallel_blocks: int) -> int:
    cap = parallel_blocks
    env = os.environ.get("TMPROD_THREADS")
    if env is not None:
        cap = min(cap, max(1, int(env)))
    return min(cap, os.cpu_count() or 1)


def eval_product(family: TermFamily, opts: EvalOptions, *, _align: bool = True) -> EvalReport:
    """Partial product over n = start_index ... start_index + n_terms_used - 1.

    See the module docstring for the accumulation and determinism scheme.
    """
    if not isinstance(family, (OnePlusOverOdd, RationalExponent)):
        raise TypeError("unsupported term family")
    n_used = snapped_terms(family, opts.n_terms) if _align else opts.n_terms
    start = family.start_index
    stop = start + n_used
    block = alignment_block(family)
    bounds = list(range(start, stop, block))
    tasks = [(lo, min(lo + block, stop)) for lo in bounds]

    workers = _thread_cap(opts.parallel_blocks)
    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            stats = list(
                pool.map(lambda t: _chunk_stats(family, t[0], t[1], opts.compensated), tasks)
            )
    else:
        stats = [_chunk_stats(family, lo, hi, opts.compensated) for lo, hi in tasks]

    partials = [s[0] for s in stats]
    log_abs = math.fsum(partials) if opts.compensated else float(sum(partials))
    zeros = tuple(i for s in stats for i in s[1])
    negs = sum(s[2] for s in stats)
    if zeros:
        sign = 0
        value = 0.0
    else:
        sign = -1 if negs & 1 else 1
        value = sign * math.exp(log_abs)
    tail = _tail_estimate(family, opts.compensated, start, stop, partials)
    return EvalReport(
        value=value,
        log_abs_value=log_abs,
        sign=sign,
        n_terms_used=n_used,
        zero_term_indices=zeros,
        negative_prefix_count=negs,
        tail_estimate=tail,
    )


def _tail_estimate(family, compensated, start, stop, partials):
    """Heuristic |log tail| bound from the last two octave block sums.

    Paired log-factors decay like 1/n^2, so the log-tail beyond N scales like
    1/N and successive octave sums shrink roughly geometrically; the estimate
    is |B2| * r / (1 - r) with r fitted from the last two octaves (clamped,
    falling back to r = 1/2 when the fit is unusable).
    """
    total = stop - start
    if total < 8:
        return 0.0
    nc = len(partials)
    if nc >= 4:
        i2 = nc - nc // 2
        len1 = max(1, (nc - i2) // 2)
        b2 = math.fsum(partials[i2:])
        b1 = math.fsum(partials[i2 - len1 : i2])
    else:
        m2 = stop - total // 2
        m1 = m2 - total // 4
        b2 = _chunk_stats(family, m2, stop, compensated)[0]
        b1 = _chunk_stats(family, m1, m2, compensated)[0]
    if b2 == 0.0:
        return 0.0
    if b1 != 0.0 and math.isfinite(b1):
        r = min(max(abs(b2 / b1), 0.05), 0.9)
    else:
        r = 0.5
    return abs(b2) * r / (1.0 - r)


def _require(condition: bool, message: str):
    if not condition:
        raise ValueError(message)


def i1_family(phi: Substitution) -> OnePlusOverOdd:
    cls = phi.classify()
    _require(cls.is_alternative, "phi must be alternative (minus image = negated plus image)")
    _require(cls.is_mirror_symmetric, "phi must be mirror-symmetric")
    return OnePlusOverOdd(combo=add(phi, stuttered(phi.q)))


def i2_family(phi: Substitution, psi: Substitution) -> OnePlusOverOdd:
    _require(phi.q == psi.q, "phi and psi must share the block length")
    cls_phi = phi.classify()
    cls_psi = psi.classify()
    _require(cls_phi.is_alternative, "phi must be alternative")
    _require(cls_phi.is_mirror_symmetric, "phi must be mirror-symmetric")
    _require(cls_psi.is_periodic, "psi must be periodic (images equal)")
    _require(cls_psi.is_mirror_antisymmetric, "psi must be mirror-antisymmetric")
    return OnePlusOverOdd(combo=add(scale(2.0, shuffle(psi, phi)), stuttered(2 * phi.q)))


def eval_I1(phi: Substitution, opts: EvalOptions) -> EvalReport:
    """The product of 1 + (phi + T_q)(a)_n / (2n+1) over n >= 0."""
    return eval_product(i1_family(phi), opts)


def eval_I2(phi: Substitution, psi: Substitution, opts: EvalOptions) -> EvalReport:
    """The product of 1 + (2 psi shuffle phi + T_2q)(a)_n / (2n+1) over n >= 0."""
    return eval_product(i2_family(phi, psi), opts)


def eval_ratio_I2_I1(phi: Substitution, psi: Substitution, opts: EvalOptions) -> EvalReport:
    """I2 / I1 with truncations paired letter for letter.

    The denominator runs over N terms (N = the snapped request) and the
    numerator over exactly 2N, so both cover the same Thue-Morse letters and
    the ratio inherits the finite forms' cancellation structure.

    When I1 has a zero factor at index k, the letter containing k forces a
    matched zero in I2 at the doubled index m (m = 2k when the letter is -1,
    m = 2k+1 when it is +1).  Both zero factors are dropped and the ratio of
    the remaining cofactors is multiplied by the limit of the cancelling
    pair, 2(2k+1)/(2m+1): perturbing the image entry that produced the zero
    moves the I2 entry twice as fast as the I1 entry, and the factor
    denominators contribute (2k+1)/(2m+1).  A zero on either side without
    its partner means the pair is not admissible and is reported as
    NonCancellableZeroError.
    """
    fam1 = i1_family(phi)
    fam2 = i2_family(phi, psi)
    n1 = snapped_terms(fam1, opts.n_terms)
    r1 = eval_product(
        fam1, EvalOptions(n1, compensated=opts.compensated, parallel_blocks=opts.parallel_blocks)
    )
    r2 = eval_product(
        fam2,
        EvalOptions(2 * n1, compensated=opts.compensated, parallel_blocks=opts.parallel_blocks),
    )

    q = phi.q
    log_abs = r2.log_abs_value - r1.log_abs_value
    if r1.zero_term_indices or r2.zero_term_indices:
        matched = {}
        for k in r1.zero_term_indices:
            letter = thue_morse(k // q)
            m = 2 * k if letter == -1 else 2 * k + 1
            matched[m] = k
        if set(r2.zero_term_indices) != set(matched):
            raise NonCancellableZeroError(
                f"unmatched zero factors: I1 at {r1.zero_term_indices}, "
                f"I2 at {r2.zero_term_indices}"
            )
        log_abs += math.fsum(
            math.log(2.0 * (2 * k + 1) / (2 * m + 1)) for m, k in matched.items()
        )
        sign = -1 if (r1.negative_prefix_count + r2.negative_prefix_count) & 1 else 1
    else:
        sign = r1.sign * r2.sign
    return EvalReport(
        value=sign * math.exp(log_abs),
        log_abs_value=log_abs,
        sign=sign,
        n_terms_used=n1,
        zero_term_indices=(),
        negative_prefix_count=r1.negative_prefix_count + r2.negative_prefix_count,
        tail_estimate=r1.tail_estimate + r2.tail_estimate,
    )


def eval_rational_exponent(family: RationalExponent, opts: EvalOptions) -> EvalReport:
    """Evaluate a RationalExponent family (thin wrapper enforcing the kind)."""
    if not isinstance(family, RationalExponent):
        raise TypeError("eval_rational_exponent expects a RationalExponent family")
    return eval_product(family, opts)


_INTRO_FAMILIES = ("intro-p1", "intro-p2", "intro-wallis", "intro-woods-robbins")


def intro_family(name: str) -> TermFamily:
    """The four classical products of the opening identity chain, from n = 1.

    intro-p1: prod (2n/(2n+1))^(a_n)            (the Flajolet-Martin number)
    intro-p2: prod (1 + a_n/(2n+1))
    intro-wallis: prod (2n/(2n+1)) ((2n+2)/(2n+1))   -> pi/4
    intro-woods-robbins: prod ((2n+2)/(2n+1))^(a_n)  -> sqrt(2)/2
    """
    if name == "intro-p1":
        return RationalExponent(
            plus_numer=((2.0, 0.0),),
            plus_denom=((2.0, 1.0),),
            minus_numer=((2.0, 1.0),),
            minus_denom=((2.0, 0.0),),
            start_index=1,
        )
    if name == "intro-p2":
        return OnePlusOverOdd(combo=stuttered(1), start_index=1)
    if name == "intro-wallis":
        forms_num = ((2.0, 0.0), (2.0, 2.0))
        forms_den = ((2.0, 1.0), (2.0, 1.0))
        return RationalExponent(forms_num, forms_den, forms_num, forms_den, start_index=1)
    if name == "intro-woods-robbins":
        return RationalExponent(
            plus_numer=((2.0, 2.0),),
            plus_denom=((2.0, 1.0),),
            minus_numer=((2.0, 1.0),),
            minus_denom=((2.0, 2.0),),
            start_index=1,
        )
    raise ValueError(f"unknown intro family {name!r}; expected one of {_INTRO_FAMILIES}")


def intro_products(n_terms: int) -> tuple[EvalReport, EvalReport, EvalReport, EvalReport]:
    """(P1, P2, wallis, woods_robbins) each truncated at exactly n_terms terms.

    These are evaluated at the literal requested length (no block snapping)
    so the reported n_terms_used matches the request.
    """
    if n_terms < 2:
        raise ValueError("intro products need at least 2 terms")
    opts = EvalOptions(n_terms=n_terms)
    return tuple(eval_product(intro_family(name), opts, _align=False) for name in _INTRO_FAMILIES)


def zero_pair(q: int) -> tuple[Substitution, Substitution]:
    """The all-zero admissible (phi, psi) pair at block length q."""
    return zero_substitution(q), zero_substitution(q)
