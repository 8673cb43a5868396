"""Minkowski's question-mark function on rationals and quadratic irrationals.

For x = [0; a1, a2, ...],

    ?(x) = 2 * sum_k (-1)**(k+1) * 2**-(a1 + ... + ak),

so a rational gives a dyadic rational and an eventually periodic expansion
gives a geometric tail, hence a rational.  Its chorus-line extension
therefore sends rationals and quadratic irrationals to rationals, and the
expansion under the conjugate generator f_? always terminates.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .engine import ExpansionResult, Generator, Outcome, Step, euclid_cf
from .realkernel import DomainError, QuadIrr


class InputClass(enum.Enum):
    RATIONAL = "rational"
    QUADRATIC_IRRATIONAL = "quadratic_irrational"


@dataclass(frozen=True)
class QMValue:
    value: Fraction
    input_class: InputClass


def _partial_sum(terms: Sequence[int], sign: int = 1, offset: int = 0) -> tuple[Fraction, int, int]:
    """Sum of sign * (-1)**k * 2**(1 - running) over terms; returns (sum, sign, offset) after."""
    total = Fraction(0)
    for a in terms:
        offset += a
        total += sign * Fraction(2, 1 << offset)
        sign = -sign
    return total, sign, offset


def question_mark(x: Union[Fraction, int, QuadIrr]) -> QMValue:
    if isinstance(x, QuadIrr):
        if not (x > 0 and x < 1):
            raise DomainError("? is evaluated on (0, 1)")
        head, pre, per = x.continued_fraction()
        s_pre, sign, off = _partial_sum(pre)
        s_per, _, _ = _partial_sum(per, sign, off)
        # each further period scales by (-1)**len * 2**-sum
        ratio = Fraction((-1) ** len(per), 1 << sum(per))
        return QMValue(s_pre + s_per / (1 - ratio), InputClass.QUADRATIC_IRRATIONAL)
    x = Fraction(x)
    if not 0 < x < 1:
        raise DomainError("? is evaluated on (0, 1)")
    total, _, _ = _partial_sum(euclid_cf(x).tail)
    return QMValue(total, InputClass.RATIONAL)


def question_mark_bar(x: Union[Fraction, int, QuadIrr]) -> Fraction:
    """floor(x) + ?({x}), integers fixed."""
    if isinstance(x, QuadIrr):
        n = x.floor()
        return n + question_mark(x.frac()).value
    x = Fraction(x)
    n = math.floor(x)
    return x if x == n else n + question_mark(x - n).value


def _is_dyadic(y: Fraction) -> bool:
    d = y.denominator
    return d & (d - 1) == 0


def question_mark_inverse(y) -> Fraction:
    """Exact preimage of a dyadic rational in (0, 1), by Stern-Brocot descent.

    ? sends the mediant of Farey neighbours to the midpoint of their images.
    """
    y = Fraction(y)
    if not 0 < y < 1:
        raise DomainError("?^-1 is evaluated on (0, 1)")
    if not _is_dyadic(y):
        raise DomainError(f"{y} is not dyadic; its preimage is irrational")
    ln, ld, rn, rd = 0, 1, 1, 1
    lo, hi = Fraction(0), Fraction(1)
    while True:
        mid = (lo + hi) / 2
        mn, md = ln + rn, ld + rd
        if y == mid:
            return Fraction(mn, md)
        if y < mid:
            rn, rd, hi = mn, md, mid
        else:
            ln, ld, lo = mn, md, mid


def question_mark_bar_inv(y) -> Fraction:
    y = Fraction(y)
    n = math.floor(y)
    return y if y == n else n + question_mark_inverse(y - n)


def expand_fquestion(x: Union[Fraction, int, QuadIrr]) -> ExpansionResult:
    """E_{f_?}(x) as the continued fraction of the rational ?_bar(x)."""
    q = euclid_cf(question_mark_bar(x))
    return ExpansionResult(q, Outcome.TERMINATED, [Step(i, 0, True) for i in range(len(q))])


class QuestionMarkConjugate(Generator):
    """f_? = ?^-1 o r o ?_bar.

    Pointwise values are exact only when the inner reciprocal lands on a
    dyadic rational, so expansion always takes the conjugacy route.
    """

    name = "question-mark"
    exact_on_rationals = True
    exact_on_quadratics = True

    def f_exact(self, x) -> Optional[Fraction]:
        v = 1 / question_mark_bar(x)
        return question_mark_inverse(v) if _is_dyadic(v) else None

    def phi_exact(self, y) -> Optional[Fraction]:
        v = 1 / question_mark(y).value
        return question_mark_bar_inv(v) if _is_dyadic(v - math.floor(v)) else None

    def shortcut(self, x, max_terms):
        if isinstance(x, (int, Fraction, QuadIrr)):
            res = expand_fquestion(x)
            if len(res.quotients.tail) > max_terms:
                return ExpansionResult(
                    res.quotients.prefix(max_terms), Outcome.REACHED_MAX_TERMS, res.steps[: max_terms + 1]
                )
            return res
        raise DomainError("f_? expansions are available for rationals and quadratic irrationals only")
