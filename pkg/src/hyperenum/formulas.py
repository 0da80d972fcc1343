"""Closed-form and asymptotic counts, evaluated in log space.

Every value is a *main term*: the exp(O(...)) factors carried by the
asymptotic statements are not evaluable, so each result instead carries the
envelope quantities that control them. Logs are natural logs computed with
``mpmath`` at 128 bits; where the main term is rational it is also returned
as an exact ``Fraction``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Optional

import mpmath

from hyperenum.hypercore import (
    DegreeSequence,
    ForbiddenSet,
    Hypergraph,
    Instance,
    NonDivisible,
    falling_factorial,
)

PREC = 128
EXACT_M_LIMIT = 500


class InfeasibleContainment(ValueError):
    pass


class DegenerateDenominator(ZeroDivisionError):
    pass


@dataclass(frozen=True)
class ErrorEnvelope:
    rho: float = 0.0
    beta: Optional[float] = None
    base_term: float = 0.0
    small_o_flags: dict = field(default_factory=dict)

    @classmethod
    def build(cls, rho=0.0, beta=None, base_term=0.0) -> ErrorEnvelope:
        flags = {"base_term": base_term < 1, "rho": rho < 1}
        if beta is not None:
            flags["beta"] = beta < 1
        return cls(rho, beta, base_term, flags)

    def to_json(self) -> dict:
        return {
            "rho": self.rho,
            "beta": self.beta,
            "base_term": self.base_term,
            "small_o_flags": dict(self.small_o_flags),
        }


@dataclass(frozen=True)
class FormulaResult:
    log_value: mpmath.mpf
    main_term_exact: Optional[Fraction]
    correction_exponent: Fraction | mpmath.mpf
    envelope: ErrorEnvelope
    degenerate: bool = False
    notes: tuple[str, ...] = ()

    @property
    def log10_value(self) -> mpmath.mpf:
        with mpmath.workprec(PREC):
            return self.log_value / mpmath.log(10)

    @property
    def value(self) -> mpmath.mpf:
        with mpmath.workprec(PREC):
            return mpmath.exp(self.log_value)

    def exact_log(self) -> Optional[mpmath.mpf]:
        """Log of ``main_term_exact * exp(correction_exponent)`` from the rational path."""
        if self.main_term_exact is None or self.main_term_exact <= 0:
            return None
        with mpmath.workprec(PREC):
            q = self.main_term_exact
            corr = self.correction_exponent
            corr = mpmath.mpf(corr.numerator) / corr.denominator if isinstance(corr, Fraction) else corr
            return mpmath.log(q.numerator) - mpmath.log(q.denominator) + corr

    def to_json(self) -> dict:
        corr = self.correction_exponent
        return {
            "log_value": mpmath.nstr(self.log_value, 20),
            "log10_value": mpmath.nstr(self.log10_value, 20),
            "main_term_exact": None if self.main_term_exact is None else str(self.main_term_exact),
            "correction_exponent": str(corr) if isinstance(corr, Fraction) else mpmath.nstr(corr, 20),
            "envelope": self.envelope.to_json(),
            "degenerate": self.degenerate,
            "notes": list(self.notes),
        }


def _mpq(q: Fraction) -> mpmath.mpf:
    return mpmath.mpf(q.numerator) / q.denominator


def _lfact(a) -> mpmath.mpf:
    return mpmath.loggamma(mpmath.mpf(a) + 1)


def _lfalling(a, b) -> mpmath.mpf:
    return _lfact(a) - _lfact(a - b)


def _degrees(k) -> DegreeSequence:
    return k if isinstance(k, DegreeSequence) else DegreeSequence(tuple(k))


def _forbidden(X, n: int, r: int) -> ForbiddenSet:
    if X is None:
        return ForbiddenSet.empty(n, r)
    if isinstance(X, ForbiddenSet):
        return X
    if isinstance(X, Hypergraph):
        return ForbiddenSet(X)
    return ForbiddenSet.of(n, r, X)


def rho_term(t: int, kmax: int, M: int, r: int) -> float:
    if t == 0:
        return 0.0
    if M == 0:
        return float("inf")
    return float(Fraction(t * kmax**3, M**2) + Fraction(r * t * kmax**4, M**3))


def beta_term(t: int, kmax: int, M_rest: int, r: int) -> float:
    if M_rest == 0:
        return float("inf")
    return float(
        Fraction(r**4 * kmax**3, M_rest) + Fraction(t * kmax**3, M_rest**2) + Fraction(r * t * kmax**4, M_rest**3)
    )


def base_term(r: int, kmax: int, M: int) -> float:
    if kmax == 0:
        return 0.0
    return float(Fraction(r**4 * kmax**3, M))


def pairing_count(k, r: int) -> Fraction:
    """``M! / ((M/r)! r!^(M/r) prod k_i!)`` as an exact rational."""
    k = _degrees(k)
    m = k.M // r
    den = factorial(m) * factorial(r) ** m
    for d in k.degrees:
        den *= factorial(d)
    return Fraction(factorial(k.M), den)


def _log_pairing_count(k: DegreeSequence, r: int) -> mpmath.mpf:
    m = k.M // r
    out = _lfact(k.M) - _lfact(m) - m * mpmath.log(factorial(r))
    for d in k.degrees:
        if d > 1:
            out -= _lfact(d)
    return out


def log_count_formula(k, r: int, *, exact_limit: int = EXACT_M_LIMIT) -> FormulaResult:
    """Main term of the number of simple r-uniform hypergraphs with degrees ``k``."""
    k = _degrees(k)
    if k.M % r:
        raise NonDivisible(f"M={k.M} is not divisible by r={r}")
    if k.M == 0:
        return FormulaResult(mpmath.mpf(0), Fraction(1), Fraction(0), ErrorEnvelope.build())
    corr = Fraction(-(r - 1) * k.M2, 2 * k.M)
    with mpmath.workprec(PREC):
        log_value = _log_pairing_count(k, r) + _mpq(corr)
    exact = pairing_count(k, r) if k.M <= exact_limit else None
    return FormulaResult(log_value, exact, corr, ErrorEnvelope.build(base_term=base_term(r, k.kmax, k.M)))


def log_avoiding_formula(k, r: int, X=None, *, exact_limit: int = EXACT_M_LIMIT) -> FormulaResult:
    """Main term for hypergraphs with degrees ``k`` avoiding ``X``.

    The main term is the same as for the unrestricted count; the forbidden
    edges only enter through ``envelope.rho``.
    """
    k = _degrees(k)
    X = _forbidden(X, k.n, r)
    res = log_count_formula(k, r, exact_limit=exact_limit)
    env = ErrorEnvelope.build(rho=rho_term(X.t, k.kmax, k.M, r), base_term=res.envelope.base_term)
    return FormulaResult(res.log_value, res.main_term_exact, res.correction_exponent, env)


def containment_main_term(k, r: int, X) -> Fraction:
    """``(M/r)_t r!^t prod (k_i)_{x_i} / (M)_{rt}``, exactly."""
    k = _degrees(k)
    X = _forbidden(X, k.n, r)
    t = X.t
    num = falling_factorial(k.M // r, t) * factorial(r) ** t
    for a, b in zip(k.degrees, X.x.degrees):
        num *= falling_factorial(a, b)
    return Fraction(num, falling_factorial(k.M, r * t))


def containment_probability_formula(k, r: int, X, *, exact_limit: int = EXACT_M_LIMIT) -> FormulaResult:
    """Main term of the probability that a random hypergraph contains all of ``X``."""
    k = _degrees(k)
    X = _forbidden(X, k.n, r)
    x = X.x
    if not k.dominates(x):
        bad = [i for i, (a, b) in enumerate(zip(k.degrees, x.degrees)) if b > a]
        raise InfeasibleContainment(f"forbidden degree exceeds k at vertices {bad}")
    if k.M % r:
        raise NonDivisible(f"M={k.M} is not divisible by r={r}")
    rest = k - x
    t = X.t
    notes = []
    ratio_k = Fraction(k.M2, k.M) if k.M else Fraction(0)
    if rest.M == 0:
        ratio_rest = Fraction(0)
        notes.append("M(k-x)=0: the second ratio is taken as 0")
    else:
        ratio_rest = Fraction(rest.M2, rest.M)
    corr = Fraction(r - 1, 2) * (ratio_k - ratio_rest)
    with mpmath.workprec(PREC):
        log_main = _lfalling(k.M // r, t) + t * mpmath.log(factorial(r)) - _lfalling(k.M, r * t)
        for a, b in zip(k.degrees, x.degrees):
            if b:
                log_main += _lfalling(a, b)
        log_value = log_main + _mpq(corr)
    exact = containment_main_term(k, r, X) if k.M <= exact_limit else None
    env = ErrorEnvelope.build(
        rho=rho_term(t, k.kmax, k.M, r),
        beta=beta_term(t, k.kmax, rest.M, r),
        base_term=base_term(r, k.kmax, k.M),
    )
    return FormulaResult(log_value, exact, corr, env, notes=tuple(notes))


def expected_pm_formula(n: int, r: int, k: int) -> FormulaResult:
    """Asymptotic expected number of perfect matchings in a random k-regular class."""
    if n % r:
        raise NonDivisible(f"r={r} does not divide n={n}")
    env = ErrorEnvelope.build(base_term=float(Fraction(r**4 * k**2, n)))
    if k == 1:
        return FormulaResult(mpmath.mpf(0), Fraction(1), Fraction(0), env, degenerate=True,
                             notes=("k=1: every hypergraph is itself a perfect matching",))
    if k < 1:
        raise ValueError("k must be positive")
    corr = Fraction(r - 1, 2)
    with mpmath.workprec(PREC):
        per_edge = mpmath.log(k) + (r - 1) * (k - 1) * (mpmath.log(k - 1) - mpmath.log(k))
        log_value = mpmath.log(r) / 2 + mpmath.mpf(n) / r * per_edge + _mpq(corr)
    return FormulaResult(log_value, None, corr, env)


def expected_hc_formula(n: int, r: int, k: int) -> FormulaResult:
    """Asymptotic expected number of loose Hamilton cycles in a random k-regular class."""
    if n % (r - 1):
        raise NonDivisible(f"r-1={r - 1} does not divide n={n}")
    d = r * k - r - k
    if k < 2 or d <= 0:
        raise DegenerateDenominator(f"rk-r-k={d} must be positive (k={k}, r={r})")
    notes = []
    if (k * n) % r:
        notes.append(f"M=kn={k * n} is not divisible by r={r}: the class is empty")
    corr = Fraction((r - 1) * (r * k - r - 2), 2 * d)
    with mpmath.workprec(PREC):
        inner = mpmath.log((k - 1) * (r - 1)) + mpmath.mpf((r - 1) * d) / r * (
            mpmath.log(d) - mpmath.log(r * k - k)
        )
        log_value = (
            (mpmath.log(mpmath.pi) - mpmath.log(2 * n)) / 2
            + mpmath.log(r - 1)
            + mpmath.mpf(n) / (r - 1) * inner
            + _mpq(corr)
        )
    env = ErrorEnvelope.build(base_term=float(Fraction(r**4 * k**2, n)))
    return FormulaResult(log_value, None, corr, env, notes=tuple(notes))


def _one_structure(n: int, r: int, structure: str) -> Hypergraph:
    if structure == "pm":
        return Hypergraph(n, r, tuple(tuple(range(i, i + r)) for i in range(0, n, r)))
    step = r - 1
    t = n // step
    return Hypergraph(n, r, tuple(tuple(sorted((i * step + j) % n for j in range(r))) for i in range(t)))


def expected_structure_factorial_form(n: int, r: int, k: int, structure: str) -> FormulaResult:
    """Expected count summed over all structures of the complete hypergraph.

    Each term is the containment main term for one fixed perfect matching
    (``structure="pm"``) or loose Hamilton cycle (``"hc"``); by symmetry the
    sum is that term times the number of structures. No Stirling
    approximation is applied, so the main term is an exact rational.
    """
    from hyperenum.oracle import hc_complete, pm_complete

    if structure == "pm":
        if n % r:
            raise NonDivisible(f"r={r} does not divide n={n}")
        total = pm_complete(n, r)
    else:
        if n % (r - 1):
            raise NonDivisible(f"r-1={r - 1} does not divide n={n}")
        total = hc_complete(n, r)
    X = ForbiddenSet(_one_structure(n, r, structure))
    kseq = DegreeSequence.regular(n, k)
    single = containment_probability_formula(kseq, r, X, exact_limit=10**9)
    with mpmath.workprec(PREC):
        log_value = single.log_value + mpmath.log(total)
    exact = single.main_term_exact * total
    return FormulaResult(log_value, exact, single.correction_exponent, single.envelope, notes=single.notes)


def error_envelope(inst: Instance) -> ErrorEnvelope:
    k, r, X = inst.k, inst.r, inst.X
    beta = None
    if k.dominates(X.x):
        beta = beta_term(X.t, k.kmax, (k - X.x).M, r)
    return ErrorEnvelope.build(
        rho=rho_term(X.t, k.kmax, k.M, r),
        beta=beta,
        base_term=base_term(r, k.kmax, k.M),
    )
