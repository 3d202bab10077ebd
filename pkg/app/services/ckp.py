"""The orthogonal polynomials ``Ĉ_λ`` and the identities built on them.

Every polynomial is kept in the radical-free pair form ``(Ĉ_λ, D_λ)`` with
``C_λ = Ĉ_λ / d_λ`` and ``D_λ = d_λ²``; products ``C_λ C_λ`` therefore carry a
rational ``1/D_λ``. Polynomials are computed in the engine normalization
``Γ(t) = e^{H} e^{χ}`` unless stated otherwise.
"""

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import ceil, factorial, floor, prod
from typing import Literal

from app.core.exceptions import SeriesError, ValidationError, WindowError
from app.core.logging import get_logger
from app.models.schemas import GroupElementSpec
from app.services.fock import (
    Field,
    FockState,
    apply_gamma,
    apply_J,
    apply_theta_mode,
    ball_process_bruteforce,
    ball_process_count,
    basis_ket,
    build_group_state,
    coefficient_poly,
    correlator_series,
    dual_pairing,
    group_pair_coefficients,
    hirota_state_check,
    phi_field_coefficient,
    vacuum_component,
    zmono_weight2,
)
from app.services.matfun import hafnian, pfaffian
from app.services.partitions import (
    DistinctOddPartition,
    OddPartition,
    add_part,
    d_squared,
    enumerate_op,
    insertion_sign,
    remove_part,
)
from app.services.ring import (
    Gen,
    LaurentPoly,
    Monomial,
    Scalar,
    SuperPoly,
    drop_generators,
    even_part,
    exp_truncated,
    first_difference,
    format_monomial,
    grade_involution,
    inverse_truncated,
    negate_alphabet,
    power_truncated,
    rename_alphabet,
    rescale_odd_times,
    reverse_odd_order,
    sorted_terms,
    split_by_generator,
    substitute,
    to_doubled,
    truncate_weight,
)
from app.services.symfun import (
    SuperMiwaPoint,
    TimeVector,
    complete_h,
    formal_even_times,
    hook_schur,
    super_miwa,
)

logger = get_logger(__name__)

Normalization = Literal["gamma", "vertex"]


@dataclass(frozen=True)
class Check:
    """Verdict of one identity with a monomial-level diagnostic on failure."""

    ok: bool
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _compare(label: str, left: SuperPoly, right: SuperPoly) -> Check:
    diff = first_difference(left, right)
    if diff is None:
        return Check(True)
    logger.warning(f"{label} differs at {diff}")
    return Check(False, f"{label}: {diff}")


def _all(checks: Iterable[Check]) -> Check:
    for check in checks:
        if not check:
            return check
    return Check(True)


@dataclass(frozen=True)
class NormalizedC:
    """``Ĉ_λ = d_λ C_λ`` together with ``D_λ``."""

    partition: OddPartition
    hatC: SuperPoly
    D: Fraction

    def normalized(self, normalization: Normalization = "gamma") -> SuperPoly:
        return normalize(self.hatC, normalization)


def normalize(p: SuperPoly, normalization: Normalization, alphabet: str = "t") -> SuperPoly:
    """``vertex`` doubles every odd time, giving ``Ĉ_(1) = t_{1/2}``."""
    if normalization == "vertex":
        return rescale_odd_times(p, 2, alphabet)
    return p


def _half_weight(partition: OddPartition) -> Fraction:
    return Fraction(partition.weight, 2)


def _hook_matrix(indices: Sequence[int], t: Mapping[int, SuperPoly]) -> list[list[SuperPoly]]:
    n = len(indices)
    matrix = [[SuperPoly.zero()] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            entry = hook_schur(indices[i], indices[j], t)
            matrix[i][j] = entry
            matrix[j][i] = entry
    return matrix


def c_lambda_closed(partition: OddPartition) -> NormalizedC:
    """Even-time part of ``Ĉ_λ``: ``Hf[s_(n_i|n_j)]`` for even length, zero otherwise."""
    D = d_squared(partition)
    if partition.length % 2:
        return NormalizedC(partition, SuperPoly.zero(), D)
    t = formal_even_times(_half_weight(partition))
    matrix = _hook_matrix(partition.hook_indices, t)
    return NormalizedC(partition, hafnian(matrix, one=SuperPoly.one()), D)


def c_lambda_closed_half(partition: OddPartition) -> SuperPoly:
    """``Ĉ_λ`` in vertex normalization when ``t_{1/2}`` is the only odd time.

    Odd length borders the hook matrix with ``h_{n_i}`` and multiplies by
    ``t_{1/2}``.
    """
    if partition.length % 2 == 0:
        return c_lambda_closed(partition).hatC
    t = formal_even_times(_half_weight(partition))
    indices = partition.hook_indices
    matrix = _hook_matrix(indices, t)
    for row, n in zip(matrix, indices):
        row.append(complete_h(n, t))
    matrix.append([row[-1] for row in matrix] + [SuperPoly.zero()])
    return SuperPoly.gen("t", 1, odd=True) * hafnian(matrix, one=SuperPoly.one())


def restrict_to_half_time(p: SuperPoly) -> SuperPoly:
    """Set every odd time except ``t_{1/2}`` to zero."""
    return drop_generators(p, lambda g, odd: odd and g[0] == "t" and g[1] != 1)


@lru_cache(maxsize=None)
def c_lambda_engine(partition: OddPartition) -> NormalizedC:
    """``Ĉ_λ = ⟨0|Γ(t) z_λ⟩`` with the full odd-time dependence."""
    ket, D = basis_ket(partition)
    tv = TimeVector.formal(_half_weight(partition))
    hatC = vacuum_component(apply_gamma(tv, ket))
    logger.debug(f"Ĉ_({partition}) has {len(hatC)} terms")
    return NormalizedC(partition, hatC, D)


def c_lambda(
    partition: OddPartition,
    mode: Literal["closed", "engine"] = "engine",
) -> NormalizedC:
    if mode == "closed":
        return c_lambda_closed(partition)
    return c_lambda_engine(partition)


def oracle_check(partition: OddPartition) -> Check:
    """Engine with odd times set to zero against the Hafnian closed form."""
    return _compare(
        f"oracle ({partition})",
        even_part(c_lambda_engine(partition).hatC),
        c_lambda_closed(partition).hatC,
    )


def half_time_check(partition: OddPartition) -> Check:
    """Engine restricted to ``t_{1/2}`` against the bordered Hafnian."""
    engine = restrict_to_half_time(normalize(c_lambda_engine(partition).hatC, "vertex"))
    return _compare(f"half-time ({partition})", engine, c_lambda_closed_half(partition))


def homogeneity_check(partition: OddPartition) -> Check:
    """``Ĉ_λ`` has weight ``|λ|/2`` and Grassmann parity ``ℓ(λ) mod 2``."""
    hatC = c_lambda_engine(partition).hatC
    weights = hatC.weights2()
    if weights - {partition.weight}:
        return Check(False, f"({partition}): weights {sorted(weights)}")
    parity = hatC.parity()
    if hatC and parity != partition.length % 2:
        return Check(False, f"({partition}): parity {parity}")
    return Check(True)


def c_parity_check(partition: OddPartition) -> bool:
    """``Ĉ_λ(-t) = (-1)^(|λ|/2) Ĉ_λ(t)`` on the even-time part."""
    base = even_part(c_lambda_engine(partition).hatC)
    flipped = negate_alphabet(base, "t")
    if partition.weight % 2:
        return not base
    sign = -1 if (partition.weight // 2) % 2 else 1
    return flipped == base.scale(sign)


def c_parity_literal(partition: OddPartition) -> bool:
    """The sign law with exponent ``(|λ| + ℓ(λ))/2``, checked as written."""
    base = even_part(c_lambda_engine(partition).hatC)
    exponent = (partition.weight + partition.length) // 2
    return negate_alphabet(base, "t") == base.scale(-1 if exponent % 2 else 1)


def c_skew(partition: OddPartition, sub: OddPartition) -> SuperPoly:
    """Unnormalized ``Ĉ_{λ/μ}(s) = ⟨0|φ^-_μ Γ(s) z_λ⟩`` in the alphabet ``s``."""
    ket, _ = basis_ket(partition)
    tv = TimeVector.formal(_half_weight(partition), "s")
    return dual_pairing(sub, apply_gamma(tv, ket))


def skew_branching_check(partition: OddPartition) -> Check:
    """``Ĉ_λ(t+s) = sum_μ D_μ^{-1} Ĉ_{λ/μ}(s) Ĉ_μ(t)``."""
    cap = _half_weight(partition)
    shifted = TimeVector.formal(cap, "t") + TimeVector.formal(cap, "s")
    left = shifted.evaluate(c_lambda_engine(partition).hatC, "t")
    right = SuperPoly.zero()
    for sub in enumerate_op(partition.weight):
        skew = c_skew(partition, sub)
        if not skew:
            continue
        if not partition.contains(sub):
            return Check(False, f"Ĉ_({partition})/({sub}) is nonzero")
        inner = c_lambda_engine(sub)
        right = right + (skew * inner.hatC).scale(1 / inner.D)
    return _compare(f"branching ({partition})", left, right)


def _odd_mode_factor(k: int) -> Fraction:
    return Fraction(4 * (-1 if ((k - 1) // 2) % 2 else 1), k)


def _pairing_weight(m: Monomial) -> Fraction:
    even, odd = m
    weight = Fraction(1)
    for (_, j), e in even:
        weight *= factorial(e) * Fraction(2, j) ** e
    for _, k in odd:
        weight *= _odd_mode_factor(k)
    return weight


def _check_time_poly(p: SuperPoly) -> None:
    for gen, _ in p.generators():
        if gen[0] != "t":
            raise ValidationError(
                "The scalar product pairs polynomials in the times t only",
                f"found generator {gen}",
            )


def scalar_product(f: SuperPoly, g: SuperPoly) -> Fraction:
    """Diagonal pairing with ``⟨t_n,t_n⟩ = 2/n`` and ``⟨t_{k/2},t_{k/2}⟩ = 4(-1)^((k-1)/2)/k``."""
    _check_time_poly(f)
    _check_time_poly(g)
    total = Fraction(0)
    for m, c in f.items():
        d = g.coefficient(m)
        if d:
            total += c * d * _pairing_weight(m)
    return total


def _apply_time_monomial(m: Monomial, state: FockState, creation: bool) -> FockState:
    """Substitute ``t_n -> ±(2/n) J_{±n}`` and ``t_{k/2} -> ±c_k J_{±k/2}``.

    Factors act right to left in the written order of the monomial.
    """
    even, odd = m
    sign = -1 if creation else 1
    for _, k in reversed(odd):
        state = apply_theta_mode(sign * k, state).scale(sign * _odd_mode_factor(k))
        if not state:
            return state
    for (_, n), e in even:
        for _ in range(e):
            state = apply_J(sign * n, state).scale(sign * Fraction(2, n))
            if not state:
                return state
    return state


def scalar_product_engine(f: SuperPoly, g: SuperPoly) -> Fraction:
    """``⟨0|ρ(f)(J) M(g)(J̄)|0⟩`` evaluated in the Fock engine.

    ``ρ`` reverses the order of odd factors and ``M`` is the grade
    involution; ``J̄`` is the negated list of creation modes.
    """
    _check_time_poly(f)
    _check_time_poly(g)
    ket = FockState.zero()
    for m, c in grade_involution(g).items():
        ket = ket + _apply_time_monomial(m, FockState.vacuum(), creation=True).scale(c)
    total = Fraction(0)
    for m, c in reverse_odd_order(f).items():
        total += c * _apply_time_monomial(m, ket, creation=False).vacuum_component().constant_term()
    return total


def orthonormality_check(partitions: Sequence[OddPartition]) -> Check:
    """``⟨Ĉ_λ, Ĉ_μ⟩ = D_λ δ_{λμ}`` over all pairs."""
    for lam in partitions:
        cl = c_lambda_engine(lam)
        for mu in partitions:
            value = scalar_product(cl.hatC, c_lambda_engine(mu).hatC)
            expected = cl.D if lam == mu else Fraction(0)
            if value != expected:
                return Check(False, f"⟨Ĉ_({lam}), Ĉ_({mu})⟩ = {value}, expected {expected}")
    return Check(True)


def _cl_product(cap: Fraction, left: TimeVector | None, right: TimeVector | None) -> SuperPoly:
    total = SuperPoly.zero()
    for partition in enumerate_op(int(2 * cap)):
        cl = c_lambda_engine(partition)
        if left is None or right is None:
            first = cl.hatC
            second = negate_alphabet(rename_alphabet(cl.hatC, "t", "s"), "s")
        else:
            first = left.evaluate(cl.hatC)
            second = right.evaluate(cl.hatC)
        total = total + (first * reverse_odd_order(second)).scale(1 / cl.D)
    return total


def cauchy_littlewood_check(cap: Scalar) -> Check:
    """``sum D^{-1} Ĉ_λ(t) ρ(Ĉ_λ(-s)) = exp(-½ sum n t_n s_n - ½ sum (-1)^m (m+½) t_{m+½} s_{m+½})``."""
    cap_f = Fraction(to_doubled(cap), 2)
    cap2 = to_doubled(cap)
    argument = SuperPoly.zero()
    for n in range(1, cap2 // 2 + 1, 2):
        argument = argument + (SuperPoly.gen("t", n) * SuperPoly.gen("s", n)).scale(
            Fraction(-n, 2)
        )
    for k in range(1, cap2 + 1, 2):
        sign = -1 if ((k - 1) // 2) % 2 else 1
        pair = SuperPoly.gen("t", k, odd=True) * SuperPoly.gen("s", k, odd=True)
        argument = argument + pair.scale(Fraction(-sign * k, 4))
    right = exp_truncated(argument, cap_f, ("t",))
    left = _cl_product(cap_f, None, None)
    return _compare(f"Cauchy-Littlewood to weight {cap_f}", left, right)


def super_miwa_cl_check(k: int, cap: Scalar, with_tags: bool = True) -> Check:
    """Cauchy-Littlewood at ``t = -[z]``, ``s = -[z̄]`` against the product formula.

    ``prod_{i,j} g(u)(1 - ζ_i ζ̄_j h(u))`` with ``u = x_i x̄_j``,
    ``g = (1-u)/(1+u)`` and ``h = (1-u)/(1+u)²``.
    """
    if k < 1:
        raise ValidationError(f"Need at least one Miwa pair, got {k}")
    cap_f = Fraction(to_doubled(cap), 2)
    left_tv = super_miwa(SuperMiwaPoint.formal(k, "x", "zeta"), cap_f).negate()
    right_tv = super_miwa(SuperMiwaPoint.formal(k, "xb", "zetab"), cap_f)
    left = _cl_product(cap_f, left_tv, right_tv)
    order = floor(cap_f)
    alphabets = ("x", "zeta")
    right = SuperPoly.one()
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            u = SuperPoly.gen("x", i) * SuperPoly.gen("xb", j)
            g_u = SuperPoly.one()
            h_u = SuperPoly.zero()
            power = SuperPoly.one()
            for m in range(order + 1):
                sign = -1 if m % 2 else 1
                if m:
                    g_u = g_u + power.scale(2 * sign)
                h_u = h_u + power.scale(sign * (2 * m + 1))
                power = power * u
            tags = SuperPoly.gen("zeta", i, odd=True) * SuperPoly.gen("zetab", j, odd=True)
            factor = g_u * (SuperPoly.one() - tags * h_u)
            right = truncate_weight(right * factor, cap_f, alphabets)
    left = truncate_weight(left, cap_f, alphabets)
    if not with_tags:

        def untagged(gen: Gen, odd: bool) -> bool:
            return gen[0] in ("zeta", "zetab")

        left = drop_generators(left, untagged)
        right = drop_generators(right, untagged)
    return _compare(f"super-Miwa product k={k} to order {cap_f}", left, right)


def c_single_supermiwa(partition: OddPartition) -> Check:
    """``Ĉ_λ(-[z,ζ])`` for one pair against its closed form in ``x = 1/z``."""
    tv = super_miwa(SuperMiwaPoint.formal(1), _half_weight(partition)).negate()
    value = tv.evaluate(c_lambda_engine(partition).hatC)
    x = SuperPoly.gen("x", 1)
    zeta = SuperPoly.gen("zeta", 1, odd=True)
    length = partition.length
    if length % 2 == 0:
        half = partition.weight // 2
        sign = -1 if half % 2 else 1
        double_factorial = prod(range(length - 1, 0, -2))
        expected = (x**half).scale(sign * 2 ** (length // 2) * double_factorial)
        return _compare(f"single super-Miwa ({partition})", value, expected)
    if length == 1:
        n = partition.hook_indices[0]
        sign = -1 if (n + 1) % 2 else 1
        expected = (zeta * x**n).scale(sign * (2 * n * n + 2 * n + 1))
        return _compare(f"single super-Miwa ({partition})", value, expected)
    shape = (zeta * x ** ((partition.weight - 1) // 2)).terms
    (monomial,) = shape
    stray = [m for m in value.terms if m != monomial]
    if stray:
        return Check(False, f"({partition}): unexpected monomial {format_monomial(stray[0])}")
    return Check(True)


def count_hafnian(partition: OddPartition) -> Fraction:
    """``Hf[1/(n_i! n_j! (n_i+n_j+1))]``."""
    indices = partition.hook_indices
    size = len(indices)
    matrix = [
        [
            Fraction(0)
            if i == j
            else Fraction(1, factorial(indices[i]) * factorial(indices[j]) * (indices[i] + indices[j] + 1))
            for j in range(size)
        ]
        for i in range(size)
    ]
    return hafnian(matrix)


def count_formula_check(partition: OddPartition) -> Check:
    """``Ĉ_λ(1,0,…) = Hf = prod m_i! 2^(-ℓ/2) N_{0→λ} / (|λ|/2)!``, N by DP and by brute force."""
    if partition.length % 2:
        raise ValidationError(f"The count formula needs even length, got ({partition})")
    value = TimeVector.numeric({1: 1}).evaluate(c_lambda_engine(partition).hatC)
    hf = count_hafnian(partition)
    if value != SuperPoly.const(hf):
        return Check(False, f"({partition}): Ĉ_λ(1,0,…) = {value!r}, Hafnian {hf}")
    empty = OddPartition(())
    n_dp = ball_process_count(empty, partition)
    n_brute = ball_process_bruteforce(empty, partition)
    n_formula = (
        hf
        * factorial(partition.weight // 2)
        * 2 ** (partition.length // 2)
        / prod(factorial(m) for m in partition.multiplicities.values())
    )
    if not n_dp == n_brute == n_formula:
        return Check(
            False, f"({partition}): N by DP {n_dp}, brute force {n_brute}, formula {n_formula}"
        )
    return Check(True)


@lru_cache(maxsize=64)
def _evolved_group_state(label: str, state_cap: Fraction, t_cap: Fraction) -> FockState:
    """``e^{H(t)} g|0⟩`` with ``g|0⟩`` built to ``state_cap`` and ``t``-weight at most ``t_cap``."""
    spec = GroupElementSpec.parse(label)
    state = build_group_state(spec, state_cap)
    return apply_gamma(TimeVector.formal(t_cap, odd=False), state, t_cap)


def _pair_alpha(alpha: OddPartition, evolved: FockState) -> SuperPoly:
    """``⟨0|J_{α_n/2}⋯J_{α_1/2}`` on the weight-``|α|/2`` part of a state."""
    state = FockState({m: c for m, c in evolved.items() if zmono_weight2(m) == alpha.weight})
    for part in alpha.parts:
        state = apply_theta_mode(part, state)
        if not state:
            return SuperPoly.zero()
    return state.vacuum_component()


def tau_coefficient(alpha: OddPartition, spec: GroupElementSpec, cap: Scalar) -> SuperPoly:
    """``τ_α(t) = ⟨α|e^{H(t)} g|0⟩`` to ``t``-weight ``cap``."""
    if not alpha.is_distinct:
        raise ValidationError(f"τ_α needs distinct parts, got ({alpha})")
    t_cap = Fraction(to_doubled(cap), 2)
    evolved = _evolved_group_state(spec.label(), t_cap + _half_weight(alpha), t_cap)
    return _pair_alpha(alpha, evolved)


def _odd_length_alpha(alpha: OddPartition) -> DistinctOddPartition:
    distinct = DistinctOddPartition(alpha.parts)
    if distinct.length % 2 == 0:
        raise ValidationError(f"Wave functions need odd length, got ({alpha})")
    return distinct


def _shift_operator_image(gen: Gen, odd: bool) -> SuperPoly | None:
    if odd or gen[0] != "t":
        return None
    j = gen[1]
    return SuperPoly.gen("t", j) + (SuperPoly.gen("y", 1) ** j).scale(Fraction(2, j))


def _wave_series(
    alpha: DistinctOddPartition,
    spec: GroupElementSpec,
    cap: Fraction,
    window: tuple[int, int],
    tau_weight: Fraction,
    nu_max: int,
) -> LaurentPoly[SuperPoly]:
    lo, hi = window
    label = spec.label()
    max_part = max(alpha.parts[0], nu_max)
    state_cap = tau_weight + Fraction(alpha.weight + max_part, 2)
    evolved = _evolved_group_state(label, state_cap, tau_weight)
    bracket: dict[int, SuperPoly] = {}

    def add(beta: OddPartition, factor: Fraction, power: int) -> None:
        tau = _pair_alpha(beta, evolved)
        if not tau:
            return
        shifted = substitute(tau, _shift_operator_image)
        for d, poly in split_by_generator(shifted, ("y", 1)).items():
            e = power - d
            bracket[e] = bracket.get(e, SuperPoly.zero()) + poly.scale(factor)

    for i, part in enumerate(alpha.parts):
        sign = -1 if (i + (part - 1) // 2) % 2 else 1
        add(remove_part(alpha, i + 1), Fraction(sign * part, 2), (part - 1) // 2)
    for nu in range(1, nu_max + 1, 2):
        if nu in alpha.parts:
            continue
        add(add_part(alpha, nu), Fraction(2 * insertion_sign(nu, alpha)), -(nu + 1) // 2)

    product = exp_xi_series(cap) * LaurentPoly(bracket)
    return product.map(lambda p: truncate_weight(p, cap, ("t",))).window(lo, hi)


def wave_coefficient(
    alpha: OddPartition,
    spec: GroupElementSpec,
    cap: Scalar,
    window: tuple[Scalar, Scalar] | None = None,
) -> LaurentPoly[SuperPoly]:
    """``g_α(t,z)`` assembled from ``τ`` coefficients, exact on ``window``.

    ``g_α = e^{ξ(t,z)} D_z[sum_i (-1)^(i-1) (α_i/2)(-z)^((α_i-1)/2) τ_{α∖α_i}
    + 2 sum_ν s(ν,α) z^(-(ν+1)/2) τ_{α∪ν}]`` with ``D_z: t_j -> t_j + (2/j) z^-j``.
    """
    distinct = _odd_length_alpha(alpha)
    cap_f = Fraction(to_doubled(cap), 2)
    top = cap_f + (distinct.parts[0] - 1) // 2
    if window is None:
        lo_f, hi_f = -cap_f, top
    else:
        lo_f, hi_f = Fraction(window[0]), Fraction(window[1])
    if hi_f < top:
        raise WindowError(
            f"Window upper end {hi_f} is below the top power {top}",
            f"cap {cap_f}, α = ({alpha})",
        )
    lo, hi = ceil(lo_f), floor(hi_f)
    tau_weight = top - lo
    nu_max = int(2 * (cap_f - lo) - 1)
    logger.debug(f"g_({alpha}) window [{lo}, {hi}], τ weight {tau_weight}, ν <= {nu_max}")
    return _wave_series(distinct, spec, cap_f, (lo, hi), tau_weight, nu_max)


def wave_coefficient_engine(
    alpha: OddPartition,
    spec: GroupElementSpec,
    cap: Scalar,
    window: tuple[Scalar, Scalar],
) -> LaurentPoly[SuperPoly]:
    """``g_α(t,z) = ⟨α|e^{H(t)} φ(z) g|0⟩`` computed directly."""
    distinct = _odd_length_alpha(alpha)
    cap_f = Fraction(to_doubled(cap), 2)
    lo, hi = ceil(Fraction(window[0])), floor(Fraction(window[1]))
    half = _half_weight(distinct)
    state = build_group_state(spec, cap_f + half - lo)
    tv = TimeVector.formal(cap_f, odd=False)
    coeffs: dict[int, SuperPoly] = {}
    for e in range(lo, hi + 1):
        raised = phi_field_coefficient(e, state).truncate(cap_f + half)
        evolved = apply_gamma(tv, raised, cap_f)
        value = _pair_alpha(distinct, evolved)
        if value:
            coeffs[e] = value
    return LaurentPoly(coeffs)


def exp_xi_series(cap: Fraction, negate: bool = False) -> LaurentPoly[SuperPoly]:
    """``e^{±ξ(t,z)} = sum_a h_a(±t) z^a`` for ``a <= cap``."""
    t = formal_even_times(cap)
    coeffs = {}
    for a in range(floor(cap) + 1):
        h = complete_h(a, t)
        coeffs[a] = negate_alphabet(h, "t") if negate else h
    return LaurentPoly(coeffs)


def normalized_wave(
    alpha: OddPartition, spec: GroupElementSpec, cap: Scalar, lo: Scalar
) -> LaurentPoly[SuperPoly]:
    """``ŵ_α = g_α / ((-z)^((α_1-1)/2) (α_1/2) τ_{α∖α_1} e^{ξ})`` on exponents ``>= lo``.

    The leading ``τ`` must have a nonzero constant term.
    """
    distinct = _odd_length_alpha(alpha)
    cap_f = Fraction(to_doubled(cap), 2)
    c = (distinct.parts[0] - 1) // 2
    lo_i = ceil(Fraction(lo))
    g = wave_coefficient(distinct, spec, cap_f, (lo_i + c - floor(cap_f), cap_f + c))
    head = tau_coefficient(remove_part(distinct, 1), spec, cap_f)
    try:
        inverse = inverse_truncated(head, cap_f, ("t",))
    except SeriesError as e:
        raise SeriesError(f"Cannot normalize g_({alpha})", e.message)
    factor = Fraction(2 * (-1 if c % 2 else 1), distinct.parts[0])
    product = (g * exp_xi_series(cap_f, negate=True)).shift(-c).scale(factor)
    return product.map(lambda p: truncate_weight(inverse * p, cap_f, ("t",))).window(
        lo_i, cap_f
    )


def normalized_wave_check(alpha: OddPartition, spec: GroupElementSpec, cap: Scalar) -> Check:
    """``ŵ_α = 1 + O(z^-1)``."""
    wave = normalized_wave(alpha, spec, cap, 0)
    for e, value in wave.items():
        expected = SuperPoly.one() if e == 0 else SuperPoly.zero()
        if value != expected:
            return Check(False, f"ŵ_({alpha}) at z^{e}: {first_difference(value, expected)}")
    if wave.coefficient(0) != SuperPoly.one():
        return Check(False, f"ŵ_({alpha}) has constant term {wave.coefficient(0)!r}")
    return Check(True)


def wave_engine_check(
    alpha: OddPartition, spec: GroupElementSpec, cap: Scalar, lo: Scalar
) -> Check:
    """Assembled ``g_α`` against the direct expectation value."""
    cap_f = Fraction(to_doubled(cap), 2)
    hi = cap_f + (alpha.parts[0] - 1) // 2
    assembled = wave_coefficient(alpha, spec, cap_f, (lo, hi))
    direct = wave_coefficient_engine(alpha, spec, cap_f, (lo, hi))
    for e in sorted(set(assembled.exponents()) | set(direct.exponents())):
        check = _compare(f"g_({alpha}) at z^{e}", assembled.coefficient(e), direct.coefficient(e))
        if not check:
            return check
    return Check(True)


def bilinear_residue_check(
    alpha: OddPartition, beta: OddPartition, spec: GroupElementSpec, cap: Scalar
) -> Check:
    """``Res_z g_α(t,z) g_β(s,-z) = 0`` for monomials of joint weight at most ``cap``."""
    a_dist = _odd_length_alpha(alpha)
    b_dist = _odd_length_alpha(beta)
    cap_f = Fraction(to_doubled(cap), 2)
    a = (a_dist.parts[0] - 1) // 2
    b = (b_dist.parts[0] - 1) // 2
    tau_weight = cap_f + a + b + 1

    def series(dist: DistinctOddPartition, own: int, other: int) -> LaurentPoly[SuperPoly]:
        window = (floor(-1 - cap_f - other), floor(cap_f + own))
        nu_max = int(2 * (cap_f + 1 + other) - 1)
        return _wave_series(dist, spec, cap_f, window, tau_weight, nu_max)

    left = series(a_dist, a, b)
    right = series(b_dist, b, a)
    residue = SuperPoly.zero()
    for e1, value in left.items():
        e2 = -1 - e1
        partner = right.coefficient(e2)
        if not partner:
            continue
        mirrored = rename_alphabet(partner, "t", "s")
        sign = -1 if e2 % 2 else 1
        residue = residue + (value * mirrored).scale(sign)
    residue = truncate_weight(residue, cap_f, ("t", "s"))
    if residue:
        m, c = sorted_terms(residue)[0]
        return Check(False, f"residue for ({alpha}),({beta}) at {format_monomial(m)}: {c}")
    return Check(True)


def c_lambda_not_tau_check(partition: OddPartition, cap: Scalar) -> Check:
    """``τ = Ĉ_λ`` leaves a nonzero bilinear residual."""
    ket, _ = basis_ket(partition)
    if hirota_state_check(ket, cap):
        return Check(True)
    return Check(False, f"Ĉ_({partition}) passes the bilinear identity to weight {cap}")


@dataclass(frozen=True)
class TauSeries:
    """Unnormalized ``g_λ = ⟨0|φ^-_λ g|0⟩``; ``τ = sum D_λ^{-1} g_λ Ĉ_λ``."""

    spec: GroupElementSpec
    cap: Fraction
    coefficients: dict[OddPartition, SuperPoly] = field(default_factory=dict)

    def D(self, partition: OddPartition) -> Fraction:
        return d_squared(partition)


def tau_series(spec: GroupElementSpec, cap: Scalar) -> TauSeries:
    cap_f = Fraction(to_doubled(cap), 2)
    state = build_group_state(spec, cap_f)
    coefficients = {}
    for partition in enumerate_op(int(2 * cap_f)):
        value = dual_pairing(partition, state)
        if value:
            coefficients[partition] = value
    logger.info(f"τ-series of {spec.label()} to weight {cap_f}: {len(coefficients)} terms")
    return TauSeries(spec, cap_f, coefficients)


def tau_function(spec: GroupElementSpec, cap: Scalar) -> SuperPoly:
    """``⟨0|Γ(t) g|0⟩`` with full times to weight ``cap``."""
    cap_f = Fraction(to_doubled(cap), 2)
    state = build_group_state(spec, cap_f)
    return vacuum_component(apply_gamma(TimeVector.formal(cap_f), state, cap_f))


def tau_from_series(series: TauSeries) -> Check:
    """Re-summed ``sum D^{-1} Ĉ_λ g_λ`` against the direct vacuum expectation."""
    left = SuperPoly.zero()
    for partition, value in series.coefficients.items():
        cl = c_lambda_engine(partition)
        left = left + (cl.hatC * value).scale(1 / cl.D)
    right = tau_function(series.spec, series.cap)
    return _compare(f"τ re-summation for {series.spec.label()}", left, right)


def diagonal_pattern_check(spec: GroupElementSpec, cap: Scalar) -> Check:
    """``g_λ = D_λ prod c_i^{k_i}/k_i!`` on ``λ = (1^{2k_1} 3^{2k_3} …)``, zero elsewhere."""
    if spec.kind != "diagonal_pair":
        raise ValidationError(f"Expected a diagonal element, got {spec.kind}")
    series = tau_series(spec, cap)
    weights = {
        i: c for (i, j), c in group_pair_coefficients(spec, series.cap).items() if i == j
    }
    for partition in enumerate_op(int(2 * series.cap)):
        mults = partition.multiplicities
        if all(m % 2 == 0 for m in mults.values()) and all(i in weights for i in mults):
            expected = SuperPoly.const(d_squared(partition))
            for i, m in mults.items():
                expected = (expected * weights[i] ** (m // 2)).scale(
                    Fraction(1, factorial(m // 2))
                )
        else:
            expected = SuperPoly.zero()
        check = _compare(
            f"g_({partition})", series.coefficients.get(partition, SuperPoly.zero()), expected
        )
        if not check:
            return check
    return Check(True)


def _soliton_rhs(p: Fraction, q: Fraction, a: SuperPoly, cap: Fraction) -> SuperPoly:
    t = formal_even_times(cap)

    def xi(r: Fraction) -> SuperPoly:
        total = SuperPoly.zero()
        for j, tj in t.items():
            total = total + tj.scale(r**j)
        return total

    def expm1(r1: Fraction, r2: Fraction) -> SuperPoly:
        return exp_truncated(xi(r1) + xi(r2), cap, ("t",)) - SuperPoly.one()

    gamma = expm1(p, q).scale(1 / (p + q))
    alpha = expm1(p, p).scale(1 / (2 * p))
    beta = expm1(q, q).scale(1 / (2 * q))
    half_a = a.scale(Fraction(1, 2))
    base = SuperPoly.one() - half_a * gamma
    inner = truncate_weight(base * base - half_a * half_a * alpha * beta, cap, ("t",))
    return power_truncated(inner - SuperPoly.one(), Fraction(-1, 2), cap, ("t",))


def soliton_tau_check(p: Scalar, q: Scalar, a: str, cap: Scalar) -> Check:
    """``⟨0|e^{H(t)} exp((a/2)φ(p)φ(q))|0⟩ = [(1-aγ/2)² - a²αβ/4]^(-1/2)``."""
    cap_f = Fraction(to_doubled(cap), 2)
    spec = GroupElementSpec(kind="soliton", p=str(Fraction(p)), q=str(Fraction(q)), a=a)
    left = vacuum_component(
        apply_gamma(TimeVector.formal(cap_f, odd=False), build_group_state(spec, cap_f), cap_f)
    )
    right = _soliton_rhs(Fraction(p), Fraction(q), coefficient_poly(a), cap_f)
    checks = [
        _compare(
            "one-soliton τ at t=0",
            drop_generators(left, lambda gen, odd: gen[0] == "t"),
            SuperPoly.one(),
        ),
        _compare(f"one-soliton τ to weight {cap_f}", left, right),
    ]
    return _all(checks)


def heat_kernel_check(cap: Scalar) -> Check:
    """``⟨0|e^{H(t)} e^{aφ_{1/2}²}|0⟩ = (1 - 2a t_1)^(-1/2)``."""
    cap_f = Fraction(to_doubled(cap), 2)
    spec = GroupElementSpec(kind="quadratic_creation", entries={"1,1": "a"})
    left = vacuum_component(
        apply_gamma(TimeVector.formal(cap_f, odd=False), build_group_state(spec, cap_f), cap_f)
    )
    argument = (SuperPoly.gen("a", 1) * SuperPoly.gen("t", 1)).scale(-2)
    right = power_truncated(argument, Fraction(-1, 2), cap_f, ("t",))
    return _compare(f"heat kernel to weight {cap_f}", left, right)


def _z_points(points: Sequence[Scalar]) -> list[LaurentPoly[SuperPoly]]:
    return [
        LaurentPoly({a: SuperPoly.const(Fraction(rho))}) for a, rho in enumerate(points)
    ]


def _series_inverse(series: LaurentPoly[SuperPoly], prec: int) -> LaurentPoly[SuperPoly]:
    """``1/series`` known below ``w^prec``; the leading coefficient must be a nonzero rational."""
    v = series.valuation()
    if v is None:
        raise SeriesError("Cannot invert the zero series")
    head = series.coefficient(v)
    if not head.is_constant():
        raise SeriesError("Leading coefficient is not a rational", repr(head))
    c = head.constant_term()
    one = series.one_like()
    rest = series.shift(-v).scale(1 / c) - one
    inner_prec = prec + v
    acc = one.with_prec(inner_prec)
    power = one.with_prec(inner_prec)
    while True:
        power = (power * (-rest)).with_prec(inner_prec)
        if not power:
            break
        acc = acc + power
    return acc.shift(-v).scale(1 / c)


def _cross_ratio(
    za: LaurentPoly[SuperPoly], zb: LaurentPoly[SuperPoly], prec: int
) -> LaurentPoly[SuperPoly]:
    return (za + zb) * _series_inverse(za - zb, prec)


def _two_point(
    za: LaurentPoly[SuperPoly], zb: LaurentPoly[SuperPoly], prec: int
) -> LaurentPoly[SuperPoly]:
    return (za - zb) * _series_inverse((za + zb) * (za + zb), prec)


def _check_series(
    label: str, left: LaurentPoly[SuperPoly], right: LaurentPoly[SuperPoly], order: int
) -> Check:
    for series in (left, right):
        if series.prec is not None and series.prec <= order:
            raise WindowError(f"{label}: series known only below w^{series.prec}")
    exponents = sorted(e for e in set(left.exponents()) | set(right.exponents()) if e <= order)
    for e in exponents:
        check = _compare(f"{label} at w^{e}", left.coefficient(e), right.coefficient(e))
        if not check:
            return check
    return Check(True)


def _pfaffian_of(
    entries: dict[tuple[int, int], LaurentPoly[SuperPoly]], subset: Sequence[int]
) -> LaurentPoly[SuperPoly]:
    size = len(subset)
    zero: LaurentPoly[SuperPoly] = LaurentPoly()
    matrix = [[zero] * size for _ in range(size)]
    for i in range(size):
        for j in range(i + 1, size):
            entry = entries[(subset[i], subset[j])]
            matrix[i][j] = entry
            matrix[j][i] = -entry
    return pfaffian(matrix, one=LaurentPoly({0: SuperPoly.one()}))


def super_correlator_check(points: Sequence[Scalar], order: int) -> Check:
    """``D_k = ⟨0|:e^Θ(z_1,ζ_1):⋯:e^Θ(z_k,ζ_k):|0⟩`` against its closed form and inverse."""
    k = len(points)
    if k < 2:
        raise ValidationError(f"The super correlator needs at least two points, got {k}")
    tags = [SuperPoly.gen("zeta", i, odd=True) for i in range(1, k + 1)]
    # the inverse has w-valuation at least -(k-1)(k-2)/2
    slack = (k - 1) * (k - 2) // 2
    engine = correlator_series(
        [Field("vertex", Fraction(rho), tag) for rho, tag in zip(points, tags)], order + slack
    )
    prec = order + 1 + k * k
    zs = _z_points(points)
    cross = {}
    two_point = {}
    for a, b in combinations(range(k), 2):
        cross[(a, b)] = _cross_ratio(zs[a], zs[b], prec)
        two_point[(a, b)] = _two_point(zs[a], zs[b], prec)
    one = LaurentPoly({0: SuperPoly.one()})
    prefactor = one
    inverse_prefactor = one
    exponent: LaurentPoly[SuperPoly] = LaurentPoly()
    for a, b in combinations(range(k), 2):
        prefactor = prefactor * cross[(a, b)]
        inverse_prefactor = inverse_prefactor * _series_inverse(cross[(a, b)], prec)
        exponent = exponent - two_point[(a, b)].scale(tags[a] * tags[b])
    closed = one
    term = one
    n = 1
    while True:
        term = (term * exponent).scale(Fraction(1, n))
        if not term:
            break
        closed = closed + term
        n += 1
    closed = prefactor * closed
    checks = [_check_series(f"D_{k} closed form", engine, closed, order)]
    if k == 2:
        z1, z2 = zs
        explicit = cross[(0, 1)] - _series_inverse(z1 + z2, prec).scale(tags[0] * tags[1])
        checks.append(_check_series("D_2 explicit", engine, explicit, order))
    inverse_sum: LaurentPoly[SuperPoly] = LaurentPoly()
    for size in range(0, k + 1, 2):
        for subset in combinations(range(k), size):
            tag_product = SuperPoly.one()
            for i in subset:
                tag_product = tag_product * tags[i]
            inverse_sum = inverse_sum + _pfaffian_of(two_point, subset).scale(tag_product)
    inverse = inverse_prefactor * inverse_sum
    checks.append(_check_series(f"D_{k} times its inverse", engine * inverse, one, order))
    return _all(checks)


def pfaffian_correlator_check(points: Sequence[Scalar], order: int) -> Check:
    """``⟨θ⋯θ⟩ = Pf[(z_a-z_b)/(z_a+z_b)²]``, ``⟨φ⋯φ⟩ = Hf[1/(z_a+z_b)]`` and their ratio."""
    k = len(points)
    if k % 2:
        raise ValidationError(f"Correlators need an even number of points, got {k}")
    prec = order + 1 + k * k
    zs = _z_points(points)
    two_point = {}
    propagator = {}
    inverse_prefactor = LaurentPoly({0: SuperPoly.one()})
    for a, b in combinations(range(k), 2):
        two_point[(a, b)] = _two_point(zs[a], zs[b], prec)
        propagator[(a, b)] = _series_inverse(zs[a] + zs[b], prec)
        inverse_prefactor = inverse_prefactor * _series_inverse(_cross_ratio(zs[a], zs[b], prec), prec)
    theta = correlator_series([Field("theta", Fraction(rho)) for rho in points], order)
    phi = correlator_series([Field("phi", Fraction(rho)) for rho in points], order)
    zero: LaurentPoly[SuperPoly] = LaurentPoly()
    matrix = [[zero] * k for _ in range(k)]
    for (a, b), value in propagator.items():
        matrix[a][b] = value
        matrix[b][a] = value
    hf = hafnian(matrix, one=LaurentPoly({0: SuperPoly.one()}))
    return _all(
        [
            _check_series("θ correlator", theta, _pfaffian_of(two_point, range(k)), order),
            _check_series("φ correlator", phi, hf, order),
            _check_series("θ correlator via φ", theta, inverse_prefactor * phi, order),
        ]
    )


def two_point_value(j2: int, k2: int) -> Fraction:
    """``⟨0|J_{j/2} J_{k/2}|0⟩``."""
    if j2 > 0 and k2 == -j2:
        sign = -1 if ((j2 - 1) // 2) % 2 else 1
        return Fraction(sign * j2, 4)
    return Fraction(0)


def mode_wick_check(indices2: Sequence[int]) -> Check:
    """``⟨0|J_{i_1}⋯J_{i_n}|0⟩ = Pf[⟨J_{i_a} J_{i_b}⟩]`` for half-integer modes."""
    state = FockState.vacuum()
    for j2 in reversed(indices2):
        state = apply_theta_mode(j2, state)
    engine = state.vacuum_component().constant_term()
    n = len(indices2)
    if n % 2:
        expected = Fraction(0)
    else:
        matrix = [[Fraction(0)] * n for _ in range(n)]
        for a, b in combinations(range(n), 2):
            value = two_point_value(indices2[a], indices2[b])
            matrix[a][b] = value
            matrix[b][a] = -value
        expected = pfaffian(matrix)
    if engine != expected:
        return Check(False, f"modes {list(indices2)}: engine {engine}, Pfaffian {expected}")
    return Check(True)
