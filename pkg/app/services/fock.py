"""Polynomial realization of the free-boson Fock space and its operators.

A state is a finite sum of monomials in the creation variables ``z_{k/2}``
(``k`` odd and positive) whose :class:`SuperPoly` coefficients stand to the
left of the monomial. ``φ_{k/2}`` multiplies by ``z_{k/2}`` and ``φ_{-k/2}``
acts as ``(-1)^((k-1)/2) ∂/∂z_{k/2}``; the vacuum is the constant 1.

Half-integer mode indices are always passed doubled (``3`` stands for
``3/2``); integer current modes ``J_n`` take ``n`` itself. Operator actions
on single monomials are exact rational maps and are memoized.
"""

from collections.abc import Callable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import floor
from typing import Literal

from app.core.exceptions import ValidationError, WindowError
from app.core.logging import get_logger
from app.models.schemas import GroupElementSpec, split_coefficient
from app.services.partitions import (
    OddPartition,
    d_squared,
    enumerate_fock_basis,
)
from app.services.ring import (
    LaurentPoly,
    Scalar,
    SuperPoly,
    grade_involution,
    to_doubled,
    truncate_weight2,
)
from app.services.symfun import TimeVector

logger = get_logger(__name__)

ZMono = tuple[tuple[int, int], ...]
NumAction = tuple[tuple[ZMono, Fraction], ...]

VACUUM_MONO: ZMono = ()


def zmono_weight2(m: ZMono) -> int:
    """Doubled weight ``sum index * exponent``."""
    return sum(index * e for index, e in m)


def zmono_mul(a: ZMono, b: ZMono) -> ZMono:
    merged = dict(a)
    for index, e in b:
        merged[index] = merged.get(index, 0) + e
    return tuple(sorted(merged.items()))


def zmono_from_partition(partition: OddPartition) -> ZMono:
    """``z_λ``: exponent ``m_i`` on ``z_{i/2}`` for each part ``i``."""
    return tuple(sorted(partition.multiplicities.items()))


def zmono_to_partition(m: ZMono) -> OddPartition:
    return OddPartition.from_multiplicities(dict(m))


def format_zmono(m: ZMono) -> str:
    if not m:
        return "1"
    return "*".join(
        f"z{index}/2" if e == 1 else f"z{index}/2^{e}" for index, e in m
    )


def _check_half_index(index2: int) -> None:
    if index2 % 2 == 0:
        raise ValidationError(
            f"Half-integer modes take a doubled odd index, got {index2}"
        )


def _raise(m: ZMono, index: int) -> ZMono:
    return zmono_mul(m, ((index, 1),))


def _exponent(m: ZMono, index: int) -> int:
    for i, e in m:
        if i == index:
            return e
    return 0


def _lower(m: ZMono, index: int) -> ZMono:
    return tuple((i, e - 1 if i == index else e) for i, e in m if i != index or e > 1)


def _accumulate(out: dict[ZMono, Fraction], m: ZMono, c: Fraction) -> None:
    value = out.get(m, 0) + c
    if value:
        out[m] = value
    else:
        out.pop(m, None)


def _apply_on(
    action: Callable[[ZMono], NumAction], state: Mapping[ZMono, Fraction]
) -> dict[ZMono, Fraction]:
    out: dict[ZMono, Fraction] = {}
    for m, c in state.items():
        for m2, x in action(m):
            _accumulate(out, m2, c * x)
    return out


@lru_cache(maxsize=None)
def _phi_on(u2: int, m: ZMono) -> NumAction:
    if u2 > 0:
        return ((_raise(m, u2), Fraction(1)),)
    index = -u2
    e = _exponent(m, index)
    if not e:
        return ()
    sign = -1 if ((index - 1) // 2) % 2 else 1
    return ((_lower(m, index), Fraction(sign * e)),)


@lru_cache(maxsize=None)
def _current_on(n: int, m: ZMono) -> NumAction:
    """Normally ordered ``J_n`` on a monomial, ``n`` odd.

    Pairs ``(a, b)`` of doubled indices with ``a + b = -2n`` and ``a <= b``;
    ``φ_a`` stands to the right and the diagonal pair carries ``1/2``.
    """
    if n % 2 == 0:
        return ()
    out: dict[ZMono, Fraction] = {}
    top = zmono_weight2(m)
    for a2 in range(-n, -top - 1, -2):
        b2 = -2 * n - a2
        c = Fraction(-1 if ((a2 + 1) // 2) % 2 else 1)
        if a2 == b2:
            c /= 2
        for m1, x1 in _phi_on(a2, m):
            for m2, x2 in _phi_on(b2, m1):
                _accumulate(out, m2, c * x1 * x2)
    return tuple(sorted(out.items()))


@lru_cache(maxsize=None)
def _exp_current_series(
    m: ZMono, coef: int, creation: bool, r_max: int
) -> tuple[NumAction, ...]:
    """Coefficients ``E_r`` of ``exp(sum_k (coef/k) J_{±k} u^k)`` on ``m``.

    Uses ``r E_r = coef * sum_{k odd <= r} J_{±k} E_{r-k}``; the modes
    ``J_{±k}`` of one sign commute.
    """
    seq: list[dict[ZMono, Fraction]] = [{m: Fraction(1)}]
    for r in range(1, r_max + 1):
        acc: dict[ZMono, Fraction] = {}
        for k in range(1, r + 1, 2):
            prev = seq[r - k]
            if not prev:
                continue
            mode = -k if creation else k
            for m2, c in _apply_on(lambda x: _current_on(mode, x), prev).items():
                _accumulate(acc, m2, c * Fraction(coef, r))
        seq.append(acc)
    return tuple(tuple(sorted(s.items())) for s in seq)


@lru_cache(maxsize=None)
def _theta_on(j2: int, m: ZMono) -> NumAction:
    """Half-integer current ``J_{j2/2}`` on a monomial.

    ``J_j`` is half the coefficient of ``z^(-j-1/2)`` in
    ``V_-(z)^{-1} φ(z) V_+(z)^{-1}``. With ``V_+^{-1}`` contributing
    ``E_p z^-p`` and ``φ_i`` the power ``z^(i-1/2)``, the remaining creation
    power is ``q = p - i - j``.
    """
    w2 = zmono_weight2(m)
    if j2 > w2:
        return ()
    lowering = _exp_current_series(m, -2, False, w2 // 2)
    pending: dict[int, dict[ZMono, Fraction]] = {}
    for p, ep in enumerate(lowering):
        lo = -(w2 - 2 * p)
        if lo % 2 == 0:
            lo += 1
        hi = 2 * p - j2
        for m2, c in ep:
            for i2 in range(lo, hi + 1, 2):
                target = pending.setdefault((2 * p - i2 - j2) // 2, {})
                for m3, x in _phi_on(i2, m2):
                    _accumulate(target, m3, c * x)
    out: dict[ZMono, Fraction] = {}
    for q, state in pending.items():
        for m3, c in state.items():
            for m4, x in _exp_current_series(m3, 2, True, q)[q]:
                _accumulate(out, m4, c * x / 2)
    return tuple(sorted(out.items()))


def _add_term(out: dict[ZMono, SuperPoly], m: ZMono, c: SuperPoly) -> None:
    current = out.get(m)
    value = c if current is None else current + c
    if value:
        out[m] = value
    else:
        out.pop(m, None)


class FockState:
    """Immutable finite sum ``sum_m c_m z^m`` with :class:`SuperPoly` coefficients."""

    __slots__ = ("_terms",)

    _terms: dict[ZMono, SuperPoly]

    def __init__(self, terms: Mapping[ZMono, SuperPoly | Scalar] | None = None) -> None:
        self._terms = {}
        for m, c in (terms or {}).items():
            poly = SuperPoly.coerce(c)
            if poly:
                self._terms[m] = poly

    @classmethod
    def _wrap(cls, terms: dict[ZMono, SuperPoly]) -> "FockState":
        obj = cls.__new__(cls)
        obj._terms = terms
        return obj

    @classmethod
    def zero(cls) -> "FockState":
        return cls._wrap({})

    @classmethod
    def vacuum(cls) -> "FockState":
        return cls._wrap({VACUUM_MONO: SuperPoly.one()})

    @classmethod
    def monomial(cls, m: ZMono, coeff: SuperPoly | Scalar = 1) -> "FockState":
        return cls({m: coeff})

    def items(self) -> Iterator[tuple[ZMono, SuperPoly]]:
        return iter(self._terms.items())

    @property
    def terms(self) -> Mapping[ZMono, SuperPoly]:
        return dict(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FockState):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __neg__(self) -> "FockState":
        return FockState._wrap({m: -c for m, c in self._terms.items()})

    def __add__(self, other: "FockState") -> "FockState":
        out = dict(self._terms)
        for m, c in other._terms.items():
            _add_term(out, m, c)
        return FockState._wrap(out)

    def __sub__(self, other: "FockState") -> "FockState":
        return self + (-other)

    def scale(self, c: Scalar) -> "FockState":
        if not c:
            return FockState.zero()
        return FockState._wrap({m: v.scale(c) for m, v in self._terms.items()})

    def lmul(self, p: SuperPoly) -> "FockState":
        """Multiply every coefficient on the left by ``p``."""
        return FockState({m: p * v for m, v in self._terms.items()})

    def __rmul__(self, p: SuperPoly | Scalar) -> "FockState":
        if isinstance(p, SuperPoly):
            return self.lmul(p)
        return self.scale(p)

    def map_coefficients(self, fn: Callable[[SuperPoly], SuperPoly]) -> "FockState":
        return FockState({m: fn(v) for m, v in self._terms.items()})

    def grade(self) -> "FockState":
        """Grade involution on the coefficients."""
        return self.map_coefficients(grade_involution)

    def coefficient(self, m: ZMono) -> SuperPoly:
        return self._terms.get(m, SuperPoly.zero())

    def vacuum_component(self) -> SuperPoly:
        return self.coefficient(VACUUM_MONO)

    def weights2(self) -> set[int]:
        return {zmono_weight2(m) for m in self._terms}

    def max_weight2(self) -> int:
        return max(self.weights2(), default=0)

    def truncate2(self, cap2: int) -> "FockState":
        """Drop monomials of doubled weight above ``cap2``."""
        return FockState._wrap(
            {m: c for m, c in self._terms.items() if zmono_weight2(m) <= cap2}
        )

    def truncate(self, cap: Scalar) -> "FockState":
        return self.truncate2(to_doubled(cap))

    def product(self, other: "FockState", cap2: int | None = None) -> "FockState":
        """Product as polynomials in the creation variables.

        Valid for states built from creation operators with even coefficients.
        """
        out: dict[ZMono, SuperPoly] = {}
        for ma, ca in self._terms.items():
            wa = zmono_weight2(ma)
            for mb, cb in other._terms.items():
                if cap2 is not None and wa + zmono_weight2(mb) > cap2:
                    continue
                _add_term(out, zmono_mul(ma, mb), ca * cb)
        return FockState._wrap(out)

    def __repr__(self) -> str:
        body = " + ".join(f"({c!r})*{format_zmono(m)}" for m, c in sorted(self._terms.items()))
        return f"FockState({body or '0'})"


def vacuum_component(s: FockState) -> SuperPoly:
    """``⟨0|s⟩``, the coefficient of the empty monomial."""
    return s.vacuum_component()


def _apply(
    action: Callable[[ZMono], NumAction], s: FockState, graded: bool
) -> FockState:
    out: dict[ZMono, SuperPoly] = {}
    for m, c in s.items():
        coeff = grade_involution(c) if graded else c
        for m2, x in action(m):
            _add_term(out, m2, coeff.scale(x))
    return FockState._wrap(out)


def apply_phi(u2: int, s: FockState, graded: bool = False) -> FockState:
    """``φ_{u2/2} s``; ``graded`` treats ``φ`` as an odd operator."""
    _check_half_index(u2)
    return _apply(lambda m: _phi_on(u2, m), s, graded)


def apply_J(n: int, s: FockState, cap: Scalar | None = None) -> FockState:
    """Integer current mode ``J_n s``; zero for even ``n``."""
    if n % 2 == 0:
        return FockState.zero()
    out = _apply(lambda m: _current_on(n, m), s, False)
    return out if cap is None else out.truncate(cap)


def apply_theta_mode(
    j2: int, s: FockState, cap: Scalar | None = None, graded: bool = True
) -> FockState:
    """Half-integer current mode ``J_{j2/2} s``, an odd operator."""
    _check_half_index(j2)
    out = _apply(lambda m: _theta_on(j2, m), s, graded)
    return out if cap is None else out.truncate(cap)


def phi_field_coefficient(exponent: Scalar, s: FockState, graded: bool = False) -> FockState:
    """Coefficient of ``z^exponent`` in ``φ(z) s``, i.e. ``φ_{exponent+1/2} s``."""
    e = Fraction(exponent)
    if e.denominator != 1:
        raise ValidationError(f"φ(z) carries integer powers of z, got {e}")
    return apply_phi(2 * int(e) + 1, s, graded)


def apply_V(
    sign: Literal["+", "-"],
    s: FockState,
    inverse: bool = False,
    cap: Scalar | None = None,
    window: tuple[Scalar, Scalar] | None = None,
) -> LaurentPoly[FockState]:
    """``V_±(z)^{±1} s`` as a Laurent polynomial in ``z``.

    ``V_+`` lowers weight and terminates on its own. ``V_-`` needs either a
    weight ``cap`` on the output or a window whose upper end bounds the power
    of ``z``; with a window the result carries precision ``hi + 1``.
    """
    creation = sign == "-"
    if creation:
        coef = 2 if inverse else -2
    else:
        coef = -2 if inverse else 2
    lo = None if window is None else Fraction(window[0])
    hi = None if window is None else Fraction(window[1])
    if creation and hi is None and cap is None:
        raise WindowError("V_-(z) needs a weight cap or an upper z-power")
    cap2 = None if cap is None else to_doubled(cap)
    coeffs: dict[int, dict[ZMono, SuperPoly]] = {}
    for m, c in s.items():
        w2 = zmono_weight2(m)
        if creation:
            limits = []
            if hi is not None:
                limits.append(floor(hi))
            if cap2 is not None:
                limits.append((cap2 - w2) // 2)
            r_max = min(limits)
        else:
            r_max = w2 // 2
        if r_max < 0:
            continue
        for r, state in enumerate(_exp_current_series(m, coef, creation, r_max)):
            e = r if creation else -r
            if lo is not None and hi is not None and not lo <= e <= hi:
                continue
            target = coeffs.setdefault(e, {})
            for m2, x in state:
                _add_term(target, m2, c.scale(x))
    prec = floor(hi) + 1 if creation and hi is not None else None
    return LaurentPoly(
        {e: FockState._wrap(t) for e, t in coeffs.items()}, prec, FockState.zero()
    )


def basis_ket(partition: OddPartition) -> tuple[FockState, Fraction]:
    """Unnormalized ``φ_{λ_1/2}⋯φ_{λ_k/2}|0⟩ = z_λ`` and ``D_λ``."""
    return FockState.monomial(zmono_from_partition(partition)), d_squared(partition)


def dual_pairing(partition: OddPartition, s: FockState) -> SuperPoly:
    """Unnormalized ``⟨0|φ_{-λ_k/2}⋯φ_{-λ_1/2} s⟩``; ``⟨λ|λ⟩`` equals ``D_λ``."""
    state = s
    for part in partition.parts:
        state = apply_phi(-part, state)
        if not state:
            return SuperPoly.zero()
    return state.vacuum_component()


def apply_gamma(tv: TimeVector, s: FockState, cap: Scalar | None = None) -> FockState:
    """``Γ(t) s = e^{H(t)} e^{χ(t)} s``.

    ``e^χ`` is the product of the mutually commuting nilpotent factors
    ``1 + t_k J_k`` over half-integer ``k``; ``e^H`` is a product of
    terminating exponentials ``exp(t_j J_j)``. ``cap`` truncates the
    coefficient polynomials by weight.
    """
    cap2 = None if cap is None else to_doubled(cap)

    def clip(state: FockState) -> FockState:
        if cap2 is None:
            return state
        return state.map_coefficients(lambda c: truncate_weight2(c, cap2))

    state = s
    top = s.max_weight2()
    for k2 in sorted(tv.odd):
        tk = tv.odd[k2]
        if not tk or k2 > top:
            continue
        state = state + clip(apply_theta_mode(k2, state).lmul(tk))
    for j in sorted(tv.even):
        tj = tv.even[j]
        if not tj or 2 * j > top:
            continue
        term = state
        n = 1
        while True:
            term = clip(apply_J(j, term).lmul(tj).scale(Fraction(1, n)))
            if not term:
                break
            state = state + term
            n += 1
    return state


def coefficient_poly(text: str) -> SuperPoly:
    """Exact coefficient text as a polynomial in the formal parameter ``a``."""
    factor, has_a = split_coefficient(text)
    if has_a:
        return SuperPoly.gen("a", 1).scale(factor)
    return SuperPoly.const(factor)


def group_pair_coefficients(
    spec: GroupElementSpec, cap: Scalar
) -> dict[tuple[int, int], SuperPoly]:
    """Ordered-pair form ``C`` with ``g|0⟩ = exp(sum C_{ij} z_i z_j)``."""
    cap2 = to_doubled(cap)
    pairs: dict[tuple[int, int], SuperPoly] = {}
    if spec.kind == "quadratic_creation":
        for key, value in spec.entries.items():
            n, m = (int(piece) for piece in key.split(","))
            if n + m > cap2:
                continue
            coeff = coefficient_poly(value)
            pairs[(n, m)] = coeff
            pairs[(m, n)] = coeff
    elif spec.kind == "diagonal_pair":
        for key, value in spec.entries.items():
            k = int(key)
            if 2 * k <= cap2:
                pairs[(k, k)] = coefficient_poly(value)
    elif spec.kind == "soliton":
        assert spec.p is not None and spec.q is not None and spec.a is not None
        p, q = Fraction(spec.p), Fraction(spec.q)
        half_a = coefficient_poly(spec.a).scale(Fraction(1, 2))
        for i2 in range(1, cap2 + 1, 2):
            for j2 in range(1, cap2 - i2 + 1, 2):
                pairs[(i2, j2)] = half_a.scale(p ** ((i2 - 1) // 2) * q ** ((j2 - 1) // 2))
    return pairs


def build_group_state(spec: GroupElementSpec, cap: Scalar) -> FockState:
    """``g|0⟩`` truncated to weight ``cap``."""
    cap2 = to_doubled(cap)
    quadratic: dict[ZMono, SuperPoly] = {}
    for (i2, j2), coeff in group_pair_coefficients(spec, cap).items():
        _add_term(quadratic, zmono_mul(((i2, 1),), ((j2, 1),)), coeff)
    form = FockState._wrap(quadratic)
    result = FockState.vacuum()
    term = FockState.vacuum()
    n = 1
    while True:
        term = term.product(form, cap2).scale(Fraction(1, n))
        if not term:
            break
        result = result + term
        n += 1
    logger.debug(f"g|0⟩ for {spec.label()} to weight {cap}: {len(result)} monomials")
    return result


Tensor = dict[tuple[ZMono, ZMono], SuperPoly]


def hirota_state_check(v: FockState, cap: Scalar) -> Tensor:
    """Nonzero components of ``S(v ⊗ v)``, ``S = sum (-1)^(k+1/2) φ_k ⊗ φ_{-k}``.

    Only components of combined weight at most ``cap`` are kept; they are
    exact when ``v`` is known up to weight ``cap``.
    """
    cap2 = to_doubled(cap)
    out: Tensor = {}
    for k2 in range(-cap2, cap2 + 1):
        if k2 % 2 == 0:
            continue
        sign = -1 if ((k2 + 1) // 2) % 2 else 1
        left = apply_phi(k2, v)
        right = apply_phi(-k2, v)
        for m1, c1 in left.items():
            w1 = zmono_weight2(m1)
            for m2, c2 in right.items():
                if w1 + zmono_weight2(m2) > cap2:
                    continue
                key = (m1, m2)
                value = out.get(key, SuperPoly.zero()) + (c1 * c2).scale(sign)
                if value:
                    out[key] = value
                else:
                    out.pop(key, None)
    return out


def hirota_check(spec: GroupElementSpec, cap: Scalar) -> Tensor:
    """Residual of the Fock-space bilinear identity for ``g|0⟩``."""
    residual = hirota_state_check(build_group_state(spec, cap), cap)
    if residual:
        logger.warning(f"Bilinear residual of {spec.label()} has {len(residual)} components")
    return residual


def _ball_moves(parts: tuple[int, ...]) -> Iterator[tuple[tuple[int, ...], int]]:
    yield tuple(sorted(parts + (1, 1), reverse=True)), 1
    seen: dict[int, int] = {}
    for part in parts:
        seen[part] = seen.get(part, 0) + 1
    for part, m in seen.items():
        moved = list(parts)
        moved.remove(part)
        yield tuple(sorted(moved + [part + 2], reverse=True)), m


def ball_process_count(mu: OddPartition, lam: OddPartition) -> int:
    """Number of event sequences taking configuration ``mu`` to ``lam``."""
    diff = lam.weight - mu.weight
    if diff < 0 or diff % 2:
        return 0
    level: dict[tuple[int, ...], int] = {mu.parts: 1}
    for _ in range(diff // 2):
        following: dict[tuple[int, ...], int] = {}
        for parts, ways in level.items():
            for succ, m in _ball_moves(parts):
                if len(succ) > lam.length:
                    continue
                following[succ] = following.get(succ, 0) + ways * m
        level = following
    return level.get(lam.parts, 0)


def ball_process_bruteforce(mu: OddPartition, lam: OddPartition) -> int:
    """Same count by walking every sequence of individually labelled balls."""
    diff = lam.weight - mu.weight
    if diff < 0 or diff % 2:
        return 0

    def walk(balls: tuple[int, ...], remaining: int) -> int:
        if remaining == 0:
            return 1 if tuple(sorted(balls, reverse=True)) == lam.parts else 0
        if len(balls) > lam.length:
            return 0
        total = walk(balls + (1, 1), remaining - 1)
        for i in range(len(balls)):
            total += walk(balls[:i] + (balls[i] + 2,) + balls[i + 1 :], remaining - 1)
        return total

    return walk(mu.parts, diff // 2)


def basis_states(max_weight2: int) -> list[FockState]:
    """Monomial states of doubled weight at most ``max_weight2``."""
    return [
        FockState.monomial(zmono_from_partition(partition))
        for w2 in range(max_weight2 + 1)
        for partition in enumerate_fock_basis(w2)
    ]


def _half_indices(max_index2: int) -> list[int]:
    return [k for k in range(-max_index2, max_index2 + 1) if k % 2]


def _integer_modes(max_index2: int) -> list[int]:
    top = max_index2 // 2
    return [n for n in range(-top, top + 1) if n % 2]


def _failure(label: str, state: FockState, lhs: FockState, rhs: FockState) -> str:
    return f"{label} on {next(iter(state.terms), ())}: {lhs!r} != {rhs!r}"


def boson_relation_failures(max_weight2: int = 10, max_index2: int = 7) -> list[str]:
    """``φ_iφ_j - φ_jφ_i = (-1)^(j-1/2) δ_{i,-j}`` on basis states."""
    failures = []
    indices = _half_indices(max_index2)
    for s in basis_states(max_weight2):
        for i2 in indices:
            for j2 in indices:
                lhs = apply_phi(i2, apply_phi(j2, s)) - apply_phi(j2, apply_phi(i2, s))
                rhs = s.scale(-1 if ((j2 - 1) // 2) % 2 else 1) if i2 == -j2 else FockState.zero()
                if lhs != rhs:
                    failures.append(_failure(f"[φ_{i2}/2, φ_{j2}/2]", s, lhs, rhs))
    return failures


def heisenberg_failures(max_weight2: int = 10, max_index2: int = 7) -> list[str]:
    """``[J_n, J_m] = -(n/2) δ_{m,-n}`` for odd integers."""
    failures = []
    modes = _integer_modes(max_index2)
    for s in basis_states(max_weight2):
        for n in modes:
            for m in modes:
                lhs = apply_J(n, apply_J(m, s)) - apply_J(m, apply_J(n, s))
                rhs = s.scale(Fraction(-n, 2)) if m == -n else FockState.zero()
                if lhs != rhs:
                    failures.append(_failure(f"[J_{n}, J_{m}]", s, lhs, rhs))
    return failures


def current_phi_failures(max_weight2: int = 10, max_index2: int = 7) -> list[str]:
    """``[J_n, φ(z)] = z^n φ(z)``, mode by mode ``[J_n, φ_j] = φ_{j-n}``."""
    failures = []
    for s in basis_states(max_weight2):
        for n in _integer_modes(max_index2):
            for j2 in _half_indices(max_index2):
                lhs = apply_J(n, apply_phi(j2, s)) - apply_phi(j2, apply_J(n, s))
                rhs = apply_phi(j2 - 2 * n, s)
                if lhs != rhs:
                    failures.append(_failure(f"[J_{n}, φ_{j2}/2]", s, lhs, rhs))
    return failures


def supercurrent_failures(max_weight2: int = 10, max_index2: int = 7) -> list[str]:
    """``J_jJ_k + J_kJ_j = (-1)^(j-1/2) (j/2) δ_{j,-k}`` for half-integers."""
    failures = []
    indices = _half_indices(max_index2)
    for s in basis_states(max_weight2):
        for j2 in indices:
            for k2 in indices:
                lhs = apply_theta_mode(j2, apply_theta_mode(k2, s)) + apply_theta_mode(
                    k2, apply_theta_mode(j2, s)
                )
                if j2 == -k2:
                    sign = -1 if ((j2 - 1) // 2) % 2 else 1
                    rhs = s.scale(Fraction(sign * j2, 4))
                else:
                    rhs = FockState.zero()
                if lhs != rhs:
                    failures.append(_failure(f"{{J_{j2}/2, J_{k2}/2}}", s, lhs, rhs))
    return failures


def theta_commutation_failures(max_weight2: int = 10, max_index2: int = 7) -> list[str]:
    """``[J_n, J_k] = 0`` for odd integer ``n`` and half-integer ``k``."""
    failures = []
    for s in basis_states(max_weight2):
        for n in _integer_modes(max_index2):
            for k2 in _half_indices(max_index2):
                lhs = apply_J(n, apply_theta_mode(k2, s)) - apply_theta_mode(k2, apply_J(n, s))
                if lhs:
                    failures.append(_failure(f"[J_{n}, J_{k2}/2]", s, lhs, FockState.zero()))
    return failures


def algebra_failures(max_weight2: int = 10, max_index2: int = 7) -> dict[str, list[str]]:
    """Every operator relation, keyed by name."""
    return {
        "boson": boson_relation_failures(max_weight2, max_index2),
        "heisenberg": heisenberg_failures(max_weight2, max_index2),
        "current_phi": current_phi_failures(max_weight2, max_index2),
        "supercurrent": supercurrent_failures(max_weight2, max_index2),
        "theta_commutes": theta_commutation_failures(max_weight2, max_index2),
    }


FieldKind = Literal["phi", "theta", "vertex"]


@dataclass(frozen=True)
class Field:
    """A field inserted at ``z = point * w^(position-1)`` in a correlator.

    ``vertex`` is the super vertex ``V_-(z)V_+(z) + ζ φ(z)`` with odd tag ``ζ``.
    """

    kind: FieldKind
    point: Fraction
    tag: SuperPoly | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "point", Fraction(self.point))
        if self.point == 0:
            raise ValidationError("Correlator points must be nonzero")
        if self.tag is not None:
            if self.kind != "vertex":
                raise ValidationError("Only vertex fields carry a tag")
            if self.tag and self.tag.parity() != 1:
                raise ValidationError("Vertex tags must be Grassmann-odd")


TermMode = Literal["plain", "odd", "tagged"]


def _phi_terms(m: ZMono, max_raise2: int) -> Iterator[tuple[ZMono, int, Fraction]]:
    for index, _ in m:
        for m2, x in _phi_on(-index, m):
            yield m2, (-index - 1) // 2, x
    for u2 in range(1, max_raise2 + 1, 2):
        yield _raise(m, u2), (u2 - 1) // 2, Fraction(1)


def _field_terms(
    field: Field, m: ZMono, max_raise2: int
) -> Iterator[tuple[ZMono, int, Fraction, TermMode]]:
    """Terms ``(monomial, power of z, factor, mode)`` of a field on ``m``."""
    w2 = zmono_weight2(m)
    if field.kind == "phi":
        for m2, power, x in _phi_terms(m, max_raise2):
            yield m2, power, x, "plain"
        return
    if field.kind == "theta":
        lo = -w2 if w2 % 2 else -w2 + 1
        for u2 in range(lo, max_raise2 + 1, 2):
            for m2, x in _theta_on(-u2, m):
                yield m2, (u2 - 1) // 2, 2 * x, "odd"
        return
    lowering = _exp_current_series(m, 2, False, w2 // 2)
    for p, state in enumerate(lowering):
        q_max = max_raise2 // 2 + p
        if q_max < 0:
            continue
        for m1, x1 in state:
            for q, raised in enumerate(_exp_current_series(m1, -2, True, q_max)):
                for m2, x2 in raised:
                    yield m2, q - p, x1 * x2, "plain"
    if field.tag:
        for m2, power, x in _phi_terms(m, max_raise2):
            yield m2, power, x, "tagged"


def correlator_series(fields: Sequence[Field], order: int) -> LaurentPoly[SuperPoly]:
    """``⟨0|F_1(z_1)⋯F_n(z_n)|0⟩`` at ``z_b = ρ_b w^(b-1)`` up to ``w^order``.

    Fields are applied right to left. After field ``b`` the remaining fields
    can lower the ``w`` exponent by at most ``(b-2) W + (b-1)(b-2)/4`` for a
    state of weight ``W``; terms beyond that are dropped and creation is
    bounded accordingly.
    """
    n = len(fields)
    states: dict[tuple[int, ZMono], SuperPoly] = {(0, VACUUM_MONO): SuperPoly.one()}
    for b in range(n, 0, -1):
        field = fields[b - 1]
        slack = Fraction((b - 2) * (b - 1), 4)
        following: dict[tuple[int, ZMono], SuperPoly] = {}
        for (e, m), c in states.items():
            weight = Fraction(zmono_weight2(m), 2)
            if b == 1:
                max_raise2 = 0
            else:
                max_raise2 = floor(
                    2 * (order + slack + (b - 2) * weight - e + Fraction(b - 1, 2))
                )
            for m2, power, x, mode in _field_terms(field, m, max_raise2):
                if b == 1 and m2:
                    continue
                e2 = e + (b - 1) * power
                if e2 - (b - 2) * Fraction(zmono_weight2(m2), 2) - slack > order:
                    continue
                coeff = c if mode == "plain" else grade_involution(c)
                if mode == "tagged":
                    assert field.tag is not None
                    coeff = field.tag * coeff
                coeff = coeff.scale(x * field.point**power)
                key = (e2, m2)
                value = following.get(key, SuperPoly.zero()) + coeff
                if value:
                    following[key] = value
                else:
                    following.pop(key, None)
        states = following
        logger.debug(f"Correlator after field {b}: {len(states)} partial terms")
    return LaurentPoly(
        {e: c for (e, m), c in states.items() if not m}, order + 1, SuperPoly.zero()
    )
