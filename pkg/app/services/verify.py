"""Acceptance suites: named collections of exact identity checks."""

import random
from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from app.core.exceptions import CKPException, ValidationError
from app.core.logging import get_logger
from app.models.schemas import GroupElementSpec, ReportItem, SuiteReport
from app.services import ckp
from app.services.fock import (
    boson_relation_failures,
    current_phi_failures,
    format_zmono,
    heisenberg_failures,
    hirota_check,
    supercurrent_failures,
    theta_commutation_failures,
)
from app.services.matfun import pf_hf_sides, random_points
from app.services.partitions import OddPartition, enumerate_op, odd_partitions_of, q_dimension_check
from app.services.ring import SuperPoly, even_part, first_difference, format_poly
from config import settings

logger = get_logger(__name__)

ItemResult = tuple[bool, str]
Item = tuple[str, Callable[..., ItemResult], tuple[Any, ...]]

DEFAULT_GROUP_ELEMENTS = (
    "identity",
    "quad:1/2,1/2=a",
    "soliton:1/2,1/3,1",
    "diag:U1/2=1/3,U3/2=1/5",
)


@dataclass(frozen=True)
class SuiteParams:
    """Knobs shared by the suites; ``None`` selects each suite's own default."""

    cap: Fraction | None = None
    max_weight: int | None = None
    orders: tuple[int, ...] = (2, 4, 6)
    trials: int = 5
    seed: int = 0
    p: Fraction = Fraction(1, 2)
    q: Fraction = Fraction(1, 3)
    a: str = "1"
    k: int | None = None
    order: int = 6
    group_elements: tuple[str, ...] = field(default=DEFAULT_GROUP_ELEMENTS)

    def cap_or(self, default: Fraction | int) -> Fraction:
        return Fraction(default) if self.cap is None else self.cap

    def weight_or(self, default: int) -> int:
        return default if self.max_weight is None else self.max_weight


def _result(check: ckp.Check | bool, detail: str = "") -> ItemResult:
    if isinstance(check, ckp.Check):
        return check.ok, check.detail
    return bool(check), "" if check else detail


# Item callables are module-level so that worker processes can unpickle them.


def pfhf_item(order: int, seed: int, trial: int) -> ItemResult:
    rng = random.Random(f"{seed}:{order}:{trial}")
    points = random_points(order, rng)
    pf, hf = pf_hf_sides(points)
    return pf == hf, f"points {[str(x) for x in points]}: {pf} != {hf}"


def oracle_item(partition: OddPartition) -> ItemResult:
    return _result(ckp.oracle_check(partition))


def half_time_item(partition: OddPartition) -> ItemResult:
    return _result(ckp.half_time_check(partition))


def example_item(partition: OddPartition, normalization: ckp.Normalization, expected: str, D: int) -> ItemResult:
    cl = ckp.c_lambda_engine(partition)
    value = ckp.normalize(cl.hatC, normalization)
    if partition.length % 2 == 0:
        value = even_part(value)
    if format_poly(value) != expected or cl.D != D:
        return False, f"Ĉ_({partition}) = {format_poly(value)}, D = {cl.D}"
    return True, ""


def orthonormality_item(weight: int) -> ItemResult:
    return _result(ckp.orthonormality_check(odd_partitions_of(weight)))


def pairing_calibration_item(max_weight: int) -> ItemResult:
    partitions = enumerate_op(max_weight)
    for lam in partitions:
        f = ckp.c_lambda_engine(lam).hatC
        for mu in partitions:
            if lam.weight != mu.weight:
                continue
            g = ckp.c_lambda_engine(mu).hatC
            closed = ckp.scalar_product(f, g)
            engine = ckp.scalar_product_engine(f, g)
            if closed != engine:
                return False, f"⟨Ĉ_({lam}), Ĉ_({mu})⟩: closed {closed}, engine {engine}"
    return True, ""


def cl_item(cap: Fraction) -> ItemResult:
    return _result(ckp.cauchy_littlewood_check(cap))


def supermiwa_item(k: int, cap: Fraction, with_tags: bool) -> ItemResult:
    return _result(ckp.super_miwa_cl_check(k, cap, with_tags))


def single_supermiwa_item(partition: OddPartition) -> ItemResult:
    return _result(ckp.c_single_supermiwa(partition))


def parity_item(partition: OddPartition) -> ItemResult:
    return _result(ckp.c_parity_check(partition), f"sign law fails for ({partition})")


def homogeneity_item(partition: OddPartition) -> ItemResult:
    return _result(ckp.homogeneity_check(partition))


def count_item(partition: OddPartition) -> ItemResult:
    return _result(ckp.count_formula_check(partition))


def soliton_item(p: Fraction, q: Fraction, a: str, cap: Fraction) -> ItemResult:
    return _result(ckp.soliton_tau_check(p, q, a, cap))


def heat_kernel_item(cap: Fraction) -> ItemResult:
    return _result(ckp.heat_kernel_check(cap))


def hirota_item(label: str, cap: Fraction) -> ItemResult:
    residual = hirota_check(GroupElementSpec.parse(label), cap)
    if not residual:
        return True, ""
    (left, right), value = min(residual.items())
    return False, f"{format_zmono(left)} ⊗ {format_zmono(right)}: {format_poly(value)}"


def residue_item(label: str, alpha: OddPartition, beta: OddPartition, cap: Fraction) -> ItemResult:
    spec = GroupElementSpec.parse(label)
    residue = ckp.bilinear_residue_check(alpha, beta, spec, cap)
    components = hirota_check(spec, cap)
    if residue.ok != (not components):
        return False, f"residue verdict {residue.ok} disagrees with the component test"
    return _result(residue)


def not_tau_item(partition: OddPartition, cap: Fraction) -> ItemResult:
    return _result(ckp.c_lambda_not_tau_check(partition, cap))


RELATIONS: dict[str, Callable[[int, int], list[str]]] = {
    "boson": boson_relation_failures,
    "heisenberg": heisenberg_failures,
    "current_phi": current_phi_failures,
    "supercurrent": supercurrent_failures,
    "theta_commutes": theta_commutation_failures,
}


def algebra_item(relation: str, max_weight2: int, max_index2: int) -> ItemResult:
    failures = RELATIONS[relation](max_weight2, max_index2)
    return not failures, failures[0] if failures else ""


def qdim_item(cap: Fraction) -> ItemResult:
    return _result(q_dimension_check(cap), f"characters disagree below q^{cap}")


def diagonal_item(label: str, cap: Fraction) -> ItemResult:
    return _result(ckp.diagonal_pattern_check(GroupElementSpec.parse(label), cap))


def resummation_item(label: str, cap: Fraction) -> ItemResult:
    series = ckp.tau_series(GroupElementSpec.parse(label), cap)
    return _result(ckp.tau_from_series(series))


def super_correlator_item(points: tuple[Fraction, ...], order: int) -> ItemResult:
    return _result(ckp.super_correlator_check(points, order))


def pfaffian_correlator_item(points: tuple[Fraction, ...], order: int) -> ItemResult:
    return _result(ckp.pfaffian_correlator_check(points, order))


def wick_item(indices2: tuple[int, ...]) -> ItemResult:
    return _result(ckp.mode_wick_check(indices2))


def skew_item(partition: OddPartition) -> ItemResult:
    return _result(ckp.skew_branching_check(partition))


def wave_engine_item(label: str, alpha: OddPartition, cap: Fraction, lo: int) -> ItemResult:
    return _result(ckp.wave_engine_check(alpha, GroupElementSpec.parse(label), cap, lo))


def normalized_wave_item(label: str, alpha: OddPartition, cap: Fraction) -> ItemResult:
    return _result(ckp.normalized_wave_check(alpha, GroupElementSpec.parse(label), cap))


def vacuum_wave_item(cap: Fraction) -> ItemResult:
    """``g_(1) = ½ e^ξ`` for the identity element."""
    wave = ckp.wave_coefficient(OddPartition((1,)), GroupElementSpec.identity(), cap)
    half_exp = ckp.exp_xi_series(cap)
    for e in sorted(set(wave.exponents()) | set(half_exp.exponents())):
        expected = half_exp.coefficient(e).scale(Fraction(1, 2)) if e >= 0 else SuperPoly.zero()
        diff = first_difference(wave.coefficient(e), expected)
        if diff:
            return False, f"g_(1) at z^{e}: {diff}"
    return True, ""


def _pfhf_items(params: SuiteParams) -> list[Item]:
    return [
        (f"pfhf order {order} trial {trial}", pfhf_item, (order, params.seed, trial))
        for order in params.orders
        for trial in range(params.trials)
    ]


def _oracle_items(params: SuiteParams) -> list[Item]:
    return [(f"oracle ({lam})", oracle_item, (lam,)) for lam in enumerate_op(params.weight_or(10))]


def _example_items(params: SuiteParams) -> list[Item]:
    one, pair = OddPartition((1,)), OddPartition((1, 1))
    items: list[Item] = [
        ("Ĉ_(1) vertex", example_item, (one, "vertex", "t_1/2", 1)),
        ("Ĉ_(1) gamma", example_item, (one, "gamma", "1/2*t_1/2", 1)),
        ("Ĉ_(1,1)", example_item, (pair, "gamma", "t_1", 2)),
    ]
    items += [
        (f"half-time ({lam})", half_time_item, (lam,))
        for lam in enumerate_op(params.weight_or(6))
    ]
    return items


def _orthonormality_items(params: SuiteParams) -> list[Item]:
    max_weight = params.weight_or(9)
    items: list[Item] = [
        (f"orthonormality weight {n}", orthonormality_item, (n,)) for n in range(max_weight + 1)
    ]
    items.append(("pairing calibration", pairing_calibration_item, (min(max_weight, 5),)))
    return items


def _cl_items(params: SuiteParams) -> list[Item]:
    cap = params.cap_or(4)
    return [(f"Cauchy-Littlewood cap {cap}", cl_item, (cap,))]


def _supermiwa_items(params: SuiteParams) -> list[Item]:
    if params.k is not None:
        runs = [(params.k, params.cap_or(2))]
    else:
        runs = [(1, params.cap_or(3)), (2, params.cap_or(2))]
    items: list[Item] = []
    for k, cap in runs:
        items.append((f"super-Miwa k={k} cap {cap}", supermiwa_item, (k, cap, True)))
        items.append((f"Miwa k={k} cap {cap} untagged", supermiwa_item, (k, cap, False)))
    items += [
        (f"single pair ({lam})", single_supermiwa_item, (lam,))
        for lam in enumerate_op(params.weight_or(7))
    ]
    return items


def _parity_items(params: SuiteParams) -> list[Item]:
    partitions = enumerate_op(params.weight_or(9))
    return [(f"parity ({lam})", parity_item, (lam,)) for lam in partitions] + [
        (f"homogeneity ({lam})", homogeneity_item, (lam,)) for lam in partitions
    ]


def _count_items(params: SuiteParams) -> list[Item]:
    return [
        (f"counts ({lam})", count_item, (lam,))
        for lam in enumerate_op(params.weight_or(10), "even_length")
    ]


def _soliton_items(params: SuiteParams) -> list[Item]:
    cap = params.cap_or(4)
    return [
        (f"soliton p={params.p} q={params.q} a={params.a}", soliton_item, (params.p, params.q, params.a, cap)),
        ("heat kernel", heat_kernel_item, (max(cap, Fraction(6)),)),
    ]


def _hirota_items(params: SuiteParams) -> list[Item]:
    cap = params.cap_or(3)
    wave_cap = min(cap, Fraction(2))
    one = OddPartition((1,))
    items: list[Item] = []
    for label in params.group_elements:
        items.append((f"hirota {label}", hirota_item, (label, cap)))
    for label in params.group_elements:
        items.append((f"residue (1),(1) {label}", residue_item, (label, one, one, wave_cap)))
    items.append(("Ĉ_(1,1) is not a tau function", not_tau_item, (OddPartition((1, 1)), cap)))
    return items


def _algebra_items(params: SuiteParams) -> list[Item]:
    max_weight2 = 2 * params.weight_or(5)
    return [(f"algebra {name}", algebra_item, (name, max_weight2, 7)) for name in RELATIONS]


def _qdim_items(params: SuiteParams) -> list[Item]:
    cap = params.cap_or(6)
    return [(f"q-dimension to q^{cap}", qdim_item, (cap,))]


def _ex1_items(params: SuiteParams) -> list[Item]:
    cap = params.cap_or(4)
    diagonal = [label for label in params.group_elements if label.startswith("diag")]
    items: list[Item] = [(f"diagonal pattern {label}", diagonal_item, (label, cap)) for label in diagonal]
    resum_cap = min(cap, Fraction(3))
    items += [
        (f"re-summation {label}", resummation_item, (label, resum_cap))
        for label in params.group_elements
    ]
    return items


def _correlator_items(params: SuiteParams) -> list[Item]:
    order = params.order
    two = (Fraction(1, 2), Fraction(1, 3))
    four = (Fraction(1), Fraction(2), Fraction(1, 3), Fraction(3, 2))
    return [
        ("D_2", super_correlator_item, (two, order)),
        ("D_4", super_correlator_item, (four, order)),
        ("θθ and φφ", pfaffian_correlator_item, (two, order)),
        ("θθθθ and φφφφ", pfaffian_correlator_item, (four, min(order, 4))),
        ("Wick J_1/2 J_-1/2", wick_item, ((1, -1),)),
        ("Wick four modes", wick_item, ((3, 1, -1, -3),)),
        ("Wick six modes", wick_item, ((5, 3, 1, -1, -3, -5),)),
    ]


def _skew_items(params: SuiteParams) -> list[Item]:
    return [(f"branching ({lam})", skew_item, (lam,)) for lam in enumerate_op(params.weight_or(5))]


def _wave_items(params: SuiteParams) -> list[Item]:
    cap = params.cap_or(2)
    one, three = OddPartition((1,)), OddPartition((3,))
    items: list[Item] = [("g_(1) for the identity", vacuum_wave_item, (cap,))]
    for label in ("identity", "quad:1/2,1/2=a"):
        items.append((f"engine g_(1) {label}", wave_engine_item, (label, one, cap, -int(cap))))
        items.append((f"engine g_(3) {label}", wave_engine_item, (label, three, cap, -int(cap))))
        items.append((f"normalized ŵ_(1) {label}", normalized_wave_item, (label, one, cap)))
    return items


SUITES: dict[str, Callable[[SuiteParams], list[Item]]] = {
    "pfhf": _pfhf_items,
    "oracle": _oracle_items,
    "examples": _example_items,
    "orthonormality": _orthonormality_items,
    "cl": _cl_items,
    "supermiwa": _supermiwa_items,
    "parity": _parity_items,
    "counts": _count_items,
    "soliton": _soliton_items,
    "hirota": _hirota_items,
    "algebra": _algebra_items,
    "qdim": _qdim_items,
    "ex1": _ex1_items,
    "correlator": _correlator_items,
    "skew": _skew_items,
    "wave": _wave_items,
}


def run_item(fn: Callable[..., ItemResult], args: tuple[Any, ...]) -> ItemResult:
    try:
        return fn(*args)
    except CKPException as e:
        logger.error(f"{fn.__name__}{args} raised {type(e).__name__}: {e.message}")
        detail = f"{type(e).__name__}: {e.message}"
        return False, f"{detail} ({e.detail})" if e.detail else detail


def _call(payload: tuple[Callable[..., ItemResult], tuple[Any, ...]]) -> ItemResult:
    fn, args = payload
    return run_item(fn, args)


class VerificationService:
    """Runs the acceptance suites and reports one verdict per identity."""

    def __init__(self, workers: int | None = None) -> None:
        self.workers = settings.workers if workers is None else workers
        if self.workers < 1:
            raise ValidationError(f"Parallelism must be at least 1, got {self.workers}")

    @staticmethod
    def suite_names() -> list[str]:
        return [*SUITES, "all"]

    def _execute(self, items: list[Item]) -> list[ItemResult]:
        payloads = [(fn, args) for _, fn, args in items]
        if self.workers == 1 or len(items) < 2:
            return [_call(payload) for payload in payloads]
        with ProcessPoolExecutor(max_workers=self.workers) as pool:
            return list(pool.map(_call, payloads))

    def run(self, suite: str, params: SuiteParams | None = None) -> SuiteReport:
        """Run one suite; results keep the suite's item order."""
        params = params or SuiteParams(seed=settings.seed, trials=settings.pfhf_trials)
        builder = SUITES.get(suite)
        if builder is None:
            raise ValidationError(
                f"Unknown suite: {suite!r}", f"choose from {', '.join(self.suite_names())}"
            )
        items = builder(params)
        logger.info(f"Running suite {suite} with {len(items)} items on {self.workers} workers")
        results = self._execute(items)
        report_items = [
            ReportItem(id=item_id, status="pass" if ok else "fail", detail="" if ok else detail)
            for (item_id, _, _), (ok, detail) in zip(items, results)
        ]
        failed = sum(1 for item in report_items if item.status == "fail")
        if failed:
            logger.warning(f"Suite {suite}: {failed} of {len(report_items)} items failed")
        else:
            logger.info(f"Suite {suite}: all {len(report_items)} items passed")
        cap = None if params.cap is None else str(params.cap)
        return SuiteReport(suite=suite, items=report_items, cap=cap)

    def run_all(self, params: SuiteParams | None = None, fail_fast: bool = True) -> list[SuiteReport]:
        """Every suite in registry order, stopping after the first failing suite."""
        reports = []
        for suite in SUITES:
            report = self.run(suite, params)
            reports.append(report)
            if fail_fast and not report.passed:
                logger.warning(f"Stopping after failing suite {suite}")
                break
        return reports


def suite_items(suite: str, params: SuiteParams | None = None) -> list[str]:
    """Item identifiers of a suite, without running it."""
    builder = SUITES.get(suite)
    if builder is None:
        raise ValidationError(f"Unknown suite: {suite!r}")
    return [item_id for item_id, _, _ in builder(params or SuiteParams())]
