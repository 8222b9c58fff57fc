# File: app/services/settlement.py
"""
/app/services/settlement.py
Per-agent settlement and the adequacy / neutrality checks
"""

import logging
from typing import Dict, List, Optional

from app.models.market_system import MarketSystem, ModelKind
from app.models.prices import PriceBook, Scheme, SecurityCharges
from app.models.settlement_report import (
    CONSUMER_MONEY_FIELDS,
    GENERATOR_MONEY_FIELDS,
    ConsumerRow,
    GeneratorRow,
    SchemeComparison,
    SettlementReport,
    SystemBalance,
    TransmissionRow,
    Verdict,
)
from app.models.solution import PrimalSolution
from app.utils.errors import SchemeMismatch

logger = logging.getLogger(__name__)

ADEQUACY = "revenue_adequacy"
NEUTRALITY = "revenue_neutrality"
SOCIAL_WELFARE = "social_welfare"


def _generator_rows(
    primal: PrimalSolution,
    prices: PriceBook,
    charges: Optional[SecurityCharges],
    system: MarketSystem,
) -> List[GeneratorRow]:
    rows = []
    for gen in system.generators:
        schedule = primal.generator_schedule(gen.id)
        r_dn = schedule.r_dn or 0.0
        revenue_energy = prices.energy[gen.bus] * schedule.g0
        revenue_up = prices.up_reserve_price(gen.bus) * schedule.r_up
        revenue_dn = prices.down_reserve_price(gen.bus) * r_dn
        charge = charges.charge(gen.id) if charges else 0.0
        total_revenue = revenue_energy + revenue_up + revenue_dn - charge
        cost_energy = gen.energy_offer * schedule.g0
        cost_up = gen.up_offer * schedule.r_up
        cost_dn = gen.dn_offer * r_dn
        total_cost = cost_energy + cost_up + cost_dn
        rows.append(
            GeneratorRow(
                id=gen.id,
                revenue_energy=revenue_energy,
                revenue_up=revenue_up,
                revenue_dn=revenue_dn,
                security_charge=charge,
                total_revenue=total_revenue,
                cost_energy=cost_energy,
                cost_up=cost_up,
                cost_dn=cost_dn,
                total_cost=total_cost,
                profit=total_revenue - total_cost,
            )
        )
    return rows


def _consumer_rows(
    primal: PrimalSolution, prices: PriceBook, system: MarketSystem, kind: ModelKind
) -> List[ConsumerRow]:
    rows = []
    for load in system.loads:
        if kind is ModelKind.SINGLE_BUS:
            payment = prices.energy[load.bus] * (load.fixed_demand or 0.0)
            rows.append(
                ConsumerRow(
                    id=load.id,
                    payment_energy=payment,
                    revenue_up=0.0,
                    revenue_dn=0.0,
                    payment=payment,
                    utility=0.0,
                    cost_up=0.0,
                    cost_dn=0.0,
                    total_cost=0.0,
                    profit=-payment,
                    inelastic=True,
                )
            )
            continue

        schedule = primal.load_schedule(load.id)
        payment_energy = prices.energy[load.bus] * schedule.d0
        revenue_up = prices.up_reserve_price(load.bus) * schedule.r_up
        revenue_dn = prices.down_reserve_price(load.bus) * schedule.r_dn
        payment = payment_energy - revenue_up - revenue_dn
        utility = load.utility * schedule.d0
        cost_up = load.up_offer * schedule.r_up
        cost_dn = load.dn_offer * schedule.r_dn
        rows.append(
            ConsumerRow(
                id=load.id,
                payment_energy=payment_energy,
                revenue_up=revenue_up,
                revenue_dn=revenue_dn,
                payment=payment,
                utility=utility,
                cost_up=cost_up,
                cost_dn=cost_dn,
                total_cost=cost_up + cost_dn,
                profit=utility - cost_up - cost_dn - payment,
            )
        )
    return rows


def settle(
    primal: PrimalSolution,
    prices: PriceBook,
    charges: Optional[SecurityCharges],
    system: MarketSystem,
    model_kind: Optional[ModelKind] = None,
) -> SettlementReport:
    """
    Settle every generator, consumer and line at the given prices.

    Raises:
        SchemeMismatch: baseline book with security charges, or a proposed
            book without them
    """
    kind = model_kind or system.model_kind
    if prices.scheme is Scheme.BASELINE and charges is not None:
        raise SchemeMismatch("Security charges do not apply to the baseline scheme")
    if prices.scheme is Scheme.PROPOSED and charges is None:
        raise SchemeMismatch("The proposed scheme needs security charges")

    generators = _generator_rows(primal, prices, charges, system)
    consumers = _consumer_rows(primal, prices, system, kind)

    transmission = []
    if kind is ModelKind.NETWORK:
        for line in system.lines:
            price = prices.transmission.get(line.id, 0.0)
            transmission.append(
                TransmissionRow(
                    line_id=line.id,
                    price=price,
                    capacity=line.capacity,
                    revenue=price * line.capacity,
                )
            )

    consumer_payment = sum(row.payment for row in consumers)
    generation_revenue = sum(row.total_revenue for row in generators)
    transmission_revenue = sum(row.revenue for row in transmission)
    report = SettlementReport(
        scheme=prices.scheme,
        model_kind=kind,
        generators=tuple(generators),
        consumers=tuple(consumers),
        transmission=tuple(transmission),
        balance=SystemBalance(
            consumer_payment=consumer_payment,
            generation_revenue=generation_revenue,
            transmission_revenue=transmission_revenue,
            balance=consumer_payment - generation_revenue - transmission_revenue,
        ),
        security_breakdown=dict(charges.breakdown) if charges else {},
    )
    report.assert_identities()
    logger.info(
        f"Settled {prices.scheme.value} scheme: consumers pay {consumer_payment:.2f}, "
        f"generators receive {generation_revenue:.2f}, lines receive "
        f"{transmission_revenue:.2f}, balance {report.balance.balance:.2f}"
    )
    return report


# =============================================================================
# Verdicts
# =============================================================================


def verify_adequacy(report: SettlementReport, tol: float = 1e-4) -> Verdict:
    """Every generator profit (and, on a network, every consumer profit) >= -tol"""
    offenders = [row.id for row in report.generators if row.profit < -tol]
    if report.model_kind is ModelKind.NETWORK:
        offenders += [row.id for row in report.consumers if row.profit < -tol]
    profits = [row.profit for row in report.generators]
    if report.model_kind is ModelKind.NETWORK:
        profits += [row.profit for row in report.consumers]
    lowest = min(profits) if profits else 0.0
    passed = not offenders
    detail = f"min profit {lowest:.6f}"
    if offenders:
        detail += f"; negative profit for {', '.join(offenders)}"
        logger.warning(f"Revenue adequacy fails ({report.scheme.value}): {detail}")
    return Verdict(
        name=ADEQUACY,
        passed=passed,
        detail=detail,
        offenders=tuple(offenders),
        informational=report.scheme is Scheme.BASELINE,
    )


def verify_neutrality(
    report: SettlementReport, model_kind: Optional[ModelKind] = None, tol: float = 1e-4
) -> Verdict:
    """Consumer payments cover generator revenues (plus line revenues on a network)"""
    kind = model_kind or report.model_kind
    b = report.balance
    if kind is ModelKind.SINGLE_BUS:
        imbalance = b.consumer_payment - b.generation_revenue
    else:
        imbalance = b.consumer_payment - b.generation_revenue - b.transmission_revenue
    passed = abs(imbalance) <= tol
    detail = f"imbalance {imbalance:.6f}"
    if not passed:
        if report.scheme is Scheme.BASELINE:
            logger.info(f"Baseline scheme leaves missing money: {detail}")
        else:
            logger.warning(f"Revenue neutrality fails: {detail}")
    return Verdict(
        name=NEUTRALITY,
        passed=passed,
        detail=detail,
        informational=report.scheme is Scheme.BASELINE,
    )


def social_welfare_check(
    report: SettlementReport, objective: float, tol: float = 1e-4
) -> Verdict:
    """
    Network: agent profits plus line revenue add up to -objective.
    Single bus: generator profits add up to consumer payment minus objective.
    """
    generator_profit = sum(row.profit for row in report.generators)
    if report.model_kind is ModelKind.NETWORK:
        total = (
            generator_profit
            + sum(row.profit for row in report.consumers)
            + report.balance.transmission_revenue
        )
        expected = -objective
    else:
        total = generator_profit
        expected = report.balance.consumer_payment - objective
    passed = abs(total - expected) <= tol * (1.0 + abs(expected))
    return Verdict(
        name=SOCIAL_WELFARE,
        passed=passed,
        detail=f"accounted {total:.6f} vs expected {expected:.6f}",
        informational=report.scheme is Scheme.BASELINE,
    )


# =============================================================================
# Scheme comparison
# =============================================================================


def compare_schemes(
    report_baseline: SettlementReport,
    report_proposed: SettlementReport,
    tol: float = 1e-4,
) -> SchemeComparison:
    """Proposed minus baseline for every money field, plus the missing-money identity"""
    generator_deltas: Dict[str, Dict[str, float]] = {}
    for new in report_proposed.generators:
        old = report_baseline.generator(new.id)
        generator_deltas[new.id] = {
            f: getattr(new, f) - getattr(old, f) for f in GENERATOR_MONEY_FIELDS
        }
    consumer_deltas: Dict[str, Dict[str, float]] = {}
    for new in report_proposed.consumers:
        old = report_baseline.consumer(new.id)
        consumer_deltas[new.id] = {
            f: getattr(new, f) - getattr(old, f) for f in CONSUMER_MONEY_FIELDS
        }

    charge_total = sum(row.security_charge for row in report_proposed.generators)
    missing_money = -report_baseline.balance.balance

    identity_holds = None
    profit_inflation = None
    if report_proposed.model_kind is ModelKind.SINGLE_BUS:
        identity_holds = abs(charge_total - missing_money) <= tol
    else:
        welfare = (
            sum(row.profit for row in report_proposed.generators)
            + sum(row.profit for row in report_proposed.consumers)
            + report_proposed.balance.transmission_revenue
        )
        baseline_total = (
            sum(row.profit for row in report_baseline.generators)
            + sum(row.profit for row in report_baseline.consumers)
            + report_baseline.balance.transmission_revenue
        )
        if abs(welfare) > tol:
            profit_inflation = baseline_total / welfare - 1.0

    return SchemeComparison(
        generator_deltas=generator_deltas,
        consumer_deltas=consumer_deltas,
        balance_delta=report_proposed.balance.balance - report_baseline.balance.balance,
        security_charge_total=charge_total,
        missing_money=missing_money,
        identity_holds=identity_holds,
        profit_inflation=profit_inflation,
    )
