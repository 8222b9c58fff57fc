# File: app/services/scenario.py
"""
/app/services/scenario.py
End-to-end clearing run: load, formulate, solve, price, settle, verify
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from datetime import datetime, timezone
from typing import Dict, List, Optional, Sequence

from app.models.archive import RunArchive, ScenarioConfig
from app.models.prices import PriceBook, Scheme, SecurityCharges
from app.models.settlement_report import SettlementReport, Verdict
from app.services.formulation import build_lp
from app.services.lp_export import write_lp
from app.services.lpsolve import check_kkt, solve
from app.services.pricing import ld_value, price_baseline, price_proposed, security_charges
from app.services.settlement import (
    compare_schemes,
    settle,
    social_welfare_check,
    verify_adequacy,
    verify_neutrality,
)
from app.services.system_loader import input_hash, load_system

logger = logging.getLogger(__name__)

LAGRANGIAN = "lagrangian_dual"


def _now() -> str:
    """UTC timestamp; SOURCE_DATE_EPOCH pins it for reproducible archives"""
    epoch = os.getenv("SOURCE_DATE_EPOCH")
    if epoch and epoch.strip().isdigit():
        moment = datetime.fromtimestamp(int(epoch), tz=timezone.utc)
    else:
        moment = datetime.now(timezone.utc)
    return moment.replace(microsecond=0).isoformat()


def _scheme_verdict(scheme: Scheme, verdict: Verdict) -> Verdict:
    return replace(verdict, name=f"{scheme.value}_{verdict.name}")


def run_scenario(config: ScenarioConfig) -> RunArchive:
    """
    Run every selected scheme on one system file.

    Verdict failures are recorded in the archive; the caller decides the exit code.

    Raises:
        ParseError, SystemValidationError, ModelMismatch, SolverError
    """
    config.validate()
    tol = config.tolerances
    timestamps: Dict[str, str] = {}
    if config.record_timestamps:
        timestamps["started"] = _now()

    system = load_system(config.system_path)
    kind = config.model_kind or system.model_kind
    lp = build_lp(system, kind)
    if config.export_lp:
        write_lp(lp, config.export_lp)

    primal, dual, info = solve(lp, method=config.solver_method)
    optimality = check_kkt(lp, primal, dual, tol)

    verdicts: List[Verdict] = []
    dual_value = ld_value(dual, system, kind)
    objective = primal.objective
    verdicts.append(
        Verdict(
            name=LAGRANGIAN,
            passed=abs(dual_value - objective) <= tol.gap * (1.0 + abs(objective)),
            detail=f"dual function {dual_value:.6f} vs objective {objective:.6f}",
        )
    )

    price_books: Dict[Scheme, PriceBook] = {}
    reports: Dict[Scheme, SettlementReport] = {}
    charges: Optional[SecurityCharges] = None
    for scheme in (Scheme.BASELINE, Scheme.PROPOSED):
        if scheme not in config.schemes:
            continue
        if scheme is Scheme.BASELINE:
            book = price_baseline(dual, kind)
            report = settle(primal, book, None, system, kind)
        else:
            book = price_proposed(dual, kind)
            charges = security_charges(dual, primal, system)
            report = settle(primal, book, charges, system, kind)
            verdicts.append(
                _scheme_verdict(scheme, social_welfare_check(report, objective, tol.money))
            )
        price_books[scheme] = book
        reports[scheme] = report
        verdicts.append(_scheme_verdict(scheme, verify_adequacy(report, tol.money)))
        verdicts.append(_scheme_verdict(scheme, verify_neutrality(report, kind, tol.money)))

    comparison = None
    if Scheme.BASELINE in reports and Scheme.PROPOSED in reports:
        comparison = compare_schemes(reports[Scheme.BASELINE], reports[Scheme.PROPOSED], tol.money)

    if config.record_timestamps:
        timestamps["finished"] = _now()

    archive = RunArchive(
        input_hash=input_hash(system),
        system_path=config.system_path,
        model_kind=kind,
        objective=objective,
        solver=info,
        primal=primal,
        dual=dual,
        optimality=optimality,
        price_books=price_books,
        reports=reports,
        verdicts=tuple(verdicts),
        charges=charges,
        comparison=comparison,
        tolerances=tol,
        timestamps=timestamps,
    )
    failed = [v.name for v in archive.verdicts if not v.passed and not v.informational]
    if failed:
        logger.warning(f"{config.system_path}: failing verdicts {', '.join(failed)}")
    logger.info(
        f"Scenario {config.system_path} finished "
        f"({'PASS' if archive.passed else 'FAIL'}, objective {objective:.4f})"
    )
    return archive


def run_batch(configs: Sequence[ScenarioConfig], jobs: int = 1) -> List[RunArchive]:
    """Run independent scenarios, concurrently when jobs > 1; results keep input order"""
    if jobs <= 1 or len(configs) <= 1:
        return [run_scenario(config) for config in configs]
    logger.info(f"Running {len(configs)} scenarios on {jobs} worker threads")
    with ThreadPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(run_scenario, configs))
