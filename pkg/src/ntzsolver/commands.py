"""Command implementations shared by the HTTP service and the CLI.

Each run_* function takes a validated request model and returns a
response model whose `status` field encodes the outcome: "ok" or
"no-trade" on success, "config-error", "not-concave",
"tolerance-breach" or "not-converged" on failure. Solver failures are
reported in-band (not as transport errors) so clients can map them to
exit codes and still receive partial results.
"""

from ntzsolver.closed_form import (
    initial_trade,
    ntz_bounds,
    ntz_width,
    optimal_path,
    rational_pstar,
    solve_plateau,
)
from ntzsolver.errors import DegenerateZone, NotConcave, NotConverged
from ntzsolver.forecast import forecast_limit
from ntzsolver.scaling import fit_scaling_exponent
from ntzsolver.service.models import (
    SimulateRequest,
    SimulateResponse,
    SolveRequest,
    SolveResponse,
    SweepRequest,
    SweepResponse,
    VerifyRequest,
    VerifyResponse,
)
from ntzsolver.simulator import RevisionScenario, run_simulation
from ntzsolver.svgplot import render_simulation_svg, render_sweep_svg
from ntzsolver.tv_oracle import estimate_ntz, kkt_residual, optimize_path
from ntzsolver.utility import CostModel, utility_direct


def _effective_c(cost: CostModel) -> float:
    # the plateau tangent condition prices a roundtrip at 2c; with split
    # rates the roundtrip is c_now + c_mean, so the equivalent uniform
    # rate is their mean (consistent with the ntz_bounds threshold)
    return 0.5 * (cost.c_now + cost.c_mean)


def run_solve(req: SolveRequest) -> SolveResponse:
    try:
        profile = req.profile.build()
        cost = req.cost.build()
    except ValueError as exc:
        return SolveResponse(status="config-error", error=str(exc))
    k = req.risk.k
    try:
        solution = solve_plateau(profile, _effective_c(cost), k)
        zone = ntz_bounds(profile, cost, k)
        path = optimal_path(profile, req.p0, cost, k, req.grid.times())
    except NotConcave as exc:
        return SolveResponse(status="not-concave", error=str(exc))
    except ValueError as exc:
        return SolveResponse(status="config-error", error=str(exc))
    breakdown = utility_direct(path, profile, cost, k, terminal_liquidation=True)
    return SolveResponse(
        status="no-trade" if solution.is_no_trade else "ok",
        solution=solution.to_dict(),
        ntz=zone.to_dict(),
        initial_position=float(req.p0),
        path_times=[float(t) for t in path.times],
        path_positions=[float(p) for p in path.positions],
        path_utility=breakdown.to_dict(),
    )


def run_verify(req: VerifyRequest) -> VerifyResponse:
    try:
        profile = req.profile.build()
        cost = req.cost.build()
        config = req.oracle.build()
    except ValueError as exc:
        return VerifyResponse(status="config-error", error=str(exc))
    k = req.risk.k
    p0 = float(req.p0)

    closed: dict = {"applicable": True}
    try:
        solution = solve_plateau(profile, _effective_c(cost), k)
        zone = ntz_bounds(profile, cost, k)
        closed["solution"] = solution.to_dict()
        closed["ntz"] = zone.to_dict()
        closed["first_trade"] = initial_trade(p0, zone)
    except NotConcave as exc:
        closed = {"applicable": False, "reason": str(exc)}
        solution = None
        zone = None

    try:
        path, breakdown = optimize_path(profile, p0, cost, k, config)
    except NotConverged as exc:
        report = {
            "closed_form": closed,
            "oracle": {"last_rel_change": exc.last_rel_change},
        }
        return VerifyResponse(status="not-converged", error=str(exc), report=report)
    except ValueError as exc:
        return VerifyResponse(status="config-error", error=str(exc))

    oracle: dict = {
        "first_trade": float(path.positions[0]) - p0,
        "utility": breakdown.to_dict(),
        "kkt_residual": kkt_residual(profile, path, cost, k, config),
    }
    try:
        oracle_zone = estimate_ntz(profile, cost, k, config)
        oracle["ntz"] = oracle_zone.to_dict()
    except DegenerateZone as exc:
        oracle_zone = exc.zone
        oracle["ntz"] = oracle_zone.to_dict()
        oracle["ntz_degenerate"] = True

    report = {"closed_form": closed, "oracle": oracle}
    if not closed["applicable"]:
        # no closed form to compare against: the oracle result stands alone
        return VerifyResponse(status="ok", report=report)

    # reference: the closed-form plan sampled on the oracle grid and
    # priced under the same discrete functional (isolates solver error
    # from discretization error in the analytic utility)
    sampled = optimal_path(profile, p0, cost, k, path.times)
    sampled_value = utility_direct(
        sampled, profile, cost, k, terminal_liquidation=config.terminal_liquidation
    ).total
    u_scale = max(abs(solution.utility), 1e-30)
    deltas = {
        "first_trade_abs": abs(oracle["first_trade"] - closed["first_trade"]),
        "utility_rel": abs(breakdown.total - solution.utility) / u_scale,
        "utility_grid_rel": abs(breakdown.total - sampled_value)
        / max(abs(sampled_value), 1e-30),
        "ntz_low_abs": abs(oracle_zone.low - zone.low),
        "ntz_high_abs": abs(oracle_zone.high - zone.high),
    }
    report["grid_reference_utility"] = sampled_value
    report["deltas"] = deltas
    tol = req.tolerances
    report["tolerances"] = tol.model_dump()
    ok = (
        deltas["first_trade_abs"] <= tol.first_trade_abs
        and deltas["utility_rel"] <= tol.utility_rel
        and deltas["ntz_low_abs"] <= tol.ntz_abs
        and deltas["ntz_high_abs"] <= tol.ntz_abs
    )
    return VerifyResponse(status="ok" if ok else "tolerance-breach", report=report)


def run_sweep(req: SweepRequest) -> SweepResponse:
    try:
        profile = req.profile.build()
        costs = req.sweep.costs()
    except ValueError as exc:
        return SweepResponse(status="config-error", error=str(exc))
    if profile.kind != "Rational":
        return SweepResponse(
            status="config-error",
            error="sweep requires a Rational profile (exact width formula)",
        )
    k = req.risk.k
    f_inf = abs(profile.f_inf)
    gamma = profile.gamma
    strict = req.strict or req.sweep.strict
    saturated = [c for c in costs if c >= f_inf / 2.0]
    if strict and saturated:
        return SweepResponse(
            status="config-error",
            error=f"strict mode: {len(saturated)} cost point(s) >= f_inf/2 "
            "are in the saturated no-trade regime",
        )

    rows = []
    widths = []
    for c in costs:
        exact, _ = ntz_width(f_inf, gamma, c, k)
        rows.append(
            {
                "c": c,
                "p_star": rational_pstar(f_inf, gamma, c, k),
                "ntz_width_exact": exact,
            }
        )
        widths.append(exact)
    try:
        slope, stderr = fit_scaling_exponent(costs, widths)
    except ValueError as exc:
        return SweepResponse(status="config-error", error=str(exc), rows=rows)

    oracle_slope = None
    oracle_stderr = None
    oracle_widths = None
    if req.sweep.include_oracle:
        config = req.oracle.build()
        oracle_widths = []
        for row in rows:
            zone = estimate_ntz(profile, CostModel(row["c"]), k, config)
            row["ntz_width_oracle"] = zone.high - zone.low
            oracle_widths.append(row["ntz_width_oracle"])
        try:
            oracle_slope, oracle_stderr = fit_scaling_exponent(costs, oracle_widths)
        except ValueError as exc:
            return SweepResponse(status="config-error", error=str(exc), rows=rows)

    svg = render_sweep_svg(costs, widths, oracle_widths=oracle_widths, slope=slope)
    return SweepResponse(
        status="ok",
        rows=rows,
        fitted_slope=slope,
        fit_stderr=stderr,
        oracle_slope=oracle_slope,
        oracle_stderr=oracle_stderr,
        svg=svg,
    )


def run_simulate(req: SimulateRequest) -> SimulateResponse:
    try:
        profile = req.profile.build()
        cost = req.cost.build()
        sc = req.scenario
        rev_target = sc.rev_target
        if rev_target is None:
            rev_target = forecast_limit(profile)
        scenario = RevisionScenario(
            kind=sc.kind,
            schedule=[tuple(entry) for entry in sc.schedule],
            rev_rate=sc.rev_rate,
            rev_target=rev_target,
            rev_vol=sc.rev_vol,
            seed=sc.seed,
        )
        record = run_simulation(
            scenario, profile, req.p0, cost, req.risk.k, dt=sc.dt, steps=sc.steps
        )
    except ValueError as exc:
        return SimulateResponse(status="config-error", error=str(exc))
    columns = {
        "t": [float(v) for v in record.times],
        "f_inf": [float(v) for v in record.f_inf],
        "ntz_low": [float(v) for v in record.ntz_low],
        "ntz_high": [float(v) for v in record.ntz_high],
        "position": [float(v) for v in record.position],
        "trade": [float(v) for v in record.trade],
        "step_cost": [float(v) for v in record.step_cost],
    }
    svg = None
    if len(record.times) > 0:
        svg = render_simulation_svg(
            record.times, record.ntz_low, record.ntz_high, record.position
        )
    return SimulateResponse(
        status=record.status, columns=columns, totals=record.totals(), svg=svg
    )
