"""Command-line front end: solve, verify, sweep, simulate.

The CLI is a thin client over the HTTP service. By default it mounts
the service in-process (no network); --server points it at a running
instance instead. Each command reads one JSON config file, posts the
relevant sections to the matching endpoint, and writes the artifacts
to --out.

Exit codes: 0 success (including a valid "no-trade" answer), 2
malformed config, 3 non-concave profile, 4 verification tolerance
breach, 5 oracle did not converge.
"""

import argparse
import asyncio
import json
import sys
from pathlib import Path

import httpx
import numpy as np

from ntzsolver.simulator import SIM_CSV_HEADER
from ntzsolver.utility import PositionPath, write_path_csv

EXIT_CODES = {
    "ok": 0,
    "no-trade": 0,
    "config-error": 2,
    "not-concave": 3,
    "tolerance-breach": 4,
    "not-converged": 5,
}

UNITS_EPILOG = (
    "units: returns are dimensionless fractions, time is in days, "
    "positions are in notional units, and slippage c is cost per unit "
    "notional traded"
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ntz",
        description="No-trade-zone solver for optimal trading under "
        "proportional slippage and quadratic risk aversion",
        epilog=UNITS_EPILOG,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = [
        ("solve", "closed-form plateau solution, no-trade zone, optimal path"),
        ("verify", "cross-check the closed form against the path optimizer"),
        ("sweep", "no-trade-zone width vs slippage and the scaling exponent"),
        ("simulate", "roll a position against an evolving no-trade zone"),
    ]
    for name, help_text in specs:
        cmd = sub.add_parser(name, help=help_text, epilog=UNITS_EPILOG)
        cmd.add_argument("--config", required=True, help="JSON config file")
        cmd.add_argument("--out", default=".", help="output directory")
        cmd.add_argument(
            "--seed", type=int, default=None, help="override scenario.seed"
        )
        cmd.add_argument(
            "--strict",
            action="store_true",
            help="sweep: fail on cost points in the saturated no-trade regime",
        )
        cmd.add_argument(
            "--server",
            default=None,
            help="base URL of a running service (default: run in-process)",
        )
    return parser


def _load_config(path: str):
    try:
        with open(path) as fh:
            config = json.load(fh)
    except OSError as exc:
        return None, f"cannot read config: {exc}"
    except json.JSONDecodeError as exc:
        return None, f"config is not valid JSON: {exc}"
    if not isinstance(config, dict):
        return None, "config must be a JSON object"
    return config, None


def _pick(config: dict, sections, scalars=("p0",)) -> dict:
    payload = {key: config[key] for key in sections if key in config}
    for key in scalars:
        if key in config:
            payload[key] = config[key]
    return payload


async def _post_in_process(endpoint: str, payload: dict):
    from ntzsolver.service.app import app

    transport = httpx.ASGITransport(app=app)
    async with httpx.AsyncClient(
        transport=transport, base_url="http://ntzsolver", timeout=None
    ) as client:
        resp = await client.post(endpoint, json=payload)
    return resp.status_code, resp.json()


def _post(endpoint: str, payload: dict, server: str | None):
    if server:
        resp = httpx.post(
            server.rstrip("/") + endpoint, json=payload, timeout=600.0
        )
        return resp.status_code, resp.json()
    return asyncio.run(_post_in_process(endpoint, payload))


def _report_http_error(status_code: int, body) -> int:
    if status_code == 422:
        detail = body.get("detail", []) if isinstance(body, dict) else []
        for item in detail:
            loc = ".".join(str(part) for part in item.get("loc", []) if part != "body")
            print(f"config error: {loc}: {item.get('msg')}", file=sys.stderr)
        if not detail:
            print("config error: request rejected", file=sys.stderr)
        return 2
    print(f"service error: HTTP {status_code}: {body}", file=sys.stderr)
    return 2


def _write_json(out_dir: Path, name: str, obj: dict) -> None:
    with open(out_dir / name, "w") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")
    print(f"wrote {out_dir / name}")


def _write_text(out_dir: Path, name: str, text: str) -> None:
    with open(out_dir / name, "w") as fh:
        fh.write(text)
    print(f"wrote {out_dir / name}")


def cmd_solve(args) -> int:
    config, err = _load_config(args.config)
    if err:
        print(err, file=sys.stderr)
        return 2
    payload = _pick(config, ("profile", "cost", "risk", "grid"))
    status_code, body = _post("/solve", payload, args.server)
    if status_code != 200:
        return _report_http_error(status_code, body)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(
        out_dir,
        "solution.json",
        {
            "status": body["status"],
            "error": body.get("error"),
            "solution": body.get("solution"),
            "ntz": body.get("ntz"),
            "initial_position": body.get("initial_position"),
            "path_utility": body.get("path_utility"),
        },
    )
    if body.get("path_times") is not None:
        path = PositionPath(
            times=np.array(body["path_times"]),
            positions=np.array(body["path_positions"]),
            initial_position=body["initial_position"],
        )
        with open(out_dir / "path.csv", "w") as fh:
            write_path_csv(path, fh)
        print(f"wrote {out_dir / 'path.csv'}")
    return EXIT_CODES.get(body["status"], 2)


def cmd_verify(args) -> int:
    config, err = _load_config(args.config)
    if err:
        print(err, file=sys.stderr)
        return 2
    payload = _pick(config, ("profile", "cost", "risk", "oracle", "tolerances"))
    status_code, body = _post("/verify", payload, args.server)
    if status_code != 200:
        return _report_http_error(status_code, body)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(
        out_dir,
        "report.json",
        {
            "status": body["status"],
            "error": body.get("error"),
            "report": body.get("report"),
        },
    )
    return EXIT_CODES.get(body["status"], 2)


def cmd_sweep(args) -> int:
    config, err = _load_config(args.config)
    if err:
        print(err, file=sys.stderr)
        return 2
    payload = _pick(config, ("profile", "risk", "sweep", "oracle"), scalars=())
    if args.strict:
        payload["strict"] = True
    status_code, body = _post("/sweep", payload, args.server)
    if status_code != 200:
        return _report_http_error(status_code, body)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = body.get("rows") or []
    if rows:
        columns = ["c", "p_star", "ntz_width_exact"]
        if any("ntz_width_oracle" in row for row in rows):
            columns.append("ntz_width_oracle")
        with open(out_dir / "sweep.csv", "w") as fh:
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(repr(float(row[col])) for col in columns) + "\n")
        print(f"wrote {out_dir / 'sweep.csv'}")
    if body.get("svg"):
        _write_text(out_dir, "sweep.svg", body["svg"])
    _write_json(
        out_dir,
        "report.json",
        {
            "status": body["status"],
            "error": body.get("error"),
            "fitted_slope": body.get("fitted_slope"),
            "fit_stderr": body.get("fit_stderr"),
            "oracle_slope": body.get("oracle_slope"),
            "oracle_stderr": body.get("oracle_stderr"),
        },
    )
    return EXIT_CODES.get(body["status"], 2)


def cmd_simulate(args) -> int:
    config, err = _load_config(args.config)
    if err:
        print(err, file=sys.stderr)
        return 2
    payload = _pick(config, ("profile", "cost", "risk", "scenario"))
    if args.seed is not None:
        payload.setdefault("scenario", {})["seed"] = args.seed
    status_code, body = _post("/simulate", payload, args.server)
    if status_code != 200:
        return _report_http_error(status_code, body)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    columns = body.get("columns")
    if columns:
        names = SIM_CSV_HEADER.split(",")
        with open(out_dir / "sim.csv", "w") as fh:
            fh.write(SIM_CSV_HEADER + "\n")
            for row in zip(*(columns[name] for name in names)):
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
        print(f"wrote {out_dir / 'sim.csv'}")
    if body.get("svg"):
        _write_text(out_dir, "sim.svg", body["svg"])
    _write_json(
        out_dir,
        "report.json",
        {
            "status": body["status"],
            "error": body.get("error"),
            "totals": body.get("totals"),
        },
    )
    return EXIT_CODES.get(body["status"], 2)


HANDLERS = {
    "solve": cmd_solve,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "simulate": cmd_simulate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return HANDLERS[args.command](args)
    except httpx.HTTPError as exc:
        print(f"service unreachable: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
