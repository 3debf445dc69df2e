"""HTTP front end for the solver: one endpoint per command.

Malformed request bodies fail pydantic validation and return 422.
Solver-level failures (non-concave profile, tolerance breach, no
convergence) return 200 with the failure named in the `status` field
so clients get partial results alongside the diagnosis.
"""

from fastapi import FastAPI

import ntzsolver
from ntzsolver.commands import run_simulate, run_solve, run_sweep, run_verify
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

app = FastAPI(title="ntzsolver")


@app.get("/healthz")
def healthz():
    return {"status": "ok", "version": ntzsolver.__version__}


@app.post("/solve", response_model=SolveResponse)
def solve(req: SolveRequest):
    return run_solve(req)


@app.post("/verify", response_model=VerifyResponse)
def verify(req: VerifyRequest):
    return run_verify(req)


@app.post("/sweep", response_model=SweepResponse)
def sweep(req: SweepRequest):
    return run_sweep(req)


@app.post("/simulate", response_model=SimulateResponse)
def simulate(req: SimulateRequest):
    return run_simulate(req)
