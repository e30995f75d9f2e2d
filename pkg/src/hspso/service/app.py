"""FastAPI application wrapping the optimizer package.

Each endpoint accepts a fully specified experiment, executes it synchronously
and returns both structured results and the exact file payloads the CLI writes
to disk (so client-side files are byte-stable regardless of transport).
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..core import HspsoConfig, TopologySpec
from ..experiments import (
    evaluate_coefficients,
    render_amplitude_csv,
    run_bench,
    run_filter_design,
    run_sweep,
)
from ..filterdesign import FilterParams, amplitude_grid, stability_feasible
from ..graphs import ring, scale_free, small_world, to_edge_list
from ..objectives import get_objective, objective_names
from .schemas import (
    BenchRequest,
    BenchResponse,
    CoefficientSet,
    FilterDesignRequest,
    FilterDesignResponse,
    FilterEvaluateRequest,
    FilterEvaluateResponse,
    GraphRequest,
    GraphResponse,
    HealthResponse,
    ObjectiveInfo,
    RunSettings,
    SummaryRow,
    SweepRequest,
    SweepResponse,
    SweepRowOut,
)


def _topology_spec(req: RunSettings) -> TopologySpec:
    t = req.topology
    return TopologySpec(kind=t.kind, k=t.k, beta=t.beta, m=t.m, pin_seed=t.pin_seed)


def _config(req: RunSettings) -> HspsoConfig:
    return HspsoConfig(
        objective=req.objective,
        dim=req.dim,
        fi_fraction=req.lambda_,
        swarm_size=req.n,
        iterations=req.iters,
        topology=_topology_spec(req),
        constriction=0.729,
        accel=4.1,
        boundary=req.boundary,
        si_draws=req.si_draws,
        noise_mode=req.noise_mode,
    )


def create_app() -> FastAPI:
    app = FastAPI(
        title="hspso",
        version=__version__,
        description="Heterogeneous-strategy particle swarm optimization service",
    )

    @app.exception_handler(ValueError)
    async def value_error_handler(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.get("/objectives", response_model=list[ObjectiveInfo])
    def objectives() -> list[ObjectiveInfo]:
        infos = []
        for name in objective_names():
            spec = get_objective(name)
            infos.append(
                ObjectiveInfo(
                    name=spec.name,
                    dim=spec.dim,
                    lower=float(spec.lower[0]),
                    upper=float(spec.upper[0]),
                    stochastic=spec.stochastic,
                )
            )
        return infos

    @app.post("/bench", response_model=BenchResponse)
    def bench(req: BenchRequest) -> BenchResponse:
        config = _config(req)
        artifacts = run_bench(config, runs=req.runs, base_seed=req.seed, log_every=req.log_every)
        stats = artifacts.stats
        row = SummaryRow(
            objective=artifacts.results[0].config_digest["objective"],
            topology=config.topology.kind,
            k=config.topology.nominal_degree,
            **{"lambda": req.lambda_},
            mean_R=stats.mean_final,
            median_R=stats.median_final,
            std_R=stats.std_final,
            mean_p=stats.mean_discovery,
            runs=stats.run_count,
        )
        return BenchResponse(
            summary=row, runs_csv=artifacts.runs_csv, summary_csv=artifacts.summary_csv
        )

    @app.post("/sweep", response_model=SweepResponse)
    def sweep(req: SweepRequest) -> SweepResponse:
        config = _config(req)
        artifacts = run_sweep(
            config,
            fi_fractions=req.lambda_grid,
            runs=req.runs,
            base_seed=req.seed,
            k_grid=req.k_grid,
        )
        rows = [
            SweepRowOut(
                objective=cell.objective,
                topology=cell.topology.kind,
                k=cell.topology.nominal_degree,
                **{"lambda": cell.fi_fraction},
                mean_R=cell.stats.mean_final,
                median_R=cell.stats.median_final,
                std_R=cell.stats.std_final,
                mean_p=cell.stats.mean_discovery,
                runs=cell.stats.run_count,
                is_argmin_lambda=cell.is_best,
            )
            for cell in artifacts.cells
        ]
        return SweepResponse(rows=rows, sweep_csv=artifacts.sweep_csv)

    @app.post("/filter/design", response_model=FilterDesignResponse)
    def filter_design(req: FilterDesignRequest) -> FilterDesignResponse:
        config = _config(req)
        artifacts = run_filter_design(config, runs=req.runs, base_seed=req.seed)
        return FilterDesignResponse(
            coefficients=CoefficientSet(**artifacts.params.to_dict()),
            j2=artifacts.cost,
            feasible=artifacts.feasible,
            best_run=artifacts.best_run,
            run_costs=[r.final_fitness for r in artifacts.results],
            coefficients_json=artifacts.coefficients_json,
            amplitude_csv=artifacts.amplitude_csv,
        )

    @app.post("/filter/evaluate", response_model=FilterEvaluateResponse)
    def filter_evaluate(req: FilterEvaluateRequest) -> FilterEvaluateResponse:
        params = FilterParams.from_dict(req.coefficients.model_dump())
        j2, feasible = evaluate_coefficients(params)
        amplitude_csv = None
        if req.include_amplitude and feasible:
            amplitude_csv = render_amplitude_csv(amplitude_grid(params))
        return FilterEvaluateResponse(j2=j2, feasible=feasible, amplitude_csv=amplitude_csv)

    @app.post("/graph", response_model=GraphResponse)
    def graph(req: GraphRequest) -> GraphResponse:
        if req.kind == "ring":
            g = ring(req.n, req.k)
        elif req.kind == "scale-free":
            g = scale_free(req.n, req.m, req.seed)
        else:
            g = small_world(req.n, req.k, req.beta, req.seed)
        return GraphResponse(n=g.n, edge_count=g.edge_count, edge_list=to_edge_list(g))

    return app


app = create_app()
