"""
Qudit Pricer API
FastAPI application exposing the European call pricing pipeline
"""

from typing import List, Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from backend import __version__
from backend.models.config import RunConfig
from backend.models.errors import ConfigError, PricingError
from backend.models.register import MAX_TOTAL_DIM
from backend.pricer_cli import (
    CURVE_COLUMNS, GRID_COLUMNS, PATH_COLUMNS,
    cmd_paths, cmd_pdf, cmd_price, cmd_sweep_dim, preflight, with_seed,
)
from backend.utils.config_loader import ConfigLoader

PRESETS = ['paths', 'baseline', 'wide']

# Create FastAPI app
app = FastAPI(
    title="Qudit Pricer API",
    description="Price European call options with qudit amplitude estimation",
    version=__version__
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["http://localhost:8000", "http://127.0.0.1:8000", "*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


class PathsConfig(RunConfig):
    """RunConfig with the sample-path defaults (drift 0.05, volatility 0.2)."""

    drift: float = Field(0.05, description="Drift alpha")
    sigma: float = Field(0.2, gt=0, description="Volatility")


class SweepRow(BaseModel):
    d: int
    analytic: float
    classical_discretized: float
    quantum_mlae: float
    quantum_spread: float
    abs_gap_quantum_classical: float
    encoding_bound: float
    strike_rounding_bias: float
    M: int


class TableResponse(BaseModel):
    seed: Optional[int] = None
    columns: List[str]
    rows: List[List[float]]


class DensityResponse(BaseModel):
    curve: TableResponse
    grid: TableResponse


def _run(action, *args):
    """Call a pipeline command, mapping domain errors to 400 and everything else to 500."""
    try:
        return action(*args)
    except (ConfigError, PricingError) as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=f"Internal error: {str(e)}")


# API Endpoints

@app.get("/", tags=["General"])
async def root():
    """Root endpoint - API information"""
    return {
        "name": "Qudit Pricer API",
        "version": __version__,
        "status": "running",
        "endpoints": {
            "price": "/price",
            "sweep_dim": "/sweep-dim",
            "paths": "/paths",
            "pdf": "/pdf",
            "presets": "/presets/{name}",
            "docs": "/docs"
        }
    }


@app.get("/health", tags=["General"])
async def health_check():
    """Health check endpoint"""
    return {
        "status": "healthy",
        "max_total_dim": MAX_TOTAL_DIM,
        "presets": PRESETS
    }


@app.get("/presets/{name}", response_model=RunConfig, tags=["Config"])
async def get_preset(name: str):
    """Get a shipped configuration preset"""
    if name not in PRESETS:
        raise HTTPException(status_code=404, detail=f"Preset '{name}' not found")
    return _run(lambda: ConfigLoader.build_config(ConfigLoader.load_preset(name)))


@app.post("/price", tags=["Pricing"])
def price(config: RunConfig):
    """
    Price one configuration

    Returns the same report as `pricer_cli price --format json`.
    """
    _run(preflight, config)
    return _run(cmd_price, config)


@app.post("/sweep-dim", response_model=List[SweepRow], tags=["Pricing"])
def sweep_dim(config: RunConfig):
    """Expected payoff estimates for each qudit dimension in `dims` (default 2..dim)"""
    _run(preflight, config, config.sweep_dims())
    return _run(cmd_sweep_dim, with_seed(config))


@app.post("/paths", response_model=TableResponse, tags=["Simulation"])
def paths(config: PathsConfig):
    """Sample GBM price paths as (path_id, t, S_t) rows"""
    config = with_seed(config)
    rows = _run(cmd_paths, config)
    return TableResponse(seed=config.seed, columns=PATH_COLUMNS, rows=rows)


@app.post("/pdf", response_model=DensityResponse, tags=["Simulation"])
def pdf(config: RunConfig):
    """Terminal price density curve and the sampled grid points"""
    data = _run(cmd_pdf, config)
    return DensityResponse(
        curve=TableResponse(columns=CURVE_COLUMNS, rows=data['curve']),
        grid=TableResponse(columns=GRID_COLUMNS, rows=data['grid'])
    )


# Run with: uvicorn main:app --reload
if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="0.0.0.0", port=8000)
