"""FastAPI application exposing every library operation as one endpoint."""
from __future__ import annotations

import numpy as np
from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import __version__
from ..boxnorms import (
    TensorFunction,
    box_norm_ell,
    cut_norm,
    tensor_from_payload,
    tensor_to_payload,
)
from ..decompose import dense_model, dense_model_tensor, kvn_group, kvn_tensor
from ..errors import CubeNormsError, IntervalTooSmallError, InvalidParameterError
from ..experiments import render_csv, run_experiment
from ..groups import GroupFunction, FiniteAbelianGroup, function_from_payload, function_to_payload
from ..interval import interval_from_payload, interval_norm, transfer_kvn
from ..majorants import (
    MajorantSpec,
    PsiReference,
    certify,
    generate_majorant,
)
from ..uniformity import gowers_norm, weak_norm
from . import schemas

KIND_ALIASES = {
    "sparse": "sparse-set",
    "sparse-set": "sparse-set",
    "constant": "constant-one",
    "one": "constant-one",
    "constant-one": "constant-one",
    "perturbed": "perturbed",
    "custom": "custom",
}


def _function(model: schemas.FunctionModel) -> GroupFunction:
    return function_from_payload(model.model_dump())


def _tensor(model: schemas.TensorModel) -> TensorFunction:
    return tensor_from_payload(model.model_dump())


def _any_side(model):
    if isinstance(model, schemas.FunctionModel):
        return _function(model)
    return _tensor(model)


def _side_payload(obj) -> dict:
    if isinstance(obj, GroupFunction):
        return function_to_payload(obj)
    return tensor_to_payload(obj)


def create_app() -> FastAPI:
    app = FastAPI(title="cubenorms", version=__version__)

    @app.exception_handler(CubeNormsError)
    async def _domain_error(request, exc: CubeNormsError):
        extra = {}
        if isinstance(exc, IntervalTooSmallError) and exc.n_min is not None:
            extra["n_min"] = exc.n_min
        body = schemas.ErrorBody(error=type(exc).__name__, detail=str(exc), extra=extra)
        return JSONResponse(status_code=400, content=body.model_dump())

    @app.get("/healthz", response_model=schemas.HealthResponse)
    async def healthz():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/norm", response_model=schemas.NormResponse)
    async def norm(req: schemas.NormRequest):
        res = gowers_norm(_function(req.function), req.s, method=req.method)
        return schemas.NormResponse(value=res.value, method=res.method, cost=res.cost)

    @app.post("/weaknorm", response_model=schemas.WeakNormResponse)
    async def weaknorm(req: schemas.WeakNormRequest):
        est = weak_norm(
            _function(req.function), req.s, mode=req.mode, restarts=req.restarts, seed=req.seed
        )
        witness = est.witness.to_payload() if req.include_witness else None
        return schemas.WeakNormResponse(
            lower_bound=est.lower_bound, exact=est.exact, cost=est.cost, witness=witness
        )

    @app.post("/boxnorm", response_model=schemas.NormResponse)
    async def boxnorm(req: schemas.BoxNormRequest):
        res = box_norm_ell(_tensor(req.tensor), req.ell)
        return schemas.NormResponse(value=res.value, method=res.method, cost=res.cost)

    @app.post("/cutnorm", response_model=schemas.WeakNormResponse)
    async def cutnorm(req: schemas.CutNormRequest):
        est = cut_norm(_tensor(req.tensor), mode=req.mode, restarts=req.restarts, seed=req.seed)
        witness = est.witness.to_payload() if req.include_witness else None
        return schemas.WeakNormResponse(
            lower_bound=est.lower_bound, exact=est.exact, cost=est.cost, witness=witness
        )

    @app.post("/majorant", response_model=schemas.MajorantResponse)
    async def majorant(req: schemas.MajorantRequest):
        kind = KIND_ALIASES.get(req.kind)
        if kind is None:
            raise InvalidParameterError(
                f"unknown majorant kind {req.kind!r}; choose from {sorted(set(KIND_ALIASES))}"
            )
        if req.group is not None:
            domain = FiniteAbelianGroup(tuple(int(m) for m in req.group))
        elif req.vertex_count is not None and req.arity is not None:
            domain = (int(req.vertex_count), int(req.arity))
        else:
            raise InvalidParameterError("provide either group factors or vertex_count and arity")
        spec = MajorantSpec(
            kind,
            epsilon=req.epsilon,
            delta=req.delta,
            seed=req.seed,
            values=None if req.values is None else np.asarray(req.values, dtype=np.float64),
        )
        gen = generate_majorant(spec, domain)
        certificate = None
        if req.certify:
            psi = None
            if req.psi_p is not None:
                nu = gen.function
                if isinstance(nu, GroupFunction):
                    psi = PsiReference(GroupFunction(nu.group, np.ones(nu.group.order)), req.psi_p)
                else:
                    psi = PsiReference(
                        TensorFunction(nu.vertex_count, nu.arity, np.ones(nu.values.size)),
                        req.psi_p,
                    )
            certificate = certify(gen.function, req.s, psi=psi).to_payload()
        return schemas.MajorantResponse(
            function=_side_payload(gen.function),
            kind=kind,
            clip_count=gen.clip_count,
            mean=float(np.mean(gen.function.values)),
            certificate=certificate,
        )

    @app.post("/dense-model", response_model=schemas.DecompositionResponse)
    async def dense_model_endpoint(req: schemas.DecompositionRequest):
        g = _any_side(req.g)
        nu = _any_side(req.nu)
        if isinstance(g, GroupFunction):
            result = dense_model(
                g, nu, req.s, req.epsilon,
                mode=req.mode, restarts=req.restarts, seed=req.seed, t_max=req.t_max,
            )
        else:
            result = dense_model_tensor(
                g, nu, req.epsilon,
                mode=req.mode, restarts=req.restarts, seed=req.seed, t_max=req.t_max,
            )
        return schemas.DecompositionResponse(**result.to_payload())

    @app.post("/kvn", response_model=schemas.DecompositionResponse)
    async def kvn(req: schemas.DecompositionRequest):
        f = _any_side(req.g)
        nu = _any_side(req.nu)
        if isinstance(f, GroupFunction):
            result = kvn_group(
                f, nu, req.s, req.epsilon,
                mode=req.mode, restarts=req.restarts, seed=req.seed, t_max=req.t_max,
            )
        else:
            result = kvn_tensor(
                f, nu, req.epsilon,
                mode=req.mode, restarts=req.restarts, seed=req.seed, t_max=req.t_max,
            )
        return schemas.DecompositionResponse(**result.to_payload())

    @app.post("/interval", response_model=schemas.NormResponse)
    async def interval(req: schemas.IntervalNormRequest):
        res = interval_norm(interval_from_payload(req.f.model_dump()), req.s, n_prime=req.n_prime)
        return schemas.NormResponse(value=res.value, method=res.method, cost=res.cost)

    @app.post("/transfer", response_model=schemas.TransferResponse)
    async def transfer(req: schemas.TransferRequest):
        result = transfer_kvn(
            interval_from_payload(req.f.model_dump()),
            _function(req.nu),
            req.s,
            req.c,
            req.epsilon,
            mode=req.mode,
            restarts=req.restarts,
            seed=req.seed,
            t_max=req.t_max,
            paper_scale=req.paper_scale,
        )
        return schemas.TransferResponse(**result.to_payload())

    @app.post("/experiment", response_model=schemas.ExperimentResponse)
    async def experiment(req: schemas.ExperimentRequest):
        report = run_experiment(req.name, req.grid)
        payload = report.to_payload()
        if req.render == "csv":
            payload["csv"] = render_csv(report)
        return schemas.ExperimentResponse(**payload)

    return app
