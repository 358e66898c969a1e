"""Command line client.

Every subcommand builds a request and sends it through the HTTP service. By
default the service runs in-process; pass --server to talk to a running one.
"""
from __future__ import annotations

import asyncio
import json
import sys

import click
import httpx


def _post(server: str | None, path: str, payload: dict) -> dict:
    if server:
        resp = httpx.post(server.rstrip("/") + path, json=payload, timeout=None)
    else:
        from .service.app import create_app

        async def _call():
            transport = httpx.ASGITransport(app=create_app())
            async with httpx.AsyncClient(
                transport=transport, base_url="http://service", timeout=None
            ) as client:
                return await client.post(path, json=payload)

        resp = asyncio.run(_call())
    body = resp.json()
    if resp.status_code != 200:
        click.echo(json.dumps(body, indent=2, sort_keys=True), err=True)
        sys.exit(1)
    return body


def _emit(body: dict) -> None:
    click.echo(json.dumps(body, indent=2, sort_keys=True))


def _load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


server_option = click.option(
    "--server", default=None, help="base URL of a running service; default is in-process"
)


@click.group()
def main():
    """Uniformity, weak, box and cut norms; majorants; decompositions."""


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--s", "s", default=2, show_default=True)
@click.option(
    "--method",
    default="auto",
    show_default=True,
    type=click.Choice(["auto", "direct", "recursive", "fourier", "lifted"]),
)
@server_option
def norm(input_path, s, method, server):
    """Uniformity norm of a group function."""
    _emit(_post(server, "/norm", {"function": _load_json(input_path), "s": s, "method": method}))


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--s", "s", default=2, show_default=True)
@click.option(
    "--mode",
    default="auto",
    show_default=True,
    type=click.Choice(["auto", "exhaustive", "alternating"]),
)
@click.option("--restarts", default=32, show_default=True)
@click.option("--seed", default=7, show_default=True)
@click.option("--witness", is_flag=True, help="include the achieving family in the output")
@server_option
def weaknorm(input_path, s, mode, restarts, seed, witness, server):
    """Weak norm of a group function (sup over bounded families)."""
    _emit(
        _post(
            server,
            "/weaknorm",
            {
                "function": _load_json(input_path),
                "s": s,
                "mode": mode,
                "restarts": restarts,
                "seed": seed,
                "include_witness": witness,
            },
        )
    )


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--ell", default=2, show_default=True)
@server_option
def boxnorm(input_path, ell, server):
    """l-box norm of a tensor."""
    _emit(_post(server, "/boxnorm", {"tensor": _load_json(input_path), "ell": ell}))


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option(
    "--mode",
    default="auto",
    show_default=True,
    type=click.Choice(["auto", "exhaustive", "alternating"]),
)
@click.option("--restarts", default=32, show_default=True)
@click.option("--seed", default=7, show_default=True)
@click.option("--witness", is_flag=True)
@server_option
def cutnorm(input_path, mode, restarts, seed, witness, server):
    """Cut norm of a tensor."""
    _emit(
        _post(
            server,
            "/cutnorm",
            {
                "tensor": _load_json(input_path),
                "mode": mode,
                "restarts": restarts,
                "seed": seed,
                "include_witness": witness,
            },
        )
    )


@main.command()
@click.option("--kind", default="sparse", show_default=True)
@click.option("--epsilon", type=float, default=None)
@click.option("--delta", type=float, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--group", "group_spec", default=None, help="cyclic order, or comma-separated factors")
@click.option("--tensor", "tensor_spec", default=None, help="vertex_count,arity for a tensor domain")
@click.option("--input", "input_path", type=click.Path(exists=True), default=None,
              help="JSON values for a custom majorant")
@click.option("--certify", is_flag=True)
@click.option("--s", "s", default=2, show_default=True)
@click.option("--psi-p", type=float, default=None, help="reference exponent for certification")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="also write the generated function payload here")
@server_option
def majorant(kind, epsilon, delta, seed, group_spec, tensor_spec, input_path, certify, s,
             psi_p, out_path, server):
    """Generate a majorant and optionally certify its pseudorandomness."""
    payload = {"kind": kind, "certify": certify, "s": s}
    if epsilon is not None:
        payload["epsilon"] = epsilon
    if delta is not None:
        payload["delta"] = delta
    if seed is not None:
        payload["seed"] = seed
    if psi_p is not None:
        payload["psi_p"] = psi_p
    if group_spec is not None:
        payload["group"] = [int(tok) for tok in group_spec.split(",")]
    if tensor_spec is not None:
        n, arity = (int(tok) for tok in tensor_spec.split(","))
        payload["vertex_count"] = n
        payload["arity"] = arity
    if input_path is not None:
        data = _load_json(input_path)
        payload["values"] = data["values"] if isinstance(data, dict) else data
    body = _post(server, "/majorant", payload)
    if out_path:
        with open(out_path, "w") as fh:
            json.dump(body["function"], fh)
            fh.write("\n")
    _emit(body)


def _decomposition_payload(g_path, nu_path, s, eps, mode, restarts, seed, tmax):
    return {
        "g": _load_json(g_path),
        "nu": _load_json(nu_path),
        "s": s,
        "epsilon": eps,
        "mode": mode,
        "restarts": restarts,
        "seed": seed,
        "t_max": tmax,
    }


@main.command(name="dense-model")
@click.option("--g", "g_path", required=True, type=click.Path(exists=True))
@click.option("--nu", "nu_path", required=True, type=click.Path(exists=True))
@click.option("--s", "s", default=2, show_default=True)
@click.option("--eps", default=0.05, show_default=True)
@click.option("--mode", default="auto", show_default=True,
              type=click.Choice(["auto", "exhaustive", "alternating"]))
@click.option("--restarts", default=32, show_default=True)
@click.option("--seed", default=7, show_default=True)
@click.option("--tmax", type=int, default=None)
@server_option
def dense_model_command(g_path, nu_path, s, eps, mode, restarts, seed, tmax, server):
    """Dense model of a majorized nonnegative function."""
    _emit(_post(server, "/dense-model",
                _decomposition_payload(g_path, nu_path, s, eps, mode, restarts, seed, tmax)))


@main.command()
@click.option("--f", "f_path", required=True, type=click.Path(exists=True))
@click.option("--nu", "nu_path", required=True, type=click.Path(exists=True))
@click.option("--s", "s", default=2, show_default=True)
@click.option("--eps", default=0.05, show_default=True)
@click.option("--mode", default="auto", show_default=True,
              type=click.Choice(["auto", "exhaustive", "alternating"]))
@click.option("--restarts", default=32, show_default=True)
@click.option("--seed", default=7, show_default=True)
@click.option("--tmax", type=int, default=None)
@server_option
def kvn(f_path, nu_path, s, eps, mode, restarts, seed, tmax, server):
    """Bounded-plus-uniform split of a majorized signed function."""
    _emit(_post(server, "/kvn",
                _decomposition_payload(f_path, nu_path, s, eps, mode, restarts, seed, tmax)))


@main.command()
@click.option("--f", "f_path", required=True, type=click.Path(exists=True))
@click.option("--s", "s", default=2, show_default=True)
@click.option("--nprime", default="auto", show_default=True,
              help="auto, or an explicit prime cyclic order")
@server_option
def interval(f_path, s, nprime, server):
    """Normalized uniformity norm of an interval function."""
    payload = {"f": _load_json(f_path), "s": s}
    if nprime != "auto":
        payload["n_prime"] = int(nprime)
    _emit(_post(server, "/interval", payload))


@main.command()
@click.option("--f", "f_path", required=True, type=click.Path(exists=True))
@click.option("--nu", "nu_path", required=True, type=click.Path(exists=True))
@click.option("--C", "c", default=20.0, show_default=True)
@click.option("--eps", default=0.5, show_default=True)
@click.option("--s", "s", default=2, show_default=True)
@click.option("--mode", default="auto", show_default=True,
              type=click.Choice(["auto", "exhaustive", "alternating"]))
@click.option("--restarts", default=32, show_default=True)
@click.option("--seed", default=7, show_default=True)
@click.option("--tmax", type=int, default=None)
@click.option("--paper-scale", is_flag=True,
              help="refuse the desk-scale cutoff fallback")
@server_option
def transfer(f_path, nu_path, c, eps, s, mode, restarts, seed, tmax, paper_scale, server):
    """Interval-level decomposition through a cyclic embedding."""
    _emit(
        _post(
            server,
            "/transfer",
            {
                "f": _load_json(f_path),
                "nu": _load_json(nu_path),
                "s": s,
                "c": c,
                "epsilon": eps,
                "mode": mode,
                "restarts": restarts,
                "seed": seed,
                "t_max": tmax,
                "paper_scale": paper_scale,
            },
        )
    )


@main.command()
@click.argument("name", type=click.Choice(["prop21", "prop23", "prop31", "appendix"]))
@click.option("--grid", "grid_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.option("--format", "fmt", default="csv", show_default=True,
              type=click.Choice(["csv", "json"]))
@server_option
def experiment(name, grid_path, out_path, fmt, server):
    """Run a sweep experiment and write its report."""
    payload = {
        "name": name,
        "grid": _load_json(grid_path) if grid_path else None,
        "render": "csv" if fmt == "csv" else "none",
    }
    body = _post(server, "/experiment", payload)
    if out_path:
        if fmt == "csv":
            text = body["csv"]
        else:
            slim = {k: v for k, v in body.items() if k != "csv"}
            text = json.dumps(slim, indent=2, sort_keys=True) + "\n"
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    summary = {
        "experiment": body["experiment"],
        "rows": len(body["rows"]),
        "assertions": len(body["assertions"]),
        "passed": body["passed"],
        "failed": [a["name"] for a in body["assertions"] if not a["passed"]],
    }
    _emit(summary)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
