"""Command-line front end.

The CLI is a thin client of the HTTP service: it assembles a request from
flags and/or a JSON config file (flags override file values), posts it to the
service and writes the returned file payloads to disk. By default requests are
served by an in-process application instance, so no server is needed; pass
--server to target a running instance instead.

Commands:
    bench   one (objective, lambda, topology) cell of seeded runs
    sweep   grid of cells over a lambda grid (and optionally a degree grid)
    filter  2-D recursive filter design (or --eval-only cost evaluation)
    graph   generate a communication graph as an edge-list file
    serve   run the HTTP service under uvicorn
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

__all__ = ["main"]

DEFAULT_OUT = "hspso_out"


def _parse_lambda_grid(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"--lambda-grid wants a:b:step, got {text!r}")
    a, b, step = (float(p) for p in parts)
    if step <= 0 or b < a:
        raise ValueError(f"--lambda-grid needs step > 0 and b >= a, got {text!r}")
    grid = []
    i = 0
    while True:
        value = round(a + i * step, 10)
        if value > b + 1e-9:
            break
        grid.append(min(value, b))
        i += 1
    return grid


def _parse_k_grid(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ValueError(f"--k-grid wants comma-separated integers, got {text!r}") from None


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON config file; flags override its values")
    p.add_argument("--server", help="base URL of a running service (default: in-process)")
    p.add_argument("--out", type=Path, help=f"output directory (default: {DEFAULT_OUT})")


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--objective", help="objective name (f1..f6, filter)")
    p.add_argument("--lambda", dest="lambda_", type=float, help="fraction of fully informed particles")
    p.add_argument("--topology", choices=["ring", "scale-free", "small-world"])
    p.add_argument("--k", type=int, help="ring / small-world degree")
    p.add_argument("--beta", type=float, help="small-world rewire probability")
    p.add_argument("--m", type=int, help="scale-free attachment count")
    p.add_argument("--pin-graph", action="store_true", default=None,
                   help="reuse one graph instance (from the base seed) across all runs")
    p.add_argument("--n", type=int, help="swarm size")
    p.add_argument("--dim", type=int, help="objective dimension")
    p.add_argument("--iters", type=int, help="iteration budget per run")
    p.add_argument("--runs", type=int, help="number of seeded runs")
    p.add_argument("--seed", type=int, help="base seed; run r uses base seed + r")
    p.add_argument("--boundary", choices=["skip", "clamp"], help="out-of-bounds policy")
    p.add_argument("--si-draws", choices=["per-dimension", "per-particle"])
    p.add_argument("--noise-mode", choices=["per-term", "per-eval"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hspso", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="run one configuration cell")
    _add_run_flags(bench)
    bench.add_argument("--log-every", type=int, help="trajectory thinning (log every i-th iteration)")
    _add_common_flags(bench)

    sweep = sub.add_parser("sweep", help="run a lambda (and degree) grid")
    _add_run_flags(sweep)
    sweep.add_argument("--lambda-grid", help="a:b:step, e.g. 0:1:0.1")
    sweep.add_argument("--k-grid", help="comma-separated degrees, e.g. 2,4,6,8,10")
    _add_common_flags(sweep)

    filt = sub.add_parser("filter", help="design the 2-D recursive filter")
    _add_run_flags(filt)
    filt.add_argument("--eval-only", action="store_true",
                      help="evaluate --coeffs instead of optimizing")
    filt.add_argument("--coeffs", type=Path, help="JSON coefficient record to evaluate")
    _add_common_flags(filt)

    graph = sub.add_parser("graph", help="generate a communication graph edge list")
    graph.add_argument("--topology", choices=["ring", "scale-free", "small-world"], default="ring")
    graph.add_argument("--n", type=int, default=50)
    graph.add_argument("--k", type=int, default=4)
    graph.add_argument("--beta", type=float, default=0.1)
    graph.add_argument("--m", type=int, default=2)
    graph.add_argument("--seed", type=int, default=0)
    graph.add_argument("--server", help="base URL of a running service (default: in-process)")
    graph.add_argument("--out", type=Path, help="edge-list file (default: stdout)")

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)

    return parser


def _make_client(server: str | None):
    import httpx

    if server:
        return httpx.Client(base_url=server, timeout=None)
    import warnings

    with warnings.catch_warnings():
        # in-process transport only; the deprecation concerns a future starlette
        warnings.simplefilter("ignore", DeprecationWarning)
        from fastapi.testclient import TestClient

    from .service.app import create_app

    return TestClient(create_app())


def _load_config_file(path: Path | None) -> dict:
    if path is None:
        return {}
    payload = json.loads(path.read_text())
    if not isinstance(payload, dict):
        raise ValueError(f"config file {path} must hold a JSON object")
    return payload


def _merge_request(args: argparse.Namespace, extra: dict | None = None) -> dict:
    """File values first, then every explicitly passed flag on top."""
    merged = _load_config_file(getattr(args, "config", None))
    topology = dict(merged.get("topology") or {})
    if getattr(args, "topology", None) is not None:
        topology["kind"] = args.topology
    for key in ("k", "beta", "m"):
        value = getattr(args, key, None)
        if value is not None:
            topology[key] = value
    if getattr(args, "pin_graph", None):
        topology["pin_seed"] = args.seed if args.seed is not None else merged.get("seed", 1)
    if topology:
        merged["topology"] = topology
    for flag, key in (
        ("objective", "objective"),
        ("lambda_", "lambda"),
        ("n", "n"),
        ("dim", "dim"),
        ("iters", "iters"),
        ("runs", "runs"),
        ("seed", "seed"),
        ("boundary", "boundary"),
        ("si_draws", "si_draws"),
        ("noise_mode", "noise_mode"),
        ("log_every", "log_every"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            merged[key] = value
    if extra:
        merged.update(extra)
    return merged


class _RequestRejected(Exception):
    def __init__(self, message: str):
        super().__init__(message)


def _post(client, path: str, payload: dict):
    response = client.post(path, json=payload)
    if response.status_code >= 400:
        try:
            detail = response.json().get("detail")
        except Exception:
            detail = response.text
        raise _RequestRejected(f"request to {path} rejected ({response.status_code}): {detail}")
    return response.json()


def _fail(message: str, code: int) -> int:
    print(f"hspso: error: {message}", file=sys.stderr)
    return code


def _out_dir(args: argparse.Namespace) -> Path:
    out = getattr(args, "out", None) or Path(DEFAULT_OUT)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path: Path, payload: str) -> None:
    path.write_text(payload)
    print(f"wrote {path}")


def _cmd_bench(args: argparse.Namespace) -> int:
    client = _make_client(args.server)
    body = _post(client, "/bench", _merge_request(args))
    out = _out_dir(args)
    _write(out / "runs.csv", body["runs_csv"])
    _write(out / "summary.csv", body["summary_csv"])
    s = body["summary"]
    print(
        f"objective={s['objective']} topology={s['topology']} k={s['k']} lambda={s['lambda']} "
        f"mean_R={s['mean_R']:.6e} median_R={s['median_R']:.6e} mean_p={s['mean_p']:.4f} runs={s['runs']}"
    )
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    extra = {}
    if args.lambda_grid is not None:
        extra["lambda_grid"] = _parse_lambda_grid(args.lambda_grid)
    if args.k_grid is not None:
        extra["k_grid"] = _parse_k_grid(args.k_grid)
    client = _make_client(args.server)
    body = _post(client, "/sweep", _merge_request(args, extra))
    out = _out_dir(args)
    _write(out / "sweep.csv", body["sweep_csv"])
    for row in body["rows"]:
        flag = " <- best" if row["is_argmin_lambda"] else ""
        print(
            f"topology={row['topology']} k={row['k']} lambda={row['lambda']:.3f} "
            f"mean_R={row['mean_R']:.6e} mean_p={row['mean_p']:.4f}{flag}"
        )
    return 0


def _cmd_filter(args: argparse.Namespace) -> int:
    client = _make_client(args.server)
    if args.eval_only:
        if args.coeffs is None:
            return _fail("--eval-only needs --coeffs FILE", 2)
        record = json.loads(args.coeffs.read_text())
        body = _post(
            client,
            "/filter/evaluate",
            {"coefficients": record, "include_amplitude": args.out is not None},
        )
        print(f"J2={body['j2']!r} feasible={body['feasible']}")
        if args.out is not None:
            out = _out_dir(args)
            _write(out / "evaluation.json", json.dumps(
                {"J2": body["j2"], "feasible": body["feasible"]}, indent=2) + "\n")
            if body.get("amplitude_csv"):
                _write(out / "amplitude.csv", body["amplitude_csv"])
        return 0
    body = _post(client, "/filter/design", _merge_request(args))
    out = _out_dir(args)
    _write(out / "coefficients.json", body["coefficients_json"])
    _write(out / "amplitude.csv", body["amplitude_csv"])
    print(f"J2={body['j2']!r} feasible={body['feasible']} best_run={body['best_run']}")
    return 0


def _cmd_graph(args: argparse.Namespace) -> int:
    client = _make_client(args.server)
    body = _post(
        client,
        "/graph",
        {"kind": args.topology, "n": args.n, "k": args.k, "beta": args.beta,
         "m": args.m, "seed": args.seed},
    )
    if args.out is None:
        sys.stdout.write(body["edge_list"])
    else:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        _write(args.out, body["edge_list"])
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("hspso.service.app:app", host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "bench": _cmd_bench,
        "sweep": _cmd_sweep,
        "filter": _cmd_filter,
        "graph": _cmd_graph,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except _RequestRejected as exc:
        return _fail(str(exc), 2)
    except ValueError as exc:
        return _fail(str(exc), 2)
    except OSError as exc:
        return _fail(f"I/O failure: {exc}", 1)
    except Exception as exc:  # transport errors, unexpected service failures
        return _fail(f"{type(exc).__name__}: {exc}", 1)


if __name__ == "__main__":
    sys.exit(main())
