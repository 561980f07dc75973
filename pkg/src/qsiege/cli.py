"""Command-line client for the analysis service.

Every subcommand posts to the corresponding service endpoint and prints the
JSON response to stdout, or writes CSV to ``--out`` for grid and simulation
outputs.  By default the service app is mounted in-process, so no server is
needed; ``--server URL`` (or the QSIEGE_SERVER environment variable) targets
a remote instance instead.  Argument and validation failures exit with
status 2 and a JSON error object on stderr.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys

import httpx

_CSV_COLUMNS = {
    "stability": ("a", "d", "stable"),
    "risk-surface": ("a", "d", "risk"),
    "regime-map": ("ca", "cd", "regime", "a_star", "d_star"),
}

# Flag name -> (json key, type, default); None default means required unless
# a scenario file supplies the value.
_FIELD_TYPES = {
    "policy": (str, None),
    "lambda": (float, None),
    "mu": (float, None),
    "ca": (float, None),
    "cd": (float, None),
    "a": (float, 0.0),
    "p": (float, 1.0),
    "d": (float, 0.0),
    "res": (int, None),
    "seed": (int, 0),
    "horizon": (float, 1_000_000.0),
    "warmup": (float, 0.1),
    "reps": (int, 10),
}

_COMMANDS = {
    "stability": {
        "endpoint": "/api/stability",
        "help": "classify stability at a point, or over an (a, d) grid with --res",
        "fields": ["policy", "lambda", "mu", "a", "p", "d", "res"],
        "required": ["policy", "lambda", "mu"],
        "optional_null": ["res"],
        "csv": True,
    },
    "cost": {
        "endpoint": "/api/cost",
        "help": "queue-cost models (shorter-queue bound and exact Bernoulli) at a point",
        "fields": ["lambda", "mu", "a", "p", "d"],
        "required": ["lambda", "mu"],
    },
    "utilities": {
        "endpoint": "/api/utilities",
        "help": "attacker and defender utilities at (a, d)",
        "fields": ["policy", "lambda", "mu", "ca", "cd", "a", "d"],
        "required": ["policy", "lambda", "mu", "ca", "cd"],
    },
    "equilibrium": {
        "endpoint": "/api/equilibrium",
        "help": "equilibrium regime and point",
        "fields": ["policy", "lambda", "mu", "ca", "cd"],
        "required": ["policy", "lambda", "mu", "ca", "cd"],
    },
    "risk-surface": {
        "endpoint": "/api/risk-surface",
        "help": "security risk over an (a, d) grid",
        "fields": ["policy", "lambda", "mu", "ca", "cd", "res"],
        "required": ["policy", "lambda", "mu", "cd"],
        "defaults": {"ca": 0.0, "res": 101},
        "csv": True,
    },
    "regime-map": {
        "endpoint": "/api/regime-map",
        "help": "equilibrium regimes over a (c_a, c_d] cost grid; --ca/--cd set the upper range ends",
        "fields": ["policy", "lambda", "mu", "ca", "cd", "res"],
        "required": ["policy", "lambda", "mu", "ca", "cd"],
        "defaults": {"res": 201},
        "csv": True,
    },
    "simulate": {
        "endpoint": "/api/simulate",
        "help": "discrete-event simulation of the attacked two-queue system",
        "fields": ["policy", "lambda", "mu", "a", "p", "d", "seed", "horizon", "warmup", "reps"],
        "required": ["policy", "lambda", "mu"],
        "csv": True,
        "trace": True,
    },
    "compare": {
        "endpoint": "/api/compare",
        "help": "analytic and simulated risk comparison across both policies",
        "fields": ["lambda", "mu", "ca", "cd", "seed", "horizon", "warmup", "reps"],
        "required": ["lambda", "mu", "ca", "cd"],
    },
}


class _JsonErrorParser(argparse.ArgumentParser):
    def error(self, message):
        _fail(message)


def _fail(message: str, detail=None, code: int = 2):
    body = {"error": message}
    if detail is not None:
        body["detail"] = detail
    print(json.dumps(body), file=sys.stderr)
    raise SystemExit(code)


def build_parser() -> argparse.ArgumentParser:
    parser = _JsonErrorParser(prog="qsiege", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    for name, desc in _COMMANDS.items():
        cmd = sub.add_parser(name, help=desc["help"])
        for field in desc["fields"]:
            ftype, _ = _FIELD_TYPES[field]
            cmd.add_argument(f"--{field}", dest=field.replace("-", "_"), type=ftype, default=None)
        if desc.get("csv"):
            cmd.add_argument("--out", default=None, help="write CSV here instead of printing JSON")
        if desc.get("trace"):
            cmd.add_argument(
                "--trace", default=None, help="also export an event trace CSV (replication 0)"
            )
        cmd.add_argument("--scenario", default=None, help="JSON file with default parameter values")
        cmd.add_argument("--server", default=None, help="base URL of a running service instance")

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _load_scenario(path: str, allowed: list[str]) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        _fail(f"cannot read scenario file: {exc}")
    if not isinstance(data, dict):
        _fail("scenario file must hold a flat JSON object")
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        _fail(f"unknown scenario keys: {', '.join(unknown)}", detail={"allowed": allowed})
    return data


def _build_payload(args, desc) -> dict:
    scenario = {}
    if args.scenario:
        scenario = _load_scenario(args.scenario, desc["fields"])
    payload = {}
    defaults = desc.get("defaults", {})
    for field in desc["fields"]:
        value = getattr(args, field.replace("-", "_"))
        if value is None and field in scenario:
            ftype, _ = _FIELD_TYPES[field]
            raw = scenario[field]
            try:
                value = ftype(raw)
            except (TypeError, ValueError):
                _fail(f"scenario key {field!r} has invalid value {raw!r}")
        if value is None:
            value = defaults.get(field, _FIELD_TYPES[field][1])
        if value is None:
            if field in desc["required"]:
                _fail(f"missing required parameter --{field}")
            if field in desc.get("optional_null", []):
                continue
        payload[field] = value
    return payload


class _Client:
    """Minimal POST client; in-process ASGI by default, HTTP when a base URL is set."""

    def __init__(self, server: str | None):
        self.server = server or os.environ.get("QSIEGE_SERVER") or None

    def post(self, path: str, payload: dict) -> httpx.Response:
        if self.server:
            try:
                with httpx.Client(base_url=self.server, timeout=None) as client:
                    return client.post(path, json=payload)
            except httpx.HTTPError as exc:
                _fail(f"cannot reach service at {self.server}: {exc}", code=1)

        from .service.app import create_app

        async def _call():
            transport = httpx.ASGITransport(app=create_app())
            async with httpx.AsyncClient(
                transport=transport, base_url="http://qsiege.local", timeout=None
            ) as client:
                return await client.post(path, json=payload)

        return asyncio.run(_call())


def _check_response(resp: httpx.Response) -> dict:
    if resp.status_code == 400:
        _fail(resp.json().get("error", "invalid parameters"))
    if resp.status_code == 422:
        _fail("request validation failed", detail=resp.json().get("detail"))
    if resp.status_code != 200:
        _fail(f"service error (HTTP {resp.status_code})", detail=resp.text, code=1)
    return resp.json()


def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _write_csv(path: str, header: tuple[str, ...], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_csv_cell(v) for v in row) + "\n")


def _emit(command: str, body: dict, out: str | None) -> None:
    if out is None:
        print(json.dumps(body, indent=2))
        return
    if command == "simulate":
        rows = [(i, m) for i, m in enumerate(body["per_replication"])]
        _write_csv(out, ("replication", "mean_total_jobs"), rows)
        return
    columns = _CSV_COLUMNS[command]
    cells = body.get("cells")
    if cells is None:
        _fail("--out requires grid output; add --res for a stability grid")
    _write_csv(out, columns, ([cell[c] for c in columns] for cell in cells))


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "serve":
        import uvicorn

        uvicorn.run("qsiege.service.app:app", host=args.host, port=args.port)
        return 0

    desc = _COMMANDS[args.command]
    payload = _build_payload(args, desc)
    client = _Client(args.server)
    body = _check_response(client.post(desc["endpoint"], payload))
    _emit(args.command, body, getattr(args, "out", None))

    if getattr(args, "trace", None):
        resp = client.post("/api/trace", payload)
        if resp.status_code != 200:
            _fail(f"trace export failed (HTTP {resp.status_code})", detail=resp.text, code=1)
        with open(args.trace, "w", encoding="utf-8", newline="") as fh:
            fh.write(resp.text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
