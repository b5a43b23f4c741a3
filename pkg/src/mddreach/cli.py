"""Command-line front end, a thin client of the service layer.

Commands run against the in-process handlers by default; ``--server URL``
sends the same request/response payloads to a running instance instead.
File I/O stays on the client side: model files are read here and their
text travels in the request.

Exit codes: 0 ok, 1 parse/config/query error, 2 resource cap exceeded,
3 verification mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import service
from .service import (CtlRequest, DistsimRequest, DumpRequest,
                      GenerateRequest, ServiceError)

_EXIT_CODES = {
    "parse_error": 1,
    "invalid_config": 1,
    "query_error": 1,
    "cap_exceeded": 2,
    "verify_mismatch": 3,
}

_HANDLERS = {
    "/generate": (service.run_generate, GenerateRequest),
    "/distsim": (service.run_distsim, DistsimRequest),
    "/ctl": (service.run_ctl, CtlRequest),
    "/dump": (service.run_dump, DumpRequest),
}


class ServiceClient:
    """Calls handlers directly, or POSTs to a remote server when given one."""

    def __init__(self, server=None, http_client=None):
        self.server = server
        self._http = http_client

    def call(self, path, payload):
        """Returns (response dict, error dict or None)."""
        if self.server is None and self._http is None:
            handler, request_type = _HANDLERS[path]
            try:
                response = handler(request_type.model_validate(payload))
            except ServiceError as exc:
                return None, {"code": exc.code, "message": exc.message}
            return response.model_dump(), None
        client = self._http
        if client is None:
            import httpx
            client = httpx.Client(base_url=self.server, timeout=600.0)
        response = client.post(path, json=payload)
        body = response.json()
        if response.status_code >= 400:
            if "code" not in body:  # validation errors from the framework
                return None, {"code": "invalid_config", "message": json.dumps(body)}
            return None, body
        return body, None


def _read_model(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        print(f"error: cannot read model file: {exc}", file=sys.stderr)
        return None


def _write_metrics(path, metrics):
    if path:
        Path(path).write_text(json.dumps(metrics, indent=2) + "\n")


def _fail(error):
    print(f"error [{error['code']}]: {error['message']}", file=sys.stderr)
    return _EXIT_CODES.get(error["code"], 1)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mddreach",
        description="Petri-net reachability over quasi-reduced MDDs")
    parser.add_argument("--server", metavar="URL",
                        help="send requests to a running service instead of in-process")
    parser.add_argument("--metrics-out", metavar="PATH",
                        help="write the run's metrics record as JSON")
    parser.add_argument("--node-cap", type=int, metavar="N",
                        help="abort symbolic runs above this many live nodes")
    parser.add_argument("--state-cap", type=int, metavar="N",
                        help="abort explicit runs above this many states")
    parser.add_argument("--verify", action="store_true",
                        help="check distributed results against the sequential strategy")
    parser.add_argument("--timings", action="store_true",
                        help="include wall-clock time in metrics (not reproducible)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate the reachable state space")
    p.add_argument("model", help="model file")
    p.add_argument("--strategy", default="saturation",
                   choices=["explicit", "bfs", "saturation", "saturation-chained"])

    p = sub.add_parser("distsim", help="simulate a distributed generation scheme")
    p.add_argument("config", help="scenario config JSON")

    p = sub.add_parser("ctl", help="evaluate EX/EU/EG over the reachable states")
    p.add_argument("model", help="model file")
    p.add_argument("query", help="e.g. 'EX P1>=1' or 'EU true Eat1>=1'")
    p.add_argument("--limit", type=int, default=0,
                   help="print up to this many satisfying states")

    p = sub.add_parser("dump", help="dump reachable states or the diagram")
    p.add_argument("model", help="model file")
    p.add_argument("--what", default="states", choices=["states", "forest"])
    p.add_argument("--limit", type=int, default=100_000)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


def cmd_generate(args, client):
    text = _read_model(args.model)
    if text is None:
        return 1
    payload = {
        "net_text": text,
        "strategy": args.strategy,
        "node_cap": args.node_cap,
        "state_cap": args.state_cap,
        "include_timings": args.timings,
    }
    body, error = client.call("/generate", payload)
    if error:
        return _fail(error)
    print(f"states: {body['state_count']}")
    _write_metrics(args.metrics_out, body["metrics"])
    return 0


def cmd_distsim(args, client):
    try:
        raw = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        return _fail({"code": "invalid_config", "message": str(exc)})
    if not isinstance(raw, dict) or "model_path" not in raw:
        return _fail({"code": "invalid_config",
                      "message": "config must be an object with model_path"})
    model_path = Path(args.config).parent / raw["model_path"]
    text = _read_model(model_path)
    if text is None:
        return 1
    caps = dict(raw.get("caps", {}))
    if args.node_cap is not None:
        caps["node_cap"] = args.node_cap
    if args.state_cap is not None:
        caps["state_cap"] = args.state_cap
    payload = {
        "net_text": text,
        "mode": raw.get("mode"),
        "N": raw.get("N", 1),
        "partition": raw.get("partition", {}),
        "B": raw.get("B", 64),
        "caps": caps,
        "delay_seed": raw.get("delay_seed"),
        "verify": args.verify,
        "include_timings": args.timings,
    }
    body, error = client.call("/distsim", payload)
    if error:
        return _fail(error)
    print(f"states: {body['state_count']}")
    print(body["table"])
    if body.get("verified"):
        print(f"verify: {body['verified']}")
    _write_metrics(args.metrics_out, body["metrics"])
    return 0


def cmd_ctl(args, client):
    text = _read_model(args.model)
    if text is None:
        return 1
    payload = {
        "net_text": text,
        "query": args.query,
        "node_cap": args.node_cap,
        "limit": args.limit,
    }
    body, error = client.call("/ctl", payload)
    if error:
        return _fail(error)
    print(f"satisfying: {body['satisfying']}")
    if body.get("states"):
        for state in body["states"]:
            print(" ".join(str(c) for c in state))
    _write_metrics(args.metrics_out,
                   {"query": args.query,
                    "satisfying": body["satisfying"],
                    "reachable": body["reachable"]})
    return 0


def cmd_dump(args, client):
    text = _read_model(args.model)
    if text is None:
        return 1
    payload = {"net_text": text, "what": args.what, "limit": args.limit}
    body, error = client.call("/dump", payload)
    if error:
        return _fail(error)
    for line in body["lines"]:
        print(line)
    return 0


def cmd_serve(args):
    import uvicorn
    uvicorn.run("mddreach.service:app", host=args.host, port=args.port)
    return 0


def main(argv=None, http_client=None):
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        return cmd_serve(args)
    client = ServiceClient(server=args.server, http_client=http_client)
    command = {
        "generate": cmd_generate,
        "distsim": cmd_distsim,
        "ctl": cmd_ctl,
        "dump": cmd_dump,
    }[args.command]
    return command(args, client)


if __name__ == "__main__":
    sys.exit(main())
