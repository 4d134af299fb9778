"""Command-line front end.

Talks to the service layer (in-process by default, --server URL for a
remote instance) and maps HTTP errors to exit codes:
0 success, 2 unknown problem/variant, 3 invalid configuration,
4 solver hard error. Transport failures exit 1.
"""
import json
import sys
from typing import Optional

import click

from .client import ServiceClient


def _parse_x0(text: str) -> Optional[list]:
    if text == "default":
        return None
    try:
        return [float(part) for part in text.replace(",", " ").split()]
    except ValueError:
        raise click.UsageError(f"cannot parse x0 {text!r}")


def _parse_seeds(text: str) -> list:
    seeds = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                lo, hi = part.split("..")
                seeds.extend(range(int(lo), int(hi) + 1))
            elif part:
                seeds.append(int(part))
    except ValueError:
        raise click.UsageError(f"cannot parse seeds {text!r}")
    return seeds


def _load_custom(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise click.UsageError(f"cannot read problem file {path}: {err}")
    if "dim" not in data or "pieces" not in data:
        raise click.UsageError(f"problem file {path} needs 'dim' and 'pieces'")
    return {
        "name": data.get("name", "custom"),
        "dim": data["dim"],
        "pieces": data["pieces"],
    }


def _problem_payload(problem, custom, dim) -> dict:
    if custom is not None:
        if problem is not None:
            raise click.UsageError("give either a problem name or --custom, not both")
        return {"custom": _load_custom(custom)}
    if problem is None:
        raise click.UsageError("missing problem name (or --custom FILE)")
    payload = {"problem": problem}
    if dim is not None:
        payload["dim"] = dim
    return payload


def _report_http_error(resp) -> int:
    try:
        body = resp.json()
    except ValueError:
        body = {"detail": resp.text}
    detail = body.get("detail", "request failed")
    if isinstance(detail, list):  # pydantic validation report
        click.echo("error: invalid request", err=True)
        for item in detail:
            loc = ".".join(str(p) for p in item.get("loc", [])[1:])
            click.echo(f"  {loc}: {item.get('msg')}", err=True)
    else:
        click.echo(f"error: {detail}", err=True)
    for line in body.get("violations", []):
        click.echo(f"  {line}", err=True)
    if body.get("known"):
        click.echo("known: " + ", ".join(body["known"]), err=True)
    return {404: 2, 400: 3, 422: 3, 500: 4}.get(resp.status_code, 1)


def _write_trace(path: str, records: list) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")


_PARAM_FLAGS = [
    ("epsilon0", float, "Initial sampling radius"),
    ("nu0", float, "Initial stationarity target"),
    ("sample_size", int, "Gradient samples per iteration"),
    ("beta", float, "Armijo slope fraction"),
    ("gamma", float, "Backtracking factor"),
    ("epsilon_opt", float, "Radius stopping tolerance"),
    ("nu_opt", float, "Stationarity stopping tolerance"),
    ("theta_eps", float, "Radius reduction factor"),
    ("theta_nu", float, "Target reduction factor"),
    ("max_iter", int, "Iteration cap"),
    ("t_min", float, "Smallest admissible step"),
    ("f_floor", float, "Unboundedness floor"),
]


def _param_options(cmd):
    for name, typ, help_text in reversed(_PARAM_FLAGS):
        flag = "--" + name.replace("_", "-")
        cmd = click.option(flag, name, type=typ, default=None, help=help_text)(cmd)
    return cmd


def _collect_params(kw) -> dict:
    params = {}
    for name, _, _ in _PARAM_FLAGS:
        if kw.get(name) is not None:
            params[name] = kw.pop(name)
        else:
            kw.pop(name, None)
    return params


@click.group()
def cli():
    """Nonsmooth optimization by gradient sampling: run the solver on
    built-in or custom finite-max problems, benchmark its variants, or
    serve the HTTP API."""


@cli.command()
@click.argument("problem", required=False)
@click.option("--dim", type=int, default=None, help="Dimension for the parametric families")
@click.option("--x0", default="default", help='Start point "v1,v2,..." or "default"')
@click.option("--seed", type=int, default=0, help="Sampling seed")
@click.option("--variant", default=None, help="Variant preset name")
@click.option("--custom", type=click.Path(), default=None, help="Custom finite-max problem JSON file")
@click.option("--trace", "trace_path", type=click.Path(), default=None, help="Write the per-iteration trace (line-delimited JSON) here")
@click.option("--server", default=None, help="Remote service URL (default: in-process)")
@click.option("--force-center-only-bundle", is_flag=True, help="Restrict iteration 0's bundle to the center gradient")
@_param_options
def solve(problem, dim, x0, seed, variant, custom, trace_path, server,
          force_center_only_bundle, **kw):
    """Run the solver on one problem and print a summary."""
    params = _collect_params(kw)
    payload = _problem_payload(problem, custom, dim)
    payload.update(
        seed=seed,
        include_trace=trace_path is not None,
        force_center_only_bundle=force_center_only_bundle,
    )
    start = _parse_x0(x0)
    if start is not None:
        payload["x0"] = start
    if variant is not None:
        payload["variant"] = variant
    if params:
        payload["params"] = params

    with ServiceClient(server) as client:
        resp = client.post("/solve", payload)
    if resp.status_code != 200:
        code = _report_http_error(resp)
        if code == 4 and trace_path is not None:
            partial = resp.json().get("partial_trace", [])
            if partial:
                _write_trace(trace_path, partial)
                click.echo(
                    f"partial trace ({len(partial)} records) written to {trace_path}",
                    err=True,
                )
        return code

    body = resp.json()
    cert = body["certificate"]
    click.echo(f"status      {body['status']}")
    click.echo(f"iterations  {body['iterations']}")
    click.echo(f"f_final     {body['f_final']!r}")
    click.echo(f"g_norm      {cert['g_norm']!r}")
    click.echo(f"epsilon     {cert['epsilon']!r}")
    click.echo(f"n_gevals    {body['n_gevals']}")
    click.echo(f"n_fevals    {body['n_fevals']}")
    if trace_path is not None:
        _write_trace(trace_path, body["trace"])
        click.echo(f"trace ({len(body['trace'])} records) written to {trace_path}")
    return 0


def _format_value(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _print_table(rows: list, columns: list) -> None:
    cells = [[_format_value(r[c]) for c in columns] for r in rows]
    widths = [
        max(len(c), *(len(row[i]) for row in cells)) if cells else len(c)
        for i, c in enumerate(columns)
    ]
    click.echo("  ".join(c.ljust(w) for c, w in zip(columns, widths)))
    for row in cells:
        click.echo("  ".join(v.ljust(w) for v, w in zip(row, widths)))


def _write_csv(path: str, rows: list, columns: list) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for r in rows:
            writer.writerow([_format_value(r[c]) for c in columns])


@cli.command()
@click.argument("problem", required=False)
@click.option("--variants", required=True, help='Comma-separated preset names (at least 2, e.g. "fixed,adaptive")')
@click.option("--seeds", default="1..5", help='Seed list: "1..5" or "1,2,3"')
@click.option("--dim", type=int, default=None, help="Dimension for the parametric families")
@click.option("--x0", default="default", help='Shared start point, or "default" (per-seed rule)')
@click.option("--custom", type=click.Path(), default=None, help="Custom finite-max problem JSON file")
@click.option("--budget", type=int, default=None, help="Iteration cap applied to every run")
@click.option("--csv", "csv_path", type=click.Path(), default=None, help="Summary CSV path (default compare_<problem>.csv)")
@click.option("--median/--no-median", default=True, help="CSV rows: per-variant medians (default) or per (variant, seed)")
@click.option("--server", default=None, help="Remote service URL (default: in-process)")
@_param_options
def compare(problem, variants, seeds, dim, x0, custom, budget, csv_path,
            median, server, **kw):
    """Benchmark variant presets side by side on one problem."""
    params = _collect_params(kw)
    payload = _problem_payload(problem, custom, dim)
    payload.update(
        variants=[v for v in variants.split(",") if v.strip()],
        seeds=_parse_seeds(seeds),
    )
    start = _parse_x0(x0)
    if start is not None:
        payload["x0"] = start
    if budget is not None:
        payload["budget"] = budget
    if params:
        payload["params"] = params

    with ServiceClient(server) as client:
        resp = client.post("/compare", payload)
    if resp.status_code != 200:
        return _report_http_error(resp)

    body = resp.json()
    median_cols = ["variant", "status", "f_final", "iterations", "n_gevals", "n_fevals"]
    _print_table(body["medians"], median_cols)

    if csv_path is None:
        name = payload.get("problem") or payload["custom"]["name"]
        csv_path = f"compare_{name}.csv"
    if median:
        _write_csv(csv_path, body["medians"], median_cols)
    else:
        _write_csv(
            csv_path,
            body["rows"],
            ["variant", "seed", "status", "f_final", "iterations", "n_gevals", "n_fevals"],
        )
    click.echo(f"summary written to {csv_path}")
    return 0


@cli.command()
@click.option("--server", default=None, help="Remote service URL (default: in-process)")
def problems(server):
    """List the built-in problems."""
    with ServiceClient(server) as client:
        resp = client.get("/problems")
    if resp.status_code != 200:
        return _report_http_error(resp)
    rows = resp.json()
    for r in rows:
        r["dim"] = f"{r['dim']}*" if r["parametric_dim"] else str(r["dim"])
        r["f_star"] = "?" if r["f_star"] is None else repr(r["f_star"])
        r["notes"] = "experimental" if r["experimental"] else ""
    _print_table(rows, ["name", "dim", "f_star", "notes"])
    click.echo("(* dimension selectable via --dim)")
    return 0


@cli.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=host, port=port)
    return 0


def run(argv=None) -> int:
    try:
        rv = cli.main(args=argv, standalone_mode=False)
    except click.ClickException as err:
        err.show()
        return 3
    except click.Abort:
        return 130
    except Exception as err:  # transport and other operational failures
        click.echo(f"error: {err}", err=True)
        return 1
    return int(rv) if isinstance(rv, int) else 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
