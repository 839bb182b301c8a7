"""Operator command line: serve the API, run simulations, replay and export
logs, run the majority-accuracy experiment, benchmark detectors, erase users.

Exit codes: 0 ok, 2 validation problem, 3 I/O problem.
"""

from __future__ import annotations

import dataclasses
import json
import sys
from pathlib import Path

import click

from . import sim as simmod
from .analytics import DetectorParams
from .api import ApiService, create_app
from .engine import Thresholds
from .errors import CredenceError, StorageError, ValidationError
from .exports import export_csv, export_json, export_user_data
from .model import Role
from .store import EventLog, read_log, replay
from .workspace import Workspace

EXIT_VALIDATION = 2
EXIT_IO = 3


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _guarded(fn):
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except StorageError as exc:
            _fail(EXIT_IO, str(exc))
        except (CredenceError, ValueError) as exc:
            _fail(EXIT_VALIDATION, str(exc))
        except OSError as exc:
            _fail(EXIT_IO, str(exc))

    wrapper.__name__ = fn.__name__
    return wrapper


def _load_config(path: str) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise StorageError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config {path} is not valid JSON: {exc}", code="invalid-config") from exc
    if doc.get("config_version") != simmod.CONFIG_VERSION:
        raise ValidationError(
            f"config must declare config_version {simmod.CONFIG_VERSION}", code="invalid-config"
        )
    return doc


def _detector_params(doc: dict) -> DetectorParams:
    overrides = doc.get("detector_params", {})
    known = {f.name for f in dataclasses.fields(DetectorParams)}
    bad = set(overrides) - known
    if bad:
        raise ValidationError(f"unknown detector params: {sorted(bad)}", code="invalid-config")
    return dataclasses.replace(DetectorParams(), **overrides)


def _thresholds(doc: dict) -> Thresholds:
    t = doc.get("thresholds", {})
    return Thresholds(
        theta_belief=t.get("theta_belief", 0.7),
        theta_evidence=t.get("theta_evidence", 5.0),
    )


@click.group()
def main():
    """Evidence-based deliberation workspace tools."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@_guarded
def serve(config_path: str, host: str, port: int):
    """Run the HTTP API over a workspace log."""
    import uvicorn

    doc = _load_config(config_path)
    serve_doc = doc.get("serve", {})
    log_path = serve_doc.get("log", "workspace.jsonl")
    log = EventLog(log_path)
    ws = Workspace(log)
    if log.head_seq == 0:
        for u in serve_doc.get("users", []):
            user = ws.register_user(
                u["display_name"], role=Role(u.get("role", "member")), group_label=u.get("group_label")
            )
            click.echo(f"registered {user.display_name} ({user.role.value}): {user.user_id}")
    service = ApiService(workspace=ws, detector_params=_detector_params(doc))
    app = create_app(service)
    uvicorn.run(app, host=host, port=port)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--max-events", type=int, default=None)
@_guarded
def simulate(config_path: str, seed: int | None, out_path: str, max_events: int | None):
    """Generate a synthetic event log from an agent population config."""
    doc = _load_config(config_path)
    config = simmod.config_from_dict(doc)
    if seed is not None:
        config = dataclasses.replace(config, seed=seed)
    result = simmod.simulate(config, path=out_path, max_events=max_events)
    click.echo(
        json.dumps(
            {
                "events": result.log.head_seq,
                "users": len(result.roster),
                "hypotheses": len(result.hypothesis_ids),
                "log": str(out_path),
            }
        )
    )


@main.command("replay")
@click.option("--log", "log_path", required=True, type=click.Path())
@_guarded
def replay_cmd(log_path: str):
    """Replay a log and print a state summary."""
    events = read_log(log_path)
    state = replay(events)
    click.echo(
        json.dumps(
            {
                "events": len(events),
                "users": len(state.users),
                "hypotheses": len(state.hypotheses),
                "evidence": len(state.evidence),
                "votes": len(state.votes),
                "ratings": len(state.ratings),
                "erased_users": len(state.erased),
            }
        )
    )


@main.command()
@click.option("--log", "log_path", required=True, type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--redact", is_flag=True, default=False)
@click.option("--out", "out_path", type=click.Path(), default=None, help="Default: stdout.")
@_guarded
def export(log_path: str, fmt: str, redact: bool, out_path: str | None):
    """Export a log's workspace as CSV or JSON."""
    ws = Workspace(EventLog(log_path))
    if fmt == "csv":
        data = export_csv(ws, redact_authors=redact)
    else:
        from .analytics import scan

        data = export_json(ws, redact_authors=redact, flags=scan(ws.log.events()))
    if out_path is None:
        sys.stdout.buffer.write(data)
    else:
        Path(out_path).write_bytes(data)
        click.echo(f"wrote {len(data)} bytes to {out_path}", err=True)


@main.command()
@click.option("--p", "p", required=True, type=float, help="Per-voter probability of being correct.")
@click.option("--n", "n_voters", required=True, type=int, help="Number of voters (odd).")
@click.option("--trials", default=10_000, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@_guarded
def cjt(p: float, n_voters: int, trials: int, seed: int):
    """Estimate P(majority correct) for independent voters."""
    fraction = simmod.cjt_experiment(p, n_voters, trials, seed)
    click.echo(json.dumps({"p": p, "n_voters": n_voters, "trials": trials, "fraction_majority_correct": fraction}))


@main.command("bench-detectors")
@click.option("--config", "config_path", type=click.Path(), default=None, help="Default: built-in benchmark population.")
@click.option("--seed", type=int, default=7, show_default=True)
@_guarded
def bench_detectors(config_path: str | None, seed: int):
    """ROC-AUC of each detector against planted agents."""
    if config_path is None:
        config = simmod.benchmark_config(seed)
        params = DetectorParams()
    else:
        doc = _load_config(config_path)
        config = simmod.config_from_dict(doc)
        params = _detector_params(doc)
    auc = simmod.detector_benchmark(config, seed=seed, params=params)
    click.echo(json.dumps({"seed": seed, "auc": auc}))


@main.command("erase-user")
@click.option("--log", "log_path", required=True, type=click.Path())
@click.option("--user", "user_id", required=True)
@_guarded
def erase_user(log_path: str, user_id: str):
    """Erase a user's judgments and identity from a workspace log."""
    ws = Workspace(EventLog(log_path))
    summary = ws.erase_user(user_id)
    click.echo(
        json.dumps(
            {
                "user_id": summary.user_id,
                "erased": summary.erased,
                "already_erased": summary.already_erased,
                "votes_removed": summary.votes_removed,
                "ratings_removed": summary.ratings_removed,
            }
        )
    )


@main.command("user-data")
@click.option("--log", "log_path", required=True, type=click.Path())
@click.option("--user", "user_id", required=True)
@_guarded
def user_data(log_path: str, user_id: str):
    """Export one user's profile and events."""
    ws = Workspace(EventLog(log_path))
    click.echo(json.dumps(export_user_data(ws, user_id), sort_keys=True))


if __name__ == "__main__":
    main()
