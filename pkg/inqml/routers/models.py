from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

import typer

from inqml.core.errors import InqmlError
from inqml.core.model import inquisitive_closure, validate
from inqml.core.relational import Policy, encode, state_closure, validate_relational
from inqml.models.schemas import ModelDocument, RelationalDocument
from inqml.services.io import load_model, load_relational, resolve_point, write_json
from inqml.services.reporting import abort, emit_json, show

router = typer.Typer()
log = logging.getLogger("models_router")


def _publish(payload: dict, out: Optional[Path]) -> None:
    if out is not None:
        write_json(out, payload)
    else:
        emit_json(payload)


@router.command("validate")
def validate_cmd(
    file: Path = typer.Argument(..., help="Model JSON, or relational JSON with --relational"),
    relational: bool = typer.Option(False, "--relational", help="Validate a relational structure"),
    as_json: bool = typer.Option(False, "--json"),
):
    """proper / pseudo / invalid for models; model / pseudo / invalid for relational structures."""
    try:
        if relational:
            rel = load_relational(file).to_struct()
            verdict = validate_relational(rel)
            payload = {"level": verdict.level.value, "condition": verdict.condition, "witness": verdict.witness}
        else:
            model, _ = load_model(file)
            verdict = validate(model)
            payload = {
                "level": verdict.level.value,
                "world": None if verdict.world is None else model.world_names[verdict.world],
                "reason": verdict.reason,
            }
    except InqmlError as e:
        abort(str(e))
    log.info(f"✓ {file}: {payload['level']}")
    show(payload, title="validation", as_json=as_json, headline=payload["level"])


@router.command("closure")
def closure(
    file: Path = typer.Argument(...),
    relational: bool = typer.Option(False, "--relational", help="State closure of a pointed relational structure"),
    out: Optional[Path] = typer.Option(None, "--out", help="Write the closed document here"),
):
    """Inquisitive closure M↓, or the state closure (Mod, s)↓ with --relational."""
    try:
        if relational:
            closed_rel = state_closure(load_relational(file).to_struct())
            payload = RelationalDocument.from_struct(closed_rel).model_dump(mode="json", exclude_none=True)
        else:
            model, point = load_model(file)
            closed = inquisitive_closure(model)
            payload = ModelDocument.from_model(closed, point).model_dump(mode="json", exclude_none=True)
    except InqmlError as e:
        abort(str(e))
    _publish(payload, out)


@router.command("encode")
def encode_cmd(
    file: Path = typer.Argument(...),
    state: Optional[str] = typer.Option(None, "--state"),
    world: Optional[str] = typer.Option(None, "--world"),
    policy: Policy = typer.Option(Policy.MINIMAL, "--policy"),
    out: Optional[Path] = typer.Option(None, "--out"),
):
    """Relational representation of a pointed model."""
    try:
        model, stored = load_model(file)
        point = resolve_point(model, stored, state, world)
        rel = encode(model, point, policy)
    except InqmlError as e:
        abort(str(e))
    log.info(f"✓ Encoded under {policy.value}: |S| = {len(rel.states)}")
    _publish(RelationalDocument.from_struct(rel).model_dump(mode="json", exclude_none=True), out)
