from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

import typer

from inqml.core import fo
from inqml.core.errors import InqmlError
from inqml.core.formula import depth, flatness_grade, modal_depth, size, to_text
from inqml.core.model import Level, validate
from inqml.core.parser import parse
from inqml.core.support import Strategy, supports, supports_graded
from inqml.core.translate import standard_translate, translation_stats, world_translate
from inqml.services.io import load_model, resolve_point
from inqml.services.reporting import abort, show, show_lines, wants_json

router = typer.Typer()
log = logging.getLogger("check_router")


@router.command("check")
def check(
    model_file: Path = typer.Argument(..., help="Model JSON file"),
    formula: str = typer.Argument(..., help="INQML formula, e.g. '?p' or '[+] (p vv q)'"),
    state: Optional[str] = typer.Option(None, "--state", help="Comma-separated worlds; '' is the empty state"),
    world: Optional[str] = typer.Option(None, "--world", help="Evaluate at a single world"),
    strategy: Strategy = typer.Option(Strategy.NAIVE, "--strategy"),
    trace: bool = typer.Option(False, "--trace", help="Print the clause-by-clause derivation"),
    as_json: bool = typer.Option(False, "--json"),
):
    """Does the state support the formula?"""
    try:
        model, stored = load_model(model_file)
        if model.kind is Level.INVALID:
            abort(f"{model_file}: {validate(model).describe(model)}")
        point = resolve_point(model, stored, state, world)
        phi = parse(formula, model.signature)
        lines: list[str] | None = [] if trace else None
        if strategy is Strategy.GRADED:
            result = supports_graded(model, point, phi)
            if lines is not None:
                supports(model, point, phi, trace=lines)
        else:
            result = supports(model, point, phi, trace=lines)
    except InqmlError as e:
        abort(str(e))

    log.info(f"✓ {model.format_state(point)} {'⊨' if result else '⊭'} {to_text(phi)}")
    verdict = "supported" if result else "unsupported"
    payload = {
        "formula": to_text(phi),
        "state": model.state_names(point),
        "strategy": strategy.value,
        "supported": result,
        "verdict": verdict,
    }
    if lines is not None:
        payload["trace"] = lines
    if wants_json(as_json):
        show(payload, title="check", as_json=True)
        return
    if lines:
        show_lines(lines, title="derivation")
    show(payload, title="check", as_json=False, headline=verdict)


@router.command("translate")
def translate(
    formula: str = typer.Argument(...),
    variant: str = typer.Option("state", "--variant", help="state: φ*(L); world: ST(φ, x)"),
    as_json: bool = typer.Option(False, "--json"),
):
    """Standard translation into two-sorted first-order logic."""
    if variant not in ("state", "world"):
        abort(f"unknown variant '{variant}' (use state or world)")
    try:
        phi = parse(formula)
    except InqmlError as e:
        abort(str(e))

    psi = standard_translate(phi) if variant == "state" else world_translate(phi)
    stats = translation_stats(phi, psi, world=variant == "world")
    payload = {
        "formula": to_text(phi),
        "variant": variant,
        "translation": fo.to_text(psi),
        "flatness": stats.flatness,
        "tuple_length": stats.tuple_length,
        "world_variables": stats.world_vars,
        "state_variables": stats.state_vars,
        "nodes": stats.nodes,
    }
    show(payload, title="translation", as_json=as_json, headline=payload["translation"])


@router.command("grade")
def grade(
    formula: str = typer.Argument(...),
    as_json: bool = typer.Option(False, "--json"),
):
    """Flatness grade and size measures of a formula."""
    try:
        phi = parse(formula)
    except InqmlError as e:
        abort(str(e))
    payload = {
        "formula": to_text(phi),
        "flatness": flatness_grade(phi),
        "tuple_length": flatness_grade(phi) + 1,
        "modal_depth": modal_depth(phi),
        "depth": depth(phi),
        "size": size(phi),
    }
    show(payload, title="grade", as_json=as_json, headline=f"flat={payload['flatness']}")
