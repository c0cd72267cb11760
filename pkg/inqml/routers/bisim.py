from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

import numpy as np
import typer

from inqml.core.bisim import bulk_equiv, ef_check, full_bisim, n_bisim
from inqml.core.errors import InqmlError
from inqml.core.formula import to_text
from inqml.services.ef_search import find_distinguishing
from inqml.services.generators import random_formula
from inqml.services.io import load_model, resolve_point
from inqml.services.reporting import abort, show

router = typer.Typer()
log = logging.getLogger("bisim_router")


def _pointed(file: Path, state: Optional[str], world: Optional[str]):
    model, stored = load_model(file)
    return model, resolve_point(model, stored, state, world)


@router.command("bisim")
def bisim(
    left_file: Path = typer.Argument(...),
    right_file: Path = typer.Argument(...),
    level: Optional[int] = typer.Option(None, "--level", min=0, help="Round count n; omit for the stabilized relation"),
    left_state: Optional[str] = typer.Option(None, "--left-state"),
    left_world: Optional[str] = typer.Option(None, "--left-world"),
    right_state: Optional[str] = typer.Option(None, "--right-state"),
    right_world: Optional[str] = typer.Option(None, "--right-world"),
    as_json: bool = typer.Option(False, "--json"),
):
    """Bisimulation game between two pointed models."""
    try:
        left, s = _pointed(left_file, left_state, left_world)
        right, t = _pointed(right_file, right_state, right_world)
        result = full_bisim(left, s, right, t) if level is None else n_bisim(left, s, right, t, level)
        bulk = bulk_equiv(left, s, right, t)
    except InqmlError as e:
        abort(str(e))
    payload = result.as_dict()
    payload["bulk_equivalent"] = bulk
    log.info(f"✓ level {result.level}: equivalent={result.equivalent}")
    show(payload, title="bisimulation", as_json=as_json, headline="equivalent" if result.equivalent else "not equivalent")


@router.command("ef")
def ef(
    left_file: Path = typer.Argument(...),
    right_file: Path = typer.Argument(...),
    level: int = typer.Option(1, "--level", min=0),
    samples: int = typer.Option(500, "--samples", min=1),
    seed: int = typer.Option(0, "--seed", min=0),
    formula_depth: int = typer.Option(3, "--depth", min=0),
    left_state: Optional[str] = typer.Option(None, "--left-state"),
    left_world: Optional[str] = typer.Option(None, "--left-world"),
    right_state: Optional[str] = typer.Option(None, "--right-state"),
    right_world: Optional[str] = typer.Option(None, "--right-world"),
    as_json: bool = typer.Option(False, "--json"),
):
    """Compare ~n with support agreement on sampled formulas of modal depth ≤ n."""
    try:
        left, s = _pointed(left_file, left_state, left_world)
        right, t = _pointed(right_file, right_state, right_world)
        rng = np.random.default_rng(seed)
        props = tuple(sorted(left.props))
        sample = [random_formula(rng, props, formula_depth, max_modal=level) for _ in range(samples)]
        report = ef_check(left, s, right, t, level, sample)
        search = None if report.equivalent else find_distinguishing(left, s, right, t, level)
    except InqmlError as e:
        abort(str(e))
    payload = report.as_dict()
    if search is not None:
        payload["distinguishing"] = None if search.formula is None else to_text(search.formula)
    headline = "sound" if report.sound else "DISAGREEMENT on an equivalent pair"
    show(payload, title="ehrenfeucht-fraisse", as_json=as_json, headline=headline)
    if not report.sound:
        raise typer.Exit(code=1)
