from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

import typer
from pydantic import ValidationError

from inqml.config import get_settings
from inqml.core.errors import InqmlError
from inqml.models.schemas import FuzzConfig
from inqml.services.fuzzing import replay as replay_bundle
from inqml.services.fuzzing import run_fuzz
from inqml.services.io import load_bundle, write_json
from inqml.services.reporting import abort, fuzz_payload, show, show_fuzz_report

router = typer.Typer()
log = logging.getLogger("fuzz_router")


def _split(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


@router.command("fuzz")
def fuzz(
    seed: int = typer.Option(0, "--seed", min=0),
    trials: int = typer.Option(1000, "--trials", min=1),
    max_worlds: int = typer.Option(5, "--max-worlds", min=1),
    props: int = typer.Option(3, "--props", min=1),
    depth: int = typer.Option(3, "--depth", min=0),
    policy: str = typer.Option("minimal,subsets,full", "--policy", help="Comma-separated encoding policies"),
    checks: str = typer.Option("fragment,graded,persistency,closure", "--checks"),
    jobs: Optional[int] = typer.Option(None, "--jobs", min=1, help="Worker processes (default INQML_FUZZ_JOBS)"),
    mutate: Optional[str] = typer.Option(None, "--mutate", help="Inject one seeded bug"),
    ef_samples: int = typer.Option(500, "--ef-samples", min=1),
    no_shrink: bool = typer.Option(False, "--no-shrink"),
    out: Optional[Path] = typer.Option(None, "--out", help="Write the JSON report here"),
    bundle_dir: Optional[Path] = typer.Option(None, "--bundle-dir", help="Write one JSON bundle per counterexample"),
    as_json: bool = typer.Option(False, "--json"),
):
    """Differential testing of every oracle; exit status 0 iff no failures."""
    try:
        config = FuzzConfig(
            seed=seed,
            trials=trials,
            max_worlds=max_worlds,
            n_props=props,
            max_formula_depth=depth,
            policies=_split(policy),
            checks=_split(checks),
            jobs=jobs or get_settings().fuzz_jobs,
            mutation=mutate,
            ef_samples=ef_samples,
            shrink=not no_shrink,
        )
    except ValidationError as e:
        first = e.errors()[0]
        abort(f"{'.'.join(str(p) for p in first.get('loc', ()))}: {first.get('msg')}")

    log.info("=" * 80)
    log.info(f"Fuzzing with seed {config.seed}, {config.trials} trials per check")
    log.info("=" * 80)
    try:
        report = run_fuzz(config)
    except InqmlError as e:
        abort(str(e))

    if out is not None:
        write_json(out, fuzz_payload(report))
    if bundle_dir is not None:
        for bundle in report.bundles:
            write_json(bundle_dir / f"{bundle.check}-{bundle.trial}.json", bundle)
    show_fuzz_report(report, as_json=as_json)
    if report.failures:
        raise typer.Exit(code=1)


@router.command("replay")
def replay(
    bundle_file: Path = typer.Argument(..., help="Counterexample bundle written by fuzz"),
    as_json: bool = typer.Option(False, "--json"),
):
    """Re-run a counterexample bundle; exit status 1 when it still fails."""
    try:
        bundle = load_bundle(bundle_file)
        outcome = replay_bundle(bundle)
    except InqmlError as e:
        abort(str(e))
    payload = {"check": bundle.check, "trial": bundle.trial, "failed": outcome.failed, "verdicts": outcome.verdicts}
    show(payload, title="replay", as_json=as_json, headline="still fails" if outcome.failed else "passes")
    if outcome.failed:
        raise typer.Exit(code=1)
