from __future__ import annotations

from typing import Optional

import typer

from inqml.config import setup_logging
from inqml.routers import bisim, check, fuzz, models

app = typer.Typer(
    name="inqml",
    help="Inquisitive modal logic: support semantics, standard translation, bisimulation, fuzzing.",
    no_args_is_help=True,
    add_completion=False,
)


# ----------------------------
# GLOBAL OPTIONS
# ----------------------------
@app.callback()
def main(
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Overrides INQML_LOG_LEVEL"),
):
    setup_logging(log_level)


# ----------------------------
# COMMAND ROUTERS
# ----------------------------
app.add_typer(check.router)
app.add_typer(models.router)
app.add_typer(bisim.router)
app.add_typer(fuzz.router)
