"""Reading and writing the toolkit's JSON documents."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, TypeVar

import orjson
from pydantic import BaseModel, ValidationError

from inqml.core.bits import InfoState
from inqml.core.errors import DocumentError
from inqml.core.model import InqModel
from inqml.models.schemas import CounterexampleBundle, ModelDocument, RelationalDocument

log = logging.getLogger("inqml_io")

Doc = TypeVar("Doc", bound=BaseModel)

JSON_OPTIONS = orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2


def dumps(payload: Any) -> bytes:
    """Deterministic JSON: sorted keys, two-space indent, trailing newline."""
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json", exclude_none=True)
    return orjson.dumps(payload, option=JSON_OPTIONS) + b"\n"


def write_json(path: Path, payload: Any) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dumps(payload))
    log.info(f"✓ Wrote {path}")


def load_document(path: Path, schema: type[Doc]) -> Doc:
    try:
        raw = orjson.loads(path.read_bytes())
    except FileNotFoundError:
        raise DocumentError(f"{path}: no such file") from None
    except orjson.JSONDecodeError as exc:
        raise DocumentError(f"{path}: not valid JSON ({exc})") from None
    try:
        return schema.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first.get("loc", ())) or "document"
        raise DocumentError(f"{path}: {where}: {first.get('msg')}") from None


def load_model(path: Path) -> tuple[InqModel, InfoState | None]:
    document = load_document(path, ModelDocument)
    model = document.to_model()
    log.debug(f"Loaded model {path} with {model.n_worlds} worlds")
    return model, document.point()


def load_relational(path: Path) -> RelationalDocument:
    return load_document(path, RelationalDocument)


def load_bundle(path: Path) -> CounterexampleBundle:
    return load_document(path, CounterexampleBundle)


def parse_state(model: InqModel, text: str) -> InfoState:
    """Comma-separated world names; the empty string is ∅."""
    names = [part.strip() for part in text.split(",") if part.strip()]
    return model.state_of(names)


def resolve_point(
    model: InqModel,
    stored: InfoState | None,
    state: str | None = None,
    world: str | None = None,
) -> InfoState:
    """Point from --state / --world, falling back to the point stored in the file."""
    if state is not None and world is not None:
        raise DocumentError("give either --state or --world, not both")
    if world is not None:
        return 1 << model.world_index(world)
    if state is not None:
        return parse_state(model, state)
    if stored is not None:
        return stored
    raise DocumentError("no point: pass --state or --world, or store one in the model file")
