from __future__ import annotations

from pathlib import Path
from typing import Callable

import orjson
import pytest

from inqml.config import reset_settings
from inqml.core.model import InqModel

W0, W1 = 0b01, 0b10
BOTH = 0b11

M0_DOC = {
    "worlds": ["w0", "w1"],
    "valuation": {"p": ["w0"]},
    "sigma": {"w0": [[], ["w0"]], "w1": [[], ["w1"]]},
}

P0_DOC = {
    "worlds": ["w0", "w1"],
    "valuation": {"p": ["w0"]},
    "sigma": {"w0": [["w0", "w1"]], "w1": [["w1"]]},
}


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    for name in ("INQML_CAP", "INQML_STATE_LIMIT", "INQML_LOG_LEVEL", "INQML_FUZZ_JOBS"):
        monkeypatch.delenv(name, raising=False)
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def m0() -> InqModel:
    """W={w0,w1}, V(p)={w0}, Σ(w0)={∅,{w0}}, Σ(w1)={∅,{w1}}."""
    return InqModel.build(["w0", "w1"], [[0, W0], [0, W1]], {"p": W0})


@pytest.fixture
def p0() -> InqModel:
    """M0 with Σ(w0)={{w0,w1}}, Σ(w1)={{w1}}; a pseudo-model."""
    return InqModel.build(["w0", "w1"], [[BOTH], [W1]], {"p": W0})


@pytest.fixture
def write_doc(tmp_path: Path) -> Callable[[str, dict], Path]:
    def write(name: str, document: dict) -> Path:
        path = tmp_path / name
        path.write_bytes(orjson.dumps(document))
        return path

    return write


@pytest.fixture
def m0_file(write_doc) -> Path:
    return write_doc("M0.json", M0_DOC)


@pytest.fixture
def p0_file(write_doc) -> Path:
    return write_doc("P0.json", P0_DOC)
