"""
Shared fixtures for the gysin test suite
"""
import json

import pytest
from click.testing import CliRunner

from gysin.complexes import cpn_complex, rp2_complex
from gysin.documents import encode
from gysin.factory import hopf_two_line
from gysin.rings import QQ, ZZ, Ring


@pytest.fixture
def hopf():
    return hopf_two_line(ZZ)


@pytest.fixture
def rp2():
    return rp2_complex(ZZ)


@pytest.fixture(params=["Z", "Q"], ids=["Z", "Q"])
def ring(request) -> Ring:
    return ZZ if request.param == "Z" else QQ


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def write_doc(tmp_path):
    """Write an object (or a raw dict) as a JSON document and return its path."""

    def _write(obj, name: str = "doc.json") -> str:
        doc = obj if isinstance(obj, dict) else encode(obj)
        path = tmp_path / name
        path.write_text(json.dumps(doc), encoding="utf-8")
        return str(path)

    return _write


@pytest.fixture
def cpn2_path(write_doc):
    return write_doc(cpn_complex(2), "cpn2.json")
