from pathlib import Path

import pytest

from fmconf import parse_arc_table, parse_feature_xml

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
PROVIDER_ARCS = FIXTURES / "provider.arcs"
SAAS_APP_XML = FIXTURES / "saas_app.xml"


@pytest.fixture(scope="session")
def table_model():
    return parse_arc_table(PROVIDER_ARCS.read_text("utf-8"))


@pytest.fixture(scope="session")
def xml_model():
    return parse_feature_xml(SAAS_APP_XML.read_text("utf-8"))
