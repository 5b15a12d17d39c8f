from fractions import Fraction
from itertools import islice

import pytest

from fmconf import (
    Configuration,
    brute_force_enumerate,
    check_configuration,
    enumerate_configurations,
    is_valid,
    layer_metrics,
    layer_report,
)
from fmconf.engine import ViolationReason
from fmconf.errors import (
    NoLayerTagsError,
    ScopeTooLargeError,
    UnknownFeatureError,
)
from fmconf.model import Feature, FeatureId, build_model

MINIMAL_PROVIDER = [
    "SaaS_APP", "Provider", "PGUI", "PBP", "PS", "PDB", "page", "SLA",
    "billing", "metric", "security", "pEntity", "pCoding", "type",
    "pIdentifier", "share",
]


def cfg(model, tokens):
    return Configuration.from_tokens(model, tokens)


class TestIsValid:
    def test_minimal_provider_configuration(self, table_model):
        assert len(MINIMAL_PROVIDER) == 16
        assert is_valid(table_model, cfg(table_model, MINIMAL_PROVIDER), "SaaS_APP")
        assert is_valid(table_model, cfg(table_model, MINIMAL_PROVIDER), "Provider")

    def test_mutex_violation(self, table_model):
        config = cfg(table_model, MINIMAL_PROVIDER + ["menu", "tree", "standard"])
        violations = check_configuration(table_model, config, "SaaS_APP")
        assert any(v.reason is ViolationReason.ABOVE_MAX
                   and v.arc.tail.token == "menu" for v in violations)

    def test_empty_configuration_root_missing(self, table_model):
        violations = check_configuration(table_model, cfg(table_model, []), "SaaS_APP")
        assert [v.reason for v in violations] == [ViolationReason.ROOT_MISSING]

    def test_orphan_head(self, table_model):
        config = cfg(table_model, ["PGUI", "page", "tree"])
        violations = check_configuration(table_model, config, "PGUI")
        assert any(v.reason is ViolationReason.ORPHAN_HEAD
                   and v.arc.tail.token == "menu" for v in violations)

    def test_below_min(self, table_model):
        config = cfg(table_model, ["PGUI"])  # page is mandatory
        violations = check_configuration(table_model, config, "PGUI")
        assert any(v.reason is ViolationReason.BELOW_MIN for v in violations)

    def test_out_of_scope_selections_ignored(self, table_model):
        config = cfg(table_model, ["PGUI", "page", "billing"])
        assert is_valid(table_model, config, "PGUI")

    def test_unknown_member(self, table_model):
        config = Configuration.of([FeatureId("ghost")])
        with pytest.raises(UnknownFeatureError):
            is_valid(table_model, config, "PGUI")

    def test_cross_arc_inactive_when_tail_unselected(self):
        feats = [Feature(FeatureId(t)) for t in ("a", "b", "c")]
        from fmconf.model import HyperArc, Multiplicity
        arcs = [
            HyperArc(FeatureId("a"), (FeatureId("b"),), Multiplicity(0, 1)),
            HyperArc(FeatureId("a"), (FeatureId("c"),), Multiplicity(0, 1)),
            HyperArc(FeatureId("b"), (FeatureId("c"),), Multiplicity(1, 1), cross=True),
        ]
        m = build_model(feats, arcs, FeatureId("a"))
        # b unselected: the cross requirement does not fire
        assert is_valid(m, cfg(m, ["a", "c"]), "a")
        # b selected: c becomes required
        assert not is_valid(m, cfg(m, ["a", "b"]), "a")
        assert is_valid(m, cfg(m, ["a", "b", "c"]), "a")


class TestEnumerate:
    @pytest.mark.parametrize("scope,count", [
        ("PGUI", 24), ("PBP", 16), ("PS", 3), ("PDB", 6), ("Provider", 6912),
    ])
    def test_fixture_counts(self, table_model, scope, count):
        assert sum(1 for _ in enumerate_configurations(table_model, scope)) == count

    def test_leaf_scope(self, table_model):
        configs = list(enumerate_configurations(table_model, "billing"))
        assert [c.as_line() for c in configs] == ["billing"]

    def test_no_duplicates_and_sound(self, table_model):
        seen = set()
        for config in enumerate_configurations(table_model, "PBP"):
            assert config not in seen
            seen.add(config)
            assert is_valid(table_model, config, "PBP")

    def test_deterministic_sequence(self, table_model):
        a = list(enumerate_configurations(table_model, "PGUI"))
        b = list(enumerate_configurations(table_model, "PGUI"))
        assert a == b

    def test_ascending_bitvector_order(self, table_model):
        order = sorted((f.id for f in table_model.features if f.token in
                        {"PGUI", "page", "menu", "plugin", "color", "flag",
                         "tree", "standard"}), key=lambda f: f.index)
        vectors = [tuple(1 if fid in c.selected else 0 for fid in order)
                   for c in enumerate_configurations(table_model, "PGUI")]
        assert vectors == sorted(vectors)

    def test_lazy(self, table_model):
        stream = enumerate_configurations(table_model, "Provider")
        first = next(islice(stream, 1))
        assert "Provider" in first

    def test_cap_enforced(self, table_model):
        with pytest.raises(ScopeTooLargeError):
            enumerate_configurations(table_model, "Provider", cap=10)

    def test_cap_consent(self, table_model):
        stream = enumerate_configurations(table_model, "Provider", cap=10,
                                          allow_large=True)
        assert next(iter(stream)) is not None

    def test_unknown_scope(self, table_model):
        with pytest.raises(UnknownFeatureError):
            enumerate_configurations(table_model, "nope")

    def test_completeness_single_flips(self, table_model):
        emitted = set(enumerate_configurations(table_model, "PGUI"))
        subtree = table_model.subtree_tokens("PGUI")
        for config in emitted:
            for token in subtree:
                fid = table_model.feature(token).id
                if fid in config.selected:
                    flipped = Configuration(config.selected - {fid})
                else:
                    flipped = Configuration(config.selected | {fid})
                assert (flipped in emitted) == is_valid(table_model, flipped, "PGUI")


class TestBruteForce:
    def test_matches_engine_on_fixture_layers(self, table_model):
        for scope in ("PGUI", "PBP", "PS", "PDB"):
            assert brute_force_enumerate(table_model, scope) == \
                set(enumerate_configurations(table_model, scope))

    def test_single_mandatory_child(self):
        m = _two_feature_model(mandatory=True)
        assert len(brute_force_enumerate(m, "a")) == 1

    def test_single_optional_child(self):
        m = _two_feature_model(mandatory=False)
        assert len(brute_force_enumerate(m, "a")) == 2

    def test_cap(self, table_model):
        with pytest.raises(ScopeTooLargeError):
            brute_force_enumerate(table_model, "Provider")


def _two_feature_model(mandatory):
    from fmconf.model import HyperArc, Multiplicity
    feats = [Feature(FeatureId("a")), Feature(FeatureId("b"))]
    lo = 1 if mandatory else 0
    arcs = [HyperArc(FeatureId("a"), (FeatureId("b"),), Multiplicity(lo, 1))]
    return build_model(feats, arcs, FeatureId("a"))


class TestLayerMetrics:
    def test_pgui(self, table_model):
        m = layer_metrics(table_model, "PGUI")
        assert (m.k, m.n) == (24, 8)
        assert m.variability == Fraction(24, 255)
        common = {fid.token: frac for fid, frac in m.commonality.items()}
        assert common["page"] == 1
        assert common["plugin"] == Fraction(12, 24)
        assert common["tree"] == Fraction(6, 24)
        assert m.share("plugin") == 12

    def test_pdb(self, table_model):
        m = layer_metrics(table_model, "PDB")
        assert (m.k, m.n) == (6, 9)
        assert m.variability == Fraction(6, 511)
        common = {fid.token: frac for fid, frac in m.commonality.items()}
        assert common["pCoding"] == 1
        assert common["share"] == Fraction(3, 6)

    def test_leaf(self, table_model):
        m = layer_metrics(table_model, "billing")
        assert (m.k, m.n) == (1, 1)
        assert m.variability == Fraction(1, 1)
        assert m.commonality[table_model.feature("billing").id] == 1

    def test_scope_root_commonality_is_one(self, table_model):
        for scope in ("PGUI", "PBP", "PS", "PDB"):
            m = layer_metrics(table_model, scope)
            assert m.commonality[table_model.feature(scope).id] == 1

    def test_commonality_matches_brute_force(self, table_model):
        for scope in ("PGUI", "PDB"):
            products = brute_force_enumerate(table_model, scope)
            m = layer_metrics(table_model, scope)
            for fid, frac in m.commonality.items():
                share = sum(1 for p in products if fid in p.selected)
                assert frac == Fraction(share, len(products))


class TestLayerReport:
    def test_table_fixture(self, table_model):
        report = layer_report(table_model)
        got = {(lvl.value, lyr.value): m.k for (lvl, lyr), m in report.items()}
        assert got == {
            ("provider", "GUI"): 24,
            ("provider", "BP"): 16,
            ("provider", "S"): 3,
            ("provider", "DB"): 6,
        }

    def test_xml_tenant_layers(self, xml_model):
        report = layer_report(xml_model)
        for layer in ("GUI", "BP", "S", "DB"):
            entry = [m for (lvl, lyr), m in report.items()
                     if lvl.value == "tenant" and lyr.value == layer]
            assert len(entry) == 1
            assert (entry[0].k, entry[0].n) == (1, 1)

    def test_untagged_model_rejected(self):
        m = _two_feature_model(mandatory=True)
        with pytest.raises(NoLayerTagsError):
            layer_report(m)
