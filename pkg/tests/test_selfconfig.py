from fractions import Fraction

import pytest

from fmconf import (
    Configuration,
    RequirementSet,
    brute_force_enumerate,
    is_valid,
    reconfigure,
    select_configuration,
)
from fmconf.errors import (
    InvalidRequirementError,
    NoValidConfigurationError,
    UnknownFeatureError,
)


def req(model, require=(), exclude=(), weights=None):
    return RequirementSet.of(
        required=[model.feature(t).id for t in require],
        excluded=[model.feature(t).id for t in exclude],
        weights={model.feature(t).id: Fraction(w) for t, w in (weights or {}).items()},
    )


def cfg(model, tokens):
    return Configuration.from_tokens(model, tokens)


class TestRequirementSet:
    def test_overlap_rejected(self, table_model):
        with pytest.raises(InvalidRequirementError):
            req(table_model, require=["tree"], exclude=["tree"])

    def test_negative_weight_rejected(self, table_model):
        with pytest.raises(InvalidRequirementError):
            req(table_model, weights={"tree": -1})

    def test_default_weight_is_one(self, table_model):
        r = req(table_model)
        ids = [table_model.feature(t).id for t in ("tree", "menu")]
        assert r.weight_of(ids) == 2


class TestSelect:
    def test_require_tree_propagates(self, table_model):
        result = select_configuration(table_model, "PGUI", req(table_model, require=["tree"]))
        assert "menu" in result and "tree" in result
        assert "standard" not in result

    def test_require_tree_and_standard_infeasible(self, table_model):
        with pytest.raises(NoValidConfigurationError):
            select_configuration(table_model, "PGUI",
                                 req(table_model, require=["tree", "standard"]))

    def test_empty_requirements_provider_minimum(self, table_model):
        result = select_configuration(table_model, "Provider", req(table_model))
        expected_size = 1 + sum(
            len(min(brute_force_enumerate(table_model, layer), key=len))
            for layer in ("PGUI", "PBP", "PS", "PDB"))
        assert len(result) == expected_size
        assert is_valid(table_model, result, "Provider")

    def test_ps_minimum_line(self, table_model):
        result = select_configuration(table_model, "PS", req(table_model))
        assert result.as_line() == "PS,SLA,billing,metric,security"

    def test_weighted_pick_flips_xor_choice(self, table_model):
        # share costs 5, isolate stays at 1: the cheap branch wins
        result = select_configuration(table_model, "PDB",
                                      req(table_model, weights={"share": 5}))
        assert "isolate" in result and "share" not in result

    def test_never_beaten_by_oracle(self, table_model):
        r = req(table_model, require=["tree"], weights={"plugin": "1/2"})
        result = select_configuration(table_model, "PGUI", r)
        weight = r.weight_of(result.selected)
        for product in brute_force_enumerate(table_model, "PGUI"):
            if r.satisfied_by(product):
                assert r.weight_of(product.selected) >= weight

    def test_unknown_feature(self, table_model):
        with pytest.raises(UnknownFeatureError):
            select_configuration(
                table_model, "PGUI",
                RequirementSet.of(required=[table_model.feature("billing").id]))

    def test_deterministic(self, table_model):
        a = select_configuration(table_model, "PDB", req(table_model))
        b = select_configuration(table_model, "PDB", req(table_model))
        assert a == b


class TestReconfigure:
    def test_exclude_plugin_removes_exactly_plugin(self, table_model):
        current = cfg(table_model, ["PGUI", "page", "plugin"])
        plan = reconfigure(table_model, "PGUI", current,
                           req(table_model, exclude=["plugin"]))
        assert {f.token for f in plan.remove} == {"plugin"}
        assert plan.add == frozenset()
        assert plan.delta_size == 1
        assert plan.cost == 1

    def test_already_satisfying_current_gives_empty_plan(self, table_model):
        current = cfg(table_model, ["PGUI", "page"])
        plan = reconfigure(table_model, "PGUI", current, req(table_model))
        assert plan.add == frozenset() and plan.remove == frozenset()
        assert plan.delta_size == 0
        assert plan.target == current

    def test_repair_orphan_keeps_tree(self, table_model):
        current = cfg(table_model, ["PGUI", "tree"])
        plan = reconfigure(table_model, "PGUI", current, req(table_model))
        assert {f.token for f in plan.add} == {"page", "menu"}
        assert plan.remove == frozenset()
        assert plan.delta_size == 2

    def test_plan_invariants(self, table_model):
        current = cfg(table_model, ["PGUI", "tree", "standard"])
        r = req(table_model, require=["plugin"])
        plan = reconfigure(table_model, "PGUI", current, r)
        assert plan.add == plan.target.selected - current.selected
        assert plan.remove == current.selected - plan.target.selected
        assert plan.delta_size == len(plan.add) + len(plan.remove)
        assert is_valid(table_model, plan.target, "PGUI")
        assert r.satisfied_by(plan.target)

    def test_never_beaten_by_oracle(self, table_model):
        current = cfg(table_model, ["PGUI", "page", "flag", "tree"])
        r = req(table_model)
        plan = reconfigure(table_model, "PGUI", current, r)
        cur = current.selected
        for product in brute_force_enumerate(table_model, "PGUI"):
            delta = len(product.selected ^ cur)
            cost = r.weight_of(cur - product.selected)
            assert (delta, cost) >= (plan.delta_size, plan.cost)

    def test_infeasible(self, table_model):
        current = cfg(table_model, ["PGUI", "page"])
        with pytest.raises(NoValidConfigurationError):
            reconfigure(table_model, "PGUI", current,
                        req(table_model, require=["tree"], exclude=["menu"]))

    def test_unknown_current_member(self, table_model):
        from fmconf.model import FeatureId
        current = Configuration.of([FeatureId("ghost")])
        with pytest.raises(UnknownFeatureError):
            reconfigure(table_model, "PGUI", current, req(table_model))
