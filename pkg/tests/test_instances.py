"""Instance files and the seeded generator."""

import json

import pytest

from rees_kit.instances import (GeneratorExhausted, bundled, bundled_names, instance_from_dict,
                                load_instance, random_instance, random_suite_specs, save_instance)
from rees_kit.rees import BRANCHES, ReesProblem
from rees_kit.ring import Field, RingError


def test_bundled_names_and_fields():
    assert bundled_names() == ["ex71", "ex72", "ex73"]
    inst = bundled("ex71", Field(32003))
    assert inst.ring.field.characteristic == 32003
    assert inst.n == 5 and inst.phi.cols == 4


def test_roundtrip(tmp_path, ex73):
    path = tmp_path / "ex73.json"
    save_instance(ex73, path)
    back = load_instance(path)
    assert back.phi == ex73.phi
    assert back.expected == ex73.expected and back.displayed == ex73.displayed
    assert json.loads(path.read_text())["id"] == "ex73"


def test_id_defaults_to_file_stem(tmp_path, ex71):
    data = ex71.to_dict()
    del data["id"]
    path = tmp_path / "mine.json"
    path.write_text(json.dumps(data))
    assert load_instance(path).id == "mine"


def test_with_field_and_order(ex71):
    lex = ex71.with_field(order="lex")
    assert lex.ring.order.kind == "lex"
    assert [str(e) for e in lex.phi.entries] == [str(e) for e in ex71.phi.entries]


def test_instance_from_dict_rejects_garbage():
    with pytest.raises(RingError, match="needs 20 entries"):
        instance_from_dict({"matrix": {"rows": 5, "cols": 4, "entries": ["x"]}})


@pytest.mark.parametrize("branch", BRANCHES)
def test_generator_is_deterministic_and_certified(branch):
    a = random_instance(branch, 5, 3)
    b = random_instance(branch, 5, 3)
    assert a.phi == b.phi and a.id == b.id
    p = ReesProblem(a.phi)
    assert p.setting.ok and p.branch == branch
    assert a.meta["branch"] == branch


def test_generator_seeds_differ():
    draws = {str(random_instance("I.L.reg", 5, s).phi.entries) for s in range(4)}
    assert len(draws) > 1


def test_generator_errors():
    with pytest.raises(ValueError):
        random_instance("I.X", 5, 0)
    with pytest.raises(GeneratorExhausted):
        random_instance("I.M2", 5, 0, max_tries=0)


def test_suite_specs_cover_branches():
    specs = random_suite_specs(22, 4)
    assert {b for b, _, _ in specs} == set(BRANCHES)
    assert {n for _, n, _ in specs} == {5, 6}
    assert specs == random_suite_specs(22, 4)
