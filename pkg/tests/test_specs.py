# Tests for spec-file parsing and its diagnostics

import pytest

from kernel_atomicity.fields import GF, QQ
from kernel_atomicity.specs import (
    ActionSpec,
    GroupSpec,
    HomSpec,
    LinearSystemSpec,
    QuotientSpec,
    load_spec,
    parse_spec,
    parse_spec_text,
)
from kernel_atomicity.utils import SpecParseError


def parse_error(text, **kwargs):
    with pytest.raises(SpecParseError) as info:
        parse_spec_text(text, **kwargs)
    return info.value


class TestLoading:
    def test_hom_with_inline_groups(self, specs_dir):
        spec = load_spec(specs_dir / "sign_map.json")
        assert isinstance(spec, HomSpec)
        assert spec.kind == "hom"
        assert spec.domain.catalog_name == "symmetric"
        assert spec.domain.parameter == 3
        assert spec.map == (0, 1, 1, 0, 0, 1)

    def test_group_reference_resolves_next_to_the_spec(self, specs_dir, monkeypatch, tmp_path):
        monkeypatch.chdir(tmp_path)
        spec = load_spec(specs_dir / "sign_generators.yaml")
        assert spec.kind == "hom-gen"
        assert spec.domain.kind == "perm"
        assert spec.domain.generators == ((1, 0, 2), (0, 2, 1))
        assert spec.domain.source.endswith("s3.json")
        assert spec.images == (1, 1)

    def test_nested_reference_in_subdirectory(self, tmp_path):
        (tmp_path / "groups").mkdir()
        (tmp_path / "groups" / "c3.yaml").write_text("spec_version: 1\nkind: catalog\nname: cyclic\nparameter: 3\n")
        quotient = "spec_version: 1\nkind: quotient\ngroup: groups/c3.yaml\nsubgroup: []\n"
        (tmp_path / "quotient.yaml").write_text(quotient)
        spec = load_spec(tmp_path / "quotient.yaml")
        assert isinstance(spec, QuotientSpec)
        assert spec.group.describe() == "catalog cyclic(3)"
        assert spec.subgroup == ()

    def test_linear_system_over_gf3(self, specs_dir):
        spec = load_spec(specs_dir / "gf3_system.yaml")
        assert isinstance(spec, LinearSystemSpec)
        assert spec.field == GF(3)
        assert spec.matrix.rows == ((1, 2, 0, 1), (0, 1, 1, 2))
        assert spec.rhs == (1, 0)

    def test_rational_entries(self):
        spec = parse_spec_text('spec_version: 1\nkind: linear-system\nfield: Q\nmatrix: [["1/3", 2]]\nrhs: ["-1/2"]\n')
        assert spec.field == QQ
        assert str(spec.matrix.rows[0][0]) == "1/3"
        assert str(spec.rhs[0]) == "-1/2"

    def test_actions(self, specs_dir):
        spec = load_spec(specs_dir / "swap_action.json")
        assert isinstance(spec, ActionSpec)
        assert spec.set_size == 3
        assert spec.table == ((0, 1, 2), (1, 0, 2))
        natural = load_spec(specs_dir / "natural_s3.yaml")
        assert natural.kind == "natural-action"
        assert natural.table is None

    def test_build_group(self, specs_dir, config):
        spec = load_spec(specs_dir / "s3.json")
        assert isinstance(spec, GroupSpec)
        assert spec.describe() == "permutation group of degree 3 on 2 generators"
        G = spec.build(config)
        assert G.order == 6
        assert G.name == "S3"

    def test_cayley_labels(self):
        spec = parse_spec(
            {"spec_version": 1, "kind": "cayley", "order": 2, "table": [[0, 1], [1, 0]], "labels": ["e", "a"]}
        )
        assert spec.labels == ("e", "a")
        assert spec.describe() == "cayley table of order 2"


class TestDiagnostics:
    def test_float_entry_names_field_and_line(self, specs_dir):
        with pytest.raises(SpecParseError) as info:
            load_spec(specs_dir / "float_entry.json")
        e = info.value
        assert e.field == "matrix[0][1]"
        assert e.line == 5
        assert "num/den" in e.message

    def test_unknown_kind(self):
        e = parse_error("spec_version: 1\nkind: banana\n")
        assert (e.field, e.line) == ("kind", 2)

    def test_unsupported_version(self):
        e = parse_error("spec_version: 2\nkind: perm\ndegree: 1\ngenerators: []\n")
        assert (e.field, e.line) == ("spec_version", 1)

    def test_missing_version(self):
        e = parse_error("kind: perm\ndegree: 1\ngenerators: []\n")
        assert e.field == "spec_version"

    def test_unknown_field(self):
        e = parse_error("spec_version: 1\nkind: perm\ndegree: 2\ngenerators: [[1, 0]]\ncolour: red\n")
        assert (e.field, e.line) == ("colour", 5)

    def test_nested_field_path(self):
        text = (
            "spec_version: 1\n"
            "kind: hom\n"
            "domain:\n"
            "  kind: cayley\n"
            "  table: [[0]]\n"
            "codomain: {kind: catalog, name: cyclic, parameter: 2}\n"
            "map: [0]\n"
        )
        e = parse_error(text)
        assert e.field == "domain.order"
        assert "missing required field" in e.message

    def test_boolean_is_not_an_integer(self):
        e = parse_error("spec_version: 1\nkind: perm\ndegree: true\ngenerators: []\n")
        assert e.field == "degree"

    def test_generator_length(self):
        e = parse_error("spec_version: 1\nkind: perm\ndegree: 3\ngenerators: [[1, 0, 2], [1, 0]]\n")
        assert (e.field, e.line) == ("generators[1]", 4)

    def test_action_row_length(self):
        text = (
            "spec_version: 1\nkind: action\ngroup: {kind: catalog, name: cyclic, parameter: 2}\n"
            "set_size: 2\ntable: [[0, 1], [1]]\n"
        )
        assert parse_error(text).field == "table[1]"

    def test_natural_action_needs_permutations(self):
        text = "spec_version: 1\nkind: natural-action\ngroup: {kind: cayley, order: 1, table: [[0]]}\n"
        assert parse_error(text).field == "group"

    def test_composite_modulus(self):
        e = parse_error("spec_version: 1\nkind: linear-system\nfield: {gf: 4}\nmatrix: [[1]]\nrhs: [0]\n")
        assert e.field == "field.gf"
        assert "not prime" in e.message

    def test_rhs_length(self):
        e = parse_error("spec_version: 1\nkind: linear-system\nfield: Q\nmatrix: [[1], [2]]\nrhs: [0]\n")
        assert e.field == "rhs"

    def test_missing_reference(self, tmp_path):
        text = (
            "spec_version: 1\nkind: hom-gen\ndomain: nowhere.json\n"
            "codomain: {kind: catalog, name: cyclic, parameter: 2}\nimages: []\n"
        )
        e = parse_error(text, base_dir=tmp_path)
        assert e.field == "domain"
        assert "not found" in e.message

    def test_malformed_document(self):
        e = parse_error("spec_version: 1\nkind: [perm\n")
        assert e.line is not None
        assert e.message.startswith("malformed document")

    def test_empty_document(self):
        assert parse_error("").message == "spec file is empty"

    def test_missing_file(self, tmp_path):
        with pytest.raises(SpecParseError) as info:
            load_spec(tmp_path / "absent.json")
        assert "cannot read spec" in info.value.message
