"""Spec files: the textual inputs of every verification command.

Spec files are JSON or YAML documents carrying ``"spec_version": 1`` and a
``kind``. Group specs may be nested inline or referenced by a path relative
to the referring file. Parse errors name the offending field and, where the
document provides one, its line.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import yaml

from kernel_atomicity.catalog import catalog
from kernel_atomicity.config import AtomicityConfig, load_config
from kernel_atomicity.fields import GF, QQ, Field
from kernel_atomicity.groups import FiniteGroup, from_cayley_table, from_permutation_generators
from kernel_atomicity.linear import ExactMatrix, Vector
from kernel_atomicity.utils.errors import AtomicityError, SpecParseError

# Set up logger
logger = logging.getLogger(__name__)

SPEC_VERSION = 1
GROUP_KINDS = ("cayley", "perm", "catalog")
HOM_KINDS = ("hom", "hom-gen")
ACTION_KINDS = ("action", "natural-action")
LINEAR_KINDS = ("linear-system",)
QUOTIENT_KINDS = ("quotient",)
ALL_KINDS = GROUP_KINDS + HOM_KINDS + ACTION_KINDS + LINEAR_KINDS + QUOTIENT_KINDS

_COMMON_FIELDS = {"spec_version", "kind", "name", "description"}
_FIELDS = {
    "cayley": {"order", "table", "labels"},
    "perm": {"degree", "generators"},
    "catalog": {"parameter"},
    "hom": {"domain", "codomain", "map"},
    "hom-gen": {"domain", "codomain", "images"},
    "action": {"group", "set_size", "table"},
    "natural-action": {"group"},
    "linear-system": {"field", "matrix", "rhs"},
    "quotient": {"group", "subgroup"},
}

FieldPath = Tuple[Union[str, int], ...]


def _render(path: FieldPath) -> str:
    text = ""
    for part in path:
        if isinstance(part, int):
            text += f"[{part}]"
        else:
            text += f".{part}" if text else part
    return text or "<root>"


class _Context:
    """Where a spec came from, for diagnostics."""

    def __init__(self, source: str, node: Optional[yaml.Node], base_dir: Path, prefix: FieldPath = ()):
        self.source = source
        self.node = node
        self.base_dir = base_dir
        self.prefix = prefix

    def nested(self, key: Union[str, int]) -> "_Context":
        return _Context(self.source, self.node, self.base_dir, self.prefix + (key,))

    def line_of(self, path: FieldPath) -> Optional[int]:
        node = self.node
        if node is None:
            return None
        line = node.start_mark.line + 1
        for part in path:
            child = None
            if isinstance(node, yaml.MappingNode):
                for key_node, value_node in node.value:
                    if key_node.value == part:
                        child = value_node
                        break
            elif isinstance(node, yaml.SequenceNode) and isinstance(part, int) and 0 <= part < len(node.value):
                child = node.value[part]
            if child is None:
                break
            node = child
            line = node.start_mark.line + 1
        return line

    def error(self, message: str, *path: Union[str, int]) -> SpecParseError:
        full = self.prefix + tuple(path)
        return SpecParseError(message, path=self.source, field=_render(full), line=self.line_of(full))


# Spec objects

@dataclass(frozen=True)
class GroupSpec:
    """An unbuilt group description."""

    kind: str
    source: str
    name: str = ""
    order: Optional[int] = None
    table: Optional[Tuple[Tuple[int, ...], ...]] = None
    labels: Optional[Tuple[str, ...]] = None
    degree: Optional[int] = None
    generators: Optional[Tuple[Tuple[int, ...], ...]] = None
    catalog_name: Optional[str] = None
    parameter: Optional[int] = None

    def build(self, config: Optional[AtomicityConfig] = None) -> FiniteGroup:
        config = config or load_config()
        if self.kind == "cayley":
            return from_cayley_table(self.table, name=self.name, labels=self.labels, config=config)
        if self.kind == "perm":
            return from_permutation_generators(self.degree, self.generators, name=self.name, config=config)
        return catalog(self.catalog_name, self.parameter, config)

    def describe(self) -> str:
        if self.kind == "cayley":
            return f"cayley table of order {self.order}"
        if self.kind == "perm":
            return f"permutation group of degree {self.degree} on {len(self.generators)} generators"
        if self.parameter is None:
            return f"catalog {self.catalog_name}"
        return f"catalog {self.catalog_name}({self.parameter})"


@dataclass(frozen=True)
class HomSpec:
    kind: str
    source: str
    domain: GroupSpec
    codomain: GroupSpec
    map: Optional[Tuple[int, ...]] = None
    images: Optional[Tuple[int, ...]] = None


@dataclass(frozen=True)
class ActionSpec:
    kind: str
    source: str
    group: GroupSpec
    set_size: Optional[int] = None
    table: Optional[Tuple[Tuple[int, ...], ...]] = None


@dataclass(frozen=True)
class LinearSystemSpec:
    kind: str
    source: str
    field: Field
    matrix: ExactMatrix
    rhs: Vector


@dataclass(frozen=True)
class QuotientSpec:
    kind: str
    source: str
    group: GroupSpec
    subgroup: Tuple[int, ...] = field(default_factory=tuple)


Spec = Union[GroupSpec, HomSpec, ActionSpec, LinearSystemSpec, QuotientSpec]


# Field readers

def _int(ctx: _Context, value: Any, *path: Union[str, int], minimum: Optional[int] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ctx.error(f"expected an integer, got {value!r}", *path)
    if minimum is not None and value < minimum:
        raise ctx.error(f"expected an integer >= {minimum}, got {value}", *path)
    return value


def _list(ctx: _Context, value: Any, *path: Union[str, int]) -> list:
    if not isinstance(value, list):
        raise ctx.error(f"expected a list, got {type(value).__name__}", *path)
    return value


def _int_list(ctx: _Context, value: Any, *path: Union[str, int]) -> Tuple[int, ...]:
    items = _list(ctx, value, *path)
    return tuple(_int(ctx, v, *path, i) for i, v in enumerate(items))


def _int_matrix(ctx: _Context, value: Any, *path: Union[str, int]) -> Tuple[Tuple[int, ...], ...]:
    rows = _list(ctx, value, *path)
    return tuple(_int_list(ctx, row, *path, i) for i, row in enumerate(rows))


def _require(ctx: _Context, data: Dict[str, Any], key: str) -> Any:
    if key not in data:
        raise ctx.error(f"missing required field '{key}'", key)
    return data[key]


def _check_header(ctx: _Context, data: Any, top_level: bool) -> str:
    if not isinstance(data, dict):
        raise ctx.error("spec must be a mapping")
    if "spec_version" in data or top_level:
        version = data.get("spec_version")
        if version != SPEC_VERSION:
            raise ctx.error(f"unsupported spec_version {version!r}, expected {SPEC_VERSION}", "spec_version")
    kind = data.get("kind")
    if kind not in ALL_KINDS:
        raise ctx.error(f"unknown kind {kind!r}", "kind")
    unknown = sorted(set(data) - _COMMON_FIELDS - _FIELDS[kind])
    if unknown:
        raise ctx.error(f"unknown field '{unknown[0]}' for kind {kind}", unknown[0])
    return kind


# Parsers

def _parse_group(ctx: _Context, data: Any, top_level: bool = False) -> GroupSpec:
    if isinstance(data, str):
        return _load_group_file(ctx, data)
    kind = _check_header(ctx, data, top_level)
    if kind not in GROUP_KINDS:
        raise ctx.error(f"expected a group spec, got kind {kind!r}", "kind")
    name = str(data.get("name", ""))
    if kind == "cayley":
        order = _int(ctx, _require(ctx, data, "order"), "order", minimum=1)
        table = _int_matrix(ctx, _require(ctx, data, "table"), "table")
        if len(table) != order:
            raise ctx.error(f"table has {len(table)} rows, order is {order}", "table")
        for i, row in enumerate(table):
            if len(row) != order:
                raise ctx.error(f"row has {len(row)} entries, order is {order}", "table", i)
        labels = None
        if "labels" in data:
            raw = _list(ctx, data["labels"], "labels")
            if len(raw) != order:
                raise ctx.error(f"expected {order} labels, got {len(raw)}", "labels")
            labels = tuple(str(v) for v in raw)
        return GroupSpec(kind, ctx.source, name=name, order=order, table=table, labels=labels)
    if kind == "perm":
        degree = _int(ctx, _require(ctx, data, "degree"), "degree", minimum=1)
        generators = _int_matrix(ctx, _require(ctx, data, "generators"), "generators")
        for i, gen in enumerate(generators):
            if len(gen) != degree:
                raise ctx.error(f"generator has {len(gen)} images, degree is {degree}", "generators", i)
        return GroupSpec(kind, ctx.source, name=name, degree=degree, generators=generators)
    catalog_name = _require(ctx, data, "name")
    if not isinstance(catalog_name, str):
        raise ctx.error("catalog name must be a string", "name")
    parameter = data.get("parameter")
    if parameter is not None:
        parameter = _int(ctx, parameter, "parameter")
    return GroupSpec(kind, ctx.source, name=catalog_name, catalog_name=catalog_name, parameter=parameter)


def _load_group_file(ctx: _Context, reference: str) -> GroupSpec:
    path = (ctx.base_dir / reference).resolve()
    if not path.is_file():
        raise ctx.error(f"referenced group spec {reference!r} not found")
    data, node = _read_document(path)
    inner = _Context(str(path), node, path.parent)
    return _parse_group(inner, data, top_level=True)


def _parse_hom(ctx: _Context, kind: str, data: Dict[str, Any]) -> HomSpec:
    domain = _parse_group(ctx.nested("domain"), _require(ctx, data, "domain"))
    codomain = _parse_group(ctx.nested("codomain"), _require(ctx, data, "codomain"))
    if kind == "hom":
        return HomSpec(kind, ctx.source, domain, codomain, map=_int_list(ctx, _require(ctx, data, "map"), "map"))
    return HomSpec(kind, ctx.source, domain, codomain, images=_int_list(ctx, _require(ctx, data, "images"), "images"))


def _parse_action(ctx: _Context, kind: str, data: Dict[str, Any]) -> ActionSpec:
    group = _parse_group(ctx.nested("group"), _require(ctx, data, "group"))
    if kind == "natural-action":
        if group.kind == "cayley":
            raise ctx.error("natural action needs a permutation or catalog group", "group")
        return ActionSpec(kind, ctx.source, group)
    set_size = _int(ctx, _require(ctx, data, "set_size"), "set_size", minimum=1)
    table = _int_matrix(ctx, _require(ctx, data, "table"), "table")
    for i, row in enumerate(table):
        if len(row) != set_size:
            raise ctx.error(f"row has {len(row)} entries, set_size is {set_size}", "table", i)
    return ActionSpec(kind, ctx.source, group, set_size=set_size, table=table)


def _parse_field(ctx: _Context, raw: Any) -> Field:
    if raw == "Q":
        return QQ
    if isinstance(raw, dict) and set(raw) == {"gf"}:
        p = _int(ctx, raw["gf"], "field", "gf", minimum=2)
        try:
            return GF(p)
        except AtomicityError as e:
            raise ctx.error(e.message, "field", "gf")
    raise ctx.error(f"field must be \"Q\" or {{\"gf\": p}}, got {raw!r}", "field")


def _parse_scalar(ctx: _Context, F: Field, value: Any, *path: Union[str, int]) -> Any:
    if isinstance(value, float):
        raise ctx.error(f"floating-point entry {value!r} is not exact; write it as \"num/den\"", *path)
    try:
        return F.convert(value)
    except AtomicityError as e:
        raise ctx.error(e.message, *path)


def _parse_linear(ctx: _Context, data: Dict[str, Any]) -> LinearSystemSpec:
    F = _parse_field(ctx, _require(ctx, data, "field"))
    rows = _list(ctx, _require(ctx, data, "matrix"), "matrix")
    if not rows:
        raise ctx.error("matrix must have at least one row", "matrix")
    matrix_rows: List[Tuple[Any, ...]] = []
    for i, row in enumerate(rows):
        row = _list(ctx, row, "matrix", i)
        if not row:
            raise ctx.error("matrix rows must be nonempty", "matrix", i)
        if len(row) != len(rows[0]):
            raise ctx.error(f"row has {len(row)} entries, expected {len(rows[0])}", "matrix", i)
        matrix_rows.append(tuple(_parse_scalar(ctx, F, v, "matrix", i, j) for j, v in enumerate(row)))
    rhs = _list(ctx, _require(ctx, data, "rhs"), "rhs")
    if len(rhs) != len(matrix_rows):
        raise ctx.error(f"rhs has {len(rhs)} entries, matrix has {len(matrix_rows)} rows", "rhs")
    vector = tuple(_parse_scalar(ctx, F, v, "rhs", i) for i, v in enumerate(rhs))
    return LinearSystemSpec("linear-system", ctx.source, F, ExactMatrix(F, tuple(matrix_rows)), vector)


def _parse_quotient(ctx: _Context, data: Dict[str, Any]) -> QuotientSpec:
    group = _parse_group(ctx.nested("group"), _require(ctx, data, "group"))
    seeds = _int_list(ctx, _require(ctx, data, "subgroup"), "subgroup")
    return QuotientSpec("quotient", ctx.source, group, seeds)


def _read_document(path: Path) -> Tuple[Any, Optional[yaml.Node]]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SpecParseError(f"cannot read spec: {e.strerror}", path=str(path))
    return _parse_text(text, str(path))


def _parse_text(text: str, source: str) -> Tuple[Any, Optional[yaml.Node]]:
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        problem = getattr(e, "problem", None) or str(e)
        raise SpecParseError(f"malformed document: {problem}", path=source, line=line)
    if data is None:
        raise SpecParseError("spec file is empty", path=source)
    return data, node


def parse_spec(
    data: Any,
    source: str = "<memory>",
    base_dir: Optional[Path] = None,
    node: Optional[yaml.Node] = None,
) -> Spec:
    """Parse an already-loaded spec document.

    Raises:
        SpecParseError: With the field path (and line when known) of the problem
    """
    ctx = _Context(source, node, base_dir or Path.cwd())
    kind = _check_header(ctx, data, top_level=True)
    logger.debug(f"Parsing {kind} spec from {source}")
    if kind in GROUP_KINDS:
        return _parse_group(ctx, data, top_level=True)
    if kind in HOM_KINDS:
        return _parse_hom(ctx, kind, data)
    if kind in ACTION_KINDS:
        return _parse_action(ctx, kind, data)
    if kind in LINEAR_KINDS:
        return _parse_linear(ctx, data)
    return _parse_quotient(ctx, data)


def parse_spec_text(text: str, source: str = "<memory>", base_dir: Optional[Path] = None) -> Spec:
    data, node = _parse_text(text, source)
    return parse_spec(data, source, base_dir, node)


def load_spec(path: Union[str, Path]) -> Spec:
    """Read and parse a spec file; group references resolve against its directory."""
    path = Path(path)
    data, node = _read_document(path)
    return parse_spec(data, str(path), path.resolve().parent, node)
