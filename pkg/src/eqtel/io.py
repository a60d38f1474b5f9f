"""Input documents, packaged fixtures and deterministic report writing."""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

from .groups import FiniteGroup, GroupError, builtin
from .simplicial import GroupAction, SimplicialComplex, SimplicialError


class InputError(ValueError):
    """Malformed input; ``where`` locates the problem (line/column or a key path)."""

    def __init__(self, message: str, where: str | None = None):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


@dataclass
class InputDocument:
    name: str
    complex: SimplicialComplex
    action: GroupAction


FIXTURE_PREFIX = "fixture:"


def fixture_names() -> list[str]:
    files = resources.files("eqtel").joinpath("fixtures").iterdir()
    return sorted(p.name[:-5] for p in files if p.name.endswith(".json"))


def read_text(source: str) -> tuple[str, str]:
    """Return ``(text, label)`` for a path or a ``fixture:NAME`` reference."""
    if source.startswith(FIXTURE_PREFIX):
        name = source[len(FIXTURE_PREFIX):]
        if name not in fixture_names():
            raise InputError(f"unknown fixture {name!r}; available: {fixture_names()}")
        return resources.files("eqtel").joinpath("fixtures", f"{name}.json").read_text(), name
    try:
        return Path(source).read_text(), Path(source).stem
    except OSError as exc:
        raise InputError(f"cannot read input: {exc.strerror}", source) from None


def parse_document(text: str, group_name: str | None = None, label: str = "input") -> InputDocument:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
    if not isinstance(doc, dict):
        raise InputError("top level must be an object", "line 1, column 1")
    vertices = _strings(doc.get("vertices"), "vertices")
    facets = doc.get("facets")
    if not isinstance(facets, list):
        raise InputError("expected a list of facets", "facets")
    known = set(vertices)
    for n, f in enumerate(facets):
        where = f"facets[{n}]"
        if not isinstance(f, list) or not f:
            raise InputError(f"malformed facet {json.dumps(f)}: expected a non-empty list of vertex names", where)
        for v in f:
            if not isinstance(v, str) or v not in known:
                raise InputError(f"facet {json.dumps(f)} uses unknown vertex {json.dumps(v)}", where)
        if len(set(f)) != len(f):
            raise InputError(f"facet {json.dumps(f)} repeats a vertex", where)
    try:
        cx = SimplicialComplex.from_facets(vertices, facets)
    except SimplicialError as exc:
        raise InputError(str(exc), "facets") from None
    group_doc = doc.get("group")
    if group_doc is not None and not isinstance(group_doc, dict):
        raise InputError("expected an object", "group")
    group_doc = group_doc or {}
    try:
        if group_name is not None:
            if "table" in group_doc or "elements" in group_doc:
                raise InputError("--group selects a built-in group; remove the table from the input", "group")
            group = builtin(group_name)
        elif "elements" in group_doc:
            elements = _strings(group_doc.get("elements"), "group.elements")
            table = group_doc.get("table")
            if not isinstance(table, list):
                raise InputError("expected a |G| x |G| table of element names", "group.table")
            group = FiniteGroup.from_names_table(elements, table, name=group_doc.get("name"))
        else:
            raise InputError("no group given: add a group table or pass --group", "group")
    except GroupError as exc:
        raise InputError(str(exc), "group") from None
    perms_doc = group_doc.get("perms", doc.get("action", {}))
    if not isinstance(perms_doc, dict):
        raise InputError("expected an object mapping element names to vertex maps", "group.perms")
    gens = {}
    for elem, vmap in sorted(perms_doc.items()):
        where = f"group.perms.{elem}"
        try:
            g = group.index(elem)
        except GroupError as exc:
            raise InputError(str(exc), where) from None
        gens[g] = _vertex_perm(vmap, vertices, where)
    try:
        if gens:
            action = GroupAction.from_generators(group, cx, gens)
        else:
            action = GroupAction.trivial(group, cx)
    except GroupError as exc:
        raise InputError(str(exc), "group.perms") from None
    name = doc.get("name", label)
    if not isinstance(name, str):
        raise InputError("expected a string", "name")
    return InputDocument(name, cx, action)


def load_input(source: str, group_name: str | None = None) -> InputDocument:
    text, label = read_text(source)
    return parse_document(text, group_name, label)


def _strings(value: Any, where: str) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise InputError("expected a list of strings", where)
    if len(set(value)) != len(value):
        raise InputError("duplicate entries", where)
    if not value:
        raise InputError("must not be empty", where)
    return list(value)


def _vertex_perm(vmap: Any, vertices: list[str], where: str) -> list[int]:
    pos = {v: i for i, v in enumerate(vertices)}
    if isinstance(vmap, list):
        if len(vmap) != len(vertices):
            raise InputError("a list permutation must name an image for every vertex", where)
        vmap = dict(zip(vertices, vmap))
    if not isinstance(vmap, dict):
        raise InputError("expected a vertex -> vertex map", where)
    out = []
    for v in vertices:
        img = vmap.get(v, v)
        if img not in pos:
            raise InputError(f"unknown vertex {json.dumps(img)}", where)
        out.append(pos[img])
    extra = set(vmap) - set(vertices)
    if extra:
        raise InputError(f"unknown vertex {json.dumps(sorted(extra)[0])}", where)
    return out


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_atomic(path: str | Path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
