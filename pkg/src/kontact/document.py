"""Input documents: JSON description of a chart, fields, forms and k-functions.

See ``docs/format.md`` for the layout.  Loading validates names and parses
every expression eagerly so that errors surface with their location.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Union

from .errors import InputError, KontactError
from .exterior import DiffForm, KFunction, VectorField, VectorForm
from .expr import Chart, Expr, parse

SCHEMA_VERSION = 1

_BASIS = re.compile(r"^d([A-Za-z_][A-Za-z0-9_]*)$")


@dataclass
class Document:
    name: str
    chart: Chart
    constants: tuple[str, ...]
    fields: dict[str, VectorField] = field(default_factory=dict)
    forms: dict[str, DiffForm] = field(default_factory=dict)
    kforms: dict[str, VectorForm] = field(default_factory=dict)
    kform_labels: dict[str, tuple[str, ...]] = field(default_factory=dict)
    functions: dict[str, Union[Expr, KFunction]] = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    def expr(self, text: str) -> Expr:
        return parse(text, self.chart, self.constants)

    def field_list(self, names) -> list[VectorField]:
        return [self.get_field(n) for n in names]

    def get_field(self, name: str) -> VectorField:
        try:
            return self.fields[name]
        except KeyError:
            raise InputError(f"unknown field {name!r}") from None

    def get_form(self, name: str) -> DiffForm:
        try:
            return self.forms[name]
        except KeyError:
            raise InputError(f"unknown form {name!r}") from None

    def get_kform(self, name: str = "eta") -> VectorForm:
        if name in self.kforms:
            return self.kforms[name]
        if name == "eta" and len(self.kforms) == 1:
            return next(iter(self.kforms.values()))
        raise InputError(f"unknown k-form {name!r}")

    def get_function(self, name: str):
        try:
            return self.functions[name]
        except KeyError:
            raise InputError(f"unknown function {name!r}") from None


def _where(ctx: str, exc: Exception) -> InputError:
    if isinstance(exc, InputError):
        return exc
    err = InputError(f"{ctx}: {exc}")
    err.__cause__ = exc
    return err


def _basis_index(chart: Chart, key: str, ctx: str) -> tuple[int, ...]:
    key = key.strip()
    if key in ("", "1"):
        return ()
    out = []
    for part in key.split("^"):
        m = _BASIS.match(part.strip())
        if not m or m.group(1) not in chart.vars:
            raise InputError(f"{ctx}: bad basis element {part!r}")
        out.append(chart.index(m.group(1)))
    return tuple(out)


def parse_form(doc_chart: Chart, constants, terms: Mapping[str, str], ctx: str = "form") -> DiffForm:
    if not isinstance(terms, Mapping) or not terms:
        raise InputError(f"{ctx}: a form is a nonempty object of basis -> expression")
    parsed = []
    degrees = set()
    for key, text in terms.items():
        idx = _basis_index(doc_chart, key, ctx)
        degrees.add(len(idx))
        try:
            parsed.append((idx, parse(str(text), doc_chart, constants)))
        except KontactError as exc:
            raise _where(f"{ctx}[{key}]", exc)
    if len(degrees) != 1:
        raise InputError(f"{ctx}: terms of different degrees")
    return DiffForm(doc_chart, degrees.pop(), parsed)


def parse_field(chart: Chart, constants, spec, ctx: str = "field") -> VectorField:
    try:
        if isinstance(spec, list):
            if len(spec) != chart.dim:
                raise InputError(f"{ctx}: {len(spec)} coefficients on a {chart.dim}-dimensional chart")
            return VectorField(chart, [parse(str(t), chart, constants) for t in spec])
        if isinstance(spec, Mapping):
            coeffs = [Expr(0)] * chart.dim
            for var, text in spec.items():
                name = var[1:] if var.startswith("d") and var[1:] in chart.vars and var not in chart.vars else var
                coeffs[chart.index(name)] = parse(str(text), chart, constants)
            return VectorField(chart, coeffs)
    except KontactError as exc:
        raise _where(ctx, exc)
    raise InputError(f"{ctx}: a field is a list of coefficients or an object var -> coefficient")


def load_document(source: Union[str, Path, Mapping[str, Any]]) -> Document:
    if isinstance(source, Mapping):
        raw = dict(source)
    else:
        try:
            raw = json.loads(Path(source).read_text())
        except OSError as exc:
            raise InputError(f"cannot read {source}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"{source}: invalid JSON ({exc})") from exc
    if not isinstance(raw, Mapping):
        raise InputError("document must be a JSON object")
    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        raise InputError(f"unsupported schema_version {version!r}")
    if "chart" not in raw or not isinstance(raw["chart"], list):
        raise InputError("document needs a 'chart' list")
    try:
        chart = Chart(raw["chart"])
    except KontactError as exc:
        raise _where("chart", exc)
    constants = tuple(raw.get("constants", []))
    doc = Document(str(raw.get("name", "")), chart, constants, raw=raw)
    for name, spec in raw.get("fields", {}).items():
        doc.fields[name] = parse_field(chart, constants, spec, f"fields.{name}")
    for name, spec in raw.get("forms", {}).items():
        doc.forms[name] = parse_form(chart, constants, spec, f"forms.{name}")
    for name, spec in raw.get("functions", {}).items():
        try:
            if isinstance(spec, list):
                doc.functions[name] = KFunction([parse(str(t), chart, constants) for t in spec])
            else:
                doc.functions[name] = parse(str(spec), chart, constants)
        except KontactError as exc:
            raise _where(f"functions.{name}", exc)
    kforms = dict(raw.get("kforms", {}))
    if "kform" in raw:
        kforms.setdefault("eta", raw["kform"])
    for name, spec in kforms.items():
        labels = None
        comps = spec
        if isinstance(spec, Mapping):
            comps = spec.get("components", [])
            labels = spec.get("labels")
        if not isinstance(comps, list) or not comps:
            raise InputError(f"kforms.{name}: needs a nonempty list of form names")
        forms = []
        for c in comps:
            form = doc.get_form(c)
            if form.degree != 1:
                raise InputError(f"kforms.{name}: {c} is not a 1-form")
            forms.append(form)
        doc.kforms[name] = VectorForm(chart, forms)
        doc.kform_labels[name] = tuple(str(x) for x in (labels or range(1, len(comps) + 1)))
    return doc


def task(doc: Document, op: str) -> dict:
    """First task entry with the given op, or an empty dict."""
    for t in doc.raw.get("tasks", []):
        if isinstance(t, Mapping) and t.get("op") == op:
            return dict(t)
    return {}
