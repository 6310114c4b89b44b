"""Golden-data corpus: worked examples and the tables they must reproduce.

Each data file is an input document (see docs/format.md) extended with a
``checks`` list and a ``print_suspect`` map.  Running an example executes the
checks in order and classifies every entry:

* ``match``: the computation agrees with the stored value;
* ``divergence``: it disagrees, and the entry is marked print-suspect;
* ``failure``: anything else, including errors and print-suspect ids that
  no check produced.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping, Optional, Sequence, Union

from ..document import Document, load_document
from ..errors import InputError, KontactError, UnknownExample
from ..linalg import DEFAULT_SEED
from .checks import HANDLERS, Context

__all__ = ["Entry", "Report", "registry", "resolve", "load_example", "run_example", "run_document", "run_all"]

STATUSES = ("match", "divergence", "failure")

# short names accepted wherever an example name is
ALIASES = {"control": "control2"}


@dataclass(frozen=True)
class Entry:
    id: str
    check: str
    status: str
    source: str
    detail: str

    def as_dict(self) -> dict:
        return {"id": self.id, "check": self.check, "status": self.status,
                "source": self.source, "detail": self.detail}


@dataclass
class Report:
    name: str
    entries: list[Entry] = field(default_factory=list)

    @property
    def counts(self) -> dict[str, int]:
        out = {s: 0 for s in STATUSES}
        for e in self.entries:
            out[e.status] += 1
        return out

    @property
    def ok(self) -> bool:
        return self.counts["failure"] == 0

    def by_status(self, status: str) -> list[Entry]:
        return [e for e in self.entries if e.status == status]

    def entry(self, entry_id: str) -> Entry:
        for e in self.entries:
            if e.id == entry_id:
                return e
        raise KeyError(entry_id)

    def as_dict(self) -> dict:
        return {"example": self.name, "ok": self.ok, "counts": self.counts,
                "entries": [e.as_dict() for e in self.entries]}


def _data_dir():
    return resources.files(__package__).joinpath("data")


def registry() -> tuple[str, ...]:
    """Names of all registered examples, sorted."""
    return tuple(sorted(p.name[:-5] for p in _data_dir().iterdir() if p.name.endswith(".json")))


def resolve(name: str) -> str:
    name = ALIASES.get(name, name)
    if name not in registry():
        raise UnknownExample(f"no example named {name!r}; known: {', '.join(registry())}")
    return name


def load_raw(name: str) -> dict:
    name = ALIASES.get(name, name)
    if name not in registry():
        raise UnknownExample(f"no example named {name!r}; known: {', '.join(registry())}")
    return json.loads(_data_dir().joinpath(f"{name}.json").read_text())


def load_example(name: str) -> Document:
    return load_document(load_raw(name))


def run_document(source: Union[Document, Mapping], seed: int = DEFAULT_SEED) -> Report:
    doc = source if isinstance(source, Document) else load_document(source)
    raw = doc.raw
    suspect = dict(raw.get("print_suspect", {}))
    report = Report(doc.name or "document")
    seen: set[str] = set()
    current: dict = {}

    def record(entry_id: str, ok: bool, detail: str) -> None:
        seen.add(entry_id)
        if ok:
            status = "match"
        elif entry_id in suspect:
            status = "divergence"
            detail = f"{detail} [print-suspect: {suspect[entry_id]}]"
        else:
            status = "failure"
        report.entries.append(Entry(entry_id, current["kind"], status, current["source"], detail))

    ctx = Context(doc, seed, record)
    checks = raw.get("checks", [])
    if not isinstance(checks, list):
        raise InputError("'checks' must be a list")
    for c in checks:
        if not isinstance(c, Mapping) or "id" not in c or "kind" not in c:
            raise InputError("each check needs an 'id' and a 'kind'")
        kind = c["kind"]
        if kind not in HANDLERS:
            raise InputError(f"check {c['id']}: unknown kind {kind!r}")
        current.update(kind=kind, source=c.get("source", "recomputed"))
        try:
            HANDLERS[kind](ctx, dict(c))
        except KontactError as exc:
            record(c["id"], False, f"error {exc}")
        except (ValueError, ArithmeticError) as exc:
            record(c["id"], False, f"error {type(exc).__name__}: {exc}")
    current.update(kind="print_suspect", source="printed")
    for entry_id in sorted(suspect):
        if entry_id not in seen:
            record(entry_id, False, "print-suspect entry was never produced by a check")
            report.entries[-1] = Entry(entry_id, "print_suspect", "failure", "printed",
                                       "print-suspect entry was never produced by a check")
    return report


def run_example(name: str, seed: int = DEFAULT_SEED) -> Report:
    report = run_document(load_raw(name), seed)
    report.name = name
    return report


def _run_to_dict(args) -> dict:
    name, seed = args
    return run_example(name, seed).as_dict()


def run_all(names: Optional[Sequence[str]] = None, seed: int = DEFAULT_SEED,
            workers: Optional[int] = None) -> list[dict]:
    """Run examples in a process pool; results are ordered by name."""
    names = sorted(names if names is not None else registry())
    for n in names:
        resolve(n)
    if workers == 1 or len(names) <= 1:
        return [_run_to_dict((n, seed)) for n in names]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_to_dict, [(n, seed) for n in names]))
