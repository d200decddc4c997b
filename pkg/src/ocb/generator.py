"""Synthetic object base construction.

Three steps: instantiate the schema (classes with typed reference slots),
repair the schema so that cycle-forbidding reference types form DAGs and
inheritance sizes propagate, then instantiate objects with inter-object
references and reverse references recorded at link time.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .distributions import (
    Distribution,
    Uniform,
    draw_bounded,
    draw_position,
    format_distribution,
    parse_distribution,
    substream,
    validate_distribution,
)
from .errors import FormatError, ParameterError

DB_MAGIC = "OCBDB1"
DB_FORMAT = 1


@dataclass
class GeneratorParams:
    """Knobs controlling the shape of the generated object base.

    `maxnref` and `basesize` may be a single int applied to every class
    or a per-class sequence of length `nc`.
    """

    nc: int = 20
    maxnref: int | tuple[int, ...] = 10
    basesize: int | tuple[int, ...] = 50
    no: int = 20000
    nreft: int = 4
    infclass: int = 1
    supclass: int | None = None  # None resolves to nc
    infref: int = 1
    supref: int | None = None  # None resolves to no
    dist1: Distribution = Uniform()
    dist2: Distribution = Uniform()
    dist3: Distribution = Uniform()
    dist4: Distribution = Uniform()
    seed: int = 0
    acyclic_types: frozenset[int] = frozenset({1, 2})
    inheritance_types: frozenset[int] = frozenset({1})

    def __post_init__(self):
        if self.supclass is None:
            self.supclass = self.nc
        if self.supref is None:
            self.supref = self.no
        if not isinstance(self.acyclic_types, frozenset):
            self.acyclic_types = frozenset(self.acyclic_types)
        if not isinstance(self.inheritance_types, frozenset):
            self.inheritance_types = frozenset(self.inheritance_types)

    @property
    def supclass_resolved(self) -> int:
        return self.supclass

    @property
    def supref_resolved(self) -> int:
        return self.supref

    def maxnref_of(self, class_id: int) -> int:
        if isinstance(self.maxnref, int):
            return self.maxnref
        return self.maxnref[class_id - 1]

    def basesize_of(self, class_id: int) -> int:
        if isinstance(self.basesize, int):
            return self.basesize
        return self.basesize[class_id - 1]

    def validate(self) -> None:
        if self.nc < 1:
            raise ParameterError("nc must be >= 1")
        if self.no < 0:
            raise ParameterError("no must be >= 0")
        if self.nreft < 1:
            raise ParameterError("nreft must be >= 1")
        for per_class, name in ((self.maxnref, "maxnref"), (self.basesize, "basesize")):
            if isinstance(per_class, int):
                values: Sequence[int] = (per_class,)
            else:
                if len(per_class) != self.nc:
                    raise ParameterError(f"{name} list must have nc={self.nc} entries")
                values = per_class
            if any(v < 0 for v in values):
                raise ParameterError(f"{name} entries must be >= 0")
        if not 0 <= self.infclass <= self.supclass_resolved <= self.nc:
            raise ParameterError(
                f"class interval [{self.infclass}, {self.supclass_resolved}] "
                f"invalid for nc={self.nc}")
        if self.infref < 1:
            raise ParameterError("infref must be >= 1")
        if self.no > 0 and self.infref > self.supref_resolved:
            raise ParameterError(
                f"object interval [{self.infref}, {self.supref_resolved}] invalid")
        if not self.inheritance_types <= self.acyclic_types:
            raise ParameterError("inheritance_types must be a subset of acyclic_types")
        validate_distribution(self.dist1, 1, self.nreft, "dist1")
        validate_distribution(self.dist2, self.infclass, self.supclass_resolved, "dist2")
        validate_distribution(self.dist3, 1, self.nc, "dist3")
        validate_distribution(self.dist4, 1, max(self.supref_resolved, 1), "dist4",
                              allow_special=True)

    def to_dict(self) -> dict:
        d = {
            "nc": self.nc,
            "maxnref": list(self.maxnref) if not isinstance(self.maxnref, int) else self.maxnref,
            "basesize": list(self.basesize) if not isinstance(self.basesize, int) else self.basesize,
            "no": self.no,
            "nreft": self.nreft,
            "infclass": self.infclass,
            "supclass": self.supclass_resolved,
            "infref": self.infref,
            "supref": self.supref_resolved,
            "dist1": format_distribution(self.dist1),
            "dist2": format_distribution(self.dist2),
            "dist3": format_distribution(self.dist3),
            "dist4": format_distribution(self.dist4),
            "seed": self.seed,
            "acyclic_types": sorted(self.acyclic_types),
            "inheritance_types": sorted(self.inheritance_types),
        }
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorParams":
        def seq_or_int(v):
            return v if isinstance(v, int) else tuple(v)

        return cls(
            nc=d["nc"],
            maxnref=seq_or_int(d["maxnref"]),
            basesize=seq_or_int(d["basesize"]),
            no=d["no"],
            nreft=d["nreft"],
            infclass=d["infclass"],
            supclass=d["supclass"],
            infref=d["infref"],
            supref=d["supref"],
            dist1=parse_distribution(d["dist1"]),
            dist2=parse_distribution(d["dist2"]),
            dist3=parse_distribution(d["dist3"]),
            dist4=parse_distribution(d["dist4"]),
            seed=d["seed"],
            acyclic_types=frozenset(d["acyclic_types"]),
            inheritance_types=frozenset(d["inheritance_types"]),
        )


@dataclass
class ClassDescriptor:
    """One schema class: typed reference slots plus its instance roster."""

    id: int
    tref: list[int]
    cref: list[int | None]
    basesize: int
    instance_size: int
    iterator: list[int] = field(default_factory=list)


@dataclass
class ObjectInstance:
    """One database object; backref holds (source object id, slot) pairs."""

    id: int
    class_id: int
    oref: list[int | None]
    backref: list[tuple[int, int]] = field(default_factory=list)
    size: int = 0


@dataclass
class GenerationReport:
    """Counts of reference slots nulled during generation, per cause."""

    null_class_draws: int = 0
    cycle_suppressed: int = 0
    empty_iterator: int = 0
    out_of_range: int = 0

    def to_dict(self) -> dict:
        return {
            "null_class_draws": self.null_class_draws,
            "cycle_suppressed": self.cycle_suppressed,
            "empty_iterator": self.empty_iterator,
            "out_of_range": self.out_of_range,
        }


@dataclass
class Database:
    """A fully generated object base, immutable by convention after build."""

    params: GeneratorParams
    classes: list[ClassDescriptor]
    objects: list[ObjectInstance]
    report: GenerationReport = field(default_factory=GenerationReport)

    def cls(self, class_id: int) -> ClassDescriptor:
        return self.classes[class_id - 1]

    def obj(self, object_id: int) -> ObjectInstance:
        return self.objects[object_id - 1]


def generate_schema(params: GeneratorParams,
                    report: GenerationReport | None = None) -> list[ClassDescriptor]:
    """Create nc classes with typed reference slots into [infclass, supclass].

    A class-reference draw of 0 (possible when infclass = 0) means the slot
    has no target class.
    """
    params.validate()
    rng_types = substream(params.seed, "schema-types")
    rng_classes = substream(params.seed, "schema-classes")
    classes: list[ClassDescriptor] = []
    for i in range(1, params.nc + 1):
        n = params.maxnref_of(i)
        base = params.basesize_of(i)
        tref = [draw_bounded(params.dist1, rng_types, 1, params.nreft) for _ in range(n)]
        classes.append(ClassDescriptor(id=i, tref=tref, cref=[None] * n,
                                       basesize=base, instance_size=base))
    sup = params.supclass_resolved
    for cls in classes:
        for j in range(len(cls.cref)):
            target = draw_bounded(params.dist2, rng_classes, params.infclass, sup)
            if target == 0:
                if report is not None:
                    report.null_class_draws += 1
                cls.cref[j] = None
            else:
                cls.cref[j] = target
    return classes


def _type_targets(schema: list[ClassDescriptor], class_id: int, ref_type: int) -> list[int]:
    cls = schema[class_id - 1]
    return [c for t, c in zip(cls.tref, cls.cref) if t == ref_type and c is not None]


def _would_close_cycle(schema: list[ClassDescriptor], source: int, start: int,
                       ref_type: int) -> bool:
    """Walk the class graph of one reference type from `start`.

    True when the walk reaches `source` (the slot under scrutiny would close
    a cycle) or when the walked subgraph already contains a cycle.
    """
    if start == source:
        return True
    # colors: 1 = on the walk stack, 2 = fully explored
    color: dict[int, int] = {start: 1}
    stack: list[tuple[int, Iterator[int]]] = [
        (start, iter(_type_targets(schema, start, ref_type)))]
    while stack:
        node, targets = stack[-1]
        pushed = False
        for nxt in targets:
            if nxt == source:
                return True
            c = color.get(nxt, 0)
            if c == 1:
                return True
            if c == 0:
                color[nxt] = 1
                stack.append((nxt, iter(_type_targets(schema, nxt, ref_type))))
                pushed = True
                break
        if not pushed:
            color[node] = 2
            stack.pop()
    return False


def _inheritance_descendants(schema: list[ClassDescriptor], root: int,
                             inheritance_types: frozenset[int]) -> set[int]:
    """All classes reachable from `root` through inheritance-typed slots."""
    seen: set[int] = set()
    stack = [c for t, c in zip(schema[root - 1].tref, schema[root - 1].cref)
             if t in inheritance_types and c is not None]
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        cls = schema[node - 1]
        for t, c in zip(cls.tref, cls.cref):
            if t in inheritance_types and c is not None and c not in seen:
                stack.append(c)
    seen.discard(root)
    return seen


def enforce_consistency(schema: list[ClassDescriptor], params: GeneratorParams,
                        report: GenerationReport | None = None) -> list[ClassDescriptor]:
    """Repair the schema in place: suppress cycles, then propagate sizes.

    Classes are scanned in ascending id, slots in ascending index; the first
    slot that would close a cycle in its reference type's class graph is
    nulled. Once every cycle-forbidding type graph is a DAG, each superclass
    adds its base size to the instance size of all classes reachable through
    inheritance-typed slots. Idempotent.
    """
    for cls in schema:
        for j, ref_type in enumerate(cls.tref):
            if ref_type not in params.acyclic_types or cls.cref[j] is None:
                continue
            if _would_close_cycle(schema, cls.id, cls.cref[j], ref_type):
                cls.cref[j] = None
                if report is not None:
                    report.cycle_suppressed += 1
    # sizes recomputed from scratch so a second pass changes nothing
    for cls in schema:
        cls.instance_size = cls.basesize
    if params.inheritance_types:
        for cls in schema:
            for sub in _inheritance_descendants(schema, cls.id, params.inheritance_types):
                schema[sub - 1].instance_size += cls.basesize
    return schema


def generate_objects(schema: list[ClassDescriptor], params: GeneratorParams,
                     report: GenerationReport | None = None) -> list[ObjectInstance]:
    """Instantiate `no` objects and wire their references.

    Each object's class comes from dist3; it is appended to that class's
    iterator. Reference targets are iterator positions of the slot's target
    class, drawn through dist4 with the object's own iterator position as
    the locality anchor. Reverse references are recorded at link time.
    """
    rng_classes = substream(params.seed, "object-classes")
    rng_refs = substream(params.seed, "object-refs")
    for cls in schema:
        cls.iterator.clear()
    objects: list[ObjectInstance] = []
    nc = params.nc
    for oid in range(1, params.no + 1):
        cid = draw_bounded(params.dist3, rng_classes, 1, nc)
        cls = schema[cid - 1]
        objects.append(ObjectInstance(id=oid, class_id=cid,
                                      oref=[None] * len(cls.tref),
                                      size=cls.instance_size))
        cls.iterator.append(oid)

    infref = params.infref
    supref = params.supref_resolved
    dist4 = params.dist4
    for cls in schema:
        if not cls.cref:
            continue
        slot_targets = [(k, c) for k, c in enumerate(cls.cref) if c is not None]
        if not slot_targets:
            continue
        for position, oid in enumerate(cls.iterator, start=1):
            obj = objects[oid - 1]
            for k, target_class in slot_targets:
                iterator = schema[target_class - 1].iterator
                if not iterator:
                    if report is not None:
                        report.empty_iterator += 1
                    continue
                pos = draw_position(dist4, rng_refs, infref, supref,
                                    len(iterator), position)
                if pos is None:
                    if report is not None:
                        report.out_of_range += 1
                    continue
                target_id = iterator[pos - 1]
                obj.oref[k] = target_id
                objects[target_id - 1].backref.append((oid, k))
    return objects


def generate_database(params: GeneratorParams) -> Database:
    """Run all three generation steps and return the finished database."""
    report = GenerationReport()
    schema = generate_schema(params, report)
    enforce_consistency(schema, params, report)
    objects = generate_objects(schema, params, report)
    return Database(params=params, classes=schema, objects=objects, report=report)


def save_database(db: Database, path: str) -> None:
    """Write the database as a magic line followed by one canonical JSON body."""
    payload = {
        "format": DB_FORMAT,
        "params": db.params.to_dict(),
        "classes": [
            {"id": c.id, "tref": c.tref, "cref": c.cref, "basesize": c.basesize,
             "instance_size": c.instance_size, "iterator": c.iterator}
            for c in db.classes
        ],
        "objects": [
            {"id": o.id, "class_id": o.class_id, "oref": o.oref,
             "backref": o.backref, "size": o.size}
            for o in db.objects
        ],
        "report": db.report.to_dict(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(DB_MAGIC + "\n")
        json.dump(payload, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_database(path: str) -> Database:
    """Read a database file back; inverse of save_database."""
    with open(path, "r", encoding="utf-8") as fh:
        magic = fh.readline().rstrip("\n")
        if magic != DB_MAGIC:
            raise FormatError(f"{path}: bad magic header {magic!r}")
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: malformed database body: {exc}") from None
    if payload.get("format") != DB_FORMAT:
        raise FormatError(f"{path}: unsupported format version {payload.get('format')!r}")
    params = GeneratorParams.from_dict(payload["params"])
    classes = [
        ClassDescriptor(id=c["id"], tref=list(c["tref"]), cref=list(c["cref"]),
                        basesize=c["basesize"], instance_size=c["instance_size"],
                        iterator=list(c["iterator"]))
        for c in payload["classes"]
    ]
    objects = [
        ObjectInstance(id=o["id"], class_id=o["class_id"], oref=list(o["oref"]),
                       backref=[(s, k) for s, k in o["backref"]], size=o["size"])
        for o in payload["objects"]
    ]
    report_d = payload.get("report", {})
    report = GenerationReport(
        null_class_draws=report_d.get("null_class_draws", 0),
        cycle_suppressed=report_d.get("cycle_suppressed", 0),
        empty_iterator=report_d.get("empty_iterator", 0),
        out_of_range=report_d.get("out_of_range", 0),
    )
    return Database(params=params, classes=classes, objects=objects, report=report)
