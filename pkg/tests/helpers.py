"""Hand-built databases and independent oracles used across the test suite.

The oracles re-derive expected behavior from the raw link structure (or
from first principles) without touching the engine's traversal, packing,
or clustering code paths.
"""
from __future__ import annotations

from collections import deque

from ocb.generator import ClassDescriptor, Database, GeneratorParams, ObjectInstance


def build_db(object_specs, class_trefs=None, nreft=4, basesize=50, seed=0,
             acyclic_types=frozenset(), inheritance_types=frozenset()):
    """Construct a Database from explicit objects.

    object_specs: list of (class_id, [target_id or None, ...]) in object-id
    order (ids start at 1). class_trefs: per-class list of reference type
    ids; defaults to type 1 for every slot, sized to the widest object of
    that class.
    """
    nc = max((spec[0] for spec in object_specs), default=1)
    widths = {cid: 0 for cid in range(1, nc + 1)}
    for cid, targets in object_specs:
        widths[cid] = max(widths[cid], len(targets))
    if class_trefs is None:
        class_trefs = [[1] * widths[cid] for cid in range(1, nc + 1)]
    classes = []
    for cid in range(1, nc + 1):
        tref = list(class_trefs[cid - 1])
        classes.append(ClassDescriptor(
            id=cid, tref=tref, cref=[1] * len(tref), basesize=basesize,
            instance_size=basesize))
    objects = []
    for oid, (cid, targets) in enumerate(object_specs, start=1):
        cls = classes[cid - 1]
        oref = list(targets) + [None] * (len(cls.tref) - len(targets))
        objects.append(ObjectInstance(id=oid, class_id=cid, oref=oref,
                                      size=cls.instance_size))
        cls.iterator.append(oid)
    for obj in objects:
        for slot, target in enumerate(obj.oref):
            if target is not None:
                objects[target - 1].backref.append((obj.id, slot))
    params = GeneratorParams(
        nc=nc,
        maxnref=tuple(len(c.tref) for c in classes),
        basesize=basesize,
        no=len(objects),
        nreft=nreft,
        seed=seed,
        acyclic_types=acyclic_types,
        inheritance_types=inheritance_types,
    )
    return Database(params=params, classes=classes, objects=objects)


def links_of(db, oid, direction):
    obj = db.objects[oid - 1]
    if direction == "reverse":
        return [(slot, source) for source, slot in obj.backref]
    return [(slot, target) for slot, target in enumerate(obj.oref)
            if target is not None]


def bfs_oracle(db, root, depth, direction="forward"):
    """Breadth-first access order: expand each object once, re-access dups."""
    accessed = []
    expanded = set()
    queue = deque([(root, 0)])
    while queue:
        oid, hops = queue.popleft()
        accessed.append(oid)
        if oid in expanded:
            continue
        expanded.add(oid)
        if hops == depth:
            continue
        for _slot, nxt in links_of(db, oid, direction):
            queue.append((nxt, hops + 1))
    return accessed


def dfs_oracle(db, root, depth, direction="forward"):
    """Depth-first preorder over all slots, duplicates included."""
    accessed = []

    def walk(oid, hops):
        accessed.append(oid)
        if hops == depth:
            return
        for _slot, nxt in links_of(db, oid, direction):
            walk(nxt, hops + 1)

    walk(root, 0)
    return accessed


def hierarchy_oracle(db, root, depth, ref_type, direction="forward"):
    """Depth-first preorder restricted to slots of one reference type."""
    accessed = []

    def typed(oid):
        obj = db.objects[oid - 1]
        if direction == "reverse":
            return [s for s, k in obj.backref
                    if db.classes[db.objects[s - 1].class_id - 1].tref[k] == ref_type]
        tref = db.classes[obj.class_id - 1].tref
        return [t for k, t in enumerate(obj.oref)
                if t is not None and tref[k] == ref_type]

    def walk(oid, hops):
        accessed.append(oid)
        if hops == depth:
            return
        for nxt in typed(oid):
            walk(nxt, hops + 1)

    walk(root, 0)
    return accessed


def stochastic_oracle(db, root, depth, rng, direction="forward"):
    """Replay of the geometric slot law with an identically-seeded stream."""
    accessed = [root]
    oid = root
    for _hop in range(depth):
        if direction == "reverse":
            choices = [source for source, _slot in db.objects[oid - 1].backref]
        else:
            choices = list(db.objects[oid - 1].oref)
        u = rng.random()
        chosen = None
        threshold = 0.0
        half = 1.0
        for n in range(1, len(choices) + 1):
            half *= 0.5
            threshold = 1.0 - half
            if u < threshold:
                chosen = n
                break
        if chosen is None:
            break
        target = choices[chosen - 1]
        if target is None:
            break
        accessed.append(target)
        oid = target
    return accessed


def first_fit_oracle(order, sizes, page_size):
    """Naive first-fit packing; oversized objects get dedicated page runs."""
    pages = []  # remaining bytes per page
    placement = {}
    for oid in order:
        size = sizes[oid]
        if size > page_size:
            start = len(pages)
            run = (size + page_size - 1) // page_size
            pages.extend([0] * run)
            placement[oid] = start
            continue
        for pid in range(len(pages)):
            if pages[pid] >= size:
                placement[oid] = pid
                pages[pid] -= size
                break
        else:
            placement[oid] = len(pages)
            pages.append(page_size - size)
    return placement


def kahn_is_dag(nodes, edges):
    """Topological-sort cycle check, independent of the generator's DFS."""
    indeg = {n: 0 for n in nodes}
    out = {n: [] for n in nodes}
    for a, b in edges:
        out[a].append(b)
        indeg[b] += 1
    queue = [n for n in nodes if indeg[n] == 0]
    seen = 0
    while queue:
        n = queue.pop()
        seen += 1
        for m in out[n]:
            indeg[m] -= 1
            if indeg[m] == 0:
                queue.append(m)
    return seen == len(nodes)
