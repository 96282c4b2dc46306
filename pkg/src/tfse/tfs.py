"""Typed feature structures and their core operations.

A feature structure is a rooted directed graph.  Every node carries a type
from a :class:`~tfse.signature.Signature` and a map from feature names to
target nodes.  Reentrancy (two paths reaching the same node) and cycles
through arcs are both permitted; dereference chains introduced by
unification are the only thing that must stay acyclic, and they do by
construction.

Unification is destructive with trail-based undo: every mutation is
recorded on a :class:`Trail`, and undoing to a mark restores the exact
prior state.  This is what lets a backtracking solver keep one working
graph instead of copying at every choice point.  Callers that want a pure
view simply take a mark, unify, inspect, and undo.

Unification maintains well-typedness: node types meet via the signature's
glb, and value restrictions from the appropriateness table are propagated
to arc targets until a fixpoint is reached.  A meet that fails anywhere
makes the whole unification fail, after which the trail has already been
rolled back to the starting mark.
"""

from __future__ import annotations

from .signature import Signature, TOP


class Node:
    """One graph node: a type, outgoing arcs, and a forwarding pointer used
    by unification.  Always dereference before reading type or arcs."""

    __slots__ = ("type", "arcs", "forward")

    def __init__(self, type_: str, arcs: dict[str, "Node"] | None = None):
        self.type = type_
        self.arcs: dict[str, Node] = arcs if arcs is not None else {}
        self.forward: Node | None = None

    def __repr__(self) -> str:  # debugging aid only
        return f"<Node {self.type} {sorted(self.arcs)}>"


def deref(node: Node) -> Node:
    while node.forward is not None:
        node = node.forward
    return node


class Trail:
    """Undo log for destructive operations on nodes."""

    __slots__ = ("_entries",)

    _FWD = 0
    _TYPE = 1
    _ARC = 2

    def __init__(self) -> None:
        self._entries: list[tuple] = []

    def __len__(self) -> int:
        return len(self._entries)

    def mark(self) -> int:
        return len(self._entries)

    def push_forward(self, node: Node) -> None:
        self._entries.append((self._FWD, node))

    def push_type(self, node: Node, old: str) -> None:
        self._entries.append((self._TYPE, node, old))

    def push_arc(self, node: Node, feat: str) -> None:
        self._entries.append((self._ARC, node, feat))

    def undo_to(self, mark: int) -> None:
        entries = self._entries
        while len(entries) > mark:
            entry = entries.pop()
            kind = entry[0]
            if kind == self._FWD:
                entry[1].forward = None
            elif kind == self._TYPE:
                entry[1].type = entry[2]
            else:
                del entry[1].arcs[entry[2]]


class UnificationFailure(Exception):
    """Internal control-flow signal; public APIs return None instead."""


class FeatureStructure:
    """A rooted graph over a fixed signature."""

    __slots__ = ("root", "signature")

    def __init__(self, root: Node, signature: Signature):
        self.root = root
        self.signature = signature

    def node_at(self, path: str) -> Node:
        """Follow a colon-separated feature path from the root; '' or '.' is the root."""
        node = deref(self.root)
        if path in ("", "."):
            return node
        for feat in path.split(":"):
            node = deref(node)
            if feat not in node.arcs:
                raise KeyError(f"no feature {feat} at this node (path {path!r})")
            node = node.arcs[feat]
        return deref(node)

    def nodes(self) -> list[Node]:
        """All reachable nodes, dereferenced, in sorted-arc depth-first order."""
        out: list[Node] = []
        seen: set[int] = set()
        stack = [deref(self.root)]
        while stack:
            n = stack.pop()
            if id(n) in seen:
                continue
            seen.add(id(n))
            out.append(n)
            for feat in sorted(n.arcs, reverse=True):
                stack.append(deref(n.arcs[feat]))
        return out

    def copy(self) -> "FeatureStructure":
        return self.copy_with_map()[0]

    def copy_with_map(self) -> tuple["FeatureStructure", dict[int, Node]]:
        """Deep copy resolving all forwarding; the map takes id(old deref'd
        node) to its copy, so addresses can be translated."""
        mapping: dict[int, Node] = {}
        root = deref(self.root)
        stack = [root]
        while stack:
            n = stack.pop()
            if id(n) in mapping:
                continue
            mapping[id(n)] = Node(n.type)
            for tgt in n.arcs.values():
                t = deref(tgt)
                if id(t) not in mapping:
                    stack.append(t)
        seen: set[int] = set()
        stack = [root]
        while stack:
            n = stack.pop()
            if id(n) in seen:
                continue
            seen.add(id(n))
            new = mapping[id(n)]
            for feat, tgt in n.arcs.items():
                t = deref(tgt)
                new.arcs[feat] = mapping[id(t)]
                if id(t) not in seen:
                    stack.append(t)
        return FeatureStructure(mapping[id(root)], self.signature), mapping


def singleton(type_: str, signature: Signature) -> FeatureStructure:
    return FeatureStructure(Node(type_), signature)


# ---------------------------------------------------------------------------
# Unification


def _merge(a: Node, b: Node, sig: Signature, trail: Trail, touched: list[Node]) -> None:
    """Union the graphs below a and b.  Types meet via glb; arcs are merged
    recursively.  Raises UnificationFailure on a type clash.  Restriction
    propagation is done afterwards over `touched`."""
    a = deref(a)
    b = deref(b)
    if a is b:
        return
    met = sig.glb(a.type, b.type)
    if met is None:
        raise UnificationFailure(f"{a.type} and {b.type} have no common subtype")
    trail.push_forward(b)
    b.forward = a
    if met != a.type:
        trail.push_type(a, a.type)
        a.type = met
    touched.append(a)
    for feat, btgt in list(b.arcs.items()):
        # A deeper merge may forward the representative itself (cycles,
        # shared subgraphs), so resolve it afresh for every arc.
        ra = deref(a)
        atgt = ra.arcs.get(feat)
        if atgt is None:
            trail.push_arc(ra, feat)
            ra.arcs[feat] = btgt
        else:
            _merge(atgt, btgt, sig, trail, touched)


def _enforce(seeds: list[Node], sig: Signature, trail: Trail) -> None:
    """Restore well-typedness around the given nodes: tighten node types so
    every arc is appropriate, and tighten arc targets to the value
    restrictions, to a fixpoint.  Raises UnificationFailure if impossible."""
    work = list(seeds)
    while work:
        n = deref(work.pop())
        approp = sig.approp(n.type)
        for feat in list(n.arcs):
            if feat not in approp:
                try:
                    introducer = sig.intro(feat)
                except KeyError:
                    raise UnificationFailure(f"feature {feat} is not declared")
                met = sig.glb(n.type, introducer)
                if met is None:
                    raise UnificationFailure(
                        f"feature {feat} is not appropriate for {n.type}"
                    )
                trail.push_type(n, n.type)
                n.type = met
                approp = sig.approp(met)
        for feat, tgt in n.arcs.items():
            tgt = deref(tgt)
            restr = approp[feat]
            met = sig.glb(tgt.type, restr)
            if met is None:
                raise UnificationFailure(
                    f"value of {feat} has type {tgt.type}, restriction {restr}"
                )
            if met != tgt.type:
                trail.push_type(tgt, tgt.type)
                tgt.type = met
                work.append(tgt)


def unify_nodes(
    fs: FeatureStructure, a: Node, b: Node, trail: Trail | None = None
) -> int | None:
    """Unify two nodes of (or into) fs destructively.

    Returns the trail mark to undo to, or None on failure (in which case
    the state has already been restored).
    """
    own = trail if trail is not None else Trail()
    mark = own.mark()
    touched: list[Node] = []
    try:
        _merge(a, b, fs.signature, own, touched)
        _enforce(touched, fs.signature, own)
    except UnificationFailure:
        own.undo_to(mark)
        return None
    return mark


def unify(
    fs: FeatureStructure,
    at: Node,
    other: FeatureStructure,
    trail: Trail | None = None,
) -> int | None:
    """Unify `other` (its root) into fs at the given node.

    `other` must not share nodes with fs; after success its nodes belong to
    the merged graph.  Returns an undo mark on success, None on failure
    with the state restored.
    """
    return unify_nodes(fs, at, other.root, trail)


def typecheck_repair(
    fs: FeatureStructure, trail: Trail | None = None
) -> FeatureStructure | None:
    """Minimally tighten node types so fs is well-typed, or None if impossible.

    Adding an arc for a feature not appropriate at the node's current type
    tightens the node to its meet with the feature's introducer; value
    restrictions then propagate.  Already well-typed input comes back
    unchanged.
    """
    own = trail if trail is not None else Trail()
    mark = own.mark()
    try:
        _enforce(fs.nodes(), fs.signature, own)
    except UnificationFailure:
        own.undo_to(mark)
        return None
    return fs


# ---------------------------------------------------------------------------
# Subsumption


def subsumes_fs(general: FeatureStructure, specific: FeatureStructure) -> bool:
    """True iff there is a structure-preserving, type-weakening map from
    `general` into `specific` (reentrancies in `general` are preserved)."""
    return subsumes_at(general, specific, deref(specific.root))


def subsumes_at(general: FeatureStructure, fs: FeatureStructure, node: Node) -> bool:
    """Like :func:`subsumes_fs` but against the subgraph of fs rooted at node."""
    sig = general.signature
    mapping: dict[int, Node] = {}
    stack = [(deref(general.root), deref(node))]
    while stack:
        g, s = stack.pop()
        g = deref(g)
        s = deref(s)
        prior = mapping.get(id(g))
        if prior is not None:
            if prior is not s:
                return False
            continue
        mapping[id(g)] = s
        if not sig.subsumes(g.type, s.type):
            return False
        for feat, gtgt in g.arcs.items():
            stgt = s.arcs.get(feat)
            if stgt is None:
                return False
            stack.append((gtgt, stgt))
    return True


def iso(a: FeatureStructure, b: FeatureStructure) -> bool:
    """Isomorphism check: mutual subsumption (maps both ways are forced to
    be inverse on rooted, fully reachable graphs)."""
    return subsumes_fs(a, b) and subsumes_fs(b, a)


def structure_depth(fs: FeatureStructure) -> int:
    """Longest simple (node-distinct) arc path from the root, counted in
    nodes.  Cycles do not make this infinite: each node counts once per
    path, which is what lets cyclic structures pass a finite depth bound."""
    best = 0
    root = deref(fs.root)

    def walk(n: Node, on_path: set[int], depth: int) -> None:
        nonlocal best
        if depth > best:
            best = depth
        for tgt in n.arcs.values():
            t = deref(tgt)
            if id(t) not in on_path:
                on_path.add(id(t))
                walk(t, on_path, depth + 1)
                on_path.remove(id(t))

    walk(root, {id(root)}, 1)
    return best


# ---------------------------------------------------------------------------
# Canonical printing

LIST_TYPE = "list"
EMPTY_LIST = "e_list"
CONS = "ne_list"
HEAD_FEAT = "HD"
TAIL_FEAT = "TL"


def canonical_print(fs: FeatureStructure, marked: set[int] | None = None) -> str:
    """Deterministic text form of a feature structure.

    Features are sorted alphabetically; nodes reached more than once get
    tags numbered by first occurrence in a sorted-arc depth-first walk,
    with later occurrences printing the bare tag; cons-cell chains print
    with angle-bracket list sugar.  `marked` (ids of dereferenced nodes)
    adds a ``*`` after the types of those nodes, used by clause dumps.
    """
    marked = marked or set()
    root = deref(fs.root)

    counts: dict[int, int] = {}
    first_order: list[Node] = []

    def census(n: Node) -> None:
        n = deref(n)
        counts[id(n)] = counts.get(id(n), 0) + 1
        if counts[id(n)] > 1:
            return
        first_order.append(n)
        for feat in sorted(n.arcs):
            census(n.arcs[feat])

    census(root)
    tags: dict[int, int] = {}
    for n in first_order:
        if counts[id(n)] > 1:
            tags[id(n)] = len(tags) + 1

    emitted: set[int] = set()

    def type_text(n: Node) -> str:
        return n.type + ("*" if id(n) in marked else "")

    def is_plain_cons(n: Node) -> bool:
        return (
            n.type == CONS
            and set(n.arcs) == {HEAD_FEAT, TAIL_FEAT}
            and id(n) not in tags
        )

    def list_sugar(n: Node) -> str | None:
        """Render a cons chain as <e1, e2|tail>, or None if n is no list."""
        if n.type == EMPTY_LIST and not n.arcs and id(n) not in marked:
            return "<>"
        if n.type != CONS or set(n.arcs) != {HEAD_FEAT, TAIL_FEAT} or id(n) in marked:
            return None
        elems: list[str] = []
        cur = n
        while True:
            elems.append(value(deref(cur.arcs[HEAD_FEAT])))
            nxt = deref(cur.arcs[TAIL_FEAT])
            if nxt.type == EMPTY_LIST and not nxt.arcs and id(nxt) not in tags and id(nxt) not in marked:
                emitted.add(id(nxt))
                return "<" + ", ".join(elems) + ">"
            if is_plain_cons(nxt) and id(nxt) not in marked and id(nxt) not in emitted:
                emitted.add(id(nxt))
                cur = nxt
                continue
            return "<" + ", ".join(elems) + "|" + value(nxt) + ">"

    def value(n: Node) -> str:
        n = deref(n)
        if id(n) in emitted:
            return f"#{tags[id(n)]}"
        emitted.add(id(n))
        prefix = f"#{tags[id(n)]}=" if id(n) in tags else ""
        sugar = list_sugar(n)
        if sugar is not None:
            return prefix + sugar
        if not n.arcs:
            return prefix + type_text(n)
        inner = ", ".join(
            f"{feat} {value(n.arcs[feat])}" for feat in sorted(n.arcs)
        )
        return f"{prefix}{type_text(n)}[{inner}]"

    return value(root)
