"""Order-sorted type hierarchies with appropriateness conditions.

A signature consists of a finite set of type names arranged in a subtype
DAG under a single top type, plus appropriateness declarations saying
which features a type may carry and what type each feature value is
restricted to.  The hierarchy is interpreted closed-world: a type denotes
the union of its species (the types without proper subtypes), so meets
are computed against the declared hierarchy and nothing else.

Validation enforces four global conditions before a `Signature` is
handed out:

  * the subtype relation is acyclic and every type is reachable from top;
  * every pair of types has at most one most-general common subtype, so
    `glb` is a deterministic partial meet;
  * each feature is introduced by a unique most-general type;
  * appropriateness is downward monotone: restrictions declared at
    several comparable types must meet, and the meet is what subtypes
    inherit.

A validated signature is immutable and safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

TOP = "top"


@dataclass(frozen=True)
class Diagnostic:
    """A single validation or parse problem, named after the rule it breaks."""

    rule: str
    message: str
    subjects: tuple[str, ...] = ()
    line: int | None = None

    def __str__(self) -> str:
        loc = f"line {self.line}: " if self.line is not None else ""
        return f"{loc}{self.rule}: {self.message}"


class SignatureError(Exception):
    """Raised when validation finds one or more violations; carries all of them."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


class UnknownTypeError(KeyError):
    pass


class UnknownFeatureError(KeyError):
    pass


@dataclass(frozen=True)
class TypeDecl:
    """Raw, unvalidated declaration of one type: its immediate subtypes and
    the feature/restriction pairs it introduces or refines."""

    name: str
    subtypes: tuple[str, ...] = ()
    feats: tuple[tuple[str, str], ...] = ()
    line: int | None = None


class Signature:
    """Validated type hierarchy.  Construct via :func:`validate` only."""

    def __init__(
        self,
        order: tuple[str, ...],
        descendants: dict[str, frozenset[str]],
        glb_table: dict[tuple[str, str], str | None],
        approp: dict[str, dict[str, str]],
        intro: dict[str, str],
    ):
        self._order = order
        self._descendants = descendants
        self._glb = glb_table
        self._approp = approp
        self._intro = intro
        self._species = tuple(t for t in order if len(descendants[t]) == 1)
        self._species_set = frozenset(self._species)

    @property
    def types(self) -> tuple[str, ...]:
        """All type names in declaration order, top first."""
        return self._order

    @property
    def species(self) -> tuple[str, ...]:
        return self._species

    def __contains__(self, name: str) -> bool:
        return name in self._descendants

    def _require(self, name: str) -> None:
        if name not in self._descendants:
            raise UnknownTypeError(name)

    def subsumes(self, s: str, t: str) -> bool:
        """True iff t is a (reflexive) subtype of s."""
        self._require(s)
        self._require(t)
        return t in self._descendants[s]

    def glb(self, s: str, t: str) -> str | None:
        """The unique most-general common subtype of s and t, or None."""
        self._require(s)
        self._require(t)
        if s == t:
            return s
        key = (s, t) if s < t else (t, s)
        return self._glb.get(key)

    def approp(self, t: str) -> dict[str, str]:
        """The full inherited feature -> value-restriction map for t."""
        self._require(t)
        return dict(self._approp[t])

    def intro(self, feature: str) -> str:
        """The unique most-general type for which `feature` is appropriate."""
        if feature not in self._intro:
            raise UnknownFeatureError(feature)
        return self._intro[feature]

    @property
    def features(self) -> tuple[str, ...]:
        return tuple(self._intro)

    def descendants(self, t: str) -> frozenset[str]:
        """All (reflexive) subtypes of t."""
        self._require(t)
        return self._descendants[t]

    def is_species(self, t: str) -> bool:
        self._require(t)
        return t in self._species_set

    def species_below(self, t: str) -> tuple[str, ...]:
        """Species subsumed by t, in declaration order."""
        self._require(t)
        return tuple(s for s in self._species if s in self._descendants[t])


def validate(decls: list[TypeDecl]) -> Signature:
    """Check a raw hierarchy and return a frozen Signature.

    All violations are collected and raised together in a
    :class:`SignatureError`; validation never partially succeeds.
    """
    diags: list[Diagnostic] = []

    declared: list[str] = []
    seen_heads: set[str] = set()
    children: dict[str, list[str]] = {}
    featdecls: dict[str, list[tuple[str, str, int | None]]] = {}

    def note(name: str) -> None:
        if name not in children:
            children[name] = []
            declared.append(name)

    note(TOP)
    for d in decls:
        if d.name in seen_heads:
            diags.append(
                Diagnostic("duplicate-declaration", f"type {d.name} declared twice", (d.name,), d.line)
            )
            continue
        seen_heads.add(d.name)
        note(d.name)
        for sub in d.subtypes:
            note(sub)
            if sub not in children[d.name]:
                children[d.name].append(sub)
            if sub == d.name:
                diags.append(
                    Diagnostic("cycle", f"type {d.name} lists itself as a subtype", (d.name,), d.line)
                )
        for feat, restr in d.feats:
            featdecls.setdefault(d.name, []).append((feat, restr, d.line))

    if len(declared) <= 1:
        diags.append(Diagnostic("empty-signature", "no types reachable from top", ()))
        raise SignatureError(diags)

    # Restrictions must name declared types.
    for tname, feats in featdecls.items():
        for feat, restr, line in feats:
            if restr not in children:
                diags.append(
                    Diagnostic(
                        "unknown-type",
                        f"restriction {restr} of feature {feat} on {tname} is not declared",
                        (tname, feat, restr),
                        line,
                    )
                )

    # Parentless types hang off the implicit top.
    has_parent = {sub for subs in children.values() for sub in subs}
    for name in declared:
        if name != TOP and name not in has_parent:
            children[TOP].append(name)

    # Cycle detection over the immediate-subtype graph.
    WHITE, GREY, BLACK = 0, 1, 2
    color = dict.fromkeys(declared, WHITE)
    cyclic: list[str] = []

    def visit(n: str, stack: list[str]) -> None:
        color[n] = GREY
        for c in children[n]:
            if color[c] == GREY:
                cyclic.append(c)
            elif color[c] == WHITE:
                visit(c, stack + [c])
        color[n] = BLACK

    visit(TOP, [TOP])
    unreachable = [n for n in declared if color[n] == WHITE]
    for n in unreachable:
        diags.append(Diagnostic("unreachable", f"type {n} is not reachable from top", (n,)))
    for n in unreachable:
        # A detached component may hide a cycle; report that too.
        if color[n] == WHITE:
            visit(n, [n])
    for n in sorted(set(cyclic)):
        diags.append(Diagnostic("cycle", f"subtype cycle through {n}", (n,)))

    if any(d.rule in ("cycle", "unreachable") for d in diags):
        raise SignatureError(diags)

    # Reflexive-transitive closure, computed children-first.
    descendants: dict[str, frozenset[str]] = {}

    def close(n: str) -> frozenset[str]:
        if n in descendants:
            return descendants[n]
        acc = {n}
        for c in children[n]:
            acc |= close(c)
        descendants[n] = frozenset(acc)
        return descendants[n]

    for n in declared:
        close(n)

    # Unique greatest lower bounds for every pair.
    glb_table: dict[tuple[str, str], str | None] = {}
    order_index = {n: i for i, n in enumerate(declared)}
    for i, s in enumerate(declared):
        for t in declared[i + 1 :]:
            common = descendants[s] & descendants[t]
            if not common:
                glb_table[(s, t) if s < t else (t, s)] = None
                continue
            maximal = [
                u
                for u in common
                if not any(v != u and u in descendants[v] for v in common)
            ]
            maximal.sort(key=order_index.__getitem__)
            key = (s, t) if s < t else (t, s)
            if len(maximal) == 1:
                glb_table[key] = maximal[0]
            else:
                glb_table[key] = maximal[0]
                diags.append(
                    Diagnostic(
                        "non-unique-glb",
                        f"types {s} and {t} have no unique meet; "
                        f"candidates {', '.join(maximal)} — introduce an explicit meet type",
                        (s, t, *maximal),
                    )
                )

    # Feature introduction: a unique most-general bearer per feature.
    intro: dict[str, str] = {}
    bearers: dict[str, list[str]] = {}
    for tname, feats in featdecls.items():
        for feat, _restr, _line in feats:
            lst = bearers.setdefault(feat, [])
            if tname not in lst:
                lst.append(tname)
    for feat, declarers in bearers.items():
        maximal = [
            d
            for d in declarers
            if not any(d2 != d and d in descendants[d2] for d2 in declarers)
        ]
        maximal.sort(key=order_index.__getitem__)
        intro[feat] = maximal[0]
        if len(maximal) > 1:
            diags.append(
                Diagnostic(
                    "feature-introduction",
                    f"feature {feat} is introduced by incomparable types {', '.join(maximal)}",
                    (feat, *maximal),
                )
            )

    # Inherited appropriateness, with downward-meeting restrictions.
    def pairwise_glb(a: str, b: str) -> str | None:
        if a == b:
            return a
        key = (a, b) if a < b else (b, a)
        return glb_table.get(key)

    approp: dict[str, dict[str, str]] = {}
    # Topological accumulation: parents before children.
    topo: list[str] = []
    seen: set[str] = set()

    def topo_visit(n: str) -> None:
        if n in seen:
            return
        seen.add(n)
        topo.append(n)
        for c in children[n]:
            topo_visit(c)

    topo_visit(TOP)
    ancestors: dict[str, list[str]] = {TOP: [TOP]}
    for n in topo:
        if n == TOP:
            continue
        ups = [p for p in declared if n in descendants[p]]
        ups.sort(key=order_index.__getitem__)
        ancestors[n] = ups

    for n in topo:
        table: dict[str, str] = {}
        for anc in ancestors[n]:
            for feat, restr, line in featdecls.get(anc, []):
                if restr not in children:
                    continue
                if feat in table:
                    met = pairwise_glb(table[feat], restr)
                    if met is None:
                        diags.append(
                            Diagnostic(
                                "approp-monotonicity",
                                f"restrictions {table[feat]} and {restr} for feature "
                                f"{feat} at {n} have no meet",
                                (n, feat, table[feat], restr),
                                line,
                            )
                        )
                    else:
                        table[feat] = met
                else:
                    table[feat] = restr
        approp[n] = table

    if diags:
        raise SignatureError(diags)

    return Signature(tuple(declared), descendants, glb_table, approp, intro)
