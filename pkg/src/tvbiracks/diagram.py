"""Oriented twisted virtual link diagrams as port-graphs.

A diagram is a list of nodes joined by numbered semiarcs; every semiarc id
occurs exactly once as an out-port and once as an in-port.  Node kinds and
the text format (one node per line, ``#`` starts a comment):

    X+ a b c d   classical positive crossing: over-in a, under-in b,
                 over-out c, under-out d
    X- a b c d   classical negative crossing, same port layout
    V  a b c d   virtual crossing: strand 1 runs a -> c, strand 2 runs b -> d
    T  a b       twist bar: in a, out b
    O            a crossing-free circle (free loop); produced by moves that
                 erase the last node on a component

Orientation is implicit: each strand enters at its in-port and leaves at
its out-port.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property


class DiagramParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MoveNoMatchError(ValueError):
    """The site does not match the move's left-hand-side pattern."""


CROSSING_KINDS = ("X+", "X-")
NODE_KINDS = CROSSING_KINDS + ("V", "T")


@dataclass(frozen=True)
class Node:
    kind: str
    ports: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in NODE_KINDS:
            raise DiagramParseError(f"unknown node kind {self.kind!r}")
        want = 2 if self.kind == "T" else 4
        if len(self.ports) != want:
            raise DiagramParseError(
                f"{self.kind} node needs {want} ports, got {len(self.ports)}")

    @property
    def in_ports(self) -> tuple[int, ...]:
        return self.ports[:1] if self.kind == "T" else self.ports[:2]

    @property
    def out_ports(self) -> tuple[int, ...]:
        return self.ports[1:] if self.kind == "T" else self.ports[2:]

    def strands(self) -> tuple[tuple[int, int], ...]:
        """(in, out) pairs of semiarcs joined through this node."""
        if self.kind == "T":
            return ((self.ports[0], self.ports[1]),)
        a, b, c, d = self.ports
        return ((a, c), (b, d))

    def kink_type(self) -> str | None:
        """'A' when over-out is the loop (= under-in), 'B' when under-out is
        the loop (= over-in); None if not a one-node kink."""
        if self.kind not in CROSSING_KINDS:
            return None
        a, b, c, d = self.ports
        if b == c:
            return "A"
        if a == d:
            return "B"
        return None

    def kink_strand(self) -> tuple[int, int]:
        """(strand-in, strand-out) of a kink node."""
        a, b, c, d = self.ports
        if self.kink_type() == "A":
            return (a, d)
        if self.kink_type() == "B":
            return (b, c)
        raise ValueError("not a kink node")


@dataclass(frozen=True)
class Diagram:
    nodes: tuple[Node, ...]
    free_loops: int = 0

    def __post_init__(self):
        seen_in: set[int] = set()
        seen_out: set[int] = set()
        for node in self.nodes:
            for p in node.ports:
                if not isinstance(p, int) or p < 1:
                    raise DiagramParseError(f"bad semiarc id {p!r}")
            for p in node.in_ports:
                if p in seen_in:
                    raise DiagramParseError(f"semiarc {p} used twice as an in-port")
                seen_in.add(p)
            for p in node.out_ports:
                if p in seen_out:
                    raise DiagramParseError(f"semiarc {p} used twice as an out-port")
                seen_out.add(p)
        for p in sorted(seen_in ^ seen_out):
            raise DiagramParseError(f"dangling semiarc {p}")
        if self.free_loops < 0:
            raise DiagramParseError("negative free loop count")

    @cached_property
    def semiarcs(self) -> frozenset[int]:
        return frozenset(p for node in self.nodes for p in node.in_ports)

    @cached_property
    def successor(self) -> dict[int, int]:
        return {i: o for node in self.nodes for i, o in node.strands()}

    @cached_property
    def components(self) -> tuple[tuple[int, ...], ...]:
        """Semiarc cycles under out-port -> in-port succession, each started
        at its lowest id, ordered by lowest id.  Free loops are counted in
        component_count but carry no semiarcs."""
        remaining = set(self.semiarcs)
        cycles = []
        while remaining:
            start = min(remaining)
            cycle = [start]
            cur = self.successor[start]
            while cur != start:
                cycle.append(cur)
                cur = self.successor[cur]
            remaining -= set(cycle)
            cycles.append(tuple(cycle))
        return tuple(cycles)

    @property
    def component_count(self) -> int:
        return len(self.components) + self.free_loops

    def producer_of(self, semiarc: int) -> Node:
        for node in self.nodes:
            if semiarc in node.out_ports:
                return node
        raise KeyError(semiarc)

    def consumer_of(self, semiarc: int) -> Node:
        for node in self.nodes:
            if semiarc in node.in_ports:
                return node
        raise KeyError(semiarc)

    def max_id(self) -> int:
        return max(self.semiarcs, default=0)


def parse(text: str) -> Diagram:
    nodes = []
    loops = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        kind = tokens[0]
        if kind == "O":
            if len(tokens) != 1:
                raise DiagramParseError("O takes no arguments", lineno)
            loops += 1
            continue
        if kind not in NODE_KINDS:
            raise DiagramParseError(f"unknown node kind {kind!r}", lineno)
        try:
            ports = tuple(int(tok) for tok in tokens[1:])
        except ValueError:
            raise DiagramParseError(f"non-integer port in {line!r}", lineno)
        try:
            nodes.append(Node(kind, ports))
        except DiagramParseError as exc:
            raise DiagramParseError(str(exc), lineno)
    try:
        return Diagram(tuple(nodes), loops)
    except DiagramParseError as exc:
        raise DiagramParseError(f"invalid diagram: {exc}")


def canonicalize(d: Diagram) -> Diagram:
    """Renumber semiarcs by traversal order starting from the lowest id of
    each component; nodes are ordered by their smallest renumbered in-port."""
    mapping: dict[int, int] = {}
    nxt = 1
    for cycle in d.components:
        for s in cycle:
            mapping[s] = nxt
            nxt += 1
    nodes = [Node(n.kind, tuple(mapping[p] for p in n.ports)) for n in d.nodes]
    nodes.sort(key=lambda n: min(n.in_ports))
    return Diagram(tuple(nodes), d.free_loops)


def serialize(d: Diagram) -> str:
    out = []
    for node in canonicalize(d).nodes:
        out.append(" ".join([node.kind] + [str(p) for p in node.ports]))
    out.extend("O" for _ in range(d.free_loops))
    return "\n".join(out) + "\n"


BUILTINS = {
    # a crossing-free circle needs at least one node; two cancelling bars
    "unknot": "T 1 2\nT 2 1",
    "unknot-kink+": "X+ 1 2 2 1",
    "hopf-classical": "X+ 1 3 2 4\nX+ 4 2 3 1",
    "vH0": "X+ 1 3 2 4\nV 2 4 1 3",
    "vH1a": "X+ 1 3 2 4\nT 2 5\nV 5 4 1 3",
    "vH1b": "X+ 1 3 2 4\nT 4 5\nV 2 5 1 3",
    "vH2": "X+ 1 3 2 4\nT 2 5\nT 4 6\nV 5 6 1 3",
}


def builtin(name: str) -> Diagram:
    if name not in BUILTINS:
        raise KeyError(f"unknown builtin diagram {name!r}; "
                       f"choices: {', '.join(sorted(BUILTINS))}")
    return parse(BUILTINS[name])


def _replace_in_port(nodes: list[Node], old: int, new: int) -> None:
    for idx, node in enumerate(nodes):
        if old in node.in_ports:
            ports = list(node.ports)
            ports[node.in_ports.index(old)] = new  # in-ports are slots 0 (and 1)
            nodes[idx] = Node(node.kind, tuple(ports))
            return
    raise KeyError(old)


def insert_kink_at(d: Diagram, semiarc: int, count: int) -> Diagram:
    """Insert `count` positive kinks on the given semiarc.

    Each kink is a classical-positive node in the blackboard-framed shape
    with the loop on the over-out/under-in side (curl type A): the strand
    enters at over-in and leaves at under-out.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    if count == 0:
        return d
    if semiarc not in d.semiarcs:
        raise KeyError(f"no semiarc {semiarc}")
    nodes = list(d.nodes)
    fresh = d.max_id() + 1
    cur = semiarc
    for _ in range(count):
        loop, nxt = fresh, fresh + 1
        fresh += 2
        _replace_in_port(nodes, cur, nxt)
        nodes.append(Node("X+", (cur, loop, loop, nxt)))
        cur = nxt
    return Diagram(tuple(nodes), d.free_loops)


def insert_kink(d: Diagram, component: int, count: int) -> Diagram:
    """Insert kinks on a component, at its lowest-numbered semiarc.

    Components are indexed in `components` order, with free loops last."""
    cycles = d.components
    total = d.component_count
    if not 0 <= component < total:
        raise IndexError(f"component index {component} out of range 0..{total - 1}")
    if count == 0:
        return d
    if component < len(cycles):
        return insert_kink_at(d, min(cycles[component]), count)
    # a free loop: the first kink closes it into the one-crossing unknot
    fresh = d.max_id() + 1
    s, loop = fresh, fresh + 1
    nodes = d.nodes + (Node("X+", (s, loop, loop, s)),)
    out = Diagram(nodes, d.free_loops - 1)
    return insert_kink_at(out, s, count - 1) if count > 1 else out


MOVE_KINDS = ("bar-cancel", "bar-slide-virtual", "twist-conjugate",
              "kink-pair-cancel", "kink-bar-swap")


def apply_move(d: Diagram, move: str, site: int, inverse: bool = False) -> Diagram:
    """Apply an axiom-derived local rewrite at a site (a semiarc id).

    Forward direction removes structure (cancel bars/kinks, conjugate a
    crossing out of its four bars); inverse reinstates it.  Raises
    MoveNoMatchError when the site does not match the pattern.
    """
    if move not in MOVE_KINDS:
        raise ValueError(f"unknown move {move!r}; choices: {', '.join(MOVE_KINDS)}")
    fn = {
        "bar-cancel": _bar_cancel,
        "bar-slide-virtual": _bar_slide_virtual,
        "twist-conjugate": _twist_conjugate,
        "kink-pair-cancel": _kink_pair_cancel,
        "kink-bar-swap": _kink_bar_swap,
    }[move]
    return fn(d, site, inverse)


def _node_index(d: Diagram, pred) -> int | None:
    for idx, node in enumerate(d.nodes):
        if pred(node):
            return idx
    return None


def _bar_cancel(d: Diagram, site: int, inverse: bool) -> Diagram:
    if inverse:
        # insert a cancelling bar pair on semiarc `site` (site 0: on a free loop)
        if site == 0:
            if d.free_loops < 1:
                raise MoveNoMatchError("no free loop to put a bar pair on")
            a, b = d.max_id() + 1, d.max_id() + 2
            nodes = d.nodes + (Node("T", (a, b)), Node("T", (b, a)))
            return Diagram(nodes, d.free_loops - 1)
        if site not in d.semiarcs:
            raise MoveNoMatchError(f"no semiarc {site}")
        nodes = list(d.nodes)
        m, b = d.max_id() + 1, d.max_id() + 2
        _replace_in_port(nodes, site, b)
        nodes.extend([Node("T", (site, m)), Node("T", (m, b))])
        return Diagram(tuple(nodes), d.free_loops)
    # delete: site is the semiarc between two adjacent bars
    if site not in d.semiarcs:
        raise MoveNoMatchError(f"no semiarc {site}")
    first = d.producer_of(site)
    second = d.consumer_of(site)
    if first.kind != "T" or second.kind != "T":
        raise MoveNoMatchError(f"semiarc {site} does not join two bars")
    a = first.ports[0]
    b = second.ports[1]
    nodes = [n for n in d.nodes if n is not first and n is not second]
    if a == b:
        # the two bars were the whole component
        return Diagram(tuple(nodes), d.free_loops + 1)
    _replace_in_port(nodes, b, a)
    return Diagram(tuple(nodes), d.free_loops)


def _bar_slide_virtual(d: Diagram, site: int, inverse: bool) -> Diagram:
    """Slide a bar along its strand past a virtual crossing (axiom v shape).

    Forward: site joins a bar to a virtual crossing input; the bar reappears
    on the same strand's output.  Inverse: site joins a virtual crossing
    output to a bar; the bar moves to the strand's input side."""
    if site not in d.semiarcs:
        raise MoveNoMatchError(f"no semiarc {site}")
    nodes = list(d.nodes)
    if not inverse:
        bar = d.producer_of(site)
        vnode = d.consumer_of(site)
        if bar.kind != "T" or vnode.kind != "V" or bar.ports[1] != site:
            raise MoveNoMatchError(f"semiarc {site} does not join a bar to a virtual crossing")
        p = bar.ports[0]
        strand = 0 if vnode.ports[0] == site else 1
        r = vnode.out_ports[strand]
        fresh = d.max_id() + 1
        vports = list(vnode.ports)
        vports[strand] = p
        vports[2 + strand] = fresh
        nodes.remove(bar)
        nodes[nodes.index(vnode)] = Node("V", tuple(vports))
        nodes.append(Node("T", (fresh, r)))
        return Diagram(tuple(nodes), d.free_loops)
    vnode = d.producer_of(site)
    bar = d.consumer_of(site)
    if bar.kind != "T" or vnode.kind != "V" or bar.ports[0] != site:
        raise MoveNoMatchError(f"semiarc {site} does not join a virtual crossing to a bar")
    r = bar.ports[1]
    strand = 0 if vnode.ports[2] == site else 1
    p = vnode.in_ports[strand]
    fresh = d.max_id() + 1
    vports = list(vnode.ports)
    vports[strand] = fresh
    vports[2 + strand] = r
    nodes.remove(bar)
    nodes[nodes.index(vnode)] = Node("V", tuple(vports))
    nodes.append(Node("T", (p, fresh)))
    return Diagram(tuple(nodes), d.free_loops)


def _twist_conjugate(d: Diagram, site: int, inverse: bool) -> Diagram:
    """Axiom (vi) rewrite: a classical crossing flanked by four bars is
    replaced by virtual-crossing-virtual (forward), and back (inverse).
    The site is the crossing's over-in semiarc."""
    cross_idx = _node_index(
        d, lambda n: n.kind in CROSSING_KINDS and n.ports[0] == site)
    if cross_idx is None:
        raise MoveNoMatchError(f"no classical crossing with over-in semiarc {site}")
    cross = d.nodes[cross_idx]
    a, b, c, dd = cross.ports
    nodes = list(d.nodes)
    if not inverse:
        try:
            bars = [d.producer_of(a), d.producer_of(b),
                    d.consumer_of(c), d.consumer_of(dd)]
        except KeyError:
            raise MoveNoMatchError("crossing is not flanked by four bars")
        if any(n.kind != "T" for n in bars) or len(set(map(id, bars))) != 4:
            raise MoveNoMatchError("crossing is not flanked by four bars")
        p = bars[0].ports[0]
        q = bars[1].ports[0]
        r = bars[2].ports[1]
        s = bars[3].ports[1]
        fresh = d.max_id() + 1
        m1, m2, k1, k2 = fresh, fresh + 1, fresh + 2, fresh + 3
        for n in bars:
            nodes.remove(n)
        nodes[nodes.index(cross)] = Node(cross.kind, (m2, m1, k1, k2))
        nodes.append(Node("V", (p, q, m1, m2)))
        nodes.append(Node("V", (k2, k1, r, s)))
        return Diagram(tuple(nodes), d.free_loops)
    # inverse: match V(p,q,m1,m2), X(m2,m1,k1,k2), V(k2,k1,r,s)
    try:
        v_in = d.producer_of(a)
        v_out = d.consumer_of(c)
    except KeyError:
        raise MoveNoMatchError("crossing is not in the virtual-conjugated shape")
    if (v_in.kind != "V" or v_out.kind != "V" or v_in is v_out
            or v_in.ports[2:] != (b, a) or v_out.ports[:2] != (dd, c)):
        raise MoveNoMatchError("crossing is not in the virtual-conjugated shape")
    p, q = v_in.ports[0], v_in.ports[1]
    r, s = v_out.ports[2], v_out.ports[3]
    fresh = d.max_id() + 1
    na, nb, nc, nd = fresh, fresh + 1, fresh + 2, fresh + 3
    nodes.remove(v_in)
    nodes.remove(v_out)
    nodes[nodes.index(cross)] = Node(cross.kind, (na, nb, nc, nd))
    nodes.extend([Node("T", (p, na)), Node("T", (q, nb)),
                  Node("T", (nc, r)), Node("T", (nd, s))])
    return Diagram(tuple(nodes), d.free_loops)


def _kink_pair_cancel(d: Diagram, site: int, inverse: bool) -> Diagram:
    """Framed type I: delete (or insert) an adjacent pair of kinks of
    opposite crossing sign.  Forward site: the semiarc joining the two kink
    nodes; inverse site: the semiarc the pair is inserted on."""
    if site not in d.semiarcs:
        raise MoveNoMatchError(f"no semiarc {site}")
    if inverse:
        nodes = list(d.nodes)
        fresh = d.max_id() + 1
        l1, mid, l2, end = fresh, fresh + 1, fresh + 2, fresh + 3
        _replace_in_port(nodes, site, end)
        nodes.append(Node("X+", (site, l1, l1, mid)))
        nodes.append(Node("X-", (mid, l2, l2, end)))
        return Diagram(tuple(nodes), d.free_loops)
    first = d.producer_of(site)
    second = d.consumer_of(site)
    if (first.kink_type() is None or second.kink_type() is None
            or first is second
            or first.kink_strand()[1] != site or second.kink_strand()[0] != site
            or first.kind == second.kind):
        raise MoveNoMatchError(
            f"semiarc {site} does not join two opposite-sign kinks")
    s_in = first.kink_strand()[0]
    s_out = second.kink_strand()[1]
    nodes = [n for n in d.nodes if n is not first and n is not second]
    if s_in == s_out:
        # the pair was the whole component
        return Diagram(tuple(nodes), d.free_loops + 1)
    _replace_in_port(nodes, s_out, s_in)
    return Diagram(tuple(nodes), d.free_loops)


def _kink_bar_swap(d: Diagram, site: int, inverse: bool) -> Diagram:
    """Move a bar past a classical kink.  Forward site: the semiarc from the
    bar into the kink; inverse site: the semiarc from the kink into the bar.
    The kink keeps its sign and curl."""
    if site not in d.semiarcs:
        raise MoveNoMatchError(f"no semiarc {site}")
    nodes = list(d.nodes)
    if not inverse:
        bar = d.producer_of(site)
        kink = d.consumer_of(site)
        if (bar.kind != "T" or kink.kink_type() is None
                or kink.kink_strand()[0] != site):
            raise MoveNoMatchError(f"semiarc {site} does not join a bar to a kink")
        p = bar.ports[0]
        s_out = kink.kink_strand()[1]
        fresh = d.max_id() + 1
        kports = list(kink.ports)
        in_slot = 0 if kink.kink_type() == "A" else 1
        out_slot = 3 if kink.kink_type() == "A" else 2
        kports[in_slot] = p
        kports[out_slot] = fresh
        nodes.remove(bar)
        nodes[nodes.index(kink)] = Node(kink.kind, tuple(kports))
        nodes.append(Node("T", (fresh, s_out)))
        return Diagram(tuple(nodes), d.free_loops)
    kink = d.producer_of(site)
    bar = d.consumer_of(site)
    if (bar.kind != "T" or kink.kink_type() is None
            or kink.kink_strand()[1] != site):
        raise MoveNoMatchError(f"semiarc {site} does not join a kink to a bar")
    s_in = kink.kink_strand()[0]
    s_out = bar.ports[1]
    fresh = d.max_id() + 1
    kports = list(kink.ports)
    in_slot = 0 if kink.kink_type() == "A" else 1
    out_slot = 3 if kink.kink_type() == "A" else 2
    kports[in_slot] = fresh
    kports[out_slot] = s_out
    nodes.remove(bar)
    nodes[nodes.index(kink)] = Node(kink.kind, tuple(kports))
    nodes.append(Node("T", (s_in, fresh)))
    return Diagram(tuple(nodes), d.free_loops)


def move_sites(d: Diagram, move: str, inverse: bool = False) -> list[int]:
    """Semiarc ids where apply_move succeeds, by trial application."""
    sites = []
    candidates = sorted(d.semiarcs) + ([0] if move == "bar-cancel" and inverse else [])
    for s in candidates:
        try:
            apply_move(d, move, s, inverse)
        except MoveNoMatchError:
            continue
        sites.append(s)
    return sites
