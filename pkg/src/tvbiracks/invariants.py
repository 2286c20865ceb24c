"""Birack labelings of diagrams and the counting invariant with enhancements.

Crossing wiring (the single place it is defined): writing la for the label
of semiarc a, the node constraints are

    X+ a b c d :  (lc, ld) = B(lb, la)     outputs from inputs via B
    X- a b c d :  (la, lb) = B(ld, lc)     the positive rule read against
                                           orientation, i.e. through B^-1
    V  a b c d :  (lc, ld) = V(lb, la)
    T  a b     :  lb = T(la)

Under this wiring the trivial structure labels every diagram |X|^c ways and
the paper-matrix structures reproduce the virtual Hopf link values.  A
positive kink (curl type A, as produced by insert_kink) carries the label
of its strand-in to its strand-out through the kink permutation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from collections import Counter

from .core import (TwistedVirtualBirack, DerivedMaps, derive, closure,
                   subbirack_polynomial)
from .diagram import Diagram, Node, insert_kink, insert_kink_at


def _constraint_holds(node: Node, lab, X: TwistedVirtualBirack) -> bool:
    if node.kind == "T":
        a, b = node.ports
        return lab[b] == X.t(lab[a])
    a, b, c, d = node.ports
    if node.kind == "X+":
        return (lab[c], lab[d]) == X.b(lab[b], lab[a])
    if node.kind == "X-":
        return (lab[a], lab[b]) == X.b(lab[d], lab[c])
    return (lab[c], lab[d]) == X.v(lab[b], lab[a])


def _outputs(node: Node, lab, X: TwistedVirtualBirack, b_inv) -> list[tuple[int, int]]:
    """(semiarc, label) pairs forced by the node once its inputs are labeled."""
    if node.kind == "T":
        a, b = node.ports
        return [(b, X.t(lab[a]))]
    a, b, c, d = node.ports
    if node.kind == "X+":
        o1, o2 = X.b(lab[b], lab[a])
        return [(c, o1), (d, o2)]
    if node.kind == "X-":
        o1, o2 = b_inv[(lab[a], lab[b])]
        return [(d, o1), (c, o2)]
    o1, o2 = X.v(lab[b], lab[a])
    return [(c, o1), (d, o2)]


def labelings(d: Diagram, X: TwistedVirtualBirack):
    """Yield every valid labeling as a dict semiarc -> element.

    Free loops are unconstrained; their labels appear under keys
    ("loop", i).  Depth-first assignment with forward propagation: once a
    node's in-ports are labeled its out-ports are forced, so only one free
    choice is made per component seed.
    """
    b_inv = X.b_inverse()
    semiarcs = sorted(d.semiarcs)
    consumers = {p: node for node in d.nodes for p in node.in_ports}

    def propagate(lab, frontier):
        """Force labels outward from newly labeled semiarcs; returns the
        newly assigned ids, or None on conflict."""
        added = []
        queue = list(frontier)
        while queue:
            s = queue.pop()
            node = consumers[s]
            if not all(p in lab for p in node.in_ports):
                continue
            for out, val in _outputs(node, lab, X, b_inv):
                if out in lab:
                    if lab[out] != val:
                        for q in added:
                            del lab[q]
                        return None
                else:
                    lab[out] = val
                    added.append(out)
                    queue.append(out)
        return added

    def search(lab):
        todo = next((s for s in semiarcs if s not in lab), None)
        if todo is None:
            # propagation enforces every constraint whose inputs it saw;
            # recheck closures where outputs were assigned first
            if all(_constraint_holds(n, lab, X) for n in d.nodes):
                yield dict(lab)
            return
        for val in X.elements():
            lab[todo] = val
            added = propagate(lab, [todo])
            if added is not None:
                yield from search(lab)
                for q in added:
                    del lab[q]
            del lab[todo]

    for base in search({}):
        if d.free_loops == 0:
            yield base
        else:
            for loops in itertools.product(X.elements(), repeat=d.free_loops):
                full = dict(base)
                for i, val in enumerate(loops):
                    full[("loop", i)] = val
                yield full


def count_labelings(d: Diagram, X: TwistedVirtualBirack) -> int:
    base = sum(1 for _ in labelings(Diagram(d.nodes, 0), X))
    return base * X.n ** d.free_loops


def brute_force_count(d: Diagram, X: TwistedVirtualBirack) -> int:
    """Independent oracle: test all n^|semiarcs| assignments."""
    semiarcs = sorted(d.semiarcs)
    count = 0
    for values in itertools.product(X.elements(), repeat=len(semiarcs)):
        lab = dict(zip(semiarcs, values))
        if all(_constraint_holds(n, lab, X) for n in d.nodes):
            count += 1
    return count * X.n ** d.free_loops


def framed_diagrams(d: Diagram, rank: int):
    """Yield (w, diagram-with-w-kinks) over all framing vectors w in
    (Z_rank)^c, materialized via insert_kink."""
    c = d.component_count
    for w in itertools.product(range(rank), repeat=c):
        framed = d
        for comp in range(c - 1, -1, -1):
            # insert from the last component down so component indices,
            # which are ordered by lowest semiarc id, stay meaningful
            framed = insert_kink(framed, comp, w[comp])
        yield w, framed


def phi_integral(d: Diagram, X: TwistedVirtualBirack,
                 derived: DerivedMaps | None = None) -> int:
    """Integral counting invariant: total labelings over one full period of
    blackboard framings mod the birack rank."""
    der = derived if derived is not None else derive(X)
    return sum(count_labelings(framed, X) for _, framed in framed_diagrams(d, der.rank))


@dataclass(frozen=True)
class EnhancedValue:
    """A multiset of per-labeling signatures in generating-function form.

    kind: "image" (u-polynomial), "writhe" (monomials in q_1..q_c) or
    "polynomial" (multiset of subbirack polynomial strings).  terms maps a
    canonical monomial/signature string to its positive multiplicity.
    """
    kind: str
    terms: dict[str, int]

    def specialize_at_one(self) -> int:
        return sum(self.terms.values())

    def canonical(self) -> str:
        parts = []
        for key in sorted(self.terms):
            coeff = self.terms[key]
            if self.kind == "polynomial":
                parts.append(f"{coeff}*u^({key})")
            else:
                parts.append(key if coeff == 1 else f"{coeff}*{key}")
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"kind": self.kind,
                "terms": {k: self.terms[k] for k in sorted(self.terms)}}


def _u_monomial(exp: int) -> str:
    return "u" if exp == 1 else f"u^{exp}"


def _q_monomial(w: tuple[int, ...]) -> str:
    factors = [f"q{i + 1}" + (f"^{e}" if e > 1 else "")
               for i, e in enumerate(w) if e > 0]
    return "*".join(factors) if factors else "1"


def _all_labelings_over_framings(d, X, der):
    for w, framed in framed_diagrams(d, der.rank):
        for lab in labelings(framed, X):
            yield w, lab


def phi_image(d: Diagram, X: TwistedVirtualBirack,
              derived: DerivedMaps | None = None) -> EnhancedValue:
    """Image enhancement: the generating polynomial of |Im(f)| over all
    labelings f of all framings; Im(f) is the closure of the used labels."""
    der = derived if derived is not None else derive(X)
    counts: Counter[int] = Counter()
    for _, lab in _all_labelings_over_framings(d, X, der):
        img = closure(X, set(lab.values()))
        counts[len(img)] += 1
    return EnhancedValue("image", {_u_monomial(k): v for k, v in counts.items()})


def phi_writhe(d: Diagram, X: TwistedVirtualBirack,
               derived: DerivedMaps | None = None) -> EnhancedValue:
    """Writhe enhancement: labelings counted per framing vector, recorded as
    monomials q_1^{w_1}...q_c^{w_c}."""
    der = derived if derived is not None else derive(X)
    terms: dict[str, int] = {}
    for w, framed in framed_diagrams(d, der.rank):
        cnt = count_labelings(framed, X)
        if cnt:
            key = _q_monomial(w)
            terms[key] = terms.get(key, 0) + cnt
    return EnhancedValue("writhe", terms)


def phi_polynomial(d: Diagram, X: TwistedVirtualBirack,
                   derived: DerivedMaps | None = None) -> EnhancedValue:
    """Subbirack-polynomial enhancement: the multiset, over all labelings of
    all framings, of the polynomial signature of Im(f)."""
    der = derived if derived is not None else derive(X)
    counts: Counter[str] = Counter()
    for _, lab in _all_labelings_over_framings(d, X, der):
        img = closure(X, set(lab.values()))
        counts[subbirack_polynomial(X, img).canonical()] += 1
    return EnhancedValue("polynomial", dict(counts))


ENHANCEMENTS = {
    "image": phi_image,
    "writhe": phi_writhe,
    "poly": phi_polynomial,
}
