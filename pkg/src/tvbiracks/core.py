"""Finite twisted virtual biracks: matrix encoding, axiom checking, derived maps.

A structure on X = {x_1, ..., x_n} is stored as the five blocks of the
n x (4n+1) matrix [U | L | vU | vL | T].  Decoding convention (note the
transposed indexing of U and vU):

    B(x_i, x_j) = (x_k, x_l)  where  U[j][i] = k  and  L[i][j] = l
    V(x_i, x_j) = (x_k, x_l)  where  vU[j][i] = k and vL[i][j] = l
    T(x_i) = x_j              where  T[i] = j

Elements are 1-indexed everywhere (files, reports, and in-memory values).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd


class MalformedMatrixError(ValueError):
    """Matrix entry out of range or wrong shape."""


class ParameterConditionError(ValueError):
    """A constructor parameter violates its arithmetic condition."""


class NotClosedError(ValueError):
    """A subset is not closed under the birack operations."""


Row = tuple[int, ...]
Block = tuple[Row, ...]


@dataclass(frozen=True)
class TwistedVirtualBirack:
    """Candidate or confirmed structure; run validate() to confirm."""

    n: int
    U: Block
    L: Block
    vU: Block
    vL: Block
    T: Row

    def b(self, x: int, y: int) -> tuple[int, int]:
        return (self.U[y - 1][x - 1], self.L[x - 1][y - 1])

    def v(self, x: int, y: int) -> tuple[int, int]:
        return (self.vU[y - 1][x - 1], self.vL[x - 1][y - 1])

    def t(self, x: int) -> int:
        return self.T[x - 1]

    def b_inverse(self) -> dict[tuple[int, int], tuple[int, int]]:
        return {self.b(x, y): (x, y) for x, y in self.pairs()}

    def v_inverse(self) -> dict[tuple[int, int], tuple[int, int]]:
        return {self.v(x, y): (x, y) for x, y in self.pairs()}

    def elements(self) -> range:
        return range(1, self.n + 1)

    def pairs(self):
        return itertools.product(self.elements(), repeat=2)

    def matrix(self) -> list[list[int]]:
        """Re-encode as the n x (4n+1) matrix (list of rows)."""
        return [
            list(self.U[i]) + list(self.L[i]) + list(self.vU[i])
            + list(self.vL[i]) + [self.T[i]]
            for i in range(self.n)
        ]

    def flat(self) -> tuple[int, ...]:
        return tuple(v for row in self.matrix() for v in row)


def decode(matrix) -> TwistedVirtualBirack:
    """Build an (unvalidated) structure from an n x (4n+1) integer matrix."""
    rows = [list(r) for r in matrix]
    n = len(rows)
    if n == 0:
        raise MalformedMatrixError("empty matrix")
    width = 4 * n + 1
    for i, row in enumerate(rows):
        if len(row) != width:
            raise MalformedMatrixError(
                f"row {i + 1} has {len(row)} entries, expected {width}")
        for j, v in enumerate(row):
            if not isinstance(v, int) or not 1 <= v <= n:
                raise MalformedMatrixError(
                    f"entry at row {i + 1}, column {j + 1} is {v!r}, "
                    f"expected an integer in 1..{n}")
    blocks = [tuple(tuple(row[k * n:(k + 1) * n]) for row in rows)
              for k in range(4)]
    tcol = tuple(row[4 * n] for row in rows)
    return TwistedVirtualBirack(n, blocks[0], blocks[1], blocks[2], blocks[3], tcol)


# Named validation checks, in report order.
CHECK_NAMES = (
    "B_bijective",
    "V_bijective",
    "T_involution",
    "sideways_invertible",
    "axiom_ii",
    "axiom_iii",
    "axiom_iv",
    "axiom_v",
    "axiom_vi",
    "V_involution",
)


@dataclass(frozen=True)
class ValidationReport:
    checks: dict[str, bool]
    biquandle: bool  # the optional (iii') flag, not a pass/fail criterion

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def failed(self) -> list[str]:
        return [name for name, passed in self.checks.items() if not passed]


def _is_bijection(mapping: dict) -> bool:
    return len(set(mapping.values())) == len(mapping)


def _sideways(tvb: TwistedVirtualBirack, op) -> dict | None:
    """Return the sideways map of a pair operation, or None if it fails.

    S satisfies S(op_1(x,y), x) = (op_2(x,y), y); it exists as a bijection
    iff (x,y) -> (op_1(x,y), x) and (x,y) -> (op_2(x,y), y) are both
    bijections of X^2, and then S is the composite of the second with the
    inverse of the first.
    """
    g = {}
    h = {}
    for x, y in tvb.pairs():
        o1, o2 = op(x, y)
        g[(x, y)] = (o1, x)
        h[(x, y)] = (o2, y)
    if not _is_bijection(g) or not _is_bijection(h):
        return None
    g_inv = {v: k for k, v in g.items()}
    return {pair: h[g_inv[pair]] for pair in g_inv}


def _diag_components_bijective(s_map: dict, n: int) -> bool:
    """Axiom (ii) for one sideways map: (S^{+-1} o Delta)_k bijective, k=1,2."""
    s_inv = {v: k for k, v in s_map.items()}
    for m in (s_map, s_inv):
        for k in (0, 1):
            if len({m[(x, x)][k] for x in range(1, n + 1)}) != n:
                return False
    return True


def validate(tvb: TwistedVirtualBirack) -> ValidationReport:
    """Run every axiom check; failures are report entries, never exceptions."""
    els = list(tvb.elements())
    pairs = list(tvb.pairs())

    b_map = {p: tvb.b(*p) for p in pairs}
    v_map = {p: tvb.v(*p) for p in pairs}
    checks: dict[str, bool] = {}
    checks["B_bijective"] = _is_bijection(b_map)
    checks["V_bijective"] = _is_bijection(v_map)
    checks["T_involution"] = all(tvb.t(tvb.t(x)) == x for x in els)

    s_map = _sideways(tvb, tvb.b)
    vs_map = _sideways(tvb, tvb.v)
    checks["sideways_invertible"] = s_map is not None and vs_map is not None

    if s_map is not None and vs_map is not None:
        checks["axiom_ii"] = (_diag_components_bijective(s_map, tvb.n)
                              and _diag_components_bijective(vs_map, tvb.n))
        checks["axiom_iii"] = all(
            vs_map[(x, x)][0] == vs_map[(x, x)][1] for x in els)
        biquandle = all(s_map[(x, x)][0] == s_map[(x, x)][1] for x in els)
    else:
        checks["axiom_ii"] = False
        checks["axiom_iii"] = False
        biquandle = False

    checks["axiom_iv"] = (
        _yang_baxter(tvb, tvb.b, tvb.b)
        and _yang_baxter(tvb, tvb.v, tvb.v)
        and _mixed_yang_baxter(tvb)
    )

    # (v): (T x Id)V = V(Id x T) and (Id x T)V = V(T x Id)
    ok_v = True
    for x, y in pairs:
        v1, v2 = tvb.v(x, y)
        a1, a2 = tvb.v(x, tvb.t(y))
        if (tvb.t(v1), v2) != (a1, a2):
            ok_v = False
            break
        b1, b2 = tvb.v(tvb.t(x), y)
        if (v1, tvb.t(v2)) != (b1, b2):
            ok_v = False
            break
    checks["axiom_v"] = ok_v

    # (vi): (T x T)B(T x T) = VBV
    ok_vi = True
    for x, y in pairs:
        p1, p2 = tvb.b(tvb.t(x), tvb.t(y))
        lhs = (tvb.t(p1), tvb.t(p2))
        q = tvb.v(x, y)
        r = tvb.b(*q)
        rhs = tvb.v(*r)
        if lhs != rhs:
            ok_vi = False
            break
    checks["axiom_vi"] = ok_vi

    checks["V_involution"] = all(tvb.v(*tvb.v(*p)) == p for p in pairs)

    return ValidationReport(checks=checks, biquandle=biquandle)


def _yang_baxter(tvb, f, g) -> bool:
    """(f x Id)(Id x f)(f x Id) = (Id x f)(f x Id)(Id x f) on X^3 (f = g here)."""
    for x, y, z in itertools.product(tvb.elements(), repeat=3):
        a, b = f(x, y)
        c, d = g(b, z)
        e, h = f(a, c)
        lhs = (e, h, d)
        a2, b2 = g(y, z)
        c2, d2 = f(x, a2)
        e2, h2 = g(d2, b2)
        rhs = (c2, e2, h2)
        if lhs != rhs:
            return False
    return True


def _mixed_yang_baxter(tvb) -> bool:
    """(B x Id)(Id x V)(V x Id) = (Id x V)(V x Id)(Id x B) on X^3."""
    for x, y, z in itertools.product(tvb.elements(), repeat=3):
        # left side: V x Id, then Id x V, then B x Id
        a, b = tvb.v(x, y)
        c, d = tvb.v(b, z)
        e, f = tvb.b(a, c)
        lhs = (e, f, d)
        # right side: Id x B, then V x Id, then Id x V
        a2, b2 = tvb.b(y, z)
        c2, d2 = tvb.v(x, a2)
        e2, f2 = tvb.v(d2, b2)
        rhs = (c2, e2, f2)
        if lhs != rhs:
            return False
    return True


@dataclass(frozen=True)
class DerivedMaps:
    S: dict
    vS: dict
    kink: dict  # permutation of 1..n
    rank: int
    is_biquandle: bool
    is_rack: bool
    B_involutory: bool
    V_trivial: bool
    T_trivial: bool


def derive(tvb: TwistedVirtualBirack) -> DerivedMaps:
    """Compute sideways maps, the kink permutation and its order, and flags.

    The kink map is pi = (S^-1 o Delta)_1 o ((S^-1 o Delta)_2)^-1 where
    Delta(x) = (x, x); its order N is the birack rank.
    """
    s_map = _sideways(tvb, tvb.b)
    vs_map = _sideways(tvb, tvb.v)
    if s_map is None or vs_map is None:
        raise ValueError("structure is not sideways invertible; validate first")
    s_inv = {v: k for k, v in s_map.items()}
    f1 = {x: s_inv[(x, x)][0] for x in tvb.elements()}
    f2 = {x: s_inv[(x, x)][1] for x in tvb.elements()}
    f2_inv = {v: k for k, v in f2.items()}
    kink = {x: f1[f2_inv[x]] for x in tvb.elements()}
    rank = _permutation_order(kink)

    els = list(tvb.elements())
    return DerivedMaps(
        S=s_map,
        vS=vs_map,
        kink=kink,
        rank=rank,
        is_biquandle=(rank == 1),
        is_rack=all(tvb.b(x, y)[1] == x for x, y in tvb.pairs()),
        B_involutory=all(tvb.b(*tvb.b(x, y)) == (x, y) for x, y in tvb.pairs()),
        V_trivial=all(tvb.v(x, y) == (y, x) for x, y in tvb.pairs()),
        T_trivial=all(tvb.t(x) == x for x in els),
    )


def _permutation_order(perm: dict[int, int]) -> int:
    order = 1
    current = dict(perm)
    ident = {x: x for x in perm}
    while current != ident:
        current = {x: perm[current[x]] for x in perm}
        order += 1
    return order


def classify(tvb: TwistedVirtualBirack, derived: DerivedMaps | None = None) -> str:
    """Structure name: base noun from (rank, second component of B), with
    "semi" replacing "bi" when B is involutory, and "virtual"/"twisted"
    prefixes when V or T is nontrivial."""
    d = derived if derived is not None else derive(tvb)
    if d.is_rack:
        base = "quandle" if d.rank == 1 else "rack"
    else:
        base = "biquandle" if d.rank == 1 else "birack"
        if d.B_involutory:
            base = "semi" + base[2:]
    name = base
    if not d.V_trivial:
        name = "virtual " + name
    if not d.T_trivial:
        name = "twisted " + name
    return name


def tsr_construct(m: int, t: int, r: int, v: int, tc: int) -> TwistedVirtualBirack:
    """Structure on Z_m with B(x,y) = (ty, rx), V(x,y) = (vy, v^-1 x),
    T(x) = tc*x, where x_i corresponds to the residue i-1.

    Requires t, r, v, tc to be units mod m with v^2 r = t and tc^2 = 1.
    """
    if m < 2:
        raise ParameterConditionError("modulus must be at least 2")
    for name, val in (("t", t), ("r", r), ("v", v), ("T", tc)):
        if gcd(val % m, m) != 1:
            raise ParameterConditionError(
                f"parameter {name}={val} is not a unit mod {m}")
    if (v * v * r - t) % m != 0:
        raise ParameterConditionError(
            f"condition v^2*r = t fails: v^2*r = {(v * v * r) % m} != {t % m} (mod {m})")
    if (tc * tc - 1) % m != 0:
        raise ParameterConditionError(
            f"condition T^2 = 1 fails: T^2 = {(tc * tc) % m} != 1 (mod {m})")
    v_inv = pow(v, -1, m)

    def idx(residue: int) -> int:
        return residue % m + 1

    u_block = tuple(tuple(idx(t * j) for _ in range(m)) for j in range(m))
    l_block = tuple(tuple(idx(r * i) for _ in range(m)) for i in range(m))
    vu_block = tuple(tuple(idx(v * j) for _ in range(m)) for j in range(m))
    vl_block = tuple(tuple(idx(v_inv * i) for _ in range(m)) for i in range(m))
    t_col = tuple(idx(tc * i) for i in range(m))
    return TwistedVirtualBirack(m, u_block, l_block, vu_block, vl_block, t_col)


def closure(tvb: TwistedVirtualBirack, seed) -> frozenset[int]:
    """Least superset of seed closed under B_1, B_2, V_1, V_2 and T."""
    current = set(seed)
    if not current:
        raise ValueError("seed must be nonempty")
    if not current <= set(tvb.elements()):
        raise ValueError("seed contains elements outside 1..n")
    while True:
        new = set(current)
        for x in current:
            new.add(tvb.t(x))
        for x, y in itertools.product(current, repeat=2):
            new.update(tvb.b(x, y))
            new.update(tvb.v(x, y))
        if new == current:
            return frozenset(current)
        current = new


def subbirack_polynomial(tvb: TwistedVirtualBirack, subset) -> "SubbirackPolynomial":
    """Polynomial signature of a subbirack Y: sum over x in Y of the monomial
    prod_i t_i^{c_i(x)} s_i^{r_i(x)} where, for blocks M_1..M_4 = U, L, vU, vL,

        c_i(x_k) = #{j : M_i[x_j, x_k] = x_j}
        r_i(x_k) = #{j : M_i[x_k, x_j] = x_k}

    and for the T column, c_5(x_k) = r_5(x_k) = 1 if T fixes x_k, else 0.
    """
    y = frozenset(subset)
    if closure(tvb, y) != y:
        raise NotClosedError(f"subset {sorted(y)} is not closed under the operations")
    blocks = (tvb.U, tvb.L, tvb.vU, tvb.vL)
    terms: dict[tuple[int, ...], int] = {}
    for k in sorted(y):
        expo: list[int] = []
        for block in blocks:
            c = sum(1 for j in tvb.elements() if block[j - 1][k - 1] == j)
            r = sum(1 for j in tvb.elements() if block[k - 1][j - 1] == k)
            expo.extend((c, r))
        fixed = 1 if tvb.t(k) == k else 0
        expo.extend((fixed, fixed))
        key = tuple(expo)
        terms[key] = terms.get(key, 0) + 1
    return SubbirackPolynomial(terms)


@dataclass(frozen=True)
class SubbirackPolynomial:
    """Formal sum of monomials t_1^a1 s_1^b1 ... t_5^a5 s_5^b5.

    Keys are the exponent 10-tuples (a1, b1, ..., a5, b5); values are
    positive integer coefficients.
    """

    terms: dict[tuple[int, ...], int] = field(default_factory=dict)

    def canonical(self) -> str:
        parts = []
        for expo in sorted(self.terms):
            coeff = self.terms[expo]
            factors = []
            for i in range(5):
                a, b = expo[2 * i], expo[2 * i + 1]
                if a:
                    factors.append(f"t{i + 1}" + (f"^{a}" if a > 1 else ""))
                if b:
                    factors.append(f"s{i + 1}" + (f"^{b}" if b > 1 else ""))
            mono = "*".join(factors) if factors else "1"
            parts.append(mono if coeff == 1 else f"{coeff}*{mono}")
        return " + ".join(parts) if parts else "0"

    def __str__(self) -> str:
        return self.canonical()


def is_homomorphism(f: dict[int, int], src: TwistedVirtualBirack,
                    dst: TwistedVirtualBirack) -> bool:
    """True iff f intertwines B, V and T of the two structures pointwise."""
    for x in src.elements():
        if x not in f or not 1 <= f[x] <= dst.n:
            raise ValueError(f"map is not total on 1..{src.n} into 1..{dst.n}")
    for x, y in src.pairs():
        b1, b2 = src.b(x, y)
        if dst.b(f[x], f[y]) != (f[b1], f[b2]):
            return False
        v1, v2 = src.v(x, y)
        if dst.v(f[x], f[y]) != (f[v1], f[v2]):
            return False
    return all(dst.t(f[x]) == f[src.t(x)] for x in src.elements())


def parse_birack_text(text: str) -> TwistedVirtualBirack:
    """Birack file format: line 1 = n, then n rows of 4n+1 integers;
    '#' begins a comment line."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise MalformedMatrixError("empty birack file")
    try:
        n = int(lines[0])
    except ValueError:
        raise MalformedMatrixError(f"first line must be n, got {lines[0]!r}")
    if n < 1:
        raise MalformedMatrixError("n must be positive")
    if len(lines) != n + 1:
        raise MalformedMatrixError(f"expected {n} matrix rows, got {len(lines) - 1}")
    rows = []
    for ln in lines[1:]:
        try:
            rows.append([int(tok) for tok in ln.split()])
        except ValueError:
            raise MalformedMatrixError(f"non-integer token in row: {ln!r}")
    return decode(rows)


def birack_text(tvb: TwistedVirtualBirack) -> str:
    lines = [str(tvb.n)]
    for row in tvb.matrix():
        lines.append(" ".join(str(v) for v in row))
    return "\n".join(lines) + "\n"


def load_birack(path: str) -> TwistedVirtualBirack:
    with open(path) as fh:
        return parse_birack_text(fh.read())
