"""Genus-zero Gromov-Witten invariants of products of projective spaces.

Base cases come from the small quantum ring  tensor_i Q[H_i, Q_i]/(H_i^n - Q_i)
of (P^{n-1})^k; invariants with four or more insertions are reconstructed
through the divisor relation and the associativity (WDVV) constraints of the
big quantum product, with exact memoization.

WDVV bookkeeping.  For monomials u, v, x, y, a background tuple B and a
multidegree d, put

    E(u, v | x, y) = sum over splittings S + T = B, e + f = d and basis
                     monomials mu of  <u, v, S, mu>_e  <mu^dual, x, y, T>_f

(mu^dual the Poincare-dual monomial).  Associativity says E(u,v|x,y) is
symmetric under swapping v and x.  Degree-0 invariants with >= 4 marks
vanish, so on each side the only degree-0 contributions are the classical
triple products at e=0, S=empty (resp. f=0, T=empty), which contract to a
cup product on the other factor.  Extracting those ends from both sides of
E(H_i, g' | x1, x2) = E(H_i, x1 | g', x2) and removing the loose divisor
H_i by the divisor axiom yields, for a target insertion g = H_i g':

    <H_i g', x1, x2, B>_d = <H_i x1, g', x2, B>_d
                            + d_i <x1, B, g' x2>_d - d_i <g', B, x1 x2>_d
                            + P(H_i, x1 | g', x2) - P(H_i, g' | x1, x2)

with P the sum of proper splittings (e and f both nonzero).  The first
term on the right is evaluated with g' as its next factored insertion, so
the measure (total degree, number of marks, codim of the factored
insertion) drops lexicographically at every step.
"""

from __future__ import annotations

import itertools
import threading
from fractions import Fraction

from .cohomology import PClass, ProductSpace, c_squared, cup, integrate_rational

Mono = tuple  # exponent vector of a basis monomial


class CacheVersionError(RuntimeError):
    """Raised when loading a cache file with the wrong version header."""


class CacheConsistencyError(RuntimeError):
    """Raised when a recomputed invariant disagrees with the stored value."""


class MemoStore:
    """Exact cache of monomial Gromov-Witten invariants, optionally disk-backed.

    Keys are (k, n, multidegree, sorted insertion monomials).  Inserts are
    idempotent: re-putting a key checks exact equality.  Reads are lock-free;
    writes are serialized, so concurrent duplicated computation is safe.
    """

    VERSION = "abelian-gw-cache v1"

    def __init__(self, path=None):
        self.data: dict[tuple, Fraction] = {}
        self.path = path
        self.hits = 0
        self.misses = 0
        self._lock = threading.Lock()

    def __len__(self):
        return len(self.data)

    def get(self, key):
        val = self.data.get(key)
        if val is None:
            self.misses += 1
        else:
            self.hits += 1
        return val

    def put(self, key, value: Fraction):
        with self._lock:
            old = self.data.get(key)
            if old is not None and old != value:
                raise CacheConsistencyError(f"{key}: stored {old}, recomputed {value}")
            self.data[key] = value

    def stats(self) -> dict:
        return {"entries": len(self.data), "hits": self.hits, "misses": self.misses}

    @staticmethod
    def key_text(key) -> str:
        k, n, d, ins = key
        return "{},{}|{}|{}".format(
            k, n, ",".join(str(x) for x in d),
            ";".join(".".join(str(x) for x in m) for m in ins),
        )

    @staticmethod
    def parse_key_text(text: str):
        head, dpart, ipart = text.split("|")
        k, n = (int(x) for x in head.split(","))
        d = tuple(int(x) for x in dpart.split(","))
        ins = tuple(tuple(int(x) for x in m.split(".")) for m in ipart.split(";")) if ipart else ()
        return (k, n, d, ins)

    def save(self, path=None):
        path = path or self.path
        if path is None:
            raise ValueError("no cache path configured")
        lines = [self.VERSION]
        for key in sorted(self.data, key=self.key_text):
            v = self.data[key]
            lines.append(f"{self.key_text(key)}\t{v.numerator}/{v.denominator}")
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")

    def load(self, path=None):
        path = path or self.path
        with open(path) as fh:
            header = fh.readline().rstrip("\n")
            if header != self.VERSION:
                raise CacheVersionError(f"expected {self.VERSION!r}, found {header!r}")
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                key_text, val_text = line.split("\t")
                num, den = val_text.split("/")
                self.put(self.parse_key_text(key_text), Fraction(int(num), int(den)))
        return self


def small_quantum_product(a: PClass, b: PClass) -> dict[tuple, PClass]:
    """Product in the small quantum ring of (P^{n-1})^k.

    The ring is tensor_i Q[H_i, Q_i]/(H_i^n - Q_i): each exponent reduces as
    H_i^e = Q_i^(e // n) H_i^(e mod n).  Returns {multidegree: coefficient
    class}; cgrades add and normalize.
    """
    if a.space != b.space:
        raise ValueError("mismatched spaces")
    space = a.space
    n = space.n
    acc: dict[tuple, dict] = {}
    for ea, ca in a.terms.items():
        for eb, cb in b.terms.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            q = tuple(x // n for x in e)
            r = tuple(x % n for x in e)
            bucket = acc.setdefault(q, {})
            bucket[r] = bucket.get(r, Fraction(0)) + ca * cb
    cg = a.cgrade + b.cgrade
    return {q: PClass(space, terms, cg) for q, terms in acc.items() if any(terms.values())}


def three_point(a: PClass, b: PClass, c: PClass, d: tuple) -> Fraction:
    """<a, b, c>_{0,3,d} from the small quantum ring and the classical pairing."""
    space = a.space
    d = tuple(d)
    if any(x < 0 for x in d):
        return Fraction(0)
    if a.is_homogeneous() and b.is_homogeneous() and c.is_homogeneous():
        needed = space.dim + space.c1_degree(d)
        if not (a.is_zero() or b.is_zero() or c.is_zero()):
            if a.codim() + b.codim() + c.codim() != needed:
                return Fraction(0)
    product = small_quantum_product(a, b)
    coeff = product.get(d)
    if coeff is None:
        return Fraction(0)
    return integrate_rational(cup(coeff, c))


def _pick_pivot(ins, policy: str):
    # ins is sorted in descending lex order
    return ins[0] if policy == "default" else ins[-1]


def _factor_variable(mono, policy: str) -> int:
    idx = [i for i, x in enumerate(mono) if x > 0]
    return idx[0] if policy == "default" else idx[-1]


def _mono_cup(a: Mono, b: Mono, n: int):
    e = tuple(x + y for x, y in zip(a, b))
    return None if any(x >= n for x in e) else e


def _split_degrees(d: tuple):
    """Proper splittings e + f = d with both parts nonzero, e iterated."""
    ranges = [range(x + 1) for x in d]
    for e in itertools.product(*ranges):
        if any(e) and any(x - y for x, y in zip(d, e)):
            yield e, tuple(x - y for x, y in zip(d, e))


def gw_invariant(space: ProductSpace, insertions, d, store: MemoStore, policy: str = "default") -> Fraction:
    """Genus-zero primary invariant of (P^{n-1})^k with basis-monomial insertions.

    insertions may be exponent tuples or single-monomial cgrade-0 PClasses.
    Values are exact and asserted integral (the metric is a permutation on
    the monomial basis, so no denominators can survive).
    """
    monos = []
    for ins in insertions:
        if isinstance(ins, PClass):
            if ins.cgrade != 0 or len(ins.terms) != 1:
                raise ValueError("gw_invariant takes basis monomials; expand classes first")
            ((e, c),) = ins.terms.items()
            if c != 1:
                raise ValueError("gw_invariant takes basis monomials with coefficient 1")
            monos.append(e)
        else:
            monos.append(tuple(int(x) for x in ins))
    return _gw(space, tuple(sorted(monos, reverse=True)), tuple(d), store, policy, None)


def _gw(space, ins, d, store, policy, dist) -> Fraction:
    n, k = space.n, space.k
    if any(x < 0 for x in d):
        return Fraction(0)
    key = (k, n, d, ins)
    cached = store.get(key)
    if cached is not None:
        return cached

    m = len(ins)
    tot = sum(d)
    value = None

    if sum(sum(e) for e in ins) != space.dim + space.c1_degree(d) + m - 3:
        value = Fraction(0)
    elif tot == 0:
        if m == 3:
            e = tuple(sum(x) for x in zip(*ins))
            value = Fraction(1) if e == space.top else Fraction(0)
        else:
            value = Fraction(0)  # degree 0 needs psi-classes beyond 3 marks
    elif m < 3:
        raise ValueError("invariants with fewer than 3 marks go through two_point")
    elif m == 3:
        a, b, c = (PClass(space, {e: Fraction(1)}) for e in ins)
        value = three_point(a, b, c, d)
    elif any(sum(e) == 0 for e in ins):
        value = Fraction(0)  # fundamental-class axiom, d != 0 here
    else:
        div = next((e for e in ins if sum(e) == 1), None)
        if div is not None:
            i = div.index(1)
            rest = _remove_one(ins, div)
            value = d[i] * _gw(space, rest, d, store, policy, None) if d[i] else Fraction(0)
        else:
            value = _wdvv_step(space, ins, d, store, policy, dist)

    if value.denominator != 1:
        raise ArithmeticError(f"non-integral invariant {value} for {key}")
    store.put(key, value)
    return value


def _remove_one(ins: tuple, item) -> tuple:
    idx = ins.index(item)
    return ins[:idx] + ins[idx + 1 :]


def _wdvv_step(space, ins, d, store, policy, dist) -> Fraction:
    n = space.n
    if dist is None or dist not in ins:
        dist = _pick_pivot(ins, policy)
    i = _factor_variable(dist, policy)
    gprime = tuple(x - (1 if j == i else 0) for j, x in enumerate(dist))
    rest = sorted(_remove_one(ins, dist), reverse=True)
    if policy == "default":
        x1, x2, back = rest[0], rest[1], tuple(rest[2:])
    else:
        x1, x2, back = rest[-1], rest[-2], tuple(rest[:-2])

    total = Fraction(0)

    hop = _mono_cup(_unit_vec(space.k, i), x1, n)
    if hop is not None:
        new_ins = tuple(sorted(back + (x2, hop, gprime), reverse=True))
        total += _gw(space, new_ins, d, store, policy, gprime)

    if d[i]:
        a_cup = _mono_cup(gprime, x2, n)
        if a_cup is not None:
            new_ins = tuple(sorted(back + (x1, a_cup), reverse=True))
            total += d[i] * _gw(space, new_ins, d, store, policy, None)
        c_cup = _mono_cup(x1, x2, n)
        if c_cup is not None:
            new_ins = tuple(sorted(back + (gprime, c_cup), reverse=True))
            total -= d[i] * _gw(space, new_ins, d, store, policy, None)

    h_i = _unit_vec(space.k, i)
    total += _proper_splittings(space, h_i, x1, gprime, x2, back, d, store, policy)
    total -= _proper_splittings(space, h_i, gprime, x1, x2, back, d, store, policy)
    return total


def _unit_vec(k: int, i: int) -> Mono:
    return tuple(1 if j == i else 0 for j in range(k))


def _proper_splittings(space, u, v, x, y, back, d, store, policy) -> Fraction:
    """P(u, v | x, y): contraction sum over proper degree splittings."""
    total = Fraction(0)
    base = sum(u) + sum(v)
    for s_mask in range(1 << len(back)):
        S = tuple(back[j] for j in range(len(back)) if s_mask >> j & 1)
        T = tuple(back[j] for j in range(len(back)) if not s_mask >> j & 1)
        s_codim = base + sum(sum(e) for e in S)
        for e, f in _split_degrees(d):
            mu_codim = space.dim + space.c1_degree(e) + len(S) - s_codim
            if not 0 <= mu_codim <= space.dim:
                continue
            for mu in _monomials_of_codim(space, mu_codim):
                left = _gw(space, tuple(sorted((u, v, mu) + S, reverse=True)), e, store, policy, None)
                if not left:
                    continue
                right = _gw(
                    space,
                    tuple(sorted((space.dual(mu), x, y) + T, reverse=True)),
                    f, store, policy, None,
                )
                total += left * right
    return total


_mono_by_codim_cache: dict[tuple, dict[int, list]] = {}


def _monomials_of_codim(space, c: int):
    key = (space.k, space.n)
    table = _mono_by_codim_cache.get(key)
    if table is None:
        table = {}
        for mono in space.monomials():
            table.setdefault(sum(mono), []).append(mono)
        _mono_by_codim_cache[key] = table
    return table.get(c, ())


def two_point(space: ProductSpace, a: Mono, b: Mono, d: tuple, store: MemoStore) -> Fraction:
    """<a, b>_{0,2,d} for d != 0, via one inserted divisor and the divisor axiom."""
    d = tuple(d)
    if not any(d):
        raise ValueError("2-point invariants are classical at degree 0; not defined here")
    i = next(j for j, x in enumerate(d) if x > 0)
    ins = tuple(sorted((_unit_vec(space.k, i), tuple(a), tuple(b)), reverse=True))
    return _gw(space, ins, d, store, "default", None) / d[i]


def gw_of_classes(space: ProductSpace, classes, d: tuple, store: MemoStore) -> Fraction:
    """Multilinear extension of gw_invariant to PClass insertions.

    The formal scalars c contract in pairs to the rational c^2.  For an odd
    total cgrade the returned number is the coefficient of the dangling c;
    it need not vanish per multidegree, only after summing over the lifts
    of a curve class (the Weyl group permutes the lifts).  Two-mark
    brackets route through the divisor axiom.
    """
    cg = sum(cls.cgrade for cls in classes)
    scalar = c_squared(space.k) ** (cg // 2)
    d = tuple(d)
    total = Fraction(0)
    term_lists = [list(cls.terms.items()) for cls in classes]
    if any(not t for t in term_lists):
        return Fraction(0)
    needed = space.dim + space.c1_degree(d) + len(classes) - 3
    for combo in itertools.product(*term_lists):
        monos = [e for e, _ in combo]
        if sum(sum(e) for e in monos) != needed:
            continue
        coeff = Fraction(1)
        for _, c in combo:
            coeff *= c
        if len(classes) == 2:
            if not any(d):
                continue  # unstable; degree-0 two-point never contributes here
            total += coeff * two_point(space, monos[0], monos[1], d, store)
        else:
            total += coeff * _gw(space, tuple(sorted(monos, reverse=True)), d, store, "default", None)
    return scalar * total


def check_wdvv(space: ProductSpace, d_total_max: int, n_marks_max: int, store: MemoStore) -> list[dict]:
    """Verify associativity constraints for all quadruples of basis monomials
    with backgrounds and degrees within bounds.  Returns the violations."""
    violations = []
    monos = space.monomials()
    degrees = [
        dd
        for dd in itertools.product(range(d_total_max + 1), repeat=space.k)
        if sum(dd) <= d_total_max
    ]
    max_back = max(0, n_marks_max - 4)
    backgrounds = []
    for size in range(max_back + 1):
        backgrounds.extend(itertools.combinations_with_replacement(monos, size))
    for quad in itertools.combinations_with_replacement(monos, 4):
        for back in backgrounds:
            codim_sum = sum(sum(e) for e in quad) + sum(sum(e) for e in back)
            for dd in degrees:
                if codim_sum != space.dim + space.c1_degree(dd) + len(back):
                    continue
                a, b, c, e = quad
                lhs = _wdvv_side(space, a, b, c, e, back, dd, store)
                mid = _wdvv_side(space, a, c, b, e, back, dd, store)
                rhs = _wdvv_side(space, a, e, b, c, back, dd, store)
                if lhs != mid or mid != rhs:
                    violations.append(
                        {"quad": quad, "background": back, "degree": dd,
                         "values": (lhs, mid, rhs)}
                    )
    return violations


def _wdvv_side(space, u, v, x, y, back, d, store) -> Fraction:
    total = Fraction(0)
    base = sum(u) + sum(v)
    for s_mask in range(1 << len(back)):
        S = tuple(back[j] for j in range(len(back)) if s_mask >> j & 1)
        T = tuple(back[j] for j in range(len(back)) if not s_mask >> j & 1)
        s_codim = base + sum(sum(e) for e in S)
        for e in itertools.product(*[range(t + 1) for t in d]):
            f = tuple(t - s for t, s in zip(d, e))
            mu_codim = space.dim + space.c1_degree(e) + len(S) - s_codim
            if not 0 <= mu_codim <= space.dim:
                continue
            for mu in _monomials_of_codim(space, mu_codim):
                left = _gw(space, tuple(sorted((u, v, mu) + S, reverse=True)), e, store, "default", None)
                if not left:
                    continue
                right = _gw(
                    space,
                    tuple(sorted((space.dual(mu), x, y) + T, reverse=True)),
                    f, store, "default", None,
                )
                total += left * right
    return total
