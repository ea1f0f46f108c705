"""Small J-functions of products of projective spaces, the twisted
I-function, and the linear solve matching it against the Grassmannian side.

All series here are carried per Novikov degree with coefficients that are
finite Laurent polynomials in z valued in cohomology ("LPoly": {z power:
{exponent vector: Fraction}}).  Fano grading on the divisor locus keeps
every z-expansion finite, so there is no z truncation anywhere: requested
depths are guarantees, not cutoffs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .partitions import BoxSpec, Partition, binomial_fraction, box_partitions, epsilon, lifts
from .cohomology import ProductSpace, poly_add, poly_mul, poly_scale, space_of
from .grassmannian import FundamentalSolution

LPoly = dict  # {z power: {exponent vector: Fraction}}


def lpoly_add(a: LPoly, b: LPoly) -> LPoly:
    out = {p: dict(v) for p, v in a.items()}
    for p, v in b.items():
        out[p] = poly_add(out.get(p, {}), v)
        if not out[p]:
            del out[p]
    return out


def lpoly_scale(a: LPoly, c, zshift: int = 0) -> LPoly:
    c = Fraction(c)
    if not c:
        return {}
    return {p + zshift: poly_scale(v, c) for p, v in a.items()}


def lpoly_mul(a: LPoly, b: LPoly, n: int) -> LPoly:
    out: LPoly = {}
    for p, u in a.items():
        for q, v in b.items():
            w = poly_mul(u, v, n)
            if w:
                out[p + q] = poly_add(out.get(p + q, {}), w)
                if not out[p + q]:
                    del out[p + q]
    return out


# ---------------------------------------------------------------------------
# per-factor quantum differential equation for P^{n-1}

_factor_cache: dict[int, FundamentalSolution] = {}


def _projective_solution(n: int) -> FundamentalSolution:
    """Fundamental solution for a single P^{n-1} in the basis 1, H, ..., H^{n-1}."""
    if n not in _factor_cache:
        D = [[Fraction(0)] * n for _ in range(n)]
        for j in range(n - 1):
            D[j + 1][j] = Fraction(1)
        A1 = [[Fraction(0)] * n for _ in range(n)]
        A1[0][n - 1] = Fraction(1)  # H * H^{n-1} = Q
        _factor_cache[n] = FundamentalSolution(list(range(n)), D, {1: A1})
    return _factor_cache[n]


def projective_j_coefficient(n: int, d: int) -> dict[int, dict[int, Fraction]]:
    """q^d coefficient of the P^{n-1} J-function (unit normalization, no
    overall z): {z power: {H exponent: coeff}}."""
    col = _projective_solution(n).column(d, 0)
    return {zp: dict(rows) for zp, rows in col.items()}


def projective_j_closed_form(n: int, d: int) -> dict[int, dict[int, Fraction]]:
    """Independent oracle: expansion of 1 / prod_{m=1..d} (H + m z)^n
    with H^n = 0; matches projective_j_coefficient."""
    out = {0: {0: Fraction(1)}}
    for m in range(1, d + 1):
        factor: dict[int, dict[int, Fraction]] = {}
        scale0 = Fraction(1, m ** n)
        for j in range(n):
            coeff = binomial_fraction(-n, j) * scale0 / Fraction(m ** j)
            if coeff:
                factor.setdefault(-n - j, {})[j] = coeff
        new: dict[int, dict[int, Fraction]] = {}
        for p, u in out.items():
            for q, v in factor.items():
                for e1, c1 in u.items():
                    for e2, c2 in v.items():
                        if e1 + e2 >= n:
                            continue
                        bucket = new.setdefault(p + q, {})
                        val = bucket.get(e1 + e2, Fraction(0)) + c1 * c2
                        if val:
                            bucket[e1 + e2] = val
                        elif e1 + e2 in bucket:
                            del bucket[e1 + e2]
        out = {p: v for p, v in new.items() if v}
    return out


def j_function_P(space: ProductSpace, d_total_max: int) -> dict[tuple, LPoly]:
    """Multidegree coefficients of the small J-function of (P^{n-1})^k at
    the origin of the divisor locus.

    J = z * sum over multidegrees of Q^dt * prod_i J_{d_i}(H_i); the
    returned LPoly includes the overall factor z, so the zero multidegree
    maps to z * unit.
    """
    out = {}
    for dt in itertools.product(range(d_total_max + 1), repeat=space.k):
        if sum(dt) > d_total_max:
            continue
        acc: LPoly = {0: {(): Fraction(1)}}
        for i in range(space.k):
            fac = projective_j_coefficient(space.n, dt[i])
            new: LPoly = {}
            for p, u in acc.items():
                for q, v in fac.items():
                    for etup, c1 in u.items():
                        for e, c2 in v.items():
                            key = etup + (e,)
                            bucket = new.setdefault(p + q, {})
                            bucket[key] = bucket.get(key, Fraction(0)) + c1 * c2
            acc = new
        out[dt] = lpoly_scale(acc, 1, zshift=1)
    return out


def apply_abelian_solution(box: BoxSpec, poly: dict, d: int) -> LPoly:
    """sum over lifts dt of d of (tensor_i R_{d_i}) applied to a class.

    The per-factor matrices act coordinate-wise on each tensor leg; this is
    the q^d part of the abelian fundamental solution applied to the class,
    before Novikov specialization (no sign, no overall z).
    """
    space = space_of(box)
    sol = _projective_solution(space.n)
    total: LPoly = {}
    for dt in lifts(d, space.k):
        for e, c in poly.items():
            acc: LPoly = {0: {(): c}}
            for i in range(space.k):
                col = sol.column(dt[i], e[i])
                new: LPoly = {}
                for p, u in acc.items():
                    for q, rows in col.items():
                        for etup, c1 in u.items():
                            for row, c2 in rows.items():
                                key = etup + (row,)
                                bucket = new.setdefault(p + q, {})
                                val = bucket.get(key, Fraction(0)) + c1 * c2
                                if val:
                                    bucket[key] = val
                                elif key in bucket:
                                    del bucket[key]
                acc = new
            total = lpoly_add(total, acc)
    return total


# ---------------------------------------------------------------------------
# the I-function

@dataclass
class ISeries:
    """Twisted abelian J-series: per Novikov degree d the class

        I_d = (-1)^((k-1)d) sum over lifts dt of
              prod_{i<j} ((H_i - H_j) + z (d_i - d_j)) * J^dt,

    a finite Laurent polynomial in z with Weyl-anti-invariant coefficients.
    """

    box: BoxSpec
    d_max: int
    coeffs: dict  # {d: LPoly}

    def coefficient(self, d: int) -> LPoly:
        return self.coeffs.get(d, {})

    def records(self):
        out = []
        for d in sorted(self.coeffs):
            for zp in sorted(self.coeffs[d], reverse=True):
                for e, c in sorted(self.coeffs[d][zp].items()):
                    out.append({"d": d, "z": zp, "monomial": list(e),
                                "value": f"{c.numerator}/{c.denominator}"})
        return out


def i_function(box: BoxSpec, d_max: int) -> ISeries:
    space = space_of(box)
    jp = j_function_P(space, d_max)
    coeffs = {}
    for d in range(d_max + 1):
        acc: LPoly = {}
        for dt in lifts(d, space.k):
            term = jp[dt]
            for i in range(space.k):
                for j in range(i + 1, space.k):
                    ei = tuple(1 if t == i else 0 for t in range(space.k))
                    ej = tuple(1 if t == j else 0 for t in range(space.k))
                    root: LPoly = {0: {ei: Fraction(1), ej: Fraction(-1)}}
                    const = dt[i] - dt[j]
                    if const:
                        root = lpoly_add(root, {1: {(0,) * space.k: Fraction(const)}})
                    term = lpoly_mul(term, root, space.n)
            acc = lpoly_add(acc, term)
        sign = (-1) ** epsilon(d, box.k)
        coeffs[d] = lpoly_scale(acc, sign)
    return ISeries(box, d_max, coeffs)


# ---------------------------------------------------------------------------
# expansion in the anti-invariant basis and the C^i solve

def anti_invariant_expand(poly: dict, box: BoxSpec) -> dict[Partition, Fraction]:
    """Expand an anti-invariant polynomial over the bialternants S_lam * Delta.

    Coefficients are read off the strictly decreasing exponents lam + the
    staircase; exact reconstruction is verified, so a non-anti-invariant
    input raises ValueError.
    """
    from .cohomology import PClass, cup, delta, lift, add as cls_add, scale as cls_scale

    space = space_of(box)
    k = box.k
    staircase = tuple(range(k - 1, -1, -1))
    coeffs = {}
    for lam in box_partitions(box):
        e = tuple(lam.padded(k)[i] + staircase[i] for i in range(k))
        c = poly.get(e, Fraction(0))
        if c:
            coeffs[lam] = c
    recon = PClass(space)
    d = delta(space)
    for lam, c in coeffs.items():
        recon = cls_add(recon, cls_scale(cup(lift(lam, box), d), c))
    if recon.terms != {e: c for e, c in poly.items() if c}:
        raise ValueError("polynomial is not in the span of {S_lam * Delta}")
    return coeffs


@dataclass
class CSolveResult:
    """Outcome of matching the I-function against the z d_i-derivatives of
    the lifted Grassmannian J-function cupped with omega.

    c_series[lam][(d, z power)] holds the rational part of C^lam (the
    formal square-root scalar c is a global factor of every C^lam, kept
    implicit); residual lists exact violations and must be empty.
    """

    box: BoxSpec
    d_max: int
    c_series: dict
    residual: list

    @property
    def consistent(self) -> bool:
        return not self.residual

    def leading(self) -> dict:
        """C^lam at Novikov degree 0 (rational part, by z power)."""
        out = {}
        for lam, series in self.c_series.items():
            lead = {zp: c for (d, zp), c in series.items() if d == 0}
            if lead:
                out[lam] = lead
        return out


def solve_c_coefficients(iseries: ISeries, fund: FundamentalSolution, box: BoxSpec,
                         d_max: int = None) -> CSolveResult:
    """Solve I(z) = sum_i C^i(z) * z d_{t_i} (lifted J_Gr cup omega) order by
    order in the Novikov variable.

    At each degree the unknown C^i_d multiplies the degree-zero Gr column
    z * S_{lam_i} * omega, so expanding the remainder over the bialternants
    and dividing by c^2 * z determines C^i_d; any surviving negative z
    powers (the division must close in polynomials) are reported as
    residual violations.  The system is triangular across Novikov degrees
    with an invertible diagonal block, so the solve is exact and unique.
    """
    from .cohomology import c_squared

    if d_max is None:
        d_max = iseries.d_max
    space = space_of(box)
    basis = box_partitions(box)
    r = c_squared(box.k)

    # Gr side building blocks: G[e][lam] = lift(R_e column_lam) * Delta as LPoly
    from .cohomology import cup as _cup, delta as _delta, lift as _lift

    dl = _delta(space)
    gr_cols: dict[int, dict[Partition, LPoly]] = {}
    for e in range(d_max + 1):
        cols = {}
        for j, lam in enumerate(basis):
            col = fund.column(e, j)
            lp: LPoly = {}
            for zp, rows in col.items():
                vec = {}
                for i, c in rows.items():
                    vec = poly_add(vec, poly_scale(_cup(_lift(basis[i], box), dl).terms, c))
                if vec:
                    lp[zp] = vec
            cols[lam] = lp
        gr_cols[e] = cols

    c_series: dict[Partition, dict] = {lam: {} for lam in basis}
    residual = []
    for d in range(d_max + 1):
        known = iseries.coefficient(d)
        for e_prime in range(d):
            for lam in basis:
                ci = {zp: c for (dd, zp), c in c_series[lam].items() if dd == e_prime}
                if not ci:
                    continue
                g = gr_cols[d - e_prime][lam]
                contrib: LPoly = {}
                for zp1, c1 in ci.items():
                    # z * G, scaled by r * C^i
                    contrib = lpoly_add(contrib, lpoly_scale(g, r * c1, zshift=zp1 + 1))
                known = lpoly_add(known, lpoly_scale(contrib, -1))
        # expand the remainder over the bialternants, per z power
        expanded: dict[Partition, dict[int, Fraction]] = {}
        for zp, poly in known.items():
            try:
                row = anti_invariant_expand(poly, box)
            except ValueError:
                residual.append({"d": d, "z": zp, "value": "not anti-invariant"})
                continue
            for lam, c in row.items():
                expanded.setdefault(lam, {})[zp] = c
        for lam, lz in expanded.items():
            for zp, c in lz.items():
                val = c / r
                target_zp = zp - 1  # divide by z
                if target_zp < 0:
                    residual.append({"d": d, "lam": lam, "z": target_zp, "value": val})
                else:
                    c_series[lam][(d, target_zp)] = val
    c_series = {lam: s for lam, s in c_series.items() if s}
    return CSolveResult(box, d_max, c_series, residual)
