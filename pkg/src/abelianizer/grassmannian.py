"""Small quantum cohomology of Gr(k, n): the independent oracle side.

Products are computed classically in at most k rows (Schur polynomial
multiplication, then expansion back into the Schur basis by leading-term
peeling) and reduced to the box by removing rim hooks of size n with the
calibrated sign.  The small J-function is obtained by solving the divisor
quantum differential equation order by order in the Novikov variable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .partitions import (
    BoxSpec,
    Partition,
    RIM_HOOK_SIGN_RULES,
    box_partitions,
    complement,
    grlex_key,
    rim_hook_reduce,
    schur_polynomial,
)

SIGMA_1 = Partition((1,))

# ---------------------------------------------------------------------------
# classical expansion and quantum product

_lr_cache: dict[tuple, dict[Partition, int]] = {}


def schur_expand_product(lam: Partition, mu: Partition, k: int) -> dict[Partition, int]:
    """Expand S_lam * S_mu in k variables back into Schur polynomials.

    Peels the lexicographically leading monomial, which for a symmetric
    polynomial is a partition exponent; S_nu has leading coefficient 1, so
    the loop strictly decreases the leading term and terminates.
    """
    key = (lam.parts, mu.parts, k)
    if key in _lr_cache:
        return _lr_cache[key]
    poly = {}
    slam = schur_polynomial(lam, k)
    smu = schur_polynomial(mu, k)
    for ea, ca in slam.items():
        for eb, cb in smu.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            v = poly.get(e, 0) + ca * cb
            if v:
                poly[e] = v
            elif e in poly:
                del poly[e]
    out: dict[Partition, int] = {}
    while poly:
        lead = max(poly)
        coeff = poly[lead]
        nu = Partition(lead)
        out[nu] = coeff
        for e, c in schur_polynomial(nu, k).items():
            v = poly.get(e, 0) - coeff * c
            if v:
                poly[e] = v
            elif e in poly:
                del poly[e]
    _lr_cache[key] = out
    return out


class QSchubertVector:
    """Element of QH^*(Gr(k,n)): {(q_power, partition): Fraction}."""

    __slots__ = ("box", "terms")

    def __init__(self, box: BoxSpec, terms=None):
        self.box = box
        self.terms = {kq: Fraction(v) for kq, v in (terms or {}).items() if v}

    def coefficient(self, q_power: int, lam: Partition) -> Fraction:
        return self.terms.get((q_power, lam), Fraction(0))

    def __eq__(self, other):
        return isinstance(other, QSchubertVector) and self.box == other.box and self.terms == other.terms

    def __repr__(self):
        bits = [
            f"{v}*q^{q}*s{lam}"
            for (q, lam), v in sorted(self.terms.items(), key=lambda t: (t[0][0], grlex_key(t[0][1])))
        ]
        return " + ".join(bits) or "0"


def quantum_cup(lam: Partition, mu: Partition, box: BoxSpec) -> QSchubertVector:
    """Small quantum product sigma_lam * sigma_mu via rim-hook reduction."""
    if not (lam.fits(box) and mu.fits(box)):
        raise ValueError("partitions must fit the box")
    terms: dict[tuple, Fraction] = {}
    for nu, c in schur_expand_product(lam, mu, box.k).items():
        sign, q_power, reduced = rim_hook_reduce(nu, box)
        if reduced is None:
            continue
        kq = (q_power, reduced)
        v = terms.get(kq, Fraction(0)) + sign * c
        if v:
            terms[kq] = v
        elif kq in terms:
            del terms[kq]
    return QSchubertVector(box, terms)


def three_point(lam: Partition, mu: Partition, nu: Partition, d: int, box: BoxSpec) -> Fraction:
    """<sigma_lam, sigma_mu, sigma_nu>_{0,3,d} from the rim-hook product."""
    if d < 0:
        return Fraction(0)
    if lam.weight + mu.weight + nu.weight != box.dim + box.n * d:
        return Fraction(0)
    return quantum_cup(lam, mu, box).coefficient(d, complement(nu, box))


def two_point(lam: Partition, mu: Partition, d: int, box: BoxSpec) -> Fraction:
    """<sigma_lam, sigma_mu>_{0,2,d} = (1/d) <sigma_1, sigma_lam, sigma_mu>_{0,3,d}."""
    if d < 1:
        raise ValueError("2-point invariants need d >= 1")
    return three_point(SIGMA_1, lam, mu, d, box) / d


def calibrate_rim_hook_sign(d_max: int = 2) -> dict[str, bool]:
    """Nonnegativity calibration of the per-hook sign rule.

    Returns, for each candidate rule, whether every 3-point structure
    constant of Gr(2,4) and Gr(2,5) up to degree d_max is nonnegative.
    Exactly one candidate must survive.
    """
    verdict = {}
    for rule in RIM_HOOK_SIGN_RULES:
        ok = True
        for box in (BoxSpec(2, 4), BoxSpec(2, 5)):
            parts = box_partitions(box)
            for lam, mu in itertools.combinations_with_replacement(parts, 2):
                terms = {}
                for nu, c in schur_expand_product(lam, mu, box.k).items():
                    sign, q_power, reduced = rim_hook_reduce(nu, box, rule=rule)
                    if reduced is None:
                        continue
                    terms[(q_power, reduced)] = terms.get((q_power, reduced), 0) + sign * c
                if any(v < 0 for (q, _), v in terms.items() if q <= d_max):
                    ok = False
                    break
            if not ok:
                break
        verdict[rule] = ok
    return verdict


# ---------------------------------------------------------------------------
# Laurent-polynomial matrices and the quantum differential equation

Laurent = dict  # {z power: Fraction}


def laurent_add(a: Laurent, b: Laurent) -> Laurent:
    out = dict(a)
    for p, c in b.items():
        v = out.get(p, Fraction(0)) + c
        if v:
            out[p] = v
        elif p in out:
            del out[p]
    return out


def laurent_scale(a: Laurent, c, shift: int = 0) -> Laurent:
    c = Fraction(c)
    if not c:
        return {}
    return {p + shift: v * c for p, v in a.items()}


def _mat_zero(dim: int):
    return [[{} for _ in range(dim)] for _ in range(dim)]


def _mat_add(A, B):
    return [[laurent_add(A[i][j], B[i][j]) for j in range(len(A))] for i in range(len(A))]


def _mat_scale(A, c, shift=0):
    return [[laurent_scale(A[i][j], c, shift) for j in range(len(A))] for i in range(len(A))]


def _mat_mul_rational_left(M, A):
    """(M A)_ij with M a rational matrix, A a Laurent matrix."""
    dim = len(A)
    out = _mat_zero(dim)
    for i in range(dim):
        for l in range(dim):
            if not M[i][l]:
                continue
            for j in range(dim):
                if A[l][j]:
                    out[i][j] = laurent_add(out[i][j], laurent_scale(A[l][j], M[i][l]))
    return out


def _mat_mul_rational_right(A, M):
    dim = len(A)
    out = _mat_zero(dim)
    for l in range(dim):
        for j in range(dim):
            if not M[l][j]:
                continue
            for i in range(dim):
                if A[i][l]:
                    out[i][j] = laurent_add(out[i][j], laurent_scale(A[i][l], M[l][j]))
    return out


def _mat_is_zero(A):
    return all(not A[i][j] for i in range(len(A)) for j in range(len(A)))


@dataclass
class FundamentalSolution:
    """Solution of the divisor quantum differential equation.

    The matrix series U(t, q) = exp(t D / z) (Id + sum_{d>=1} q^d R_d)
    satisfies z dU/dt = U M(q) with q = Q e^t, where M(q) = D + sum q^d A_d
    is quantum multiplication by the divisor class in the given basis and
    D its classical part.  Column j of U is the coordinate vector of the
    t_j-derivative of the J-function on the divisor locus; the unit column
    times z is the J-function itself.  Order by order the R_d solve

        (z d + ad_D) R_d = sum_{e=1..d} R_{d-e} A_e,

    inverted through the nilpotency of ad_D.
    """

    basis: list
    D: list
    A: dict
    R: dict = field(default_factory=dict)

    def matrix(self, d: int):
        if d == 0:
            dim = len(self.basis)
            ident = _mat_zero(dim)
            for i in range(dim):
                ident[i][i] = {0: Fraction(1)}
            return ident
        if d not in self.R:
            rhs = _mat_zero(len(self.basis))
            for e, A_e in self.A.items():
                if 1 <= e <= d:
                    rhs = _mat_add(rhs, _mat_mul_rational_right(self.matrix(d - e), A_e))
            self.R[d] = _invert_zd_plus_adD(rhs, self.D, d)
        return self.R[d]

    def column(self, d: int, j: int) -> dict[int, dict]:
        """Coordinates of the q^d part of column j, as {z power: {row: coeff}}."""
        out: dict[int, dict] = {}
        R = self.matrix(d)
        for i in range(len(self.basis)):
            for p, c in R[i][j].items():
                out.setdefault(p, {})[i] = c
        return out

    def residual(self, d_max: int):
        """Plug the computed R_d back into the recursion; must vanish."""
        bad = []
        for d in range(1, d_max + 1):
            lhs = _mat_scale(self.matrix(d), d, shift=1)
            lhs = _mat_add(lhs, _mat_mul_rational_left(self.D, self.matrix(d)))
            lhs = _mat_add(lhs, _mat_scale(_mat_mul_rational_right(self.matrix(d), self.D), -1))
            for e, A_e in self.A.items():
                if 1 <= e <= d:
                    lhs = _mat_add(lhs, _mat_scale(_mat_mul_rational_right(self.matrix(d - e), A_e), -1))
            if not _mat_is_zero(lhs):
                bad.append(d)
        return bad


def _invert_zd_plus_adD(Y, D, d: int):
    """Solve (z d + ad_D) X = Y; ad_D is nilpotent so the Neumann series is finite."""
    dim = len(Y)
    X = _mat_zero(dim)
    term = Y
    j = 0
    while not _mat_is_zero(term):
        X = _mat_add(X, _mat_scale(term, Fraction((-1) ** j, d ** (j + 1)), shift=-(j + 1)))
        term = _mat_add(_mat_mul_rational_left(D, term), _mat_scale(_mat_mul_rational_right(term, D), -1))
        j += 1
        if j > 4 * dim + 4:
            raise RuntimeError("ad_D failed to nilpotate; inconsistent grading")
    return X


def divisor_matrices(box: BoxSpec):
    """Basis and the graded pieces of quantum multiplication by sigma_1.

    Returns (basis, D, {d: A_d}) with matrix[row][col] rational: column
    lam holds sigma_1 * sigma_lam expanded over the basis.
    """
    basis = box_partitions(box)
    index = {lam: i for i, lam in enumerate(basis)}
    dim = len(basis)
    D = [[Fraction(0)] * dim for _ in range(dim)]
    A: dict[int, list] = {}
    for j, lam in enumerate(basis):
        prod = quantum_cup(SIGMA_1, lam, box)
        for (q, rho), c in prod.terms.items():
            i = index[rho]
            if q == 0:
                D[i][j] = c
            else:
                A.setdefault(q, [[Fraction(0)] * dim for _ in range(dim)])[i][j] = c
    return basis, D, A


_fundamental_cache: dict[BoxSpec, FundamentalSolution] = {}


def fundamental_solution(box: BoxSpec) -> FundamentalSolution:
    if box not in _fundamental_cache:
        basis, D, A = divisor_matrices(box)
        _fundamental_cache[box] = FundamentalSolution(basis, D, A)
    return _fundamental_cache[box]


@dataclass
class ZSeries:
    """Cohomology-valued series in the Novikov variable and z.

    coefficients maps (q_power, z_power) to {basis label: Fraction}.  For
    J-type series the (0, 1) coefficient is the unit class (J = z + ...).
    Fano grading keeps every z-expansion a finite Laurent polynomial, so
    z_depth records the guaranteed exactness depth rather than a cutoff.
    """

    coefficients: dict
    q_trunc: int
    z_depth: int

    def coefficient(self, q_power: int, z_power: int) -> dict:
        return self.coefficients.get((q_power, z_power), {})

    def records(self):
        out = []
        for (q, z), vec in sorted(self.coefficients.items(), key=lambda t: (t[0][0], -t[0][1])):
            for label, c in sorted(vec.items(), key=lambda t: str(t[0])):
                out.append({"q": q, "z": z, "label": str(label),
                            "value": f"{c.numerator}/{c.denominator}"})
        return out


def j_function(box: BoxSpec, q_trunc: int, z_depth: int = 8) -> ZSeries:
    """Small J-function of Gr(k, n) on the divisor locus, at t = 0.

    J = z * sum_d Q^d (R_d applied to the unit class); the q^0 term is
    z * sigma_empty.  Coefficients are exact finite Laurent polynomials.
    """
    if q_trunc < 1 or z_depth < 1:
        raise ValueError("truncation orders must be >= 1")
    fund = fundamental_solution(box)
    basis = fund.basis
    unit_col = basis.index(Partition())
    coeffs: dict[tuple, dict] = {}
    for d in range(q_trunc + 1):
        col = fund.column(d, unit_col)
        for zp, rows in col.items():
            entry = coeffs.setdefault((d, zp + 1), {})
            for i, c in rows.items():
                entry[basis[i]] = entry.get(basis[i], Fraction(0)) + c
    return ZSeries({kq: v for kq, v in coeffs.items() if any(v.values())}, q_trunc, z_depth)
