"""Exact-rational calculus for radial-log polynomial expansions in R^4.

Everything here works over exact rationals with objects of the shape
p(x) * r^s * (log r)^k, where p is a homogeneous polynomial in four
variables, r = |x|, s is rational and k a nonnegative integer.  The module
provides the Laplacian and bilaplacian on that algebra, the spectrum of
r^2*Delta on homogeneous polynomials, exact solvers for

    Delta^2 ( q(x) r^(s+4) (log r)^j ... ) = f(x) r^s (log r)^k,

including the resonant channel s = -2 that forces logarithms, and a formal
expansion generator for Delta^2 w = e^(4w) r^(4*beta) near an isolated
conical singularity of strength beta in (-1, 0).

No floating point enters any computation in this module; results are either
exact or raise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

NVARS = 4

Exponent = tuple[int, int, int, int]


class ResonanceError(ValueError):
    """A shifted operator r^2*Delta + sigma hit an eigenvalue and is singular."""

    def __init__(self, sigma: Fraction, eigenvalue: Fraction, degree: int):
        self.sigma = sigma
        self.eigenvalue = eigenvalue
        self.degree = degree
        super().__init__(
            f"shift {sigma} collides with eigenvalue {eigenvalue} of r^2*Delta "
            f"on degree-{degree} homogeneous polynomials"
        )


class ScopeError(ValueError):
    """The request is outside what the expansion machinery can certify."""


def frac(x) -> Fraction:
    """Coerce to Fraction, rejecting floats to protect exactness."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"need an exact rational (int/Fraction/str), got {type(x).__name__}")


# ---------------------------------------------------------------------------
# Homogeneous polynomials over Q in four variables
# ---------------------------------------------------------------------------

class HomPoly:
    """Homogeneous polynomial of fixed degree with exact rational coefficients.

    Stored as a map from exponent 4-tuples (summing to the degree) to nonzero
    Fractions.  Instances are treated as immutable; all operations return new
    objects.
    """

    __slots__ = ("degree", "coeffs")

    def __init__(self, degree: int, coeffs: dict[Exponent, Fraction] | None = None):
        if degree < 0:
            raise ValueError("degree must be nonnegative")
        clean: dict[Exponent, Fraction] = {}
        for expo, c in (coeffs or {}).items():
            expo = tuple(int(e) for e in expo)  # type: ignore[assignment]
            if len(expo) != NVARS or any(e < 0 for e in expo):
                raise ValueError(f"bad exponent tuple {expo}")
            if sum(expo) != degree:
                raise ValueError(f"exponent {expo} does not have degree {degree}")
            c = frac(c)
            if c != 0:
                clean[expo] = clean.get(expo, Fraction(0)) + c
                if clean[expo] == 0:
                    del clean[expo]
        self.degree = degree
        self.coeffs = clean

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(degree: int = 0) -> "HomPoly":
        return HomPoly(degree, {})

    @staticmethod
    def constant(c) -> "HomPoly":
        c = frac(c)
        return HomPoly(0, {(0, 0, 0, 0): c} if c else {})

    @staticmethod
    def monomial(expo: Exponent, c=1) -> "HomPoly":
        return HomPoly(sum(expo), {tuple(expo): frac(c)})

    @staticmethod
    def variable(i: int) -> "HomPoly":
        expo = [0] * NVARS
        expo[i] = 1
        return HomPoly.monomial(tuple(expo))

    @staticmethod
    def r_squared() -> "HomPoly":
        return HomPoly(2, {tuple(2 * int(i == j) for j in range(NVARS)): Fraction(1)
                           for i in range(NVARS)})

    # -- basic algebra ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        return (isinstance(other, HomPoly) and self.coeffs == other.coeffs
                and (self.is_zero() or self.degree == other.degree))

    def __hash__(self):
        return hash((self.degree, tuple(sorted(self.coeffs.items()))))

    def __add__(self, other: "HomPoly") -> "HomPoly":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.degree != other.degree:
            raise ValueError("cannot add homogeneous polynomials of different degree")
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, Fraction(0)) + c
            if out[e] == 0:
                del out[e]
        return HomPoly(self.degree, out)

    def __neg__(self) -> "HomPoly":
        return HomPoly(self.degree, {e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other: "HomPoly") -> "HomPoly":
        return self + (-other)

    def scale(self, c) -> "HomPoly":
        c = frac(c)
        if c == 0:
            return HomPoly.zero(self.degree)
        return HomPoly(self.degree, {e: c * v for e, v in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, HomPoly):
            return NotImplemented
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return HomPoly(self.degree + other.degree, out)

    __rmul__ = __mul__

    def laplacian(self) -> "HomPoly":
        """Euclidean Laplacian; drops degree by two."""
        out: dict[Exponent, Fraction] = {}
        for e, c in self.coeffs.items():
            for i in range(NVARS):
                if e[i] >= 2:
                    e2 = list(e)
                    e2[i] -= 2
                    key = tuple(e2)
                    out[key] = out.get(key, Fraction(0)) + c * e[i] * (e[i] - 1)
        return HomPoly(max(self.degree - 2, 0), out)

    def times_r2(self) -> "HomPoly":
        return self * HomPoly.r_squared()

    def divmod_r2(self) -> tuple["HomPoly", "HomPoly"]:
        """Exact division by r^2 = x1^2+..+x4^2: returns (quotient, remainder).

        Single-divisor reduction in lex order; the remainder is zero exactly
        when r^2 divides the polynomial.
        """
        if self.degree < 2:
            return HomPoly.zero(max(self.degree - 2, 0)), self
        rem = dict(self.coeffs)
        quo: dict[Exponent, Fraction] = {}
        r2 = HomPoly.r_squared().coeffs
        while True:
            cand = [e for e in rem if e[0] >= 2]
            if not cand:
                break
            e = max(cand)  # lex-largest monomial divisible by x1^2
            c = rem[e]
            q = (e[0] - 2, e[1], e[2], e[3])
            quo[q] = quo.get(q, Fraction(0)) + c
            for e2, c2 in r2.items():
                key = tuple(a + b for a, b in zip(q, e2))
                rem[key] = rem.get(key, Fraction(0)) - c * c2
                if rem[key] == 0:
                    del rem[key]
        return HomPoly(self.degree - 2, quo), HomPoly(self.degree, rem)

    def __repr__(self):
        if self.is_zero():
            return "HomPoly(0)"
        parts = []
        for e in sorted(self.coeffs, reverse=True):
            c = self.coeffs[e]
            mono = "*".join(f"x{i+1}^{p}" if p > 1 else f"x{i+1}"
                            for i, p in enumerate(e) if p)
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


def monomial_basis(degree: int) -> list[Exponent]:
    """All exponent tuples of the given total degree, lex sorted."""
    out = []
    for a in range(degree + 1):
        for b in range(degree - a + 1):
            for c in range(degree - a - b + 1):
                out.append((a, b, c, degree - a - b - c))
    return sorted(out)


def poly_dim(degree: int) -> int:
    """dim of homogeneous polynomials of the given degree in 4 variables."""
    return math.comb(degree + 3, 3)


def harmonic_dim(degree: int) -> int:
    """dim of harmonic homogeneous polynomials of the given degree in 4 variables."""
    if degree < 0:
        return 0
    if degree < 2:
        return poly_dim(degree)
    return poly_dim(degree) - poly_dim(degree - 2)


# ---------------------------------------------------------------------------
# Radial-log terms p(x) * r^s * (log r)^k
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LogRadialTerm:
    """Term p(x) * r^s * (log r)^k.

    Canonical collections (TermSum) store harmonic bucket polynomials: the
    representation p r^s is only unique once every r^2 factor hiding inside p
    has been moved into the radial exponent, and harmonic decomposition is
    exactly that normal form.
    """

    poly: HomPoly
    s: Fraction
    k: int

    @staticmethod
    def make(poly: HomPoly, s, k: int = 0) -> "LogRadialTerm":
        s = frac(s)
        if k < 0:
            raise ValueError("log power must be nonnegative")
        while not poly.is_zero():
            quo, rem = poly.divmod_r2()
            if not rem.is_zero():
                break
            poly, s = quo, s + 2
        return LogRadialTerm(poly, s, k)

    @property
    def homogeneity(self) -> Fraction:
        return self.poly.degree + self.s

    def signature(self) -> tuple[int, Fraction, int]:
        return (self.poly.degree, self.s, self.k)

    def __repr__(self):
        bits = [f"({self.poly!r})"]
        if self.s:
            bits.append(f"r^{self.s}")
        if self.k:
            bits.append(f"(log r)^{self.k}")
        return "*".join(bits)


Signature = tuple[int, Fraction, int]
TermSum = dict[Signature, HomPoly]


def harmonic_decompose(p: HomPoly) -> list[tuple[HomPoly, int]]:
    """Exact decomposition p = sum_j r^(2j) h_j with every h_j harmonic.

    One step peels the top harmonic part: with m = deg p, the g solving
    (r^2 Delta + 4m) g = Delta p makes p - r^2 g harmonic, and that shifted
    operator is never singular because its spectrum is strictly positive.
    """
    out: list[tuple[HomPoly, int]] = []
    cur = p
    j = 0
    while not cur.is_zero():
        lap = cur.laplacian()
        if lap.is_zero():
            out.append((cur, j))
            break
        g = solve_shifted(lap, Fraction(4 * cur.degree))
        h = cur - g.times_r2()
        if not h.is_zero():
            out.append((h, j))
        cur = g
        j += 1
    return out


def ts_add_term(ts: TermSum, poly: HomPoly, s: Fraction, k: int, coeff=1) -> None:
    """Accumulate coeff * poly * r^s * (log r)^k into ts, canonically.

    The polynomial is split into harmonic components, each stored under its
    own radial exponent; harmonic buckets stay harmonic under addition, so
    no re-normalization is needed after merges.
    """
    if poly.is_zero():
        return
    s = frac(s)
    if coeff != 1:
        poly = poly.scale(coeff)
        if poly.is_zero():
            return
    for h, j in harmonic_decompose(poly):
        sig = (h.degree, s + 2 * j, k)
        cur = ts.get(sig)
        new = h if cur is None else cur + h
        if new.is_zero():
            ts.pop(sig, None)
        else:
            ts[sig] = new


def ts_from_terms(terms: Iterable[LogRadialTerm]) -> TermSum:
    ts: TermSum = {}
    for t in terms:
        ts_add_term(ts, t.poly, t.s, t.k)
    return ts


def ts_terms(ts: TermSum) -> list[LogRadialTerm]:
    """Sorted canonical list: by homogeneity, then log power, then s."""
    out = [LogRadialTerm(p, sig[1], sig[2]) for sig, p in ts.items()]
    out.sort(key=lambda t: (t.homogeneity, t.k, t.s))
    return out


def ts_combine(*sums: TermSum, signs: Sequence[int] | None = None) -> TermSum:
    out: TermSum = {}
    signs = signs or [1] * len(sums)
    for ts, sg in zip(sums, signs):
        for (deg, s, k), p in ts.items():
            ts_add_term(out, p, s, k, sg)
    return out


def ts_scale(ts: TermSum, c) -> TermSum:
    out: TermSum = {}
    for (deg, s, k), p in ts.items():
        ts_add_term(out, p, s, k, c)
    return out


def ts_mul(a: TermSum, b: TermSum, cutoff: Fraction | None = None) -> TermSum:
    """Product of two term sums, dropping terms of homogeneity >= cutoff."""
    out: TermSum = {}
    for (d1, s1, k1), p1 in a.items():
        for (d2, s2, k2), p2 in b.items():
            if cutoff is not None and (d1 + s1) + (d2 + s2) >= cutoff:
                continue
            ts_add_term(out, p1 * p2, s1 + s2, k1 + k2)
    return out


def ts_shift_r(ts: TermSum, ds: Fraction) -> TermSum:
    out: TermSum = {}
    for (deg, s, k), p in ts.items():
        ts_add_term(out, p, s + ds, k)
    return out


def ts_restrict_below(ts: TermSum, cutoff: Fraction) -> TermSum:
    return {sig: p for sig, p in ts.items() if sig[0] + sig[1] < cutoff}


def ts_min_homogeneity(ts: TermSum) -> Fraction | None:
    if not ts:
        return None
    return min(sig[0] + sig[1] for sig in ts)


# ---------------------------------------------------------------------------
# Laplacian on the term algebra
# ---------------------------------------------------------------------------

def laplacian(term: LogRadialTerm) -> list[LogRadialTerm]:
    """Exact Laplacian of p(x) r^s (log r)^k in R^4.

    With m = deg p and L = log r,

        Delta(p r^s L^k) = (Delta p) r^s L^k
                         + s(s+2+2m) p r^(s-2) L^k
                         + k(2s+2+2m) p r^(s-2) L^(k-1)
                         + k(k-1) p r^(s-2) L^(k-2).

    The first coefficient combines Delta r^s = s(s+2) r^(s-2) in dimension 4
    with the Euler identity x.grad p = m p for the cross term.
    """
    ts = ts_laplacian(ts_from_terms([term]))
    return ts_terms(ts)


def ts_laplacian(ts: TermSum) -> TermSum:
    out: TermSum = {}
    for (m, s, k), p in ts.items():
        lap = p.laplacian()
        if not lap.is_zero():
            ts_add_term(out, lap, s, k)
        c1 = s * (s + 2 + 2 * m)
        if c1 != 0:
            ts_add_term(out, p, s - 2, k, c1)
        if k >= 1:
            c2 = k * (2 * s + 2 + 2 * m)
            if c2 != 0:
                ts_add_term(out, p, s - 2, k - 1, c2)
        if k >= 2:
            ts_add_term(out, p, s - 2, k - 2, k * (k - 1))
    return out


def biharmonic(terms: Iterable[LogRadialTerm] | LogRadialTerm) -> list[LogRadialTerm]:
    """Delta^2 applied exactly; identical to applying laplacian twice."""
    if isinstance(terms, LogRadialTerm):
        terms = [terms]
    return ts_terms(ts_laplacian(ts_laplacian(ts_from_terms(terms))))


def laplacian_monomial_oracle(term: LogRadialTerm) -> list[LogRadialTerm]:
    """Independent Laplacian: differentiate monomial by monomial.

    Uses only the first-principles product rule

        d_i (x^a r^s L^k) = a_i x^(a-e_i) r^s L^k
                          + s x^(a+e_i) r^(s-2) L^k
                          + k x^(a+e_i) r^(s-2) L^(k-1)

    applied twice and summed over i.  Shares no code with ts_laplacian, so it
    serves as the differentiation oracle in the tests.
    """
    MonKey = tuple[Exponent, Fraction, int]
    work: dict[MonKey, Fraction] = {}
    for expo, c in term.poly.coeffs.items():
        work[(expo, term.s, term.k)] = work.get((expo, term.s, term.k), Fraction(0)) + c

    def d_i(mons: dict[MonKey, Fraction], i: int) -> dict[MonKey, Fraction]:
        out: dict[MonKey, Fraction] = {}

        def acc(key: MonKey, val: Fraction):
            if val == 0:
                return
            out[key] = out.get(key, Fraction(0)) + val
            if out[key] == 0:
                del out[key]

        for (expo, s, k), c in mons.items():
            if expo[i] > 0:
                e2 = list(expo)
                e2[i] -= 1
                acc((tuple(e2), s, k), c * expo[i])
            if s != 0:
                e2 = list(expo)
                e2[i] += 1
                acc((tuple(e2), s - 2, k), c * s)
            if k > 0:
                e2 = list(expo)
                e2[i] += 1
                acc((tuple(e2), s - 2, k - 1), c * k)
        return out

    total: TermSum = {}
    for i in range(NVARS):
        second = d_i(d_i(work, i), i)
        for (expo, s, k), c in second.items():
            ts_add_term(total, HomPoly.monomial(expo, c), s, k)
    return ts_terms(total)


# ---------------------------------------------------------------------------
# Spectrum of r^2 Delta on homogeneous polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EigenTable:
    """Eigenvalues 2j(2+2m-2j) of r^2*Delta on degree-m polynomials."""

    m: int
    entries: tuple[tuple[int, Fraction, int], ...]  # (j, eigenvalue, multiplicity)

    def eigenvalues(self) -> list[Fraction]:
        return [e[1] for e in self.entries]


def eigen_table(m: int) -> EigenTable:
    if m < 0:
        raise ValueError("degree must be nonnegative")
    entries = []
    for j in range(m // 2 + 1):
        lam = Fraction(2 * j * (2 + 2 * m - 2 * j))
        entries.append((j, lam, harmonic_dim(m - 2 * j)))
    table = EigenTable(m, tuple(entries))
    assert sum(e[2] for e in entries) == poly_dim(m)
    return table


def r2lap_matrix(m: int) -> tuple[list[Exponent], list[list[int]]]:
    """Dense integer matrix of r^2*Delta on the monomial basis of degree m."""
    basis = monomial_basis(m)
    index = {e: i for i, e in enumerate(basis)}
    n = len(basis)
    mat = [[0] * n for _ in range(n)]
    for j, e in enumerate(basis):
        img = HomPoly.monomial(e).laplacian().times_r2()
        for e2, c in img.coeffs.items():
            mat[index[e2]][j] = int(c)
    return basis, mat


def rational_nullity(mat: list[list[Fraction]]) -> int:
    """Nullity of a square rational matrix by exact Gaussian elimination."""
    a = [row[:] for row in mat]
    n = len(a)
    rank = 0
    col = 0
    while rank < n and col < n:
        piv = next((r for r in range(rank, n) if a[r][col] != 0), None)
        if piv is None:
            col += 1
            continue
        a[rank], a[piv] = a[piv], a[rank]
        pv = a[rank][col]
        for r in range(n):
            if r != rank and a[r][col] != 0:
                f = a[r][col] / pv
                a[r] = [x - f * y for x, y in zip(a[r], a[rank])]
        rank += 1
        col += 1
    return n - rank


# ---------------------------------------------------------------------------
# Exact shifted solves: (r^2 Delta + sigma) p = f on degree-m polynomials
# ---------------------------------------------------------------------------

def _apply_r2lap(p: HomPoly) -> HomPoly:
    img = p.laplacian().times_r2()
    return img if not img.is_zero() else HomPoly.zero(p.degree)


def solve_shifted(f: HomPoly, sigma: Fraction) -> HomPoly:
    """Solve (r^2 Delta + sigma) p = f exactly on homogeneous polynomials.

    r^2*Delta is diagonalizable on each degree with known distinct eigenvalues
    lambda_j, so its resolvent is the Lagrange interpolation polynomial through
    (lambda_j, 1/(lambda_j + sigma)) evaluated on the operator.  That costs a
    handful of sparse operator applications instead of a dense linear solve.
    """
    if f.is_zero():
        return f
    m = f.degree
    lams = eigen_table(m).eigenvalues()
    for lam in lams:
        if lam + sigma == 0:
            raise ResonanceError(sigma, lam, m)

    # Lagrange coefficients of h with h(lambda_j) = 1/(lambda_j + sigma).
    coeffs = [Fraction(0)] * len(lams)

    def poly_mul_lin(c: list[Fraction], root: Fraction) -> list[Fraction]:
        out = [Fraction(0)] * (len(c) + 1)
        for i, v in enumerate(c):
            out[i] -= v * root
            out[i + 1] += v
        return out

    for j, lj in enumerate(lams):
        num = [Fraction(1)]
        den = Fraction(1)
        for i, li in enumerate(lams):
            if i != j:
                num = poly_mul_lin(num, li)
                den *= lj - li
        w = Fraction(1, 1) / (lj + sigma) / den
        for i, v in enumerate(num):
            coeffs[i] += w * v

    # Horner evaluation of h(r^2 Delta) applied to f.
    result = f.scale(coeffs[-1])
    for c in reversed(coeffs[:-1]):
        result = _apply_r2lap(result) + f.scale(c)

    check = _apply_r2lap(result) + result.scale(sigma)
    if check != f:
        raise AssertionError("shifted solve self-check failed")
    return result


def solve_laplace_rhs(f: HomPoly, s: Fraction, k: int) -> list[tuple[HomPoly, int]]:
    """Find p_l with Delta( sum_l p_l r^(s+2) (log r)^l ) = f r^s (log r)^k.

    Triangular in the log power: the top level solves a shifted operator, each
    lower level absorbs the log-derivative spill from the levels above.
    """
    m = f.degree
    sigma = (s + 2) * (s + 4 + 2 * m)
    p: dict[int, HomPoly] = {}
    p[k] = solve_shifted(f, sigma)
    for l in range(k - 1, -1, -1):
        rhs = HomPoly.zero(m)
        up1 = p.get(l + 1)
        if up1 is not None and not up1.is_zero():
            rhs = rhs + up1.scale(-(l + 1) * (2 * s + 6 + 2 * m))
        up2 = p.get(l + 2)
        if up2 is not None and not up2.is_zero():
            rhs = rhs + up2.scale(-(l + 2) * (l + 1))
        p[l] = solve_shifted(rhs, sigma) if not rhs.is_zero() else HomPoly.zero(m)
    return [(poly, l) for l, poly in sorted(p.items()) if not poly.is_zero()]


def _solve_resonant(f: HomPoly, k: int) -> TermSum:
    """Solve Delta^2 U = f(x) r^-2 (log r)^k for harmonic f of degree <= 2.

    The operator keeps the line spanned by f invariant: Delta^2 of
    f r^2 (log r)^j is a combination of f r^-2 (log r)^i with i < j, with a
    nonzero leading coefficient, so U = sum_{j<=k+1} c_j f r^2 (log r)^j
    follows from a triangular solve whose columns the engine computes itself.

    Degrees above 2 produce continuous sources r^(deg-2) that the expansion
    leaves to the Hoelder remainder, hence the scope error.
    """
    if f.degree > 2:
        raise ScopeError(
            "resonant channel r^-2 only admits polynomial data of degree <= 2; "
            f"degree {f.degree} sources are continuous and stay in the remainder"
        )
    if not f.laplacian().is_zero():
        raise AssertionError("resonant solver expects a harmonic bucket polynomial")

    lead = max(f.coeffs)

    def f_component(ts: TermSum, logpow: int) -> Fraction:
        poly = ts.get((f.degree, Fraction(-2), logpow))
        if poly is None:
            return Fraction(0)
        alpha = poly.coeffs.get(lead, Fraction(0)) / f.coeffs[lead]
        if poly != f.scale(alpha):
            raise AssertionError("resonant column left the f-line")
        return alpha

    columns: dict[int, TermSum] = {}
    for j in range(1, k + 2):
        col: TermSum = {}
        ts_add_term(col, f, Fraction(2), j)
        columns[j] = ts_laplacian(ts_laplacian(col))

    coeff: dict[int, Fraction] = {}
    for i in range(k, -1, -1):
        # match the coefficient of f r^-2 (log r)^i
        target = Fraction(1) if i == k else Fraction(0)
        acc = sum((coeff[j] * f_component(columns[j], i)
                   for j in range(i + 2, k + 2)), Fraction(0))
        top = f_component(columns[i + 1], i)
        if top == 0:
            raise AssertionError("resonant triangular system lost its pivot")
        coeff[i + 1] = (target - acc) / top

    out: TermSum = {}
    for j, c in coeff.items():
        if c != 0:
            ts_add_term(out, f.scale(c), Fraction(2), j)
    return out


def solve_delta2_term(f: HomPoly, s: Fraction, k: int) -> TermSum:
    """Solve Delta^2 U = f r^s (log r)^k exactly for one canonical term.

    The only resonant radial exponent reachable from sources with s > -4 is
    s = -2, where the solution needs an extra logarithm; every other exponent
    goes through two shifted first-order solves.
    """
    if f.is_zero():
        return {}
    if s <= -4:
        raise ScopeError(f"radial exponent {s} out of the supported range (-4, inf)")
    if s == -2:
        return _solve_resonant(f, k)
    out: TermSum = {}
    for p_l, l in solve_laplace_rhs(f, s, k):
        for q, l2 in solve_laplace_rhs(p_l, s + 2, l):
            ts_add_term(out, q, s + 4, l2)
    return out


# ---------------------------------------------------------------------------
# Public solvers and the formal expansion generator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Expansion:
    """A finite sum of radial-log terms with a certified order.

    remainder_order is the r-power below which the defining identity has been
    verified term by term; None means the identity is exact (a solve result).
    """

    terms: tuple[LogRadialTerm, ...]
    remainder_order: Fraction | None = None
    case: str | None = None
    case_k: int | None = None

    def term_sum(self) -> TermSum:
        return ts_from_terms(self.terms)


def _validate_beta(beta) -> Fraction:
    beta = frac(beta)
    if not (Fraction(-1) < beta < 0):
        raise ScopeError(f"beta must lie in (-1, 0), got {beta}")
    return beta


def beta_case(beta) -> tuple[str, int]:
    """Which expansion regime a cone strength falls in.

    case2 (beta = -2k/(2k+1)) and case3 (beta = -(2k-1)/(2k), k >= 1) are the
    threshold values; everything else sits in an open interval
    (-(k+1)/(k+2), -k/(k+1)) and is case1.
    """
    beta = _validate_beta(beta)
    ratio = -beta / (1 + beta)  # k solves beta = -k/(k+1) at thresholds
    if ratio.denominator == 1:
        j = ratio.numerator
        if j % 2 == 0:
            return "case2", j // 2
        return "case3", (j + 1) // 2
    k = ratio.numerator // ratio.denominator
    return "case1", k


def solve_biharmonic(f: HomPoly, beta, k: int = 0) -> Expansion:
    """Exact solve of Delta^2 E = f(x) r^(4 beta) (log r)^k.

    beta must be rational in (-1, 0); resonance checks are exact.  At
    beta = -1/2 the resonant channel only admits degree <= 2 data, which is
    the regime the expansion machinery needs.
    """
    beta = _validate_beta(beta)
    if k < 0:
        raise ValueError("log power must be nonnegative")
    src: TermSum = {}
    ts_add_term(src, f, 4 * beta, k)
    out: TermSum = {}
    for (m, s, kk), p in sorted(src.items(), key=lambda it: (it[0][0], it[0][2])):
        out = ts_combine(out, solve_delta2_term(p, s, kk))
    return Expansion(tuple(ts_terms(out)), remainder_order=None)


def _exp_truncated(ts: TermSum, cutoff: Fraction) -> TermSum:
    """Formal exp of a term sum whose terms all have positive homogeneity."""
    hmin = ts_min_homogeneity(ts)
    if hmin is not None and hmin <= 0:
        raise ScopeError("formal exponential needs strictly positive homogeneity")
    one: TermSum = {}
    ts_add_term(one, HomPoly.constant(1), Fraction(0), 0)
    out = dict(one)
    power = ts_restrict_below(ts, cutoff)
    n = 1
    fact = Fraction(1)
    while power:
        out = ts_combine(out, ts_scale(power, Fraction(1) / fact))
        n += 1
        fact *= n
        power = ts_restrict_below(ts_mul(power, ts, cutoff), cutoff)
    return out


def _rhs_truncated(e_ts: TermSum, beta: Fraction, order: Fraction) -> TermSum:
    """exp(4E) * r^(4 beta), keeping terms of homogeneity below `order`."""
    expo = _exp_truncated(ts_scale(e_ts, 4), order - 4 * beta)
    return ts_restrict_below(ts_shift_r(expo, 4 * beta), order)


def formal_expansion(beta, jets: Sequence[HomPoly], order) -> Expansion:
    """Formal solution of Delta^2 w = e^(4w) r^(4 beta) near the origin.

    jets are the free homogeneous polynomial pieces (degrees 1 to 3) of the
    smooth part of w; a degree-0 jet must be zero because a constant shift
    rescales the right side by a non-rational factor.  The result E satisfies
    Delta^2 E = e^(4E) r^(4 beta) for every term of r-power below `order`,
    which verify_residual checks independently.

    `order` may not exceed 4*beta + 4: beyond that the sources pick up the
    degree-4 Taylor content of the smooth remainder, which degree <= 3 jets
    do not determine.
    """
    beta = _validate_beta(beta)
    order = frac(order)
    cap = 4 * beta + 4
    if order > cap:
        raise ScopeError(
            f"order {order} beyond certified remainder (cap {cap} for beta {beta}): "
            "sources there would require jets of degree > 3"
        )
    e_ts: TermSum = {}
    for g in jets:
        if g.is_zero():
            continue
        if g.degree == 0 or g.degree > 3:
            raise ScopeError("jets must be homogeneous of degree 1, 2 or 3")
        ts_add_term(e_ts, g, Fraction(0), 0)

    for _ in range(200):
        defect = ts_combine(
            _rhs_truncated(e_ts, beta, order),
            ts_restrict_below(ts_laplacian(ts_laplacian(e_ts)), order),
            signs=(1, -1),
        )
        if not defect:
            break
        h0 = ts_min_homogeneity(defect)
        block = [(sig, p) for sig, p in defect.items() if sig[0] + sig[1] == h0]
        for (m, s, k), p in sorted(block, key=lambda it: (it[0][2], it[0][1])):
            e_ts = ts_combine(e_ts, solve_delta2_term(p, s, k))
    else:
        raise AssertionError("formal expansion failed to stabilize")

    case, case_k = beta_case(beta)
    return Expansion(tuple(ts_terms(e_ts)), remainder_order=order,
                     case=case, case_k=case_k)


def verify_residual(expansion: Expansion | Sequence[LogRadialTerm], beta,
                    order, source: Sequence[LogRadialTerm] | None = None
                    ) -> list[LogRadialTerm]:
    """Independent certificate: Delta^2 E minus the right side it should match.

    With no explicit source the right side is the formal truncation of
    e^(4E) r^(4 beta) (the expansion equation); passing `source` checks a
    plain biharmonic solve, Delta^2 E = source, instead.  Returns every
    residual term of r-power below `order`; empty means certified.
    """
    beta = _validate_beta(beta)
    order = frac(order)
    e_ts = (expansion.term_sum() if isinstance(expansion, Expansion)
            else ts_from_terms(expansion))
    rhs = (_rhs_truncated(e_ts, beta, order) if source is None
           else ts_from_terms(source))
    residual = ts_combine(ts_laplacian(ts_laplacian(e_ts)), rhs, signs=(1, -1))
    return ts_terms(ts_restrict_below(residual, order))


# ---------------------------------------------------------------------------
# Serialization helpers (shared with the CLI)
# ---------------------------------------------------------------------------

def poly_to_json(p: HomPoly) -> dict[str, str]:
    return {",".join(str(e) for e in expo): str(p.coeffs[expo])
            for expo in sorted(p.coeffs)}

def poly_from_json(obj: dict[str, str]) -> HomPoly:
    coeffs = {tuple(int(x) for x in key.split(",")): Fraction(val)
              for key, val in obj.items()}
    degrees = {sum(e) for e in coeffs}
    if not degrees:
        return HomPoly.zero()
    if len(degrees) != 1:
        raise ValueError("polynomial entries are not homogeneous")
    return HomPoly(degrees.pop(), coeffs)

def term_to_json(t: LogRadialTerm) -> dict:
    return {"poly": poly_to_json(t.poly), "s": str(t.s), "logk": t.k}

def expansion_to_json(e: Expansion) -> dict:
    out = {
        "terms": [term_to_json(t) for t in e.terms],
        "remainder_order": None if e.remainder_order is None else str(e.remainder_order),
    }
    if e.case is not None:
        out["case"] = e.case
        out["case_k"] = e.case_k
    return out
