"""Exact su(2)-valued exterior calculus over the coframe of R^4 x S^3.

The coframe basis is fixed, in this order, as

    e^0 = dt,  e^1..e^3 = eta_1^+, eta_2^+, eta_3^+,
               e^4..e^6 = eta_1^-, eta_2^-, eta_3^-,

and su(2) carries the basis T_1, T_2, T_3 with [T_i, T_j] = 2 eps_{ijk} T_k.
Everything here works unchanged for Fraction or float components; the
rational path gives exact equality checks for the two curvature routes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

DT = 0
ETA_PLUS = (1, 2, 3)
ETA_MINUS = (4, 5, 6)
BASIS_NAMES = ("dt", "e1+", "e2+", "e3+", "e1-", "e2-", "e3-")
CYCLIC = ((1, 2, 3), (2, 3, 1), (3, 1, 2))


class Su2Vec:
    """Element of su(2) in the T_i basis, component triple."""

    __slots__ = ("x",)

    def __init__(self, x1, x2=None, x3=None):
        if x2 is None:
            x1, x2, x3 = x1
        self.x = (x1, x2, x3)

    def __iter__(self):
        return iter(self.x)

    def __getitem__(self, i):
        return self.x[i]

    def __repr__(self):
        return "Su2Vec(%r, %r, %r)" % self.x

    def __eq__(self, other):
        if not isinstance(other, Su2Vec):
            return NotImplemented
        return all(a == b for a, b in zip(self.x, other.x))

    def __hash__(self):
        return hash(self.x)

    def __add__(self, other):
        return Su2Vec(*(a + b for a, b in zip(self.x, other.x)))

    def __sub__(self, other):
        return Su2Vec(*(a - b for a, b in zip(self.x, other.x)))

    def __neg__(self):
        return Su2Vec(*(-a for a in self.x))

    def __mul__(self, s):
        return Su2Vec(*(a * s for a in self.x))

    __rmul__ = __mul__

    def __truediv__(self, s):
        return Su2Vec(*(a / s for a in self.x))

    def is_zero(self):
        return all(a == 0 for a in self.x)

    def norm_inf(self):
        return max(abs(float(a)) for a in self.x)

    @staticmethod
    def zero(like=0):
        z = 0 * like if like else 0
        return Su2Vec(z, z, z)

    @staticmethod
    def basis(i, one=1):
        """T_i for i in 1..3."""
        z = 0 * one
        x = [z, z, z]
        x[i - 1] = one
        return Su2Vec(*x)


def T(i):
    """Exact basis vector T_i (integer components)."""
    return Su2Vec.basis(i, 1)


def bracket(u, v):
    """[u, v] = 2 (u x v) under [T_i, T_j] = 2 eps_{ijk} T_k."""
    u1, u2, u3 = u.x
    v1, v2, v3 = v.x
    return Su2Vec(
        2 * (u2 * v3 - u3 * v2),
        2 * (u3 * v1 - u1 * v3),
        2 * (u1 * v2 - u2 * v1),
    )


def _sort_sign(indices):
    """Canonically sort a covector index tuple.

    Returns (sorted tuple, sign) or None when an index repeats (the wedge
    vanishes).
    """
    idx = list(indices)
    sign = 1
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(idx, idx[1:]):
        if a == b:
            return None
    return tuple(idx), sign


class LieForm:
    """su(2)-valued exterior form with strictly increasing multi-indices.

    ``coeffs`` maps index tuples (length = degree) to Su2Vec; zero
    coefficients are dropped so equality is plain dict equality.
    """

    __slots__ = ("degree", "coeffs")

    def __init__(self, degree, coeffs=None):
        if not 0 <= degree <= 7:
            raise ValueError("degree out of range")
        self.degree = degree
        clean = {}
        for idx, vec in (coeffs or {}).items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise ValueError("index %r has wrong length for degree %d"
                                 % (idx, degree))
            if any(not 0 <= i <= 6 for i in idx):
                raise ValueError("index %r outside the 7-coframe" % (idx,))
            if list(idx) != sorted(set(idx)):
                raise ValueError("index %r is not strictly increasing" % (idx,))
            if not vec.is_zero():
                clean[idx] = clean[idx] + vec if idx in clean else vec
        self.coeffs = clean

    def __repr__(self):
        return "LieForm(degree=%d, terms=%d)" % (self.degree, len(self.coeffs))

    def __eq__(self, other):
        if not isinstance(other, LieForm):
            return NotImplemented
        return self.degree == other.degree and self.coeffs == other.coeffs

    def __add__(self, other):
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        out = dict(self.coeffs)
        for idx, vec in other.coeffs.items():
            out[idx] = out[idx] + vec if idx in out else vec
        return LieForm(self.degree, out)

    def __sub__(self, other):
        return self + (-1) * other

    def __mul__(self, s):
        return LieForm(self.degree, {i: v * s for i, v in self.coeffs.items()})

    __rmul__ = __mul__

    def is_zero(self):
        return not self.coeffs

    def norm_inf(self):
        if not self.coeffs:
            return 0.0
        return max(v.norm_inf() for v in self.coeffs.values())

    def coefficient(self, *indices):
        """Coefficient of e^{i1} ^ ... ^ e^{ip}, any index order."""
        srt = _sort_sign(indices)
        if srt is None:
            raise ValueError("repeated index")
        idx, sign = srt
        vec = self.coeffs.get(idx)
        if vec is None:
            return Su2Vec(0, 0, 0)
        return sign * vec


# Maurer-Cartan differentials of the coframe: d eta_1^+ =
# -2(eta_2^+ ^ eta_3^+ + eta_2^- ^ eta_3^-), d eta_1^- =
# -2(eta_2^+ ^ eta_3^- + eta_2^- ^ eta_3^+), and cyclic; dt is closed.
_MC = {
    0: (),
    1: (((2, 3), -2), ((5, 6), -2)),
    2: (((1, 3), 2), ((4, 6), 2)),
    3: (((1, 2), -2), ((4, 5), -2)),
    4: (((2, 6), -2), ((3, 5), 2)),
    5: (((3, 4), -2), ((1, 6), 2)),
    6: (((1, 5), -2), ((2, 4), 2)),
}


def exterior_derivative(form):
    """d on forms with constant su(2) coefficients (no d/dt term).

    Uses the Maurer-Cartan table above with the Leibniz sign rule.  Degree 3
    input is refused: the result would need degree-4 bookkeeping nothing in
    this package consumes.
    """
    if form.degree > 2:
        raise ValueError("exterior_derivative supports degree <= 2 only")
    out = {}
    for idx, vec in form.coeffs.items():
        for k, ik in enumerate(idx):
            leib = -1 if k % 2 else 1
            rest = idx[:k] + idx[k + 1:]
            for (a, b), w in _MC[ik]:
                srt = _sort_sign((a, b) + rest)
                if srt is None:
                    continue
                new_idx, sign = srt
                term = vec * (leib * sign * w)
                out[new_idx] = out[new_idx] + term if new_idx in out else term
    return LieForm(form.degree + 1, out)


@dataclass(frozen=True)
class ConnectionCoeffs:
    """Invariant connection at fixed t: a = sum a_i^+ eta_i^+ + a_i^- eta_i^-.

    ``diagonal`` optionally records scalars (f_1^+, .., f_3^-) with
    a_i^+- = f_i^+- T_i; when present it must reproduce a_plus/a_minus
    exactly.
    """

    a_plus: tuple
    a_minus: tuple
    diagonal: tuple = None

    def __post_init__(self):
        if len(self.a_plus) != 3 or len(self.a_minus) != 3:
            raise ValueError("need three coefficients per sign")
        if self.diagonal is not None:
            fp, fm = self.diagonal[:3], self.diagonal[3:]
            for i in range(3):
                if (self.a_plus[i] != Su2Vec.basis(i + 1, fp[i])
                        or self.a_minus[i] != Su2Vec.basis(i + 1, fm[i])):
                    raise ValueError(
                        "diagonal view does not reproduce the coefficients")

    @staticmethod
    def from_diagonal(f_plus, f_minus):
        fp, fm = tuple(f_plus), tuple(f_minus)
        return ConnectionCoeffs(
            tuple(Su2Vec.basis(i + 1, fp[i]) for i in range(3)),
            tuple(Su2Vec.basis(i + 1, fm[i]) for i in range(3)),
            diagonal=fp + fm,
        )

    def one_form(self):
        out = {}
        for i in range(3):
            if not self.a_plus[i].is_zero():
                out[(i + 1,)] = self.a_plus[i]
            if not self.a_minus[i].is_zero():
                out[(i + 4,)] = self.a_minus[i]
        return LieForm(1, out)


def curvature_direct(conn):
    """Brute force curvature F = da + (1/2)[a ^ a] on the coframe slice.

    Convention: [a ^ a](X, Y) = [a(X), a(Y)] - [a(Y), a(X)], so for
    a = sum c_alpha e^alpha the half-bracket is
    sum_{alpha<beta} [c_alpha, c_beta] e^alpha ^ e^beta.
    """
    a = conn.one_form()
    F = exterior_derivative(a)
    entries = sorted(a.coeffs.items())
    half = {}
    for p in range(len(entries)):
        (ia,), ca = entries[p]
        for q in range(p + 1, len(entries)):
            (ib,), cb = entries[q]
            half[(ia, ib)] = bracket(ca, cb)
    return F + LieForm(2, half)


def curvature_lemma2(conn):
    """Closed-form curvature of the invariant connection.

    Terms per cyclic (i, j, k):
      [a_i^+, a_i^-]                 on eta_i^+ ^ eta_i^-
      -2 a_i^+ + [a_j^+, a_k^+]      on eta_j^+ ^ eta_k^+
      -2 a_i^+ + [a_j^-, a_k^-]      on eta_j^- ^ eta_k^-
      -2 a_i^- + [a_j^-, a_k^+]      on eta_j^- ^ eta_k^+
      -2 a_i^- + [a_j^+, a_k^-]      on eta_j^+ ^ eta_k^-
    """
    ap, am = conn.a_plus, conn.a_minus
    out = {}

    def add(ia, ib, vec):
        srt = _sort_sign((ia, ib))
        idx, sign = srt
        term = sign * vec
        out[idx] = out[idx] + term if idx in out else term

    for i, j, k in CYCLIC:
        add(i, i + 3, bracket(ap[i - 1], am[i - 1]))
        add(j, k, (-2) * ap[i - 1] + bracket(ap[j - 1], ap[k - 1]))
        add(j + 3, k + 3, (-2) * ap[i - 1] + bracket(am[j - 1], am[k - 1]))
        add(j + 3, k, (-2) * am[i - 1] + bracket(am[j - 1], ap[k - 1]))
        add(j, k + 3, (-2) * am[i - 1] + bracket(ap[j - 1], am[k - 1]))
    return LieForm(2, out)


def constraint_value(conn, structure, t):
    """sum_i [a_i^+, a_i^-] / (A_i(t) B_i(t)); vanishes for diagonal data."""
    if t <= 0:
        raise ValueError("constraint is defined for t > 0")
    total = Su2Vec(0, 0, 0)
    for i in range(3):
        br = bracket(conn.a_plus[i], conn.a_minus[i])
        if br.is_zero():
            continue
        total = total + br / (structure.A[i](t) * structure.B[i](t))
    return total


def random_rational_connection(rng, max_den=9):
    """Pseudo-random ConnectionCoeffs with small Fraction entries."""
    def frac():
        return Fraction(rng.randrange(-9, 10), rng.randrange(1, max_den + 1))

    def vec():
        return Su2Vec(frac(), frac(), frac())

    return ConnectionCoeffs(tuple(vec() for _ in range(3)),
                            tuple(vec() for _ in range(3)))
