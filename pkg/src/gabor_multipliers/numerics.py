"""Exact scalars, 2x2 matrix algebra, canonical reduction and type classification.

Scalars are either :class:`fractions.Fraction` (exact) or :class:`Irrational`
(a float approximation carrying a label).  Rationality is always declared by
the caller, never guessed from a float.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .errors import (BadInput, DensityViolation, NotCanonical, NotCoprime,
                     SingularMatrix, Unreducible)

__all__ = [
    "Irrational", "Scalar", "Vec", "Mat2", "TypeTag", "as_scalar", "is_rational",
    "to_float", "rational_sqrt", "reduce_to_canonical", "normalize", "classify",
    "crt_translate_index", "unimodular_split", "xgcd", "IDENTITY", "LatticePair",
]


@dataclass(frozen=True)
class Irrational:
    """A real number known only through a float approximation.

    Arithmetic with other scalars yields another :class:`Irrational`; it is
    never compared for exact equality with a rational.
    """

    approx: float
    label: str = "irr"

    def __post_init__(self):
        if not math.isfinite(self.approx):
            raise BadInput(f"irrational {self.label!r} has non-finite approx")

    def __float__(self):
        return float(self.approx)

    def _wrap(self, value, label):
        return Irrational(float(value), label)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return self
        return self._wrap(self.approx + float(other), f"({self.label}+{_lbl(other)})")

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return self
        return self._wrap(self.approx - float(other), f"({self.label}-{_lbl(other)})")

    def __rsub__(self, other):
        return self._wrap(float(other) - self.approx, f"({_lbl(other)}-{self.label})")

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return Fraction(0)
            if other == 1:
                return self
        return self._wrap(self.approx * float(other), f"{self.label}*{_lbl(other)}")

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and other == 1:
            return self
        return self._wrap(self.approx / float(other), f"{self.label}/{_lbl(other)}")

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return Fraction(0)
        return self._wrap(float(other) / self.approx, f"{_lbl(other)}/{self.label}")

    def __neg__(self):
        return self._wrap(-self.approx, f"-{self.label}")

    def __abs__(self):
        return self if self.approx >= 0 else -self

    def __lt__(self, other):
        return self.approx < float(other)

    def __le__(self, other):
        return self.approx <= float(other)

    def __gt__(self, other):
        return self.approx > float(other)

    def __ge__(self, other):
        return self.approx >= float(other)

    def __floor__(self):
        return math.floor(self.approx)

    def __repr__(self):
        return f"Irrational({self.approx!r}, {self.label!r})"


Scalar = Union[Fraction, Irrational]
Vec = tuple


def _lbl(x) -> str:
    return x.label if isinstance(x, Irrational) else str(x)


def as_scalar(x) -> Scalar:
    """Coerce ints, Fractions, "p/q" strings and {"approx", "label"} dicts.

    Bare floats are rejected: rationality must be declared.
    """
    if isinstance(x, bool):
        raise BadInput("booleans are not scalars")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, Irrational):
        return x
    if isinstance(x, str):
        try:
            return Fraction(x)
        except ValueError as exc:
            raise BadInput(f"cannot parse scalar {x!r}") from exc
    if isinstance(x, dict) and "approx" in x:
        approx = float(x["approx"])
        if approx == 0.0:
            raise BadInput("irrational scalars must have a nonzero approximation")
        return Irrational(approx, str(x.get("label", "irr")))
    if isinstance(x, float):
        raise BadInput(f"bare float {x!r}: declare it as a Fraction or Irrational")
    raise BadInput(f"unsupported scalar {x!r}")


def is_rational(x) -> bool:
    return isinstance(x, (int, Fraction))


def to_float(x) -> float:
    return float(x)


def rational_sqrt(q: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None if irrational."""
    q = Fraction(q)
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _sqrt_scalar(q, label: str) -> Scalar:
    if is_rational(q):
        r = rational_sqrt(Fraction(q))
        if r is not None:
            return r
    return Irrational(math.sqrt(float(q)), f"sqrt({label})")


def _eq(x, y) -> bool:
    """Exact equality for rationals; approximate only when both sides are irrational."""
    if is_rational(x) and is_rational(y):
        return Fraction(x) == Fraction(y)
    if is_rational(x) != is_rational(y):
        return False
    return abs(float(x) - float(y)) <= 1e-12 * max(1.0, abs(float(x)))


@dataclass(frozen=True)
class Mat2:
    """A 2x2 matrix ``[[a, b], [c, d]]`` of scalars."""

    a: Scalar
    b: Scalar
    c: Scalar
    d: Scalar

    @classmethod
    def of(cls, rows) -> "Mat2":
        (a, b), (c, d) = rows
        return cls(as_scalar(a), as_scalar(b), as_scalar(c), as_scalar(d))

    @classmethod
    def diag(cls, x, y) -> "Mat2":
        return cls(as_scalar(x), Fraction(0), Fraction(0), as_scalar(y))

    @classmethod
    def from_columns(cls, c1, c2) -> "Mat2":
        return cls(c1[0], c2[0], c1[1], c2[1])

    @property
    def rows(self):
        return ((self.a, self.b), (self.c, self.d))

    def col(self, j: int) -> Vec:
        return (self.a, self.c) if j == 0 else (self.b, self.d)

    def det(self) -> Scalar:
        return self.a * self.d - self.b * self.c

    @property
    def T(self) -> "Mat2":
        return Mat2(self.a, self.c, self.b, self.d)

    def is_rational(self) -> bool:
        return all(is_rational(x) for x in (self.a, self.b, self.c, self.d))

    def is_integer(self) -> bool:
        return self.is_rational() and all(Fraction(x).denominator == 1
                                          for x in (self.a, self.b, self.c, self.d))

    def is_diagonal(self) -> bool:
        return _is_zero(self.b) and _is_zero(self.c)

    def inv(self) -> "Mat2":
        det = self.det()
        if _is_zero(det):
            raise SingularMatrix("matrix is singular")
        return Mat2(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def __matmul__(self, other):
        if isinstance(other, Mat2):
            return Mat2(self.a * other.a + self.b * other.c,
                        self.a * other.b + self.b * other.d,
                        self.c * other.a + self.d * other.c,
                        self.c * other.b + self.d * other.d)
        x, y = other
        return (self.a * x + self.b * y, self.c * x + self.d * y)

    def __mul__(self, s):
        return Mat2(self.a * s, self.b * s, self.c * s, self.d * s)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def equals(self, other: "Mat2") -> bool:
        return all(_eq(x, y) for x, y in zip(
            (self.a, self.b, self.c, self.d), (other.a, other.b, other.c, other.d)))

    def to_floats(self):
        return ((float(self.a), float(self.b)), (float(self.c), float(self.d)))

    def __repr__(self):
        return f"Mat2([[{self.a}, {self.b}], [{self.c}, {self.d}]])"


IDENTITY = Mat2(Fraction(1), Fraction(0), Fraction(0), Fraction(1))


def _is_zero(x) -> bool:
    if is_rational(x):
        return x == 0
    return abs(float(x)) < 1e-14


# ---------------------------------------------------------------------------
# reduction to real canonical form
# ---------------------------------------------------------------------------

def reduce_to_canonical(A: Mat2, B: Mat2) -> tuple[Mat2, Mat2]:
    """Reduce ``(B^T A)^{-1}`` to its real canonical Jordan form.

    Returns ``(D, P)`` with ``P^{-1} (B^T A)^{-1} P = D``.  ``P`` is a general
    invertible matrix.  Eigenvalues that are irrational come back as
    :class:`Irrational` entries.
    """
    if _is_zero(A.det()) or _is_zero(B.det()):
        raise SingularMatrix("A and B must be nonsingular")
    if abs(float(A.det() * B.det())) > 1 + 1e-12 and not (
            A.is_rational() and B.is_rational() and abs(Fraction(A.det() * B.det())) <= 1):
        raise DensityViolation("|det(AB)| > 1")
    M = (B.T @ A).inv()
    return _real_jordan(M)


def _real_jordan(M: Mat2) -> tuple[Mat2, Mat2]:
    if M.is_diagonal():
        return Mat2(M.a, Fraction(0), Fraction(0), M.d), IDENTITY
    # already an upper Jordan block or a rotation-scaling block
    if _is_zero(M.c) and _eq(M.a, M.d) and _eq(M.b, Fraction(1)):
        return M, IDENTITY
    if _eq(M.a, M.d) and _eq(M.b, -M.c) and float(M.b) > 0:
        return M, IDENTITY
    if not M.is_rational():
        raise Unreducible("irrational input must already be in canonical shape")
    t = M.a + M.d
    delta = M.det()
    disc = t * t - 4 * delta
    if disc > 0:
        root = _sqrt_scalar(disc, str(disc))
        lam1 = (t - root) / 2
        lam2 = (t + root) / 2
        v1 = _eigvec(M, lam1)
        v2 = _eigvec(M, lam2)
        P = Mat2.from_columns(v1, v2)
        D = Mat2(lam1, Fraction(0), Fraction(0), lam2)
        return D, P
    if disc == 0:
        lam = t / 2
        N = Mat2(M.a - lam, M.b, M.c, M.d - lam)
        w = (Fraction(1), Fraction(0)) if not (_is_zero(N.a) and _is_zero(N.c)) \
            else (Fraction(0), Fraction(1))
        v = N @ w
        P = Mat2.from_columns(v, w)
        return Mat2(lam, Fraction(1), Fraction(0), lam), P
    a = t / 2
    b = _sqrt_scalar(-disc, str(-disc)) / 2
    p1 = (Fraction(1), Fraction(0))
    Mp1 = M @ p1
    p2 = ((a * p1[0] - Mp1[0]) / b, (a * p1[1] - Mp1[1]) / b)
    P = Mat2.from_columns(p1, p2)
    return Mat2(a, b, -b, a), P


def _eigvec(M: Mat2, lam) -> Vec:
    # a nonzero vector in the kernel of M - lam I
    if not _is_zero(M.b):
        return (M.b, lam - M.a)
    if not _is_zero(M.c):
        return (lam - M.d, M.c)
    if _eq(M.a, lam):
        return (Fraction(1), Fraction(0))
    return (Fraction(0), Fraction(1))


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TypeTag:
    """One of the eleven lattice-pair types, with its defining parameters.

    ``canonical`` is the sign/axis normalized matrix the constructions run on
    and ``transform = (U, V)`` are the signed permutations with
    ``canonical = U @ D @ V``.
    """

    major: str
    subcase: str | None
    params: dict = field(default_factory=dict, compare=False)
    canonical: Mat2 | None = field(default=None, compare=False)
    transform: tuple = field(default=(IDENTITY, IDENTITY), compare=False)

    @property
    def label(self) -> str:
        return self.major + (f"({self.subcase})" if self.subcase else "")


SWAP = Mat2(Fraction(0), Fraction(1), Fraction(1), Fraction(0))


def _sgn(x) -> int:
    return -1 if float(x) < 0 else 1


def normalize(D: Mat2) -> tuple[Mat2, Mat2, Mat2]:
    """Return ``(Dn, U, V)`` with ``Dn = U D V`` for signed permutations U, V.

    ``U`` maps Z^2 onto itself and ``V`` only changes the basis of ``D Z^2``,
    so the lattice pair is preserved up to relabelling.  Conventions:
    positive diagonal entries, ``r1 <= r2`` when one of them is below one,
    ``diag(1, r)`` for Type I, ``r > 0`` for Jordan blocks, ``a, b > 0`` for
    rotation-scaling blocks (``a = 0`` becomes ``diag(b, b)``).
    """
    U, V = IDENTITY, IDENTITY
    if D.is_diagonal():
        V = Mat2.diag(_sgn(D.a), _sgn(D.d))
        Dn = U @ D @ V
        r1, r2 = abs(float(Dn.a)), abs(float(Dn.d))
        if (_eq(abs(Dn.d), 1) and r1 > 1) or (r1 > 1 > r2):
            U, V = SWAP @ U, V @ SWAP
            Dn = U @ D @ V
        return Dn, U, V
    if _is_zero(D.c) and _eq(D.a, D.d) and _eq(D.b, 1):
        if float(D.a) < 0:
            U, V = Mat2.diag(1, -1), Mat2.diag(-1, 1)
        return U @ D @ V, U, V
    if _eq(D.a, D.d) and _eq(D.b, -D.c):
        if _is_zero(D.a):
            # [[0, b], [-b, 0]] Z^2 = b Z^2
            V = Mat2.of([[0, -1], [1, 0]]) if float(D.b) > 0 else Mat2.of([[0, 1], [-1, 0]])
            return U @ D @ V, U, V
        if float(D.a) < 0:
            V = -IDENTITY
        if float((D @ V).b) < 0:
            U, V = Mat2.diag(1, -1), V @ Mat2.diag(1, -1)
        return U @ D @ V, U, V
    raise NotCanonical(f"{D!r} is not diagonal, a Jordan block or a rotation-scaling block")


def _frac_parts(r):
    q = math.floor(r)
    return Fraction(q), r - q


def classify(D: Mat2) -> TypeTag:
    """Classify a canonical ``D`` (|det D| >= 1) into Types I-XI."""
    det = D.det()
    if (is_rational(det) and abs(det) < 1) or (not is_rational(det) and abs(float(det)) < 1 - 1e-12):
        raise DensityViolation("|det D| < 1")
    Dn, U, V = normalize(D)

    def tag(major, subcase=None, **params):
        return TypeTag(major, subcase, params, Dn, (U, V))

    if Dn.is_diagonal():
        r1, r2 = Dn.a, Dn.d
        one1, one2 = _eq(r1, 1), _eq(r2, 1)
        if one1 and one2:
            return tag("III")
        if one1:
            q, r0 = _frac_parts(r2)
            return tag("I", r=r2, q=q, r0=r0)
        if float(r1) > 1 and float(r2) > 1:
            q1, r0p = _frac_parts(r1)
            q2, r0pp = _frac_parts(r2)
            z1, z2 = _is_zero(r0p), _is_zero(r0pp)
            sub = "a" if z1 and z2 else "b" if not z1 and not z2 else "c" if z1 else "d"
            return tag("II", sub, r1=r1, r2=r2, q1=q1, q2=q2, r0p=r0p, r0pp=r0pp)
        # 0 < r1 < 1 < r2
        if not is_rational(r1) and not is_rational(r2):
            return tag("VI", r1=r1, r2=r2)
        if is_rational(r1) and not is_rational(r2):
            return tag("VII", r1=r1, r2=r2, m1=Fraction(r1.numerator), n1=Fraction(r1.denominator))
        if not is_rational(r1):
            return tag("VIII", r1=r1, r2=r2, m2=Fraction(r2.numerator), n2=Fraction(r2.denominator))
        m1, n1 = r1.numerator, r1.denominator
        m2, n2 = r2.numerator, r2.denominator
        if m1 != 1 and n2 != 1:
            sub = "a"
        elif m1 != 1:
            sub = "b"
        elif n2 != 1:
            sub = "c"
        else:
            sub = "d"
        params = dict(r1=r1, r2=r2, m1=Fraction(m1), n1=Fraction(n1), m2=Fraction(m2), n2=Fraction(n2))
        if sub == "d" and m2 == n1:
            params["q"] = Fraction(n1)
        return tag("IX", sub, **params)
    if _is_zero(Dn.c):
        r = Dn.a
        if _eq(r, 1):
            return tag("V")
        q, r0 = _frac_parts(r)
        return tag("IV", "a" if _is_zero(r0) else "b", r=r, q=q, r0=r0)
    a, b = Dn.a, Dn.b
    if is_rational(a) and is_rational(b):
        ratio = Fraction(a) / Fraction(b)
        a1, b1 = ratio.numerator, ratio.denominator
        pq = Fraction(a) / a1
        p, q = pq.numerator, pq.denominator
        z = a1 * a1 + b1 * b1
        r1, r2 = pq, pq * z
        c = math.gcd(z, q)
        return tag("X", "a" if r1.denominator != 1 else "b",
                   a=Fraction(a), b=Fraction(b), p=Fraction(p), q=Fraction(q),
                   a1=Fraction(a1), b1=Fraction(b1), z=Fraction(z), c=Fraction(c),
                   m1=Fraction(r1.numerator), n1=Fraction(r1.denominator),
                   m2=Fraction(r2.numerator), n2=Fraction(r2.denominator))
    return tag("XI", a=a, b=b)


# ---------------------------------------------------------------------------
# integer helpers
# ---------------------------------------------------------------------------

def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``s*a + t*b = g = gcd(a, b)``."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        quo = old_r // r
        old_r, r = r, old_r - quo * r
        old_s, s = s, old_s - quo * s
        old_t, t = t, old_t - quo * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def crt_translate_index(a: int, n: int, a2: int, m: int) -> int:
    """Smallest nonnegative x with ``x = a (mod n)`` and ``x = a2 (mod m)``."""
    if n <= 0 or m <= 0:
        raise BadInput("moduli must be positive")
    g, s, _ = xgcd(n, m)
    if g != 1:
        raise NotCoprime(f"gcd({n}, {m}) = {g}")
    # x = a + n*u with n*u = a2 - a (mod m)
    u = ((a2 - a) * s) % m
    return (a + n * u) % (n * m)


def unimodular_split(D1: Mat2) -> tuple[Mat2, Mat2, Mat2]:
    """Integer unimodular ``P`` (unit lower triangular) and ``Q`` with ``P D1 Q = diag(1, z)``.

    ``D1 = [[a1, b1], [-b1, a1]]`` with positive coprime integers ``a1, b1``.
    """
    if not D1.is_integer() or D1.a != D1.d or D1.b != -D1.c:
        raise BadInput("D1 must be [[a1, b1], [-b1, a1]] with integer entries")
    a1, b1 = int(D1.a), int(D1.b)
    if a1 <= 0 or b1 < 0:
        raise BadInput("a1 must be positive and b1 nonnegative")
    g, s, t = xgcd(a1, b1)
    if g != 1:
        raise BadInput(f"a1={a1}, b1={b1} are not coprime")
    if b1 == 0:
        # a1 = 1: already diagonal
        return IDENTITY, IDENTITY, IDENTITY
    if a1 == b1 == 1:
        s, t = 1, 0
    P = Mat2.of([[1, 0], [s * b1 - t * a1, 1]])
    Q = Mat2.of([[s, -b1], [t, a1]])
    Dp = P @ D1 @ Q
    return P, Q, Dp


@dataclass(frozen=True)
class LatticePair:
    """Translation lattice ``L`` and the lattice ``K`` of the second condition.

    Columns of ``L_basis`` are ``l1, l2`` and columns of ``K_basis`` are
    ``k1, k2``.  In reduced form ``L_basis`` is the identity and
    ``K_basis = D``.  For a general pair ``(A, B)`` the translates are ``A l``
    and ``(B^T)^{-1} k`` and the modulations are ``B k``.
    """

    L_basis: Mat2
    K_basis: Mat2

    def __post_init__(self):
        for m in (self.L_basis, self.K_basis):
            if _is_zero(m.det()):
                raise SingularMatrix("lattice basis is singular")

    @classmethod
    def reduced(cls, D: Mat2) -> "LatticePair":
        return cls(IDENTITY, D)

    @classmethod
    def general(cls, A: Mat2, B: Mat2) -> "LatticePair":
        return cls(A, B.T.inv())

    @property
    def is_reduced(self) -> bool:
        return self.L_basis.equals(IDENTITY)

    @property
    def modulation(self) -> Mat2:
        """Basis of the modulation lattice, ``(K^T)^{-1}``."""
        return self.K_basis.T.inv()

    @property
    def target(self) -> Scalar:
        """The constant ``1/|det K|`` (``d0`` in reduced form, ``|det B|`` in general)."""
        det = self.K_basis.det()
        return 1 / (det if det > 0 else -det)

    def validate(self) -> None:
        """Raise DensityViolation unless ``|det L| / |det K| <= 1``."""
        ratio = self.L_basis.det() / self.K_basis.det()
        if abs(to_float(ratio)) > 1 + 1e-12 and not (is_rational(ratio) and abs(ratio) <= 1):
            raise DensityViolation("the pair is too sparse for a Parseval generator")

    def l(self, i: int) -> Vec:
        return self.L_basis.col(i - 1)

    def k(self, j: int) -> Vec:
        return self.K_basis.col(j - 1)
