"""Exact arithmetic in a fixed ambient finite field F_{p^D}.

The ambient field houses every scalar of the package: the quadratic
element omega in F_{q^2} - F_q, the root-of-minus-one zeta needed by the
period's leading coefficient, and all series coefficients.  Elements are
stored as integers in [0, p^D) packing the coefficient vector base p
(low degree first).  A FieldSpec builds discrete log / exp / Zech tables
once, after which multiplication, inversion, addition and Frobenius are
O(1) table lookups.  The same tables back the compiled series kernels.

q = p^s must be odd: the stabilizer block shape (G, w^2 H; H, G) needs
an omega with omega^2 in F_q, which no even-q field provides.
"""

from functools import lru_cache
from math import gcd

import numpy as np

from .errors import FieldError, FieldMismatchError, GammaShapeError


# ---------------------------------------------------------------------------
# dense polynomial helpers over F_p (coefficient tuples, low degree first)

def _ptrim(c):
    i = len(c)
    while i > 0 and c[i - 1] == 0:
        i -= 1
    return tuple(c[:i])


def _pmul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _ptrim(out)


def _pmod(a, m, p):
    # remainder of a modulo monic-normalized m
    a = list(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm and len(a) > 0:
        c = (a[-1] * inv_lead) % p
        if c:
            off = len(a) - 1 - dm
            for j, mj in enumerate(m):
                a[off + j] = (a[off + j] - c * mj) % p
        a.pop()
    return _ptrim(a)


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _factor(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _irreducible(mod, p):
    """Trial division of a monic polynomial against all monic polynomials
    of degree at most deg/2.  Feasible for the desk-scale degrees used here."""
    deg = len(mod) - 1
    if deg < 1 or mod[-1] != 1:
        return False
    if any(c % p != c for c in mod):
        return False
    for d in range(1, deg // 2 + 1):
        for packed in range(p ** d):
            div = _digits(packed, p, d) + (1,)
            if _pmod(mod, div, p) == ():
                return False
    return True


def _digits(packed, p, width):
    out = []
    for _ in range(width):
        packed, r = divmod(packed, p)
        out.append(r)
    return tuple(out)


def _pack(digits, p):
    out = 0
    for d in reversed(digits):
        out = out * p + d
    return out


def default_modulus(p, D):
    """Smallest monic irreducible of degree D over F_p in packed order.

    Deterministic, so a (p, D) pair always names the same ambient field.
    """
    for packed in range(p ** D):
        cand = _digits(packed, p, D) + (1,)
        if _irreducible(cand, p):
            return list(cand)
    raise FieldError(f"no irreducible polynomial of degree {D} over F_{p}")


# ---------------------------------------------------------------------------


class FieldSpec:
    """Ambient field F_{p^D} containing F_q = F_{p^s}, with 2s | D.

    Packed representation: sum(coeffs[i] * p**i) in [0, p^D).  Tables:

    * ``exp[j]``  packed value of g**j for a fixed generator g,
    * ``log[x]``  discrete log of packed x (log[0] = -1),
    * ``zech[j]`` log(1 + g**j), or -1 when 1 + g**j = 0.

    Addition of nonzero x, y is exp[(log x + Z((log y - log x) mod Q-1)) mod Q-1].
    """

    def __init__(self, p, s=1, D=None, modulus=None):
        if not _is_prime(p):
            raise FieldError(f"p = {p} is not prime")
        if s < 1:
            raise FieldError("s must be positive")
        q = p ** s
        if q % 2 == 0:
            raise FieldError("even q is not supported: no omega with omega^2 in F_q exists")
        if D is None:
            D = 4 * s
        if D % (2 * s) != 0:
            raise FieldError(f"D = {D} must be a multiple of 2s = {2 * s}")
        self.p = p
        self.s = s
        self.q = q
        self.D = D
        self.order = p ** D
        if modulus is None:
            modulus = default_modulus(p, D)
        modulus = [c % p for c in modulus]
        if len(modulus) != D + 1:
            raise FieldError("modulus must have degree D")
        if not _irreducible(tuple(modulus), p):
            raise FieldError("modulus is reducible over F_p")
        self.modulus = tuple(modulus)
        self._build_tables()
        self._subfield_cache = {}

    # -- table construction ------------------------------------------------

    def _mul_packed_slow(self, a, b):
        pa = _digits(a, self.p, self.D)
        pb = _digits(b, self.p, self.D)
        return _pack(_pmod(_pmul(pa, pb, self.p), self.modulus, self.p) + (0,) * self.D, self.p)

    def _find_generator(self):
        qm1 = self.order - 1
        primes = _factor(qm1)
        for cand in range(2, self.order):
            ok = True
            for ell in primes:
                # packed exponentiation by squaring with the slow multiply
                e = qm1 // ell
                acc, base = 1, cand
                while e:
                    if e & 1:
                        acc = self._mul_packed_slow(acc, base)
                    base = self._mul_packed_slow(base, base)
                    e >>= 1
                if acc == 1:
                    ok = False
                    break
            if ok:
                return cand
        raise FieldError("no multiplicative generator found")

    def _build_tables(self):
        Q = self.order
        qm1 = Q - 1
        g = self._find_generator()
        exp = [0] * qm1
        log = [-1] * Q
        x = 1
        for j in range(qm1):
            exp[j] = x
            log[x] = j
            x = self._mul_packed_slow(x, g)
        # Zech logarithms: add 1 digit-wise, then look the log up
        zech = [0] * qm1
        for j in range(qm1):
            y = exp[j]
            d = list(_digits(y, self.p, self.D))
            d[0] = (d[0] + 1) % self.p
            ypl1 = _pack(d, self.p)
            zech[j] = -1 if ypl1 == 0 else log[ypl1]
        self.generator = g
        self._exp = exp
        self._log = log
        self._zech = zech
        self.exp_np = np.asarray(exp, dtype=np.int64)
        self.log_np = np.asarray(log, dtype=np.int64)
        self.zech_np = np.asarray(zech, dtype=np.int64)
        self._neg_one = self.pow_packed(self.p - 1, 1) if self.p > 2 else 1
        # lane packing: the D digits of exp[j] in 16-bit lanes of one word,
        # so dense accumulation is a single integer add per product term
        if self.D <= 4:
            lanes = np.zeros(qm1, dtype=np.int64)
            for j in range(qm1):
                acc = 0
                for d, dig in enumerate(_digits(exp[j], self.p, self.D)):
                    acc |= dig << (16 * d)
                lanes[j] = acc
            self.lane_exp_np = lanes
        else:
            self.lane_exp_np = None

    # -- packed scalar ops ---------------------------------------------------

    def add_packed(self, a, b):
        if a == 0:
            return b
        if b == 0:
            return a
        la, lb = self._log[a], self._log[b]
        z = self._zech[(lb - la) % (self.order - 1)]
        if z < 0:
            return 0
        return self._exp[(la + z) % (self.order - 1)]

    def neg_packed(self, a):
        if a == 0 or self.p == 2:
            return a
        return self._exp[(self._log[a] + self._log[self.p - 1]) % (self.order - 1)]

    def mul_packed(self, a, b):
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.order - 1)]

    def inv_packed(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero in the ambient field")
        return self._exp[(-self._log[a]) % (self.order - 1)]

    def pow_packed(self, a, e):
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("inverse of zero in the ambient field")
            return 0 if e else 1
        return self._exp[(self._log[a] * e) % (self.order - 1)]

    def frob_packed(self, a, i):
        # a^(q^i); negative i uses the inverse automorphism, which always
        # exists because gcd(q, p^D - 1) = 1
        if a == 0:
            return 0
        qi = pow(self.q, i, self.order - 1) if i >= 0 else pow(
            pow(self.q, -1, self.order - 1), -i, self.order - 1)
        return self._exp[(self._log[a] * qi) % (self.order - 1)]

    # -- elements ------------------------------------------------------------

    def el(self, packed):
        return FFElem(self, packed % self.order)

    def from_coeffs(self, coeffs):
        if len(coeffs) > self.D:
            raise FieldError("coefficient vector longer than ambient degree")
        digs = tuple(c % self.p for c in coeffs) + (0,) * (self.D - len(coeffs))
        return FFElem(self, _pack(digs, self.p))

    @property
    def zero(self):
        return FFElem(self, 0)

    @property
    def one(self):
        return FFElem(self, 1)

    def scalar(self, n):
        """Image of the integer n under the prime field embedding."""
        return FFElem(self, n % self.p)

    def elements(self):
        for x in range(self.order):
            yield FFElem(self, x)

    def subfield(self, m):
        """Packed values of the subfield F_{q^m}, ascending.  Requires m*s | D."""
        if (m * self.s) and self.D % (m * self.s) != 0:
            raise FieldError(f"F_(q^{m}) does not embed in the ambient field")
        if m not in self._subfield_cache:
            size = self.q ** m
            out = [x for x in range(self.order)
                   if x == 0 or (self._log[x] * (size - 1)) % (self.order - 1) == 0]
            if len(out) != size:
                raise FieldError("subfield enumeration failed")
            self._subfield_cache[m] = out
        return self._subfield_cache[m]

    def subfield_basis(self, m):
        """F_p-basis of F_{q^m} inside the ambient field.

        Powers of a multiplicative generator of the subfield; for the
        prime field this is just [1].
        """
        dim = m * self.s
        if dim == 1:
            return [1]
        size = self.q ** m
        for x in self.subfield(m):
            if x and (self.order - 1) // gcd(self._log[x], self.order - 1) == size - 1:
                return [self.pow_packed(x, j) for j in range(dim)]
        raise FieldError("no generator found for the requested subfield")

    @property
    def omega(self):
        """Fixed element of F_{q^2} - F_q whose square lies in F_q.

        Chosen as the first packed value satisfying both conditions, so the
        choice is reproducible per (p, s, D, modulus).
        """
        if not hasattr(self, "_omega"):
            for x in self.subfield(2):
                if x == 0:
                    continue
                e = FFElem(self, x)
                if e.frobenius(1) != e and (e * e).frobenius(1) == e * e:
                    self._omega = e
                    break
            else:
                raise FieldError("no omega in F_{q^2} - F_q with omega^2 in F_q")
        return self._omega

    @property
    def zeta(self):
        """Element with zeta^(q^2-1) = -1, the leading coefficient of the period."""
        if not hasattr(self, "_zeta"):
            m = self.q * self.q - 1
            root = find_root_in_field([self.one] + [self.zero] * (m - 1) + [self.one])
            if root is None:
                raise FieldError("no zeta with zeta^(q^2-1) = -1: raise the ambient degree D")
            self._zeta = root
        return self._zeta

    def check(self, other):
        if self is not other:
            raise FieldMismatchError("elements from different ambient fields")

    def to_json(self):
        return {"p": self.p, "s": self.s, "D": self.D, "modulus": list(self.modulus)}

    def __repr__(self):
        return f"FieldSpec(p={self.p}, s={self.s}, D={self.D})"


@lru_cache(maxsize=8)
def ambient_field(p, s=1, D=None, modulus=None):
    """Shared FieldSpec per (p, s, D, modulus); table building runs once."""
    return FieldSpec(p, s, D, list(modulus) if modulus else None)


class FFElem:
    """Element of the ambient field, immutable, packed representation."""

    __slots__ = ("spec", "idx")

    def __init__(self, spec, idx):
        self.spec = spec
        self.idx = idx

    # -- ring structure ----------------------------------------------------

    def __add__(self, other):
        self.spec.check(other.spec)
        return FFElem(self.spec, self.spec.add_packed(self.idx, other.idx))

    def __sub__(self, other):
        self.spec.check(other.spec)
        return FFElem(self.spec, self.spec.add_packed(self.idx, self.spec.neg_packed(other.idx)))

    def __neg__(self):
        return FFElem(self.spec, self.spec.neg_packed(self.idx))

    def __mul__(self, other):
        self.spec.check(other.spec)
        return FFElem(self.spec, self.spec.mul_packed(self.idx, other.idx))

    def __truediv__(self, other):
        self.spec.check(other.spec)
        return FFElem(self.spec, self.spec.mul_packed(self.idx, self.spec.inv_packed(other.idx)))

    def __pow__(self, e):
        return FFElem(self.spec, self.spec.pow_packed(self.idx, e))

    def inv(self):
        return FFElem(self.spec, self.spec.inv_packed(self.idx))

    def frobenius(self, i=1):
        """q-power Frobenius iterate: self**(q**i).  Negative i inverts."""
        return FFElem(self.spec, self.spec.frob_packed(self.idx, i))

    # -- predicates, conversion ---------------------------------------------

    def is_zero(self):
        return self.idx == 0

    def in_subfield(self, m):
        return self.frobenius(m) == self

    def multiplicative_order(self):
        if self.idx == 0:
            raise ZeroDivisionError("zero has no multiplicative order")
        qm1 = self.spec.order - 1
        return qm1 // gcd(self.spec._log[self.idx], qm1)

    def coeffs(self):
        return list(_digits(self.idx, self.spec.p, self.spec.D))

    def to_json(self):
        return self.coeffs()

    def __eq__(self, other):
        return isinstance(other, FFElem) and self.spec is other.spec and self.idx == other.idx

    def __hash__(self):
        return hash((id(self.spec), self.idx))

    def __repr__(self):
        return f"ff{self.coeffs()}"


# ---------------------------------------------------------------------------
# named operation surface


def ff_arith(x, y, op):
    """Field arithmetic dispatch: op in {'add','sub','mul','div'}."""
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown op {op!r}")


def frobenius(x, i):
    if i < 0:
        raise ValueError("use FFElem.frobenius for inverse twists")
    return x.frobenius(i)


def find_root_in_field(poly):
    """First root (ascending packed order) of a polynomial with FFElem
    coefficients, or None.  Exhaustive scan; the ambient fields are tiny."""
    coeffs = [c for c in poly]
    if all(c.is_zero() for c in coeffs):
        raise ValueError("zero polynomial")
    spec = coeffs[0].spec
    rev = coeffs[::-1]
    for x in range(spec.order):
        e = FFElem(spec, x)
        acc = spec.zero
        for c in rev:
            acc = acc * e + c
        if acc.is_zero():
            return e
    return None


def omega_of(spec):
    """The canonical quadratic element; raises if the spec cannot house one."""
    return spec.omega


def omega_split(x):
    """Write x in F_{q^2} as a + omega*b with a, b in F_q.

    Uses a = (x + x^q)/2 and b = (x - x^q)/(2 omega); q odd makes 2 a unit.
    Raises GammaShapeError when x is not in F_{q^2}.
    """
    spec = x.spec
    if not x.in_subfield(2):
        raise GammaShapeError("coefficient outside F_{q^2}")
    xq = x.frobenius(1)
    two = spec.scalar(2)
    a = (x + xq) / two
    b = (x - xq) / (two * spec.omega)
    return a, b


# ---------------------------------------------------------------------------
# polynomials in theta over the ambient field


class FFPoly:
    """Dense polynomial with FFElem coefficients, ascending degree.

    Used for entries of the block group elements over F_q[theta], for the
    symbolic linear-system matrix and for exact determinants (Bareiss).
    """

    __slots__ = ("spec", "coeffs")

    def __init__(self, spec, coeffs=()):
        cs = list(coeffs)
        while cs and cs[-1].is_zero():
            cs.pop()
        self.spec = spec
        self.coeffs = tuple(cs)

    @classmethod
    def const(cls, c):
        return cls(c.spec, (c,))

    @classmethod
    def theta(cls, spec):
        return cls(spec, (spec.zero, spec.one))

    def degree(self):
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def is_zero(self):
        return not self.coeffs

    def is_constant(self):
        return len(self.coeffs) <= 1

    def constant(self):
        return self.coeffs[0] if self.coeffs else self.spec.zero

    def __getitem__(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self.spec.zero

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return FFPoly(self.spec, [self[i] + other[i] for i in range(n)])

    def __sub__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return FFPoly(self.spec, [self[i] - other[i] for i in range(n)])

    def __neg__(self):
        return FFPoly(self.spec, [-c for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, FFElem):
            return FFPoly(self.spec, [c * other for c in self.coeffs])
        if self.is_zero() or other.is_zero():
            return FFPoly(self.spec)
        out = [self.spec.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return FFPoly(self.spec, out)

    def divmod(self, other):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return FFPoly(self.spec), self
        quot = [self.spec.zero] * (dq + 1)
        inv_lead = other.coeffs[-1].inv()
        for k in range(dq, -1, -1):
            c = rem[k + len(other.coeffs) - 1] * inv_lead
            quot[k] = c
            if not c.is_zero():
                for j, b in enumerate(other.coeffs):
                    rem[k + j] = rem[k + j] - c * b
        return FFPoly(self.spec, quot), FFPoly(self.spec, rem)

    def exact_div(self, other):
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticError("inexact polynomial division")
        return q

    def map_coeffs(self, f):
        return FFPoly(self.spec, [f(c) for c in self.coeffs])

    def frobenius(self, i=1):
        return self.map_coeffs(lambda c: c.frobenius(i))

    def eval_ff(self, x):
        acc = self.spec.zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def in_prime_subfield(self):
        return all(c.in_subfield(1) for c in self.coeffs)

    def to_json(self):
        return [c.to_json() for c in self.coeffs]

    def __eq__(self, other):
        return isinstance(other, FFPoly) and self.coeffs == other.coeffs

    def __repr__(self):
        return f"FFPoly({list(self.coeffs)})"


def ffpoly_adjugate(rows):
    """Adjugate of a square FFPoly matrix by cofactor expansion."""
    n = len(rows)
    spec = rows[0][0].spec
    if n == 1:
        return [[FFPoly.const(spec.one)]]
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[rows[r][c] for c in range(n) if c != j]
                     for r in range(n) if r != i]
            cof = ffpoly_det(minor)
            if (i + j) % 2 == 1:
                cof = -cof
            out[j][i] = cof
    return out


def ffpoly_unit_inv(rows):
    """Inverse of a polynomial matrix with constant nonzero determinant.

    Such inverses are again polynomial: adjugate over the determinant.
    """
    det = ffpoly_det(rows)
    if det.is_zero() or not det.is_constant():
        raise ArithmeticError("matrix determinant is not a constant unit")
    dinv = det.constant().inv()
    adj = ffpoly_adjugate(rows)
    return [[p * dinv for p in r] for r in adj]


def ffpoly_det(rows):
    """Exact determinant of a square FFPoly matrix via fraction-free
    Bareiss elimination (all interior divisions are exact)."""
    m = [list(r) for r in rows]
    n = len(m)
    if n == 0:
        raise ValueError("empty matrix")
    spec = m[0][0].spec
    sign = 1
    prev = FFPoly.const(spec.one)
    for k in range(n - 1):
        if m[k][k].is_zero():
            for r in range(k + 1, n):
                if not m[r][k].is_zero():
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return FFPoly(spec)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = num.exact_div(prev)
        prev = m[k][k]
    det = m[n - 1][n - 1]
    if sign < 0:
        det = -det
    return det
