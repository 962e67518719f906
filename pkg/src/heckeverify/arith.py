"""Exact arithmetic functions: r_k, sigma_k, tau, Bernoulli numbers,
Dirichlet characters, Kronecker symbols and ideal counts.

Large power-series products use Kronecker substitution: a polynomial with
integer coefficients is packed into one big integer, multiplied with GMP,
and unpacked again.  All tables hold exact Python integers (or Fractions
where a convention makes the n = 0 entry rational).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import gmpy2
import numpy as np

__all__ = [
    "ArithmeticError_",
    "CoefficientTable",
    "DirichletCharacter",
    "r_k_table",
    "r_k",
    "sigma_k_table",
    "sigma_k",
    "sigma_k_zero",
    "tau_table",
    "tau",
    "bernoulli",
    "gauss_sum",
    "kronecker",
    "is_fundamental_discriminant",
    "ideal_count_table",
    "ideal_count",
    "CLASS_DATA",
    "builtin_character",
    "parse_character",
    "poly_mul_trunc",
]


class ArithmeticError_(ValueError):
    """Out-of-range or ill-posed arithmetic request."""


# ----------------------------------------------------- exact polynomials

def _pack(coeffs, nbytes):
    out = bytearray(len(coeffs) * nbytes)
    for i, c in enumerate(coeffs):
        if c:
            out[i * nbytes:(i + 1) * nbytes] = int(c).to_bytes(nbytes, "little")
    return int.from_bytes(out, "little")


def _pack_signed(coeffs, nbytes):
    pos = [c if c > 0 else 0 for c in coeffs]
    neg = [-c if c < 0 else 0 for c in coeffs]
    return gmpy2.mpz(_pack(pos, nbytes)) - gmpy2.mpz(_pack(neg, nbytes))


def _unpack_signed(value, n, nbytes):
    bits = 8 * nbytes
    total = bits * n
    t = gmpy2.f_mod_2exp(value, total)
    if t >> (total - 1):
        t -= gmpy2.mpz(1) << total
    # shift every digit into [0, 2^bits) with a constant offset
    half = 1 << (bits - 1)
    offset = _pack([half] * n, nbytes)
    raw = int(t + offset).to_bytes(total // 8, "little")
    return [int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") - half for i in range(n)]


def poly_mul_trunc(a, b, n):
    """Exact product of two integer polynomials, truncated to n coefficients."""
    a = list(a[:n])
    b = list(b[:n])
    if not a or not b:
        return [0] * n
    bound = max(abs(c) for c in a) * sum(abs(c) for c in b)
    bound = max(bound, max(abs(c) for c in b) * sum(abs(c) for c in a), 1)
    nbytes = (bound.bit_length() + 2 + 7) // 8
    prod = _pack_signed(a, nbytes) * _pack_signed(b, nbytes)
    return _unpack_signed(prod, n, nbytes)


def _poly_pow_trunc(base, e, n):
    result = [1] + [0] * (n - 1)
    sq = list(base[:n])
    while e:
        if e & 1:
            result = poly_mul_trunc(result, sq, n)
        e >>= 1
        if e:
            sq = poly_mul_trunc(sq, sq, n)
    return result


# ------------------------------------------------------------------ r_k

@lru_cache(maxsize=None)
def r_k_table(k, size):
    """r_k(0..size) as a tuple of ints, by powering the r_1 series."""
    if not 2 <= k <= 12:
        raise ArithmeticError_(f"k={k} outside 2..12")
    if size < 0:
        raise ArithmeticError_("negative table size")
    n = size + 1
    r1 = [0] * n
    r1[0] = 1
    m = 1
    while m * m < n:
        r1[m * m] = 2
        m += 1
    return tuple(_poly_pow_trunc(r1, k, n))


def r_k(k, n, size=None):
    """Number of representations of n as a sum of k squares."""
    if n < 0:
        raise ArithmeticError_("n must be non-negative")
    return r_k_table(k, size if size is not None else n)[n]


# -------------------------------------------------------------- sigma_k

@lru_cache(maxsize=None)
def sigma_k_table(k, size):
    """sigma_k(1..size) by a divisor sieve; entry 0 is -B_{k+1}/(2(k+1))."""
    if not (k >= 1 and k % 2 == 1 and k <= 11):
        raise ArithmeticError_(f"k={k} must be odd in 1..11")
    n = size + 1
    fits = k * math.log2(max(n, 2)) + math.log2(math.log(n + 2) + 2) + 2 < 62
    arr = np.zeros(n, dtype=np.int64 if fits else object)
    for d in range(1, n):
        arr[d::d] += d ** k
    vals = [int(v) for v in arr]
    vals[0] = sigma_k_zero(k)
    return tuple(vals)


def sigma_k(k, n):
    """Sum of k-th powers of the divisors of n >= 1."""
    if n < 1:
        raise ArithmeticError_("sigma_k needs n >= 1")
    if not (k >= 1 and k % 2 == 1 and k <= 11):
        raise ArithmeticError_(f"k={k} must be odd in 1..11")
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += d ** k
            e = n // d
            if e != d:
                total += e ** k
        d += 1
    return total


@lru_cache(maxsize=None)
def bernoulli(n):
    """Bernoulli number B_n (B_1 = -1/2) as an exact Fraction."""
    if n < 0 or n > 60:
        raise ArithmeticError_(f"bernoulli index {n} outside 0..60")
    if n > 1 and n % 2 == 1:
        return Fraction(0)
    b = [Fraction(1)]
    for m in range(1, n + 1):
        acc = sum(math.comb(m + 1, j) * b[j] for j in range(m))
        b.append(-acc / (m + 1))
    return b[n]


def sigma_k_zero(k):
    """The n = 0 value -B_{k+1}/(2(k+1)) attached to sigma_k."""
    if k % 2 == 0 or k < 1:
        raise ArithmeticError_("sigma_k_zero needs odd k >= 1")
    return -bernoulli(k + 1) / (2 * (k + 1))


# ------------------------------------------------------------------ tau

def _euler_product(n):
    """Coefficients of prod_{m>=1} (1 - q^m) up to q^(n-1)."""
    c = [0] * n
    k = 0
    while True:
        hit = False
        for j in ((k * (3 * k - 1)) // 2, (k * (3 * k + 1)) // 2) if k else (0,):
            if j < n:
                c[j] = -1 if k % 2 else 1
                hit = True
        if not hit and k:
            break
        k += 1
    return c


@lru_cache(maxsize=None)
def tau_table(size):
    """tau(0..size); tau(0) = 0 by convention."""
    if not 0 <= size <= 10 ** 6:
        raise ArithmeticError_("tau table size outside 0..10^6")
    n = max(size, 1)
    p1 = _euler_product(n)
    p2 = poly_mul_trunc(p1, p1, n)
    p4 = poly_mul_trunc(p2, p2, n)
    p8 = poly_mul_trunc(p4, p4, n)
    p16 = poly_mul_trunc(p8, p8, n)
    p24 = poly_mul_trunc(p16, p8, n)
    return tuple([0] + p24[:size])


def tau(n, size=None):
    """Ramanujan's tau(n) for n >= 1."""
    if n < 1:
        raise ArithmeticError_("tau needs n >= 1")
    return tau_table(size if size is not None else n)[n]


# ------------------------------------------------- Kronecker and ideals

def _squarefree(m):
    m = abs(m)
    d = 2
    while d * d <= m:
        if m % (d * d) == 0:
            return False
        d += 1
    return True


def is_fundamental_discriminant(D):
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return _squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False


def _jacobi(a, n):
    # n odd positive
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _kronecker_raw(D, n):
    if n == 0:
        return 1 if abs(D) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if D < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if D % 2 == 0:
            return 0
        if v % 2 and D % 8 in (3, 5):
            result = -result
    return result * _jacobi(D, n)


def kronecker(D, n):
    """Kronecker symbol (D/n) for a negative fundamental discriminant D."""
    if D >= 0 or not is_fundamental_discriminant(D):
        raise ArithmeticError_(f"{D} is not a negative fundamental discriminant")
    if n < 1:
        raise ArithmeticError_("kronecker needs n >= 1")
    return _kronecker_raw(D, n)


# (h, w) for imaginary quadratic fields with small discriminant
CLASS_DATA = {-3: (1, 6), -4: (1, 4), -7: (1, 2), -8: (1, 2), -11: (1, 2)}


@lru_cache(maxsize=None)
def ideal_count_table(D, size, h=None, w=None):
    """F(0..size) for the field of discriminant D; F(0) = h R / w with R = 1."""
    if D >= 0 or not is_fundamental_discriminant(D):
        raise ArithmeticError_(f"{D} is not a negative fundamental discriminant")
    if h is None or w is None:
        if D not in CLASS_DATA:
            raise ArithmeticError_(f"no built-in class data for D={D}; pass h and w")
        h, w = CLASS_DATA[D]
    if h < 1 or w not in (2, 4, 6):
        raise ArithmeticError_("inconsistent field constants")
    n = size + 1
    q = -D
    period = np.array([_kronecker_raw(D, m) for m in range(q)], dtype=np.int64)
    chi = np.resize(period, n)
    f = np.zeros(n, dtype=np.int64)
    for m in range(1, n):
        c = chi[m]
        if c:
            f[m::m] += c
    vals = [int(v) for v in f]
    vals[0] = Fraction(h, w)
    return tuple(vals)


def ideal_count(D, n, size=None, h=None, w=None):
    """Number of integral ideals of norm n (F(0) = hR/w)."""
    if n < 0:
        raise ArithmeticError_("n must be non-negative")
    return ideal_count_table(D, size if size is not None else max(n, 1), h, w)[n]


# ------------------------------------------------------------ characters

@dataclass(frozen=True)
class DirichletCharacter:
    """A Dirichlet character mod q with values exp(2 pi i e_n / order).

    ``exponents[n]`` is None where gcd(n, q) > 1.
    """

    modulus: int
    order: int
    exponents: tuple
    label: str = ""
    parity: str = field(init=False)
    primitive: bool = field(init=False)
    conductor: int = field(init=False)

    def __post_init__(self):
        q = self.modulus
        if q < 1 or len(self.exponents) != q:
            raise ArithmeticError_("value table must have q entries")
        for n in range(q):
            unit = math.gcd(n, q) == 1
            if unit != (self.exponents[n] is not None):
                raise ArithmeticError_(f"chi({n}) must vanish iff gcd({n},{q}) > 1")
        object.__setattr__(self, "exponents",
                           tuple(None if e is None else e % self.order for e in self.exponents))
        # complete multiplicativity on the table
        for m in range(q):
            for n in range(q):
                em, en, emn = self.exponents[m], self.exponents[n], self.exponents[(m * n) % q]
                if em is None or en is None:
                    if emn is not None:
                        raise ArithmeticError_("table is not multiplicative")
                elif emn is None or (em + en - emn) % self.order:
                    raise ArithmeticError_("table is not multiplicative")
        if self.exponents[1 % q] not in (0, None) and q > 1:
            raise ArithmeticError_("chi(1) must be 1")
        e = self.exponents[(q - 1) % q]
        if q > 1 and (2 * e) % self.order:
            raise ArithmeticError_("chi(-1) must be +-1")
        sign = 1 if q <= 2 or e == 0 else -1
        object.__setattr__(self, "parity", "even" if sign == 1 else "odd")
        object.__setattr__(self, "conductor", self._conductor())
        object.__setattr__(self, "primitive", self.conductor == q)

    def _conductor(self):
        q = self.modulus
        for d in range(1, q + 1):
            if q % d:
                continue
            if all(self.exponents[n] == 0 for n in range(q)
                   if math.gcd(n, q) == 1 and (n - 1) % d == 0):
                return d
        return q

    @property
    def principal(self):
        return all(e in (0, None) for e in self.exponents)

    def exponent(self, n):
        return self.exponents[n % self.modulus]

    def __call__(self, n):
        e = self.exponent(n)
        if e is None:
            return 0j
        return _root(e, self.order)

    def conjugate(self):
        return DirichletCharacter(self.modulus, self.order,
                                  tuple(None if e is None else -e for e in self.exponents),
                                  label=self.label + "*")

    def values(self):
        return [self(n) for n in range(self.modulus)]

    @property
    def real(self):
        return all(e is None or (2 * e) % self.order == 0 for e in self.exponents)


def _root(e, order):
    # exact for the quarter turns, cos/sin otherwise
    e %= order
    if (4 * e) % order == 0:
        return (1, 1j, -1, -1j)[(4 * e) // order] + 0j
    return cmath.exp(2j * math.pi * e / order)


_GENERATORS = {3: (2,), 4: (3,), 5: (2,), 7: (3,), 8: (7, 5)}


def builtin_character(q, index):
    """Built-in characters for q in {3, 4, 5, 7, 8}.

    For cyclic groups with generator g, index j gives chi(g^m) = e(j m / phi(q)).
    For q = 8 bit 0 of j sets chi(-1) = -1 and bit 1 sets chi(5) = -1.
    """
    if q not in _GENERATORS:
        raise ArithmeticError_(f"no built-in characters mod {q}")
    phi = sum(1 for n in range(1, q) if math.gcd(n, q) == 1)
    if not 0 <= index < phi:
        raise ArithmeticError_(f"index {index} outside 0..{phi - 1}")
    exps = [None] * q
    gens = _GENERATORS[q]
    if len(gens) == 1:
        g = gens[0]
        x = 1
        for m in range(phi):
            exps[x] = (index * m) % phi
            x = (x * g) % q
        order = phi
    else:
        order = 2
        bits = (index & 1, (index >> 1) & 1)
        for a in range(2):
            for b in range(2):
                x = (pow(gens[0], a, q) * pow(gens[1], b, q)) % q
                exps[x] = (a * bits[0] + b * bits[1]) % 2
    return DirichletCharacter(q, order, tuple(exps), label=f"{q}:{index}")


def parse_character(text):
    """Read a character from its plain-text value table.

    First non-comment line: ``q`` or ``q order``.  Then one line per residue n:
    with a declared order, ``n k`` (chi(n) = e^(2 pi i k/order)) or ``n -``
    for zero; without one, ``n a b`` meaning chi(n) = (a + b i)/10^6, with
    ``n 0 0`` for zero.  Values are snapped to the nearest root of unity.
    """
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ArithmeticError_("empty character table")
    head = lines[0].split()
    try:
        q = int(head[0])
        order = int(head[1]) if len(head) > 1 else None
    except (ValueError, IndexError) as exc:
        raise ArithmeticError_(f"line 1: bad header {lines[0]!r}") from exc
    phi = sum(1 for n in range(1, q + 1) if math.gcd(n, q) == 1)
    exps = [None] * q
    seen = set()
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        try:
            n = int(parts[0]) % q
            if order is not None:
                if len(parts) != 2:
                    raise ValueError
                e = None if parts[1] == "-" else int(parts[1])
                if e is not None:
                    if phi % order:
                        raise ArithmeticError_(f"order {order} does not divide phi({q})")
                    e = e * (phi // order)
            else:
                if len(parts) != 3:
                    raise ValueError
                z = complex(int(parts[1]), int(parts[2])) / 1e6
                if abs(z) < 1e-6:
                    e = None
                else:
                    ang = cmath.phase(z) / (2 * math.pi) * phi
                    e = round(ang)
                    if abs(ang - e) > 1e-4 or abs(abs(z) - 1) > 1e-4:
                        raise ArithmeticError_(f"line {lineno}: value is not a root of unity of order {phi}")
        except ArithmeticError_:
            raise
        except ValueError as exc:
            raise ArithmeticError_(f"line {lineno}: cannot parse {ln!r}") from exc
        if n in seen:
            raise ArithmeticError_(f"line {lineno}: residue {n} given twice")
        seen.add(n)
        exps[n] = e
    if len(seen) != q:
        raise ArithmeticError_(f"expected {q} residues, got {len(seen)}")
    return DirichletCharacter(q, phi, tuple(exps), label=f"{q}:file")


def gauss_sum(chi: DirichletCharacter):
    """tau(chi) = sum_n chi(n) e^(2 pi i n / q) for a primitive chi."""
    if not chi.primitive:
        raise ArithmeticError_("gauss_sum needs a primitive character")
    q = chi.modulus
    total = sum(chi(n) * cmath.exp(2j * math.pi * n / q) for n in range(1, q + 1))
    if abs(abs(total) - math.sqrt(q)) > 1e-12 * math.sqrt(q):
        raise ArithmeticError_("|tau(chi)| differs from sqrt(q)")
    return total


# --------------------------------------------------- coefficient tables

@dataclass(frozen=True)
class CoefficientTable:
    """Exact coefficient sequence a(0..N) with a float or complex view.

    ``kind`` is one of RK, SIGMA, TAU, ONES, CHAR, IDEAL; ``param`` carries
    k, the character and twist, or D.  ``values`` are exact (int, Fraction,
    or character exponents for CHAR).
    """

    kind: str
    param: object
    values: tuple
    scale: complex = 1.0

    @property
    def size(self):
        return len(self.values) - 1

    @property
    def is_complex(self):
        return self.kind == "CHAR" or isinstance(self.scale, complex)

    def exact(self, n):
        return self.values[n]

    def mp_value(self, n):
        """scale * a(n) as a gmpy2 number at the current context precision."""
        if self.kind == "CHAR":
            chi, twist = self.param
            e = chi.exponent(n)
            if e is None:
                return gmpy2.mpc(0)
            ang = 2 * gmpy2.const_pi() * e / chi.order
            z = gmpy2.mpc(gmpy2.cos(ang), gmpy2.sin(ang))
            if twist == "n":
                z *= n
            return z * gmpy2.mpc(complex(self.scale))
        v = self.values[n]
        if isinstance(v, Fraction):
            v = gmpy2.mpfr(gmpy2.mpq(v.numerator, v.denominator))
        else:
            v = gmpy2.mpfr(gmpy2.mpz(v))
        if isinstance(self.scale, complex):
            return gmpy2.mpc(v) * gmpy2.mpc(self.scale)
        return v * gmpy2.mpfr(self.scale) if self.scale != 1.0 else v

    def numeric(self, n0=1, n1=None):
        """Float (or complex) array of scale * a(n) for n0 <= n <= n1."""
        n1 = self.size if n1 is None else n1
        if self.kind == "CHAR":
            chi, twist = self.param
            order = chi.order
            out = np.zeros(n1 - n0 + 1, dtype=complex)
            ns = np.arange(n0, n1 + 1)
            ex = np.array([-1 if e is None else e for e in chi.exponents])[ns % chi.modulus]
            root = np.array([_root(e, order) for e in range(order)])
            nz = ex >= 0
            out[nz] = root[ex[nz]]
            if twist == "n":
                out *= ns
            return out * self.scale
        vals = np.array([float(v) for v in self.values[n0:n1 + 1]])
        if self.scale != 1.0:
            return vals * self.scale
        return vals
