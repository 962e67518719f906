"""Hecke systems: coefficient pairs, exponent sequences and pole data.

A system packages two Dirichlet series

    phi(s) = sum a(n) lambda_n^-s,    psi(s) = sum b(n) mu_n^-s

tied by (2 pi)^-s Gamma(s) phi(s) = (2 pi)^(s - delta) Gamma(delta - s) psi(delta - s).
The pole data of phi (simple poles only) together with phi(0) is the single
source for every residual function: Q_rho(x), P(x), R_rho(s) and the
corresponding data of psi, which is derived from the functional equation.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
import numpy as np

from . import arith
from .arith import CoefficientTable, DirichletCharacter
from .specfun import gamma, log_gamma

__all__ = [
    "SystemError_",
    "MonomialSum",
    "ExponentSequence",
    "HeckeSystem",
    "system_rk",
    "system_sigma",
    "system_tau",
    "system_zeta",
    "system_character",
    "system_dedekind",
    "get_system",
    "REGISTRY_EXAMPLES",
    "DEFAULT_TABLE_SIZE",
    "residual_q",
    "residual_p",
    "residual_r",
    "zeta_even",
]

DEFAULT_TABLE_SIZE = 100000


class SystemError_(ValueError):
    """Invalid system data or unknown registry id."""


# ----------------------------------------------------------- monomials

def _as_float(c):
    return float(c) if not isinstance(c, complex) else c


@dataclass(frozen=True)
class MonomialSum:
    """Finite sum of c * x^e with distinct exponents in ascending order."""

    terms: tuple = ()

    @staticmethod
    def build(pairs):
        acc = {}
        for c, e in pairs:
            key = Fraction(e).limit_denominator(10 ** 9) if not isinstance(e, Fraction) else e
            acc[key] = acc.get(key, 0) + c
        items = sorted((e, c) for e, c in acc.items() if c != 0)
        return MonomialSum(tuple((c, e) for e, c in items))

    def __call__(self, x):
        return math.fsum(float(c) * float(x) ** float(e) for c, e in self.terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def coefficient(self, e):
        e = Fraction(e).limit_denominator(10 ** 9)
        for c, ex in self.terms:
            if ex == e:
                return c
        return 0

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{float(c):.17g}*x^{float(e):g}" for c, e in self.terms)


# ------------------------------------------------- exponent sequences

@dataclass(frozen=True)
class ExponentSequence:
    """lambda_n = n^power * sqrt(scale_sq), kept exact for multiprecision use."""

    power: int
    scale_sq: Fraction

    def values(self, ns):
        ns = np.asarray(ns, dtype=float)
        return ns ** self.power * math.sqrt(self.scale_sq)

    def sqrt_values(self, ns):
        ns = np.asarray(ns, dtype=float)
        return ns ** (0.5 * self.power) * math.sqrt(math.sqrt(self.scale_sq))

    def mp(self, n):
        s = gmpy2.sqrt(gmpy2.mpq(self.scale_sq.numerator, self.scale_sq.denominator))
        return gmpy2.mpz(n) ** self.power * s

    def count_upto(self, x):
        """Number of n >= 1 with lambda_n <= x."""
        if x <= 0:
            return 0
        base = x / math.sqrt(self.scale_sq)
        n = int(base ** (1.0 / self.power))
        while n >= 1 and float(self.values([n])[0]) > x:
            n -= 1
        while float(self.values([n + 1])[0]) <= x:
            n += 1
        return n

    def inverse(self, x):
        """The real n with lambda_n = x."""
        return (x / math.sqrt(self.scale_sq)) ** (1.0 / self.power)


# ---------------------------------------------------------------- system

def zeta_even(m):
    """zeta(2m) for m >= 1 from the Bernoulli numbers."""
    b = arith.bernoulli(2 * m)
    return float((-1) ** (m + 1) * b) * (2 * math.pi) ** (2 * m) / (2 * math.factorial(2 * m))


@dataclass(frozen=True)
class HeckeSystem:
    """One pair of Dirichlet series satisfying the Gamma(s) functional equation.

    ``poles`` lists (s0, r0) with r0 the residue of phi at s0.  ``growth``
    is (C, theta) with |a(n)| <= C lambda_n^theta and |b(n)| <= C mu_n^theta,
    checked on the table at construction and assumed beyond it.
    """

    name: str
    delta: Fraction
    a: CoefficientTable
    lam: ExponentSequence
    b: CoefficientTable
    mu: ExponentSequence
    sigma_a_star: Fraction
    phi_at_zero: object
    poles: tuple
    growth: tuple
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.delta > 0:
            raise SystemError_("delta must be positive")
        if self.a.size != self.b.size:
            raise SystemError_("a and b tables must have the same length")
        self._check_growth(self.a, self.lam, "a")
        self._check_growth(self.b, self.mu, "b")

    def _check_growth(self, table, seq, side):
        c, theta = self.growth
        ns = np.arange(1, table.size + 1)
        mags = np.abs(table.numeric(1, table.size))
        bound = c * seq.values(ns) ** theta
        bad = np.nonzero(mags > bound * (1 + 1e-12))[0]
        if bad.size:
            n = int(ns[bad[0]])
            raise SystemError_(f"{self.name}: growth bound fails for {side}({n})")

    @property
    def table_size(self):
        return self.a.size

    @property
    def self_dual(self):
        return self.a is self.b or (self.a == self.b and self.lam == self.mu)

    # residue data: location z -> residue of Gamma(z) * series(z)
    @property
    def residues(self):
        out = []
        if self.phi_at_zero != 0:
            out.append((Fraction(0), self.phi_at_zero))
        for s0, r0 in self.poles:
            if r0 != 0:
                out.append((Fraction(s0), gamma(float(s0)) * float(r0)))
        return tuple(out)

    @property
    def dual_residues(self):
        """Residues of Gamma(z) psi(z), read off the functional equation."""
        d = self.delta
        acc = {}
        if self.phi_at_zero != 0:
            acc[d] = -(2 * math.pi) ** float(d) * float(self.phi_at_zero)
        for s0, r0 in self.poles:
            if r0 == 0:
                continue
            z = d - Fraction(s0)
            val = -(2 * math.pi) ** float(d - 2 * Fraction(s0)) * gamma(float(s0)) * float(r0)
            acc[z] = acc.get(z, 0.0) + val
        return tuple(sorted(acc.items()))

    @property
    def psi_at_zero(self):
        for z, r in self.dual_residues:
            if z == 0:
                return r
        return 0.0


# ------------------------------------------------------ residual functions

def _residual_q_from(residues, rho):
    pairs = []
    for z, r in residues:
        e = z + Fraction(rho).limit_denominator(10 ** 9)
        pairs.append((float(r) / gamma(float(z) + rho + 1), e))
    return MonomialSum.build(pairs)


def residual_q(system: HeckeSystem, rho=0) -> MonomialSum:
    """Q_rho(x) as a monomial sum in x."""
    if rho < 0:
        raise SystemError_("rho must be non-negative")
    return _residual_q_from(system.residues, rho)


def residual_q_dual(system: HeckeSystem, rho=0) -> MonomialSum:
    """The analogue of Q_rho for the psi side."""
    return _residual_q_from(system.dual_residues, rho)


def residual_p(system: HeckeSystem) -> MonomialSum:
    """P(x) = phi(0) + sum Gamma(s0) r0 x^-s0."""
    return MonomialSum.build([(float(r), -z) for z, r in system.residues])


def residual_r(system: HeckeSystem, rho: int) -> MonomialSum:
    """R_rho(s) as a monomial sum in s (all exponents negative)."""
    if rho not in (0, 1, 2):
        raise SystemError_("rho must be 0, 1 or 2")
    pairs = []
    for z, r in system.residues:
        zf = float(z)
        logc = (log_gamma(2 * zf + 2 * rho + 1) - rho * math.log(2.0)
                - log_gamma(zf + rho + 1))
        pairs.append((float(r) * math.exp(logc), -(2 * z + 2 * rho + 1)))
    return MonomialSum.build(pairs)


# ------------------------------------------------------------- builders

def _table(kind, param, values, scale=1.0):
    return CoefficientTable(kind, param, tuple(values), scale)


def system_rk(k, table_size=DEFAULT_TABLE_SIZE):
    """a = b = r_k, lambda_n = n/2, delta = k/2."""
    if not (isinstance(k, int) and 2 <= k <= 12):
        raise SystemError_(f"rk needs k in 2..12, got {k}")
    tab = _table("RK", k, arith.r_k_table(k, table_size))
    seq = ExponentSequence(1, Fraction(1, 4))
    half = Fraction(k, 2)
    res = (2 * math.pi) ** (k / 2) / gamma(k / 2)
    return HeckeSystem(
        name=f"rk:{k}", delta=half, a=tab, lam=seq, b=tab, mu=seq,
        sigma_a_star=half, phi_at_zero=Fraction(-1), poles=((half, res),),
        growth=(4.0 ** k, k / 2), info={"k": k})


def system_sigma(k, table_size=DEFAULT_TABLE_SIZE):
    """a = sigma_k, b = (-1)^((k+1)/2) sigma_k, lambda_n = n, delta = k+1."""
    if not (isinstance(k, int) and k % 2 == 1 and 1 <= k <= 11):
        raise SystemError_(f"sigma needs odd k in 1..11, got {k}")
    vals = arith.sigma_k_table(k, table_size)
    a = _table("SIGMA", k, vals)
    sign = -1 if ((k + 1) // 2) % 2 else 1
    b = _table("SIGMA", k, vals, scale=float(sign))
    seq = ExponentSequence(1, Fraction(1))
    poles = [(Fraction(k + 1), zeta_even((k + 1) // 2))]
    if k == 1:
        poles.append((Fraction(1), Fraction(-1, 2)))
    return HeckeSystem(
        name=f"sigma:{k}", delta=Fraction(k + 1), a=a, lam=seq, b=b, mu=seq,
        sigma_a_star=Fraction(k + 1), phi_at_zero=arith.bernoulli(k + 1) / (2 * (k + 1)),
        poles=tuple(poles), growth=(4.0, k + 0.5), info={"k": k, "sign": sign})


def system_tau(table_size=DEFAULT_TABLE_SIZE):
    """a = b = tau, lambda_n = n, delta = 12; phi is entire."""
    tab = _table("TAU", None, arith.tau_table(table_size))
    seq = ExponentSequence(1, Fraction(1))
    return HeckeSystem(
        name="tau", delta=Fraction(12), a=tab, lam=seq, b=tab, mu=seq,
        sigma_a_star=Fraction(13, 2), phi_at_zero=Fraction(0), poles=(),
        growth=(1.0, 6.5))


def system_zeta(table_size=DEFAULT_TABLE_SIZE):
    """a = b = 1, lambda_n = n^2/2, delta = 1/2."""
    vals = [0] + [1] * table_size
    tab = _table("ONES", None, vals)
    seq = ExponentSequence(2, Fraction(1, 4))
    half = Fraction(1, 2)
    return HeckeSystem(
        name="zeta", delta=half, a=tab, lam=seq, b=tab, mu=seq,
        sigma_a_star=half, phi_at_zero=Fraction(-1, 2), poles=((half, 1 / math.sqrt(2)),),
        growth=(1.0, 0.0))


def system_character(chi: DirichletCharacter, table_size=DEFAULT_TABLE_SIZE):
    """Odd chi: a = n chi(n), delta = 3/2; even chi: a = chi(n), delta = 1/2.

    Both use lambda_n = mu_n = n^2/(2q); the b side carries the Gauss-sum
    factor and the conjugate character.
    """
    if chi.principal or not chi.primitive:
        raise SystemError_("need a primitive non-principal character")
    q = chi.modulus
    tg = arith.gauss_sum(chi)
    chibar = chi.conjugate()
    idx = tuple(range(table_size + 1))
    seq = ExponentSequence(2, Fraction(1, 4 * q * q))
    if chi.parity == "odd":
        twist, delta, star = "n", Fraction(3, 2), Fraction(1)
        factor = -1j * tg / math.sqrt(q)
        growth = (math.sqrt(2 * q) * (1 + 1e-12), 0.5)
    else:
        twist, delta, star = "plain", Fraction(1, 2), Fraction(1, 2)
        factor = tg / math.sqrt(q)
        growth = (1.0 + 1e-12, 0.0)
    a = CoefficientTable("CHAR", (chi, twist), idx)
    b = CoefficientTable("CHAR", (chibar, twist), idx, scale=complex(factor))
    return HeckeSystem(
        name=f"char:{chi.label}" if chi.label else f"char:{q}",
        delta=delta, a=a, lam=seq, b=b, mu=seq, sigma_a_star=star,
        phi_at_zero=Fraction(0), poles=(), growth=growth,
        info={"chi": chi, "gauss": tg, "parity": chi.parity, "q": q})


def system_dedekind(D, h=None, w=None, table_size=DEFAULT_TABLE_SIZE):
    """a = b = F (ideal counts), lambda_n = n/d with d = sqrt|D|, delta = 1."""
    if (h is None) != (w is None):
        raise SystemError_("pass both h and w or neither")
    if h is None:
        if D not in arith.CLASS_DATA:
            raise SystemError_(f"no built-in class data for D={D}")
        h, w = arith.CLASS_DATA[D]
    try:
        vals = arith.ideal_count_table(D, table_size, h, w)
    except arith.ArithmeticError_ as exc:
        raise SystemError_(str(exc)) from exc
    tab = _table("IDEAL", D, vals)
    d = math.sqrt(-D)
    seq = ExponentSequence(1, Fraction(1, -D))
    hw = Fraction(h, w)
    return HeckeSystem(
        name=f"dedekind:{D}", delta=Fraction(1), a=tab, lam=seq, b=tab, mu=seq,
        sigma_a_star=Fraction(1), phi_at_zero=-hw,
        poles=((Fraction(1), 2 * math.pi * float(hw)),),
        growth=(2.0 * math.sqrt(d), 0.5), info={"D": D, "h": h, "w": w, "d": d})


# --------------------------------------------------------------- registry

REGISTRY_EXAMPLES = ("rk:2", "sigma:1", "tau", "zeta", "char:4:1", "char:5:2", "dedekind:-4")

_CACHE = {}
_CACHE_LOCK = threading.Lock()


def get_system(sid: str, table_size=DEFAULT_TABLE_SIZE) -> HeckeSystem:
    """Look up a system by id: rk:k, sigma:k, tau, zeta, char:q:index, dedekind:D."""
    key = (sid.strip(), table_size)
    with _CACHE_LOCK:
        if key in _CACHE:
            return _CACHE[key]
        sys_ = _build_system(sid, table_size)
        _CACHE[key] = sys_
        return sys_


def _build_system(sid, table_size):
    parts = sid.strip().split(":")
    head = parts[0]
    try:
        if head == "rk" and len(parts) == 2:
            sys_ = system_rk(int(parts[1]), table_size)
        elif head == "sigma" and len(parts) == 2:
            sys_ = system_sigma(int(parts[1]), table_size)
        elif head == "tau" and len(parts) == 1:
            sys_ = system_tau(table_size)
        elif head == "zeta" and len(parts) == 1:
            sys_ = system_zeta(table_size)
        elif head == "char" and len(parts) == 3:
            chi = arith.builtin_character(int(parts[1]), int(parts[2]))
            sys_ = system_character(chi, table_size)
        elif head == "dedekind" and len(parts) == 2:
            sys_ = system_dedekind(int(parts[1]), table_size=table_size)
        else:
            raise SystemError_(f"unknown system id {sid!r}")
    except arith.ArithmeticError_ as exc:
        raise SystemError_(f"{sid}: {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, SystemError_):
            raise
        raise SystemError_(f"malformed system id {sid!r}") from exc
    return sys_
