"""Series evaluation with error accounting, and the identity checkers.

Two summation engines carry everything:

* ``decaying_sum`` handles series whose terms decay like exp(-c sqrt(n)) or
  faster (Bessel-K series, exponential series, their derivatives and the
  incomplete Bessel integrals).  The cut-off comes from a growth-bound
  envelope, and terms whose binary64 rounding would swamp a cancelling sum
  are recomputed in multiprecision.

* ``hurwitz_sum`` handles sum b(n) (alpha + gamma mu_n)^-w, which converges
  only algebraically.  The tail beyond a cut-off M is rewritten by partial
  summation against the Riesz means of b, whose main terms come from the
  residues of Gamma(z) psi(z); what remains is a short sequence of boundary
  corrections that shrink like M^(-1/2) each.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
import numpy as np

from .arith import (CoefficientTable, DirichletCharacter, bernoulli, builtin_character,
                    sigma_k_zero)
from .hecke import (ExponentSequence, HeckeSystem, MonomialSum, get_system,
                    residual_p, residual_q, residual_r, system_character, system_dedekind)
from .specfun import (_k_half_integer_mp, bessel_j_array, bessel_k_mp_many,
                      integrate_de, is_half_integer, log_bessel_k_array,
                      log_gamma)

__all__ = [
    "PreconditionError",
    "TableExhausted",
    "SeriesResult",
    "VerificationRecord",
    "IDENTITY_IDS",
    "TOLERANCES",
    "eval_k_series",
    "eval_hurwitz_series",
    "residual_bessel_integral",
    "decaying_sum",
    "hurwitz_sum",
    "check_thm3",
    "check_thm2",
    "check_modular",
    "check_riesz",
    "check_cn_exponential",
    "check_popov",
    "check_sigma_closed",
    "check_sigma_exp",
    "check_tau",
    "check_tau_exp",
    "check_watson",
    "check_char",
    "check_dedekind",
    "check_dedekind_exp",
    "tolerance_for",
    "skipped_record",
    "failed_record",
    "ABSOLUTE_TOLERANCE",
]

_EPS = 2.0 ** -52
_LOG2 = math.log(2.0)
_LOGPI = math.log(math.pi)
K_REL_ERR = 5e-14      # binary64 K_nu accuracy assumed in rounding bounds
QUAD_REL_ERR = 2e-14   # binary64 quadrature accuracy for the incomplete integrals

IDENTITY_IDS = ("MODULAR", "RIESZ", "THM2", "THM3", "CN_EXP", "POPOV", "SIGMA_CLOSED",
                "SIGMA_EXP", "TAU_CLOSED", "TAU_EXP", "WATSON", "CHAR_ODD", "CHAR_EVEN",
                "DEDEKIND", "DEDEKIND_EXP")

TOLERANCES = {
    "MODULAR": 1e-10, "RIESZ": 1e-3, "THM2": 1e-6, "THM3": 1e-8, "CN_EXP": 1e-8,
    "POPOV": 1e-8, "SIGMA_CLOSED": 1e-8, "SIGMA_EXP": 1e-8, "TAU_CLOSED": 1e-8,
    "TAU_EXP": 1e-8, "WATSON": 1e-8, "CHAR_ODD": 1e-8, "CHAR_EVEN": 1e-8,
    "DEDEKIND": 1e-8, "DEDEKIND_EXP": 1e-8,
}

# identities whose tolerance is absolute rather than relative
ABSOLUTE_TOLERANCE = frozenset({"RIESZ"})


class PreconditionError(ValueError):
    """A parameter point lies outside the identity's hypotheses."""


class TableExhausted(RuntimeError):
    """The coefficient table is shorter than the required cut-off."""

    def __init__(self, required, available):
        super().__init__(f"need {required} coefficients, table has {available}")
        self.required = required
        self.available = available


@dataclass(frozen=True)
class SeriesResult:
    """A truncated series with its truncation and rounding bounds.

    ``tail_kind`` is "certified" when the tail bound comes from growth bounds
    and a Bessel envelope, "estimate" when it is an extrapolation.
    """

    value: complex | float
    tail_bound: float
    terms_used: int
    rounding_bound: float = 0.0
    tail_kind: str = "certified"
    promoted: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.tail_bound) and self.tail_bound >= 0):
            raise ValueError("tail bound must be finite and non-negative")
        if self.terms_used < 1:
            raise ValueError("terms_used must be positive")
        if not np.isfinite(self.value):
            raise ValueError("series value is not finite")

    @property
    def error_bound(self):
        return self.tail_bound + self.rounding_bound


# ================================================================ engines

def _fsum(values):
    values = np.asarray(values)
    if np.iscomplexobj(values):
        return complex(math.fsum(values.real), math.fsum(values.imag))
    return math.fsum(values)


def _mp_to_py(v):
    if isinstance(v, gmpy2.mpc):
        return complex(float(v.real), float(v.imag))
    return float(v)


class _Family:
    """A sequence of terms t_n (n >= 1) given in three forms.

    ``terms`` returns binary64 values, ``terms_mp`` multiprecision ones and
    ``log_envelope`` an upper bound for log|t_n| that is eventually
    decreasing.  ``rel_err`` is the relative accuracy of ``terms``.
    """

    rel_err = 4 * _EPS

    def __init__(self, table: CoefficientTable, seq: ExponentSequence, growth):
        self.table = table
        self.seq = seq
        self.log_c = math.log(growth[0])
        self.theta = growth[1]

    def log_coeff_bound(self, lam):
        return self.log_c + self.theta * np.log(lam)

    def coeffs(self, ns):
        return self.table.numeric(int(ns[0]), int(ns[-1]))

    def coeffs_mp(self, ns):
        return [self.table.mp_value(int(n)) for n in ns]


def _log_k_envelope(order, x):
    """Upper bound for log K_order(x), twice the integral-representation bound."""
    order = abs(order)
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    big = x > max(2.0 * (order - 0.5), 1.0)
    xb = x[big]
    base = 0.5 * np.log(np.pi / (2 * xb)) - xb + _LOG2
    if order > 0.5:
        base = base - (order + 0.5) * np.log1p(-(order - 0.5) / (2 * xb))
    out[big] = base
    if (~big).any():
        out[~big] = log_bessel_k_array(order, x[~big]) + _LOG2
    return out


class KFamily(_Family):
    """t_n = c_n lambda_n^power K_order(s sqrt(lambda_n))."""

    rel_err = K_REL_ERR

    def __init__(self, table, seq, growth, s, order, power):
        super().__init__(table, seq, growth)
        self.s, self.order, self.power = float(s), float(order), float(power)

    def log_envelope(self, ns):
        lam = self.seq.values(ns)
        x = self.s * np.sqrt(lam)
        return self.log_coeff_bound(lam) + self.power * np.log(lam) + _log_k_envelope(self.order, x)

    def terms(self, ns):
        lam = self.seq.values(ns)
        x = self.s * np.sqrt(lam)
        with np.errstate(under="ignore"):
            mag = np.exp(self.power * np.log(lam) + log_bessel_k_array(self.order, x))
        return self.coeffs(ns) * mag

    def terms_mp(self, ns, prec):
        lam = [self.seq.mp(int(n)) for n in ns]
        s = gmpy2.mpfr(self.s)
        xs = [s * gmpy2.sqrt(v) for v in lam]
        ks = bessel_k_mp_many(self.order, xs, prec + 16)
        p = gmpy2.mpfr(self.power)
        cs = self.coeffs_mp(ns)
        return [c * (v ** p) * k for c, v, k in zip(cs, lam, ks)]


class ExpFamily(_Family):
    """t_n = c_n exp(-x lambda_n)."""

    def __init__(self, table, seq, growth, x):
        super().__init__(table, seq, growth)
        self.x = float(x)

    def log_envelope(self, ns):
        lam = self.seq.values(ns)
        return self.log_coeff_bound(lam) - self.x * lam

    def terms(self, ns):
        with np.errstate(under="ignore"):
            return self.coeffs(ns) * np.exp(-self.x * self.seq.values(ns))

    def terms_mp(self, ns, prec):
        x = gmpy2.mpfr(self.x)
        cs = self.coeffs_mp(ns)
        return [c * gmpy2.exp(-x * self.seq.mp(int(n))) for c, n in zip(cs, ns)]


def _cn_polynomial(rho):
    """(-(1/s) d/ds)^rho [s^-1 e^(-s c)] = sum p[i, j] s^-i c^j e^(-s c)."""
    poly = {(1, 0): 1}
    for _ in range(rho):
        nxt = {}
        for (i, j), p in poly.items():
            # -(1/s) d/ds of s^-i c^j e^(-sc) = i s^-(i+2) c^j + s^-(i+1) c^(j+1)
            nxt[(i + 2, j)] = nxt.get((i + 2, j), 0) + i * p
            nxt[(i + 1, j + 1)] = nxt.get((i + 1, j + 1), 0) + p
        poly = {k: v for k, v in nxt.items() if v}
    return sorted(poly.items())


class CNFamily(_Family):
    """t_n = c_n (-(1/s) d/ds)^rho [s^-1 exp(-s sqrt(lambda_n))]."""

    def __init__(self, table, seq, growth, s, rho):
        super().__init__(table, seq, growth)
        self.s = float(s)
        self.poly = _cn_polynomial(rho)

    def _poly(self, c):
        return sum(p * self.s ** (-i) * c ** j for (i, j), p in self.poly)

    def log_envelope(self, ns):
        lam = self.seq.values(ns)
        c = np.sqrt(lam)
        return self.log_coeff_bound(lam) + np.log(self._poly(c)) - self.s * c

    def terms(self, ns):
        c = self.seq.sqrt_values(ns)
        with np.errstate(under="ignore"):
            return self.coeffs(ns) * self._poly(c) * np.exp(-self.s * c)

    def terms_mp(self, ns, prec):
        s = gmpy2.mpfr(self.s)
        out = []
        for cf, n in zip(self.coeffs_mp(ns), ns):
            c = gmpy2.sqrt(self.seq.mp(int(n)))
            poly = sum(p * s ** (-i) * c ** j for (i, j), p in self.poly)
            out.append(cf * poly * gmpy2.exp(-s * c))
        return out


class IncompleteKFamily(_Family):
    """t_n = c_n / Gamma(rho+1) * int_{lambda_n}^inf (x - lambda_n)^rho x^(nu/2) K_nu(s sqrt x) dx.

    Each integral is computed by double-exponential quadrature in
    y = x - lambda_n, batched across terms.
    """

    rel_err = QUAD_REL_ERR
    _T_LO, _T_HI = -5.5, 8.0

    def __init__(self, table, seq, growth, s, nu, rho):
        super().__init__(table, seq, growth)
        self.s, self.nu, self.rho = float(s), float(nu), float(rho)
        self.log_gamma_rho = math.lgamma(self.rho + 1)

    def _scale(self, lam):
        return 2.0 * (np.sqrt(lam) + 1.0 / self.s) / self.s

    def log_envelope(self, ns):
        # twice the closed form (2/s)^(rho+1) lam^((nu+rho+1)/2) K_{nu+rho+1}(s sqrt(lam))
        lam = self.seq.values(ns)
        order = self.nu + self.rho + 1
        return (self.log_coeff_bound(lam) + (self.rho + 1) * math.log(2 / self.s)
                + 0.5 * order * np.log(lam) + _log_k_envelope(order, self.s * np.sqrt(lam)) + _LOG2)

    def _integrand(self, lam, y):
        x = lam + y
        with np.errstate(under="ignore", divide="ignore"):
            logv = (self.rho * np.log(y) + 0.5 * self.nu * np.log(x)
                    + log_bessel_k_array(self.nu, self.s * np.sqrt(x)))
            return np.exp(logv)

    def _quad_level(self, lam, scale, t):
        u = np.exp(-t)
        y = scale[:, None] * np.exp(t - u)[None, :]
        w = y * (1.0 + u)[None, :]
        with np.errstate(under="ignore"):
            return (self._integrand(lam[:, None], y) * w).sum(axis=1)

    def terms(self, ns):
        out = np.empty(len(ns))
        for lo in range(0, len(ns), 1024):
            chunk = ns[lo:lo + 1024]
            lam = self.seq.values(chunk)
            scale = self._scale(lam)
            h = 0.125
            t = np.arange(self._T_LO, self._T_HI + h / 2, h)
            acc = self._quad_level(lam, scale, t)
            prev = h * acc
            for _ in range(6):
                h *= 0.5
                tn = np.arange(self._T_LO + h, self._T_HI, 2 * h)
                acc = acc + self._quad_level(lam, scale, tn)
                cur = h * acc
                if np.all(np.abs(cur - prev) <= 1e-14 * np.abs(cur)):
                    break
                prev = cur
            else:
                raise ConvergenceError_("incomplete Bessel integral did not converge")
            out[lo:lo + len(chunk)] = cur
        return self.coeffs(ns) * out * math.exp(-self.log_gamma_rho)

    def terms_mp(self, ns, prec):
        rho = gmpy2.mpfr(self.rho)
        nu = gmpy2.mpfr(self.nu)
        half_nu = nu / 2
        s = gmpy2.mpfr(self.s)
        out = []
        half_int = is_half_integer(self.nu)
        for cf, n in zip(self.coeffs_mp(ns), ns):
            lam = self.seq.mp(int(n))
            scale = gmpy2.mpfr(float(self._scale(np.array([float(lam)]))[0]))

            def f(ts):
                ys, ws, xs = [], [], []
                for t in ts:
                    u = gmpy2.exp(-t)
                    y = scale * gmpy2.exp(t - u)
                    ys.append(y)
                    ws.append(y * (1 + u))
                    xs.append(s * gmpy2.sqrt(lam + y))
                if half_int:
                    ks = [_k_half_integer_mp(abs(self.nu), x) for x in xs]
                else:
                    ks = bessel_k_mp_many(self.nu, xs, prec + 16)
                total = gmpy2.mpfr(0)
                for y, w, k in zip(ys, ws, ks):
                    total += (y ** rho if self.rho else 1) * (lam + y) ** half_nu * k * w
                return total

            h = gmpy2.mpfr(1) / 8
            nlo = int(self._T_LO * 8)
            nhi = int(self._T_HI * 8)
            acc = f([gmpy2.mpfr(j) / 8 for j in range(nlo, nhi + 1)])
            prev = h * acc
            denom = 8
            for _ in range(6):
                denom *= 2
                h /= 2
                acc += f([gmpy2.mpfr(j) / denom for j in range(nlo * denom // 8 + 1, nhi * denom // 8, 2)])
                cur = h * acc
                diff = abs(cur - prev)
                # double-exponential rules roughly square the error per halving
                if cur == 0 or (diff / abs(cur)) ** 2 <= gmpy2.mpfr(2) ** (-prec):
                    break
                prev = cur
            else:
                raise ConvergenceError_("multiprecision incomplete integral did not converge")
            out.append(cf * cur / gmpy2.exp(gmpy2.lgamma(rho + 1)[0]))
        return out


class ConvergenceError_(RuntimeError):
    pass


def _cutoff(family, log_drop, n_start=1):
    """Smallest N such that the envelope tail past N is below exp(-log_drop)
    times the envelope peak.  Returns (N, log of tail bound past N, log peak)."""
    chunk = 4096
    lo = n_start
    logs = []
    peak = -math.inf
    while True:
        ns = np.arange(lo, lo + chunk)
        le = family.log_envelope(ns)
        logs.append(le)
        peak = max(peak, float(le.max()))
        # stop once the last chunk is far below the peak and decreasing
        if le[-1] < peak - log_drop - 60 and le[-1] <= le[-2]:
            break
        lo += chunk
        chunk *= 2
        if lo > 10 ** 9:
            raise TableExhausted(lo, family.table.size)
    allv = np.concatenate(logs)
    # reverse cumulative log-sum-exp of the envelope
    m = peak
    tail = np.cumsum(np.exp(allv[::-1] - m))[::-1]
    # tail[i] covers n >= n_start + i; the final stretch decays geometrically
    with np.errstate(divide="ignore"):
        logtail = np.log(tail) + m
    ok = np.nonzero(logtail < peak - log_drop)[0]
    first = int(ok[0]) if ok.size else len(allv) - 1
    # all terms with index < first are summed; the tail starts at n_start + first
    n_cut = n_start + first - 1
    return max(n_cut, n_start), float(logtail[first]), peak


def _abs_sum(values):
    return math.fsum(np.abs(values))


def decaying_sum(family: _Family, tol=1e-8, n_start=1, table_limit=None) -> SeriesResult:
    """Sum t_n for n >= n_start with truncation and rounding error control.

    ``tol`` is the relative accuracy the caller needs; the tail is pushed
    below 1e-3 tol |S| and the rounding error below 0.02 tol |S|, promoting
    the largest terms to multiprecision when binary64 cannot deliver that.
    """
    table_limit = family.table.size if table_limit is None else table_limit
    log_drop = 50.0
    while True:
        n_cut, log_tail, log_peak = _cutoff(family, log_drop, n_start)
        if n_cut > table_limit:
            raise TableExhausted(n_cut, table_limit)
        ns = np.arange(n_start, n_cut + 1)
        terms = family.terms(ns)
        total = _fsum(terms)
        absum = _abs_sum(terms)
        tail = math.exp(log_tail)
        if tail <= 1e-3 * tol * abs(total) or tail == 0.0 or log_drop > 400:
            break
        # the sum cancels more than expected: ask for a deeper cut-off
        need = math.log(max(tail, 1e-300)) - math.log(max(1e-3 * tol * abs(total), 1e-300))
        log_drop += max(need + 5.0, 10.0)
    rel = family.rel_err
    promoted = np.zeros(len(ns), dtype=bool)
    mp_total = 0
    mp_err = 0.0
    prec = 128
    order = np.argsort(-np.abs(terms))
    cum_rest = absum
    value = total
    err_float = rel * absum
    for _ in range(12):
        budget = 0.02 * tol * abs(value)
        if err_float <= budget:
            break
        if err_float >= 0.5 * abs(value):
            target_rest = cum_rest * 1e-6
        else:
            target_rest = 0.5 * budget / rel
        # promote the largest remaining terms until the rest is small enough
        mags = np.abs(terms[order])
        rest_after = absum - np.cumsum(mags)
        k = int(np.searchsorted(-rest_after, -target_rest))
        k = min(max(k + 1, int(promoted.sum()) + 1), len(order))
        new = [i for i in order[:k] if not promoted[i]]
        if new:
            new_ns = ns[sorted(new)]
            with gmpy2.context(precision=prec + 32):
                vals = family.terms_mp(new_ns, prec)
                mp_total = mp_total + sum(vals)
            mp_err += 2.0 ** (-prec + 4) * math.fsum(abs(_mp_to_py(v)) for v in vals)
            promoted[sorted(new)] = True
        rest = terms[~promoted]
        cum_rest = _abs_sum(rest)
        err_float = rel * cum_rest
        with gmpy2.context(precision=prec + 32):
            value = _mp_to_py(mp_total + _mp_sum_floats(rest))
        if mp_err > 0.02 * tol * abs(value) and prec < 1024:
            prec *= 2
            promoted[:] = False
            mp_total = 0
            mp_err = 0.0
            cum_rest = absum
            err_float = rel * absum
            value = total
            continue
        if promoted.all():
            break
    return SeriesResult(value=value, tail_bound=tail, terms_used=len(ns),
                        rounding_bound=err_float + mp_err + 4 * _EPS * abs(value),
                        promoted=int(promoted.sum()))


def _mp_sum_floats(values):
    values = np.asarray(values)
    if np.iscomplexobj(values):
        return gmpy2.mpc(math.fsum(values.real), math.fsum(values.imag))
    return gmpy2.mpfr(math.fsum(values))


# ---------------------------------------------------------- Hurwitz sums

def _rising_down(w, j):
    """(-w)(-w-1)...(-w-j+1)."""
    out = 1.0
    for i in range(j):
        out *= -w - i
    return out


def _hurwitz_at(coef, mu, residues, alpha, gam, w, n_m, m):
    """Head sum over mu_n <= m plus the partial-summation tail at m."""
    b = coef[:n_m]
    u = mu[:n_m]
    with np.errstate(under="ignore"):
        g = np.exp(-w * np.log(alpha + gam * u))
    head = _fsum(b * g)
    err = 4 * _EPS * _abs_sum(b * g)
    # smooth part: int_m^inf g(u) dQ_0(u) with u = m e^t
    main = 0.0
    for z, r in residues:
        zf = float(z)
        if zf <= 0:
            continue
        if not w > zf:
            raise PreconditionError(f"w = {w:.6g} <= pole {zf:.6g} of the dual series")

        def f(t, zf=zf):
            logv = math.log(m) + t
            return np.exp(zf * logv - w * (math.log(gam) + logv
                                           + np.log1p(alpha / gam * np.exp(-logv))))

        res = _de_smooth(f, w - zf)
        coef_z = float(r) / math.gamma(zf)
        main += coef_z * res[0]
        err += abs(coef_z) * res[1]
    # boundary corrections
    corrs = []
    floors = []
    diff = m - u
    pw = np.ones_like(u)
    fact = 1.0
    base = alpha + gam * m
    for j in range(0, 14):
        if j:
            pw = pw * diff
            fact *= j
        bj = _fsum(b * pw) / fact
        aj = _abs_sum(b * pw) / fact
        qj = 0.0
        for z, r in residues:
            qj += float(r) * math.exp((float(z) + j) * math.log(m) - math.lgamma(float(z) + j + 1))
        gj = _rising_down(w, j) * gam ** j * base ** (-w - j)
        cj = (-1) ** (j + 1) * gj * (bj - qj)
        fj = (j + 4) * _EPS * (aj + abs(qj)) * abs(gj)
        if corrs and abs(cj) > abs(corrs[-1]) and abs(cj) > fj:
            break  # asymptotic divergence: stop before the terms grow
        corrs.append(cj)
        floors.append(fj)
        if abs(cj) <= fj:
            break
    value = head + main + sum(corrs)
    trunc = abs(corrs[-1]) if corrs else 0.0
    return value, trunc, err + sum(floors)


def _de_smooth(f, rate):
    """int_0^inf f(t) dt for f decaying like exp(-rate t), relative accuracy ~1e-15."""
    scale = 1.0 / rate
    h = 0.25
    tmin, tmax = -6.0, 6.5

    def level(t):
        x = scale * np.exp(t - np.exp(-t))
        wts = x * (1.0 + np.exp(-t))
        with np.errstate(under="ignore", over="ignore"):
            return f(x) * wts

    t = np.arange(tmin, tmax + h / 2, h)
    acc = math.fsum(level(t))
    prev = h * acc
    for _ in range(8):
        h *= 0.5
        tn = np.arange(tmin + h, tmax, 2 * h)
        acc += math.fsum(level(tn))
        cur = h * acc
        if abs(cur - prev) <= 1e-15 * abs(cur):
            return cur, 4 * _EPS * abs(cur) + abs(cur - prev)
        prev = cur
    return cur, abs(cur - prev)


def hurwitz_sum(table: CoefficientTable, seq: ExponentSequence, residues, alpha, gam, w,
                n_max=None) -> SeriesResult:
    """sum_{n>=1} b(n) (alpha + gam mu_n)^-w with an accelerated tail.

    ``residues`` are (z, R) pairs: the residues of Gamma(z) sum b(n) mu_n^-z.
    The tail estimate combines the last boundary correction at the main
    cut-off with the change against a cut-off about half as large.
    """
    n_max = table.size if n_max is None else min(n_max, table.size)
    if n_max < 16:
        raise TableExhausted(16, n_max)
    coef = table.numeric(1, n_max)
    mu = seq.values(np.arange(1, n_max + 2))

    def cut(n):
        return 0.5 * (mu[n - 1] + mu[n])

    n1 = n_max
    n2 = max(8, int(0.55 * n_max))
    v1, t1, e1 = _hurwitz_at(coef, mu, residues, alpha, gam, w, n1, cut(n1))
    v2, t2, e2 = _hurwitz_at(coef, mu, residues, alpha, gam, w, n2, cut(n2))
    tail = max(4.0 * t1, abs(v1 - v2))
    return SeriesResult(value=v1, tail_bound=tail, terms_used=n1, rounding_bound=e1,
                        tail_kind="estimate")


# ================================================================ records

@dataclass(frozen=True)
class VerificationRecord:
    """Outcome of one identity check at one parameter point.

    ``lhs`` and ``rhs`` are real parts; imaginary parts are kept separately
    for systems with complex coefficients.  ``status`` is "pass", "fail" or
    "skipped" (a precondition excluded the point).
    """

    system: str
    identity: str
    s: float | None = None
    nu: float | None = None
    rho: float | None = None
    x: float | None = None
    beta: float | None = None
    r: float | None = None
    extra: str | None = None
    lhs: float = math.nan
    rhs: float = math.nan
    lhs_imag: float = 0.0
    rhs_imag: float = 0.0
    abs_residual: float = math.nan
    rel_residual: float = math.nan
    imag_residual: float = 0.0
    certified_tail: float = 0.0
    tail_kind: str = "certified"
    tolerance: float = 0.0
    passed: bool = False
    status: str = "fail"
    reason: str = ""
    wall_time: float = 0.0
    notes: tuple = ()

    PARAMS = ("s", "nu", "rho", "x", "beta", "r", "extra")

    def params(self):
        return {k: getattr(self, k) for k in self.PARAMS if getattr(self, k) is not None}

    def sort_key(self):
        vals = []
        for k in self.PARAMS:
            v = getattr(self, k)
            vals.append((0, "") if v is None else (1, str(v)) if isinstance(v, str) else (1, float(v)))
        return (self.system, self.identity, tuple(vals))

    def to_dict(self, timing=True):
        out = {}
        for f in self.__dataclass_fields__:
            if f == "wall_time" and not timing:
                continue
            v = getattr(self, f)
            out[f] = list(v) if isinstance(v, tuple) else v
        return out


def tolerance_for(identity, system_name="", s=None):
    """Default tolerance, relaxed where the dynamic range is extreme."""
    tol = TOLERANCES[identity]
    if identity == "THM3":
        if system_name.startswith("sigma:") and int(system_name.split(":")[1]) >= 5:
            tol = 1e-6
        if system_name == "tau" and s is not None and s <= 0.5:
            tol = 1e-6
    return tol


def _system(system):
    return get_system(system) if isinstance(system, str) else system


def _record(identity, system_name, params, lhs, rhs, tail, tail_kind, tol, start, notes=(),
            extra_ok=True):
    lhs_c, rhs_c = complex(lhs), complex(rhs)
    diff = lhs_c - rhs_c
    scale = max(abs(lhs_c), abs(rhs_c), 1e-300)
    absolute = identity in ABSOLUTE_TOLERANCE
    rel = abs(diff) / scale
    passed = bool((abs(diff) if absolute else rel) <= tol) and extra_ok
    return VerificationRecord(
        system=system_name, identity=identity, **params,
        lhs=lhs_c.real, rhs=rhs_c.real, lhs_imag=lhs_c.imag, rhs_imag=rhs_c.imag,
        abs_residual=abs(diff), rel_residual=rel, imag_residual=abs(diff.imag) / scale,
        certified_tail=float(tail), tail_kind=tail_kind, tolerance=tol, passed=passed,
        status="pass" if passed else "fail", wall_time=time.perf_counter() - start,
        notes=tuple(notes))


def skipped_record(identity, system_name, params, reason):
    return VerificationRecord(system=system_name, identity=identity, **params,
                              status="skipped", reason=reason)


def failed_record(identity, system_name, params, reason):
    return VerificationRecord(system=system_name, identity=identity, **params,
                              status="fail", reason=reason)


def _require(cond, message):
    if not cond:
        raise PreconditionError(message)


def _check_nu(nu, strict_positive=False):
    if not math.isfinite(nu):
        raise PreconditionError("ν is not finite")
    if strict_positive:
        _require(nu > 0, f"ν ≤ 0 (ν = {nu:g})")
    _require(nu > -1, f"ν ≤ −1 (ν = {nu:g})")


def _check_positive(name, v):
    _require(math.isfinite(v) and v > 0, f"{name} = {v:g} must be positive")


def _tail_kind(*results):
    return "estimate" if any(r.tail_kind == "estimate" for r in results) else "certified"


# ============================================================ evaluators

def eval_k_series(system, s, nu, tol=1e-8) -> SeriesResult:
    """sum a(n) lambda_n^((nu+1)/2) K_{nu+1}(s sqrt(lambda_n)), without the 2/s factor."""
    system = _system(system)
    _check_positive("s", s)
    _check_nu(nu)
    fam = KFamily(system.a, system.lam, system.growth, s, nu + 1, (nu + 1) / 2)
    return decaying_sum(fam, tol)


def _hurwitz_exponent(system, nu, rho):
    w = float(system.delta) + rho + nu + 1
    star = float(system.sigma_a_star)
    _require(w > star, f"δ+ρ+ν+1 = {w:g} ≤ σ_a* = {star:g}")
    return w


def eval_hurwitz_series(system, s, nu, rho=0.0) -> SeriesResult:
    """sum b(n) (s^2 + 16 pi^2 mu_n)^-(delta+rho+nu+1)."""
    system = _system(system)
    _check_positive("s", s)
    _require(rho >= 0, f"ρ = {rho:g} < 0")
    w = _hurwitz_exponent(system, nu, rho)
    return hurwitz_sum(system.b, system.mu, system.dual_residues, s * s, 16 * math.pi ** 2, w)


def residual_bessel_integral(q: MonomialSum, s, nu):
    """int_0^inf q(x) x^(nu/2) K_nu(s sqrt x) dx for a monomial sum q."""
    _check_positive("s", s)
    parts = []
    for c, e in q:
        e = float(e)
        _require(2 * e + nu + 2 > abs(nu),
                 f"monomial x^{e:g} diverges: 2e+ν+2 = {2 * e + nu + 2:g} ≤ |ν| = {abs(nu):g}")
        logv = ((2 * e + nu + 1) * _LOG2 + math.lgamma(e + nu + 1) + math.lgamma(e + 1)
                - (2 * e + nu + 2) * math.log(s))
        parts.append(float(c) * math.exp(logv))
    return math.fsum(parts)


def _log_prefactor(delta, rho, nu, s):
    """log of 2^(3 delta + 2 rho + nu + 1) s^nu pi^delta Gamma(delta + rho + nu + 1)."""
    return ((3 * delta + 2 * rho + nu + 1) * _LOG2 + nu * math.log(s) + delta * _LOGPI
            + math.lgamma(delta + rho + nu + 1))


# ============================================================== checkers

def check_thm3(system, s, nu, tol=None) -> VerificationRecord:
    """The Bessel-K series against the Hurwitz-type series plus the Q_0 integral."""
    start = time.perf_counter()
    system = _system(system)
    _check_positive("s", s)
    _check_nu(nu)
    tol = tolerance_for("THM3", system.name, s) if tol is None else tol
    delta = float(system.delta)
    ks = eval_k_series(system, s, nu, tol)
    hs = eval_hurwitz_series(system, s, nu, 0.0)
    integral = residual_bessel_integral(residual_q(system, 0), s, nu)
    pre = math.exp(_log_prefactor(delta, 0.0, nu, s))
    lhs = 2.0 / s * ks.value
    rhs = pre * hs.value + integral
    tail = 2.0 / s * ks.error_bound + pre * hs.error_bound
    notes = [f"K terms {ks.terms_used}, multiprecision {ks.promoted}", f"Hurwitz terms {hs.terms_used}"]
    if nu <= 0:
        notes.append("ν ≤ 0: relies on analytic continuation in ν")
    return _record("THM3", system.name, {"s": s, "nu": nu}, lhs, rhs, tail, _tail_kind(ks, hs),
                   tol, start, notes)


def check_thm2(system, s, nu, rho, tol=None) -> VerificationRecord:
    """Incomplete Bessel integrals against the Hurwitz series plus the Q_rho integral."""
    start = time.perf_counter()
    system = _system(system)
    _check_positive("s", s)
    _check_nu(nu, strict_positive=True)
    _require(rho >= 0, f"ρ = {rho:g} < 0")
    tol = TOLERANCES["THM2"] if tol is None else tol
    delta = float(system.delta)
    hs = eval_hurwitz_series(system, s, nu, rho)
    integral = residual_bessel_integral(residual_q(system, rho), s, nu)
    fam = IncompleteKFamily(system.a, system.lam, system.growth, s, nu, rho)
    ls = decaying_sum(fam, tol)
    pre = math.exp(_log_prefactor(delta, rho, nu, s))
    rhs = pre * hs.value + integral
    tail = ls.error_bound + pre * hs.error_bound
    notes = [f"quadrature terms {ls.terms_used}, multiprecision {ls.promoted}"]
    return _record("THM2", system.name, {"s": s, "nu": nu, "rho": rho}, ls.value, rhs, tail,
                   _tail_kind(ls, hs), tol, start, notes)


def check_modular(system, x, tol=None) -> VerificationRecord:
    """sum a(n) e^(-lambda_n x) against its transform plus P(x)."""
    start = time.perf_counter()
    system = _system(system)
    _check_positive("x", x)
    tol = TOLERANCES["MODULAR"] if tol is None else tol
    delta = float(system.delta)
    left = decaying_sum(ExpFamily(system.a, system.lam, system.growth, x), 1e-2 * tol)
    right = decaying_sum(ExpFamily(system.b, system.mu, system.growth, 4 * math.pi ** 2 / x),
                         1e-2 * tol)
    factor = (2 * math.pi / x) ** delta
    rhs = factor * right.value + residual_p(system)(x)
    tail = left.error_bound + factor * right.error_bound
    return _record("MODULAR", system.name, {"x": x}, left.value, rhs, tail, "certified", tol, start)


# ----------------------------------------------------------- Riesz sums

def _riesz_window(t):
    """Smooth cut-off: 1 on [0, 1/2], 0 from 1 on, C-infinity in between."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    out[t <= 0.5] = 1.0
    mid = (t > 0.5) & (t < 1.0)
    u = (t[mid] - 0.5) * 2.0

    def bump(v):
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(v > 0, np.exp(-1.0 / np.where(v > 0, v, 1.0)), 0.0)

    a, b = bump(1.0 - u), bump(u)
    out[mid] = a / (a + b)
    return out


def _riesz_lhs(system, x, rho):
    """(1/Gamma(rho+1)) sum_{lambda_n <= x} a(n) (x - lambda_n)^rho, exactly for rational data."""
    n_top = system.lam.count_upto(x)
    if n_top > system.table_size:
        raise TableExhausted(n_top, system.table_size)
    xq = Fraction(x)
    seq = system.lam
    exact = (system.a.kind != "CHAR" and seq.power == 1
             and Fraction(math.isqrt(seq.scale_sq.numerator) ** 2, math.isqrt(seq.scale_sq.denominator) ** 2)
             == seq.scale_sq)
    if exact:
        root = Fraction(math.isqrt(seq.scale_sq.numerator), math.isqrt(seq.scale_sq.denominator))
        total = Fraction(0)
        scale = Fraction(system.a.scale).limit_denominator() if system.a.scale != 1.0 else 1
        for n in range(1, n_top + 1):
            v = system.a.exact(n)
            if v:
                total += v * (xq - n * root) ** rho
        return float(total * scale / math.factorial(rho)), n_top
    ns = np.arange(1, n_top + 1)
    vals = system.a.numeric(1, n_top) * (x - seq.values(ns)) ** rho if n_top else np.zeros(0)
    return _fsum(vals) / math.factorial(rho), n_top


def _riesz_dual_sum(coef, mu, x, delta, rho, m_cut):
    """sum b(n) (x/mu_n)^((delta+rho)/2) J_{delta+rho}(4 pi sqrt(mu_n x)) W(sqrt(mu_n/m_cut))."""
    keep = mu < m_cut
    b, u = coef[keep], mu[keep]
    order = delta + rho
    wts = _riesz_window(np.sqrt(u / m_cut))
    j = bessel_j_array(order, 4 * math.pi * np.sqrt(u * x))
    return _fsum(b * (x / u) ** (order / 2) * j * wts)


def check_riesz(system, x, rho, n_terms=400000, tol=None) -> VerificationRecord:
    """Riesz sums against the smoothed J-Bessel series plus Q_rho(x).

    The J-series converges too slowly for a certified tail.  It is summed
    with a smooth window over mu_n below a cut-off; the change when the
    cut-off is halved is reported as the (estimated) tail.
    """
    start = time.perf_counter()
    system = _system(system)
    _check_positive("x", x)
    _require(isinstance(rho, int) and rho >= 1, f"ρ = {rho} must be an integer ≥ 1")
    bound = 2 * float(system.sigma_a_star) - float(system.delta) - 0.5
    _require(rho > bound, f"ρ = {rho} ≤ 2σ_a*−δ−1/2 = {bound:g}")
    _require(n_terms <= 10 ** 6, "at most 10^6 J-series terms")
    tol = TOLERANCES["RIESZ"] if tol is None else tol
    # a boundary point only matters when the coefficient there is non-zero
    n_near = system.lam.count_upto(x)
    for n in (n_near, n_near + 1):
        if n >= 1 and abs(float(system.lam.values([n])[0]) - x) <= 1e-9 and n <= system.table_size:
            _require(system.a.exact(n) == 0 if system.a.kind != "CHAR" else system.a.numeric(n, n)[0] == 0,
                     f"x = {x:g} lies within 1e-9 of λ_{n}")
    if system.table_size < n_terms and isinstance(system.name, str):
        system = get_system(system.name, n_terms)
    lhs, n_lhs = _riesz_lhs(system, x, rho)
    n_terms = min(n_terms, system.table_size)
    coef = system.b.numeric(1, n_terms)
    mu = system.mu.values(np.arange(1, n_terms + 1))
    m_cut = float(mu[-1])
    delta = float(system.delta)
    full = _riesz_dual_sum(coef, mu, x, delta, rho, m_cut)
    half = _riesz_dual_sum(coef, mu, x, delta, rho, m_cut / 2)
    factor = (2 * math.pi) ** (-rho)
    rhs = factor * full + residual_q(system, rho)(x)
    tail = factor * abs(full - half)
    notes = [f"exact left side over {n_lhs} terms", f"J-series window up to μ = {m_cut:g}"]
    return _record("RIESZ", system.name, {"x": x, "rho": rho}, lhs, rhs, tail, "estimate", tol,
                   start, notes)


# --------------------------------------------- exponential (CN) identity

def check_cn_exponential(system, s, rho, tol=None) -> VerificationRecord:
    """(-(1/s) d/ds)^rho of (1/s) sum a(n) e^(-s sqrt(lambda_n)) against its Hurwitz form plus R_rho(s)."""
    start = time.perf_counter()
    system = _system(system)
    _check_positive("s", s)
    _require(rho in (0, 1, 2), f"ρ = {rho} must be 0, 1 or 2")
    delta = float(system.delta)
    w = delta + rho + 0.5
    star = float(system.sigma_a_star)
    _require(w > star, f"δ+ρ+1/2 = {w:g} ≤ σ_a* = {star:g}")
    tol = TOLERANCES["CN_EXP"] if tol is None else tol
    ls = decaying_sum(CNFamily(system.a, system.lam, system.growth, s, rho), tol)
    hs = hurwitz_sum(system.b, system.mu, system.dual_residues, s * s, 16 * math.pi ** 2, w)
    pre = math.exp((3 * delta + rho) * _LOG2 + math.lgamma(w) + (delta - 0.5) * _LOGPI)
    rhs = pre * hs.value + residual_r(system, rho)(s)
    tail = ls.error_bound + pre * hs.error_bound
    return _record("CN_EXP", system.name, {"s": s, "rho": rho}, ls.value, rhs, tail,
                   _tail_kind(ls, hs), tol, start)


# ------------------------------------------------- example identities

def _k_sum(system, s, order, power, tol):
    return decaying_sum(KFamily(system.a, system.lam, system.growth, s, order, power), tol)


def _hurwitz(system, alpha, gam, w):
    return hurwitz_sum(system.b, system.mu, system.dual_residues, alpha, gam, w)


def check_popov(k, beta, nu, tol=None) -> VerificationRecord:
    """sum_{n>=0} r_k(n) n^((nu+1)/2) K_{nu+1}(2 pi sqrt(n beta)) against
    beta^((nu+1)/2) Gamma(nu+1+k/2) / (2 pi^(k/2+nu+1)) sum_{n>=0} r_k(n) (beta+n)^-(k/2+nu+1)."""
    start = time.perf_counter()
    _check_positive("β", beta)
    _check_nu(nu)
    system = get_system(f"rk:{k}")
    tol = TOLERANCES["POPOV"] if tol is None else tol
    ks = _k_sum(system, 2 * math.pi * math.sqrt(2 * beta), nu + 1, (nu + 1) / 2, tol)
    w = k / 2 + nu + 1
    hs = _hurwitz(system, beta, 2.0, w)
    lfac = 2 ** ((nu + 1) / 2)
    n0 = math.exp(math.lgamma(nu + 1) - _LOG2 - (nu + 1) * _LOGPI - (nu + 1) / 2 * math.log(beta))
    lhs = lfac * ks.value + n0
    rpre = math.exp((nu + 1) / 2 * math.log(beta) + math.lgamma(w) - _LOG2 - w * _LOGPI)
    rhs = rpre * (beta ** (-w) + hs.value)
    tail = lfac * ks.error_bound + rpre * hs.error_bound
    return _record("POPOV", system.name, {"beta": beta, "nu": nu, "extra": str(k)}, lhs, rhs,
                   tail, _tail_kind(ks, hs), tol, start)


def _sigma_zero_term(sigma0, s, nu):
    """sigma_k(0) times the n -> 0 limit of n^((nu+1)/2) K_{nu+1}(s sqrt n)."""
    return float(sigma0) * math.exp(nu * _LOG2 + math.lgamma(nu + 1) - (nu + 1) * math.log(s))


def check_sigma_closed(k, s, nu, tol=None) -> VerificationRecord:
    """The divisor-sum K identity with n = 0 terms and the k = 1 correction."""
    start = time.perf_counter()
    _check_positive("s", s)
    _check_nu(nu)
    system = get_system(f"sigma:{k}")
    tol = TOLERANCES["SIGMA_CLOSED"] if tol is None else tol
    sigma0 = sigma_k_zero(k)
    ks = _k_sum(system, s, nu + 1, (nu + 1) / 2, tol)
    lhs = ks.value + _sigma_zero_term(sigma0, s, nu)
    if k == 1:
        lhs += math.exp((nu + 1) * _LOG2 + math.lgamma(nu + 2) - (nu + 3) * math.log(s))
    w = k + nu + 2
    hs = _hurwitz(system, s * s, 16 * math.pi ** 2, w)
    sign = system.info["sign"]
    pre = math.exp((3 * k + nu + 3) * _LOG2 + (nu + 1) * math.log(s) + (k + 1) * _LOGPI
                   + math.lgamma(w))
    rhs = pre * (sign * float(sigma0) * s ** (-2 * w) + hs.value)
    tail = ks.error_bound + pre * hs.error_bound
    return _record("SIGMA_CLOSED", system.name, {"s": s, "nu": nu, "extra": str(k)}, lhs, rhs,
                   tail, _tail_kind(ks, hs), tol, start)



def _exp_sqrt_sum(system, s, tol):
    """sum a(n) e^(-s sqrt(lambda_n)), via the rho = 0 exponential family."""
    res = decaying_sum(CNFamily(system.a, system.lam, system.growth, s, 0), tol)
    return res.value * s, res.error_bound * s, res


def check_sigma_exp(k, s, tol=None) -> VerificationRecord:
    """sum sigma_k(n) e^(-s sqrt n) against the Hurwitz form with Bernoulli corrections."""
    start = time.perf_counter()
    _check_positive("s", s)
    system = get_system(f"sigma:{k}")
    tol = TOLERANCES["SIGMA_EXP"] if tol is None else tol
    lhs, ltail, ls = _exp_sqrt_sum(system, s, tol)
    w = k + 1.5
    hs = _hurwitz(system, s * s, 16 * math.pi ** 2, w)
    b = float(bernoulli(k + 1))
    pre = math.exp((3 * k + 3) * _LOG2 + math.lgamma(w) + (k + 0.5) * _LOGPI)
    corr = (b / (2 * (k + 1)) - (1.0 / s ** 2 if k == 1 else 0.0)
            + (-1) ** ((k - 1) // 2) * b / (k + 1)
            * math.exp((3 * k + 2) * _LOG2 + (k + 0.5) * _LOGPI + math.lgamma(w)
                       - (2 * k + 2) * math.log(s)))
    rhs = pre * s * hs.value + corr
    tail = ltail + pre * s * hs.error_bound
    return _record("SIGMA_EXP", system.name, {"s": s, "extra": str(k)}, lhs, rhs, tail,
                   _tail_kind(ls, hs), tol, start)


def check_tau(s, nu, tol=None) -> VerificationRecord:
    """sum tau(n) n^((nu+1)/2) K_{nu+1}(s sqrt n) against 2^(36+nu) s^(nu+1) pi^12 Gamma(13+nu)
    sum tau(n) (s^2+16 pi^2 n)^-(nu+13).  At nu = -1/2 the exponential form is cross-checked."""
    start = time.perf_counter()
    _check_positive("s", s)
    _check_nu(nu)
    system = get_system("tau")
    tol = TOLERANCES["TAU_CLOSED"] if tol is None else tol
    ks = _k_sum(system, s, nu + 1, (nu + 1) / 2, tol)
    w = nu + 13
    hs = _hurwitz(system, s * s, 16 * math.pi ** 2, w)
    pre = math.exp((36 + nu) * _LOG2 + (nu + 1) * math.log(s) + 12 * _LOGPI + math.lgamma(w))
    rhs = pre * hs.value
    tail = ks.error_bound + pre * hs.error_bound
    notes = []
    ok = True
    if nu == -0.5:
        ev, _, _ = _exp_sqrt_sum(system, s, tol)
        k_form = math.sqrt(math.pi / (2 * s)) * ev
        dev = abs(k_form - ks.value) / max(abs(ks.value), 1e-300)
        notes.append(f"exponential form agrees with the K form to {dev:.2e}")
        ok = dev <= tol
    return _record("TAU_CLOSED", system.name, {"s": s, "nu": nu}, ks.value, rhs, tail,
                   _tail_kind(ks, hs), tol, start, notes, extra_ok=ok)


def check_tau_exp(s, tol=None) -> VerificationRecord:
    """sum tau(n) e^(-s sqrt n) = 2^36 pi^(23/2) Gamma(25/2) sum s tau(n) (s^2+16 pi^2 n)^(-25/2)."""
    start = time.perf_counter()
    _check_positive("s", s)
    system = get_system("tau")
    tol = TOLERANCES["TAU_EXP"] if tol is None else tol
    lhs, ltail, ls = _exp_sqrt_sum(system, s, tol)
    hs = _hurwitz(system, s * s, 16 * math.pi ** 2, 12.5)
    pre = math.exp(36 * _LOG2 + 11.5 * _LOGPI + math.lgamma(12.5)) * s
    return _record("TAU_EXP", system.name, {"s": s}, lhs, pre * hs.value, ltail + pre * hs.error_bound,
                   _tail_kind(ls, hs), tol, start)


def _watson_lhs_factor(z, nu):
    # 2 (z/2)^nu 2^(nu/2): turns sum lambda^(nu/2) K_nu(z sqrt2 sqrt(lambda)) into 2 sum (nz/2)^nu K_nu(nz)
    return 2.0 * math.exp(nu * math.log(z / 2) + nu / 2 * _LOG2)


def check_watson(z, nu, tol=None) -> VerificationRecord:
    """1/2 Gamma(nu) + 2 sum (nz/2)^nu K_nu(nz) against
    Gamma(1/2) Gamma(nu+1/2) z^(2nu) (z^-(2nu+1) + 2 sum (z^2+4 pi^2 n^2)^-(nu+1/2)).

    The same identity is rebuilt from the master identity on the zeta
    system (s = z sqrt 2, order nu - 1) and the two right sides compared.
    """
    start = time.perf_counter()
    _check_positive("z", z)
    _check_nu(nu, strict_positive=True)
    system = get_system("zeta")
    tol = TOLERANCES["WATSON"] if tol is None else tol
    s = z * math.sqrt(2)
    ks = _k_sum(system, s, nu, nu / 2, tol)
    fac = _watson_lhs_factor(z, nu)
    head = 0.5 * math.gamma(nu)
    lhs = head + fac * ks.value
    w = nu + 0.5
    hs = _hurwitz(system, z * z, 8 * math.pi ** 2, w)
    pre = math.exp(0.5 * _LOGPI + math.lgamma(w) + 2 * nu * math.log(z))
    rhs = pre * (z ** (-2 * nu - 1) + 2 * hs.value)
    tail = fac * ks.error_bound + 2 * pre * hs.error_bound
    # route through the master identity: (2/s) sum = thm3 rhs, with order nu - 1
    route = check_thm3(system, s, nu - 1, tol=tol)
    route_rhs = head + fac * (s / 2) * route.rhs
    dev = abs(route_rhs - rhs) / max(abs(rhs), 1e-300)
    notes = [f"master-identity route agrees to {dev:.2e}"]
    return _record("WATSON", system.name, {"s": z, "nu": nu}, lhs, rhs, tail,
                   _tail_kind(ks, hs), tol, start, notes, extra_ok=dev <= tol)


def check_char(chi, r, nu, tol=None) -> VerificationRecord:
    """Character analogues of Watson's identity (odd and even primitive chi)."""
    start = time.perf_counter()
    if isinstance(chi, str):
        parts = chi.split(":")
        if parts[0] == "char":
            parts = parts[1:]
        chi = builtin_character(int(parts[0]), int(parts[1]))
    _check_positive("r", r)
    _check_nu(nu)
    sid = f"char:{chi.label}" if chi.label else None
    system = get_system(sid) if sid else system_character(chi)
    q = chi.modulus
    odd = chi.parity == "odd"
    identity = "CHAR_ODD" if odd else "CHAR_EVEN"
    tol = TOLERANCES[identity] if tol is None else tol
    s = r * math.sqrt(2 * q)
    ks = _k_sum(system, s, nu + 1, (nu + 1) / 2, tol)
    lfac = (2 * q) ** ((nu + 1) / 2)
    lhs = lfac * ks.value
    w = nu + (2.5 if odd else 1.5)
    alpha = (q * r / (2 * math.pi)) ** 2
    hs = _hurwitz(system, alpha, 2.0 * q, w)
    # the b table already carries the Gauss-sum factor over sqrt(q)
    qpow = 2 * nu + 3 if odd else 2 * nu + 2
    pipow = 2 * nu + (3.5 if odd else 2.5)
    pre = math.sqrt(q) * math.exp((nu + 1) * math.log(r) + qpow * math.log(q) + math.lgamma(w)
                                  - (nu + 2) * _LOG2 - pipow * _LOGPI)
    rhs = pre * hs.value
    tail = lfac * ks.error_bound + pre * hs.error_bound
    return _record(identity, system.name, {"r": r, "nu": nu, "extra": system.name.split(":", 1)[1]},
                   lhs, rhs, tail, _tail_kind(ks, hs), tol, start)


def check_dedekind(D, r, nu, h=None, w=None, tol=None) -> VerificationRecord:
    """sum_{n>=0} F(n) n^((nu+1)/2) K_{nu+1}(4 pi sqrt(rn)/d) against
    (1/(2 sqrt r)) (d sqrt(r)/(2 pi))^(nu+2) Gamma(nu+2) sum_{n>=0} F(n) (r+n)^-(nu+2)."""
    start = time.perf_counter()
    _check_positive("r", r)
    _check_nu(nu)
    system = get_system(f"dedekind:{D}") if h is None else system_dedekind(D, h, w)
    tol = TOLERANCES["DEDEKIND"] if tol is None else tol
    d = system.info["d"]
    f0 = float(system.a.exact(0))
    s = 4 * math.pi * math.sqrt(r / d)
    ks = _k_sum(system, s, nu + 1, (nu + 1) / 2, tol)
    lfac = d ** ((nu + 1) / 2)
    n0 = f0 * 0.5 * math.exp((nu + 1) * math.log(d / (2 * math.pi * math.sqrt(r))) + math.lgamma(nu + 1))
    lhs = lfac * ks.value + n0
    hw = nu + 2
    hs = _hurwitz(system, r, d, hw)
    pre = math.exp(hw * math.log(d * math.sqrt(r) / (2 * math.pi)) + math.lgamma(hw)) / (2 * math.sqrt(r))
    rhs = pre * (f0 * r ** (-hw) + hs.value)
    tail = lfac * ks.error_bound + pre * hs.error_bound
    return _record("DEDEKIND", system.name, {"r": r, "nu": nu, "extra": str(D)}, lhs, rhs, tail,
                   _tail_kind(ks, hs), tol, start)


def check_dedekind_exp(D, r, h=None, w=None, tol=None) -> VerificationRecord:
    """sum_{n>=0} F(n) e^(-4 pi sqrt(rn)/d) = d sqrt(r)/(4 pi) sum_{n>=0} F(n) (r+n)^(-3/2)."""
    start = time.perf_counter()
    _check_positive("r", r)
    system = get_system(f"dedekind:{D}") if h is None else system_dedekind(D, h, w)
    tol = TOLERANCES["DEDEKIND_EXP"] if tol is None else tol
    d = system.info["d"]
    f0 = float(system.a.exact(0))
    lhs, ltail, ls = _exp_sqrt_sum(system, 4 * math.pi * math.sqrt(r / d), tol)
    lhs += f0
    hs = _hurwitz(system, r, d, 1.5)
    pre = d * math.sqrt(r) / (4 * math.pi)
    rhs = pre * (f0 * r ** -1.5 + hs.value)
    return _record("DEDEKIND_EXP", system.name, {"r": r, "extra": str(D)}, lhs, rhs,
                   ltail + pre * hs.error_bound, _tail_kind(ls, hs), tol, start)
