"""Partial L-functions over Q and their Laurent data at s=1.

One numeric kernel: the Hurwitz zeta function and its s-derivative by
Euler-Maclaurin summation in arbitrary precision (mpmath).  Dirichlet
L-functions come from the decomposition L(s,chi) = q^-s sum_a chi(a)
zeta(s,a/q); partial L-functions multiply in the removed Euler factors;
Laurent coefficients at s=1 come from the regularized kernel (the pole
term is split off analytically, never by numerical cancellation).

Derivatives are propagated through every formula with first-order jets
(value, d/ds) rather than finite differences.

Everything here is pure; the kernel memo table is a plain dict whose single
get/set operations are atomic under the GIL, so concurrent readers and
writers only ever see complete entries (clear_cache() disables warm reuse).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp, mpf, bernoulli

from .arith import PlaceSet
from .characters import QuadChar

DEFAULT_DIGITS = 30
_GUARD = 10

_jet_cache: dict = {}
_CACHE_MAX = 200_000


class PoleError(ZeroDivisionError):
    """Evaluation requested at a pole; use laurent_at_1 instead."""


@dataclass
class PrecisionConfig:
    """Working precision for the numeric kernel."""

    working_digits: int = DEFAULT_DIGITS
    target_abs_error: float | None = None

    def __post_init__(self):
        if self.working_digits < 15:
            raise ValueError("working_digits must be >= 15")


@dataclass
class LaurentData:
    """Laurent data of a partial L-function at a point:
    L(s) = residue/(s-center) + c0 + c1*(s-center) + ...
    """

    center: float
    residue: mpf
    c0: mpf
    c1: mpf


def clear_cache():
    _jet_cache.clear()


# ---------------------------------------------------------------------------
# first-order jets (value, d/ds)
# ---------------------------------------------------------------------------

def _jmul(a, b):
    return (a[0] * b[0], a[0] * b[1] + a[1] * b[0])


def _jscale(c, a):
    return (c * a[0], c * a[1])


def _jpow_base(A, expo_jet):
    """A^e as a jet in s, for constant A>0 and exponent jet e(s)."""
    lnA = mp.ln(A)
    val = mp.e ** (expo_jet[0] * lnA)
    return (val, val * lnA * expo_jet[1])


# ---------------------------------------------------------------------------
# Euler-Maclaurin Hurwitz zeta (the single kernel)
# ---------------------------------------------------------------------------

def _to_mpf(x):
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    return mpf(x)


def _phi_jet(u, L):
    """(e^{-uL} - 1)/u and its u-derivative, stable for small u (L > 0)."""
    if abs(u) * L < mpf("0.5"):
        # power series: phi = sum_{k>=1} (-L)^k u^{k-1}/k!
        phi = mp.mpf(0)
        dphi = mp.mpf(0)
        term = mp.mpf(1)  # (-L)^k/k!
        tol = mp.e ** (-mp.ln(10) * mp.dps) * (L + 1)
        for k in range(1, 200):
            term *= -L / k
            phi += term * u ** (k - 1)
            if k >= 2:
                dphi += term * (k - 1) * u ** (k - 2)
            if abs(term) * (1 + abs(u)) ** k < tol:
                break
        return phi, dphi
    e = mp.e ** (-u * L)
    phi = (e - 1) / u
    dphi = (-L * e * u - (e - 1)) / (u * u)
    return phi, dphi


def _hurwitz_jet_raw(s, a, regularized):
    """(zeta(s,a), d/ds zeta(s,a)) by Euler-Maclaurin at the current mp.dps.

    regularized=True returns the jet of zeta(s,a) - 1/(s-1), analytic at s=1.
    """
    s = _to_mpf(s)
    a = _to_mpf(a)
    if a <= 0:
        raise ValueError("need a > 0")
    if not regularized and s == 1:
        raise PoleError("zeta(s,a) has a pole at s=1")
    tol = mp.e ** (-mp.ln(10) * (mp.dps - 2))
    N = max(12, int(0.9 * mp.dps) + 2, int(2 * abs(s)))
    for _attempt in range(6):
        A = N + a
        lnA = mp.ln(A)
        # partial sum
        val = mp.mpf(0)
        der = mp.mpf(0)
        for k in range(N):
            L = mp.ln(k + a)
            w = mp.e ** (-s * L)
            val += w
            der -= L * w
        # pole / regularized term: A^{1-s}/(s-1) [- 1/(s-1)]
        if regularized:
            phi, dphi = _phi_jet(s - 1, lnA)
            val += phi
            der += dphi
        else:
            u = s - 1
            e = mp.e ** (-u * lnA)
            val += e / u
            der += -e * (lnA * u + 1) / (u * u)
        # A^{-s}/2
        w = mp.e ** (-s * lnA)
        val += w / 2
        der -= lnA * w / 2
        # Bernoulli tail
        R = (s, mp.mpf(1))                       # rising factorial jet
        P = (w / A, -lnA * w / A)                # A^{-s-1} jet
        Ainv2 = 1 / (A * A)
        ok = False
        prev = mp.inf
        j = 1
        while j <= 70:
            if j > 1:
                R = _jmul(R, _jmul((s + 2 * j - 3, mp.mpf(1)), (s + 2 * j - 2, mp.mpf(1))))
                P = _jscale(Ainv2, P)
            coef = bernoulli(2 * j) / (mp.factorial(2 * j))
            term = _jscale(coef, _jmul(R, P))
            val += term[0]
            der += term[1]
            mag = abs(term[0]) + abs(term[1])
            if mag < tol * (1 + abs(val)):
                ok = True
                break
            if mag > prev * 4:        # divergence: N too small for this s
                break
            prev = mag
            j += 1
        if ok:
            return val, der
        N *= 2
    raise RuntimeError("Euler-Maclaurin did not converge; increase precision")


def _hurwitz_jet(s, a, regularized=False):
    key = (mp.nstr(_to_mpf(s), mp.dps), mp.nstr(_to_mpf(a), mp.dps), mp.dps, regularized)
    hit = _jet_cache.get(key)
    if hit is not None:
        return hit
    out = _hurwitz_jet_raw(s, a, regularized)
    if len(_jet_cache) > _CACHE_MAX:
        _jet_cache.clear()
    _jet_cache[key] = out
    return out


def hurwitz(s, a=1, derivative=0, regularized=False, digits=None):
    """Hurwitz zeta zeta(s,a) or its s-derivative; regularized subtracts the
    pole term 1/(s-1) (making the result analytic at s=1)."""
    with mp.workdps((digits or DEFAULT_DIGITS) + _GUARD):
        out = +(_hurwitz_jet(s, a, regularized)[derivative])
    return out


def stieltjes_gamma(n: int, digits=None):
    """Stieltjes constants gamma_0, gamma_1 from our own kernel:
    zeta(s) - 1/(s-1) = gamma_0 - gamma_1 (s-1) + ..."""
    if n not in (0, 1):
        raise ValueError("only gamma_0 and gamma_1 are provided")
    with mp.workdps((digits or DEFAULT_DIGITS) + _GUARD):
        g, gp = _hurwitz_jet(1, 1, regularized=True)
        out = +(g if n == 0 else -gp)
    return out


# ---------------------------------------------------------------------------
# Dirichlet L-functions (primitive) and partial L-functions
# ---------------------------------------------------------------------------

def _char_values(chi):
    """(q, [(a, chi(a))] for a coprime to q)."""
    if isinstance(chi, QuadChar):
        q = chi.conductor
        vals = [(a, chi(a)) for a in range(1, q + 1) if chi(a) != 0]
        return q, vals
    q = chi.modulus
    omega = mp.e ** (2j * mp.pi / 3)
    vals = []
    for a in range(1, q + 1):
        k = chi.exponent(a)
        if k is not None:
            vals.append((a, omega**k))
    return q, vals


def _dirichlet_jet(s, chi):
    """Jet of the primitive L(s,chi) for nontrivial chi, valid at s=1 too.

    Uses the regularized kernel termwise; the subtracted poles cancel exactly
    because sum_a chi(a) = 0.
    """
    q, vals = _char_values(chi)
    s = _to_mpf(s)
    tot_v = mp.mpf(0) if isinstance(chi, QuadChar) else mp.mpc(0)
    tot_d = tot_v
    for a, c in vals:
        g, gp = _hurwitz_jet(s, Fraction(a, q), regularized=True)
        tot_v += c * g
        tot_d += c * gp
    qj = _jpow_base(mpf(q), (-s, mp.mpf(-1)))
    return _jmul(qj, (tot_v, tot_d))


def _euler_removed_jet(s, chi, S: PlaceSet):
    """Jet of prod_{p in S_fin, p not dividing cond} (1 - chi(p) p^{-s})."""
    s = _to_mpf(s)
    out = (mp.mpf(1), mp.mpf(0))
    for p in S.primes:
        if isinstance(chi, QuadChar):
            c = chi(p)  # 0 at ramified p, where the local factor is already 1
        else:
            k = chi.exponent(p)
            c = 0 if k is None else (mp.e ** (2j * mp.pi / 3)) ** k
        if c == 0:
            continue
        lnp = mp.ln(p)
        w = mp.e ** (-s * lnp)
        out = _jmul(out, (1 - c * w, c * lnp * w))
    return out


def _trivial_char_mark(chi) -> bool:
    return chi is None or chi.is_trivial


def _LS_jet(s, chi, S: PlaceSet):
    if _trivial_char_mark(chi):
        if _to_mpf(s) == 1:
            raise PoleError("zeta^S(s) has a pole at s=1; use laurent_at_1")
        z = _hurwitz_jet(s, 1, regularized=False)
        return _jmul(z, _euler_removed_jet(s, QuadChar(1), S))
    if not chi.is_unramified_outside(S):
        bad = [p for p in chi.support if p not in S.primes]
        raise ValueError(f"character ramified outside S at {bad}")
    L = _dirichlet_jet(s, chi)
    return _jmul(L, _euler_removed_jet(s, chi, S))


def zetaS(s, S: PlaceSet, digits=None):
    """zeta^S(s) = zeta(s) * prod_{p in S_fin} (1 - p^{-s}), real s != 1."""
    with mp.workdps((digits or DEFAULT_DIGITS) + _GUARD):
        out = +(_LS_jet(s, None, S)[0])
    return out


def LS(s, chi, S: PlaceSet, digits=None):
    """Partial L-function L^S(s,chi); trivial chi gives zeta^S(s).

    Real for trivial/quadratic characters, complex for cubic ones.
    """
    with mp.workdps((digits or DEFAULT_DIGITS) + _GUARD):
        out = +(_LS_jet(s, chi, S)[0])
    return out


def deriv_LS(s0, chi, S: PlaceSet, digits=None):
    """d/ds L^S(s,chi) at s0 (s0 != 1 for the trivial character)."""
    with mp.workdps((digits or DEFAULT_DIGITS) + _GUARD):
        out = +(_LS_jet(s0, chi, S)[1])
    return out


def _removed_product_taylor2(S: PlaceSet, digits):
    """Taylor data (f, f', f'') at s=1 of f(s) = prod_{p in S_fin}(1 - p^{-s})."""
    f = (mp.mpf(1), mp.mpf(0), mp.mpf(0))
    for p in S.primes:
        lnp = mp.ln(p)
        w = mp.mpf(1) / p
        g = (1 - w, lnp * w, -(lnp**2) * w)
        f = (
            f[0] * g[0],
            f[0] * g[1] + f[1] * g[0],
            f[0] * g[2] + 2 * f[1] * g[1] + f[2] * g[0],
        )
    return f


def laurent_at_1(chi, S: PlaceSet, digits=None) -> LaurentData:
    """Laurent data of L^S(s,chi) at s=1.

    Trivial character: multiply the Laurent series of zeta at 1 (Stieltjes
    constants) by the Taylor series of the removed Euler factors.  Nontrivial:
    residue 0, c0 = L^S(1,chi), c1 = (d/ds)L^S(s,chi)|_1.
    """
    digits = digits or DEFAULT_DIGITS
    with mp.workdps(digits + _GUARD):
        if _trivial_char_mark(chi):
            g0, g0p = _hurwitz_jet(1, 1, regularized=True)
            gamma0, gamma1 = g0, -g0p
            f, fp, fpp = _removed_product_taylor2(S, digits)
            residue = +f
            c0 = +(gamma0 * f + fp)
            c1 = +(-gamma1 * f + gamma0 * fp + fpp / 2)
        else:
            jet = _LS_jet(1, chi, S)
            residue = mp.mpf(0)
            c0 = +jet[0]
            c1 = +jet[1]
    return LaurentData(center=1.0, residue=residue, c0=c0, c1=c1)
