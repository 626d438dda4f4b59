"""Double-word (double-double) compensated arithmetic.

Test-oracle utility: roughly 32 significant decimal digits built from pairs
of IEEE doubles, used to evaluate the divided-difference recurrence as an
independent ground truth.  Not part of the fast evaluation path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_SPLITTER = 134217729.0  # 2**27 + 1, exact in double


def two_sum(a: float, b: float) -> tuple[float, float]:
    """Return (s, err) with s + err == a + b exactly."""
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def quick_two_sum(a: float, b: float) -> tuple[float, float]:
    """two_sum assuming |a| >= |b|."""
    s = a + b
    err = b - (s - a)
    return s, err


def _split(a: float) -> tuple[float, float]:
    c = _SPLITTER * a
    abig = c - a
    ahi = c - abig
    return ahi, a - ahi


def two_prod(a: float, b: float) -> tuple[float, float]:
    """Return (p, err) with p + err == a * b exactly (Dekker splitting)."""
    p = a * b
    ahi, alo = _split(a)
    bhi, blo = _split(b)
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


@dataclass(frozen=True)
class DD:
    """Unevaluated sum hi + lo with |lo| <= 0.5 ulp(hi)."""

    hi: float
    lo: float = 0.0

    @staticmethod
    def of(x) -> "DD":
        if isinstance(x, DD):
            return x
        return DD(float(x), 0.0)

    def to_float(self) -> float:
        return self.hi + self.lo

    def __float__(self) -> float:
        return self.hi + self.lo

    def __neg__(self) -> "DD":
        return DD(-self.hi, -self.lo)

    def __abs__(self) -> "DD":
        return -self if self.hi < 0 else self

    def __add__(self, other) -> "DD":
        o = DD.of(other)
        s, e = two_sum(self.hi, o.hi)
        t, f = two_sum(self.lo, o.lo)
        e += t
        s, e = quick_two_sum(s, e)
        e += f
        hi, lo = quick_two_sum(s, e)
        return DD(hi, lo)

    __radd__ = __add__

    def __sub__(self, other) -> "DD":
        return self + (-DD.of(other))

    def __rsub__(self, other) -> "DD":
        return DD.of(other) + (-self)

    def __mul__(self, other) -> "DD":
        o = DD.of(other)
        p, e = two_prod(self.hi, o.hi)
        e += self.hi * o.lo + self.lo * o.hi
        hi, lo = quick_two_sum(p, e)
        return DD(hi, lo)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "DD":
        o = DD.of(other)
        q1 = self.hi / o.hi
        r = self - o * DD(q1)
        q2 = r.hi / o.hi
        r = r - o * DD(q2)
        q3 = r.hi / o.hi
        s, e = two_sum(q1, q2)
        hi, lo = quick_two_sum(s, e + q3)
        return DD(hi, lo)

    def __rtruediv__(self, other) -> "DD":
        return DD.of(other) / self

    def __lt__(self, other) -> bool:
        o = DD.of(other)
        return self.hi < o.hi or (self.hi == o.hi and self.lo < o.lo)

    def __eq__(self, other) -> bool:
        o = DD.of(other)
        return self.hi == o.hi and self.lo == o.lo

    def __hash__(self):
        return hash((self.hi, self.lo))

    def ldexp(self, k: int) -> "DD":
        return DD(math.ldexp(self.hi, k), math.ldexp(self.lo, k))

    def sqrt(self) -> "DD":
        if self.hi < 0:
            raise ValueError("sqrt of negative double-double")
        if self.hi == 0:
            return DD(0.0)
        s = math.sqrt(self.hi)
        # one Newton step: s + (x - s^2) / (2 s)
        t = DD(s)
        return t + (self - t * t) / (2.0 * s)


DD_LN2 = DD(0.6931471805599453, 2.3190468138462996e-17)


def dd_exp(x: DD | float) -> DD:
    """exp(x) to double-double accuracy via ln2 reduction and Taylor series."""
    x = DD.of(x)
    if x.hi == 0.0 and x.lo == 0.0:
        return DD(1.0)
    k = int(round(x.hi / DD_LN2.hi))
    r = x - DD_LN2 * float(k)
    total = DD(1.0) + r
    term = DD.of(r)
    for j in range(2, 40):
        term = term * r / float(j)
        total = total + term
        if abs(term.hi) <= 1e-35 * abs(total.hi):
            break
    return total.ldexp(k)


def dd_fsum(terms) -> DD:
    """Sum of DD (or float) terms in double-double arithmetic."""
    total = DD(0.0)
    for t in terms:
        total = total + DD.of(t)
    return total


def exp_dd_reference(nodes, scale: float = 1.0) -> float:
    """Divided difference of exp over the scaled nodes by the recurrence in
    double-double arithmetic; repeated nodes handled confluently.

    Test oracle only: for tightly clustered distinct nodes the recurrence
    cancels roughly log10(1/spread) digits per order, so keep
    n * log10(1/spread) comfortably below ~30.
    """
    zs = sorted(DD(n) * scale for n in nodes)
    n = len(zs)
    if n == 0:
        raise ValueError("need at least one node")
    lev = [dd_exp(z) for z in zs]
    fact = 1.0
    for k in range(1, n):
        fact *= k
        nxt = []
        for i in range(n - k):
            if zs[i + k] == zs[i]:
                nxt.append(dd_exp(zs[i]) / fact)
            else:
                nxt.append((lev[i + 1] - lev[i]) / (zs[i + k] - zs[i]))
        lev = nxt
    return lev[0].to_float()
