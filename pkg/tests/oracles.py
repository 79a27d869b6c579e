"""Independent exact arithmetic in Q(zeta_3) with rational coefficients, used as a test oracle."""

from fractions import Fraction
from math import factorial


def qmul(a, b):
    # basis (1, zeta) with zeta^2 = -1 - zeta
    a0, a1 = a
    b0, b1 = b
    s = a1 * b1
    return (a0 * b0 - s, a0 * b1 + a1 * b0 - s)


def qpow(a, n):
    out = (Fraction(1), Fraction(0))
    for _ in range(n):
        out = qmul(out, a)
    return out


def qexp(x, terms=60):
    total = (Fraction(0), Fraction(0))
    for n in range(terms):
        t = qpow(x, n)
        total = (total[0] + t[0] / factorial(n), total[1] + t[1] / factorial(n))
    return total


def reduce_mod(a, q):
    out = []
    for c in a:
        if c.denominator % 3 == 0:
            raise ValueError("not 3-integral")
        out.append(c.numerator * pow(c.denominator, -1, q) % q)
    return tuple(out)
