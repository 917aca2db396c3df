"""Small exact number-theory helpers (trial division scale)."""

from fractions import Fraction
from math import gcd, isqrt


def primes():
    """Yield 2, 3, 5, ... indefinitely (incremental trial-division sieve)."""
    found = []
    n = 2
    while True:
        if all(n % p for p in found if p * p <= n):
            found.append(n)
            yield n
        n += 1 if n == 2 else 2


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of |n| by trial division; n must be nonzero."""
    if n == 0:
        raise ValueError("cannot factor 0")
    n = abs(n)
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def valuation(x, q: int) -> int:
    """q-adic valuation of a nonzero int or Fraction."""
    if isinstance(x, Fraction):
        if x == 0:
            raise ValueError("valuation of 0")
        return valuation(x.numerator, q) - valuation(x.denominator, q)
    if x == 0:
        raise ValueError("valuation of 0")
    x = abs(x)
    v = 0
    while x % q == 0:
        x //= q
        v += 1
    return v


def unit_part(x: Fraction, q: int) -> Fraction:
    """x / q^v_q(x), a q-adic unit."""
    return Fraction(x) / Fraction(q) ** valuation(x, q)


def legendre(a: int, q: int) -> int:
    """Legendre symbol (a|q) for an odd prime q; a must be coprime to q."""
    a %= q
    if a == 0:
        raise ValueError("argument divisible by the prime")
    s = pow(a, (q - 1) // 2, q)
    return 1 if s == 1 else -1


def reduce_unit_mod(x: Fraction, modulus: int) -> int:
    """Integer in [0, modulus) congruent to x, for x with denominator coprime
    to modulus."""
    num, den = x.numerator, x.denominator
    if gcd(den, modulus) != 1:
        raise ValueError(f"denominator {den} not invertible mod {modulus}")
    return num * pow(den, -1, modulus) % modulus


def exact_isqrt(n) -> int:
    """Integer square root of a perfect square; raises otherwise."""
    if isinstance(n, Fraction):
        if n.denominator != 1:
            raise ValueError(f"{n} is not an integer")
        n = n.numerator
    r = isqrt(n)
    if r * r != n:
        raise ValueError(f"{n} is not a perfect square")
    return r
