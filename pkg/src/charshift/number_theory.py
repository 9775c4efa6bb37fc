"""Integer-side primitives.

Legendre and Jacobi symbols, trial-division factorization of odd square-free
integers, Euler phi, Chinese remaindering, continued-fraction convergents,
and quadratic Gauss sums in both closed form and literal brute force.
"""

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DomainTooLarge,
    EvenInput,
    EvenModulus,
    NotOddPrime,
    NotSquareFree,
    UnsupportedParameters,
)

# Witnesses making Miller-Rabin deterministic for all inputs below 3.3 * 10^24,
# far past desk scale.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_UNITS = (1 + 0j, 1j, -1 + 0j, -1j)  # powers of i


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test for desk-scale integers."""
    if n < 2:
        return False
    for b in _MR_BASES:
        if n == b:
            return True
        if n % b == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for b in _MR_BASES:
        x = pow(b, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def legendre(x: int, p: int) -> int:
    """Quadratic residue symbol of x modulo an odd prime p, in {-1, 0, +1}."""
    if p < 3 or p % 2 == 0 or not is_prime(p):
        raise NotOddPrime(f"{p} is not an odd prime")
    x %= p
    if x == 0:
        return 0
    return 1 if pow(x, (p - 1) // 2, p) == 1 else -1


def jacobi(x: int, n: int) -> int:
    """Jacobi symbol of x modulo odd n >= 1, via quadratic reciprocity.

    Never factors n, so a Jacobi-symbol oracle can be evaluated without
    revealing the factorization it hides.
    """
    if n < 1 or n % 2 == 0:
        raise EvenModulus(f"modulus {n} must be odd and positive")
    x %= n
    acc = 1
    while x:
        while x % 2 == 0:
            x //= 2
            if n % 8 in (3, 5):
                acc = -acc
        x, n = n, x
        if x % 4 == 3 and n % 4 == 3:
            acc = -acc
        x %= n
    return acc if n == 1 else 0


@dataclass(frozen=True)
class FactoredOddSquarefree:
    """An odd square-free integer together with its sorted prime factors."""

    n: int
    factors: tuple[int, ...]

    def __post_init__(self):
        if self.n % 2 == 0:
            raise EvenInput(f"{self.n} is even")
        if len(set(self.factors)) != len(self.factors):
            raise NotSquareFree(f"repeated factor in {self.factors}")
        if tuple(sorted(self.factors)) != self.factors:
            raise ValueError("factors must be sorted ascending")
        prod = 1
        for p in self.factors:
            if p % 2 == 0 or not is_prime(p):
                raise ValueError(f"{p} is not an odd prime")
            prod *= p
        if prod != self.n:
            raise ValueError(f"factors {self.factors} do not multiply to {self.n}")


def factor_trial(n: int) -> FactoredOddSquarefree:
    """Factor an odd integer n >= 3 by trial division; reject square factors."""
    if n % 2 == 0:
        raise EvenInput(f"{n} is even")
    if n < 3:
        raise ValueError(f"{n} is below the smallest legal modulus 3")
    factors = []
    rest, d = n, 3
    while d * d <= rest:
        if rest % d == 0:
            rest //= d
            if rest % d == 0:
                raise NotSquareFree(f"{d}^2 divides {n}")
            factors.append(d)
        else:
            d += 2
    if rest > 1:
        factors.append(rest)
    return FactoredOddSquarefree(n, tuple(factors))


def euler_phi(moduli: FactoredOddSquarefree) -> int:
    """|Z_n^*| for square-free n: the product of (p - 1) over its factors."""
    out = 1
    for p in moduli.factors:
        out *= p - 1
    return out


def crt_split(x: int, moduli: FactoredOddSquarefree) -> tuple[int, ...]:
    """Residues of x modulo each prime factor."""
    return tuple(x % p for p in moduli.factors)


def crt_compose(residues, moduli: FactoredOddSquarefree) -> int:
    """The unique x in Z_n with the given residue per prime factor."""
    if len(residues) != len(moduli.factors):
        raise ValueError("one residue per factor required")
    n = moduli.n
    x = 0
    for res, p in zip(residues, moduli.factors):
        m = n // p
        x += res * m * pow(m, -1, p)
    return x % n


def convergents(i: int, m: int) -> list[Fraction]:
    """All continued-fraction convergents of i/m, ending at i/m in lowest terms."""
    if not 0 <= i < m:
        raise ValueError(f"need 0 <= {i} < {m}")
    quotients = []
    a, b = i, m
    while b:
        quotients.append(a // b)
        a, b = b, a % b
    # First quotient is 0 since i < m; the recurrence then builds h/k pairs.
    out = []
    h_prev, h = 1, quotients[0]
    k_prev, k = 0, 1
    out.append(Fraction(h, k))
    for q in quotients[1:]:
        h_prev, h = h, q * h + h_prev
        k_prev, k = k, q * k + k_prev
        out.append(Fraction(h, k))
    return out


@dataclass(frozen=True)
class GaussSum:
    """Exact value u * sqrt(radicand) with u one of 1, i, -1, -i."""

    unit: complex
    radicand: int

    @property
    def value(self) -> complex:
        return self.unit * math.sqrt(self.radicand)

    @property
    def exact_str(self) -> str:
        prefix = {1 + 0j: "", 1j: "i*", -1 + 0j: "-", -1j: "-i*"}[self.unit]
        return f"{prefix}sqrt({self.radicand})"


@dataclass(frozen=True)
class GaussSumSpec:
    """Which quadratic Gauss sum to evaluate: Z_p, Z_n, or F_{p^r}."""

    kind: str  # "ring-Zp" | "ring-Zn" | "field-Fq"
    prime: int | None = None
    ring: FactoredOddSquarefree | None = None
    field: object = None  # FieldSpec; kept untyped to avoid a module cycle

    @classmethod
    def for_prime(cls, p: int) -> "GaussSumSpec":
        if p < 3 or p % 2 == 0 or not is_prime(p):
            raise NotOddPrime(f"{p} is not an odd prime")
        return cls(kind="ring-Zp", prime=p)

    @classmethod
    def for_ring(cls, moduli: FactoredOddSquarefree) -> "GaussSumSpec":
        return cls(kind="ring-Zn", ring=moduli)

    @classmethod
    def for_field(cls, field) -> "GaussSumSpec":
        return cls(kind="field-Fq", field=field)

    @property
    def domain_size(self) -> int:
        if self.kind == "ring-Zp":
            return self.prime
        if self.kind == "ring-Zn":
            return self.ring.n
        return self.field.q


def gauss_sum_closed_form(spec: GaussSumSpec) -> GaussSum:
    """Tabulated exact value of the quadratic Gauss sum."""
    if spec.kind == "ring-Zp":
        p = spec.prime
        return GaussSum(_UNITS[0] if p % 4 == 1 else _UNITS[1], p)
    if spec.kind == "ring-Zn":
        n = spec.ring.n
        return GaussSum(_UNITS[0] if n % 4 == 1 else _UNITS[1], n)
    if spec.kind == "field-Fq":
        p, r = spec.field.p, spec.field.r
        if p == 2:
            raise UnsupportedParameters("no closed form in characteristic two")
        # (-1)^(r-1) * i^(r*(p-1)^2/4), folded into a single power of i.
        exponent = (2 * (r - 1) + r * ((p - 1) ** 2 // 4)) % 4
        return GaussSum(_UNITS[exponent], p**r)
    raise UnsupportedParameters(f"unknown kind {spec.kind!r}")


def gauss_sum_bruteforce(spec: GaussSumSpec) -> complex:
    """The literal character-weighted root-of-unity sum, in double precision."""
    size = spec.domain_size
    if size > 10**6:
        raise DomainTooLarge(f"domain of size {size} exceeds 10^6")
    if spec.kind == "ring-Zp":
        p = spec.prime
        return sum(legendre(x, p) * cmath.exp(2j * cmath.pi * x / p) for x in range(p))
    if spec.kind == "ring-Zn":
        n = spec.ring.n
        return sum(jacobi(x, n) * cmath.exp(2j * cmath.pi * x / n) for x in range(n))
    if spec.kind == "field-Fq":
        from .finite_field import element_from_index, quadratic_character, trace

        fld = spec.field
        total = 0j
        for idx in range(fld.q):
            x = element_from_index(fld, idx)
            chi = quadratic_character(fld, x)
            if chi:
                total += chi * cmath.exp(2j * cmath.pi * trace(fld, x) / fld.p)
        return total
    raise UnsupportedParameters(f"unknown kind {spec.kind!r}")
