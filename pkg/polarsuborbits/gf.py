"""Odd-order finite fields with the distinguished non-square z and the half-set Omega."""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple, Union

import galois
import numpy as np

from .errors import FieldError

logger = logging.getLogger(__name__)

# A field element is a 0-d galois FieldArray; its int() is the canonical index.
FieldElement = galois.FieldArray
Scalar = Union[int, galois.FieldArray]


@dataclass(frozen=True)
class FieldSpec:
    """The field F_q together with the constants every construction depends on."""
    q: int
    p: int
    e: int
    GF: type
    modulus: str
    z: int
    omega: Tuple[int, ...]

    def __call__(self, value) -> galois.FieldArray:
        return self.GF(value)

    @property
    def zero(self) -> galois.FieldArray:
        return self.GF(0)

    @property
    def one(self) -> galois.FieldArray:
        return self.GF(1)

    @property
    def half(self) -> galois.FieldArray:
        return self.GF(1) / self.GF(2)

    @property
    def z_element(self) -> galois.FieldArray:
        return self.GF(self.z)

    @property
    def primitive(self) -> galois.FieldArray:
        return self.GF.primitive_element

    def elements(self) -> galois.FieldArray:
        """All q elements in canonical index order."""
        return self.GF(np.arange(self.q))

    def element(self, value: Scalar) -> galois.FieldArray:
        if isinstance(value, galois.FieldArray):
            return value
        if not 0 <= int(value) < self.q:
            raise FieldError(f"{value} is not a canonical index of F_{self.q}")
        return self.GF(int(value))

    def omega_rep(self, value: Scalar) -> int:
        """The member of {a, -a} that lies in Omega, as an index."""
        a = self.element(value)
        if a == 0:
            raise FieldError("0 has no Omega representative")
        return int(a) if int(a) in self.omega else int(-a)

    def to_dict(self):
        return {
            'q': self.q,
            'p': self.p,
            'e': self.e,
            'modulus': self.modulus,
            'z': self.z,
            'omega': list(self.omega),
        }


@lru_cache(maxsize=None)
def field_new(q: int) -> FieldSpec:
    """Build F_q for an odd prime power q >= 3 and fix z and Omega deterministically."""
    if isinstance(q, bool) or not isinstance(q, (int, np.integer)):
        raise FieldError(f"field order must be an integer, got {q!r}")
    q = int(q)
    if q < 3:
        raise FieldError(f"field order must be at least 3, got {q}")
    if q % 2 == 0:
        raise FieldError(f"field order must be odd, got {q} (characteristic 2 is not supported)")
    if not galois.is_prime_power(q):
        raise FieldError(f"field order must be a prime power, got {q}")

    primes, exponents = galois.factors(q)
    p, e = int(primes[0]), int(exponents[0])
    if e == 1:
        GF = galois.GF(p)
        modulus = ""
    else:
        poly = galois.irreducible_poly(p, e, method="min")
        GF = galois.GF(q, irreducible_poly=poly)
        modulus = str(poly)

    z = _select_z(GF, q)
    omega = tuple(i for i in range(1, q) if i < int(-GF(i)))
    logger.debug("built F_%d: z=%d omega=%s modulus=%r", q, z, omega, modulus)
    return FieldSpec(q=q, p=p, e=e, GF=GF, modulus=modulus, z=z, omega=omega)


def _euler(GF, q: int, a) -> bool:
    return a == 0 or a ** ((q - 1) // 2) == 1


def _select_z(GF, q: int) -> int:
    one = GF(1)
    for i in range(1, q):
        a = GF(i)
        if not _euler(GF, q, a) and not _euler(GF, q, one - a):
            return i
    raise FieldError(f"no non-square z with 1-z a non-square exists in F_{q}")


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def sub(a: FieldElement, b: FieldElement) -> FieldElement:
    return a - b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def neg(a: FieldElement) -> FieldElement:
    return -a


def inv(a: FieldElement) -> FieldElement:
    if a == 0:
        raise FieldError("0 has no multiplicative inverse")
    return type(a)(1) / a


def is_square(spec: FieldSpec, a: Scalar) -> bool:
    """Euler criterion; 0 counts as a square."""
    return bool(_euler(spec.GF, spec.q, spec.element(a)))


def sqrt(spec: FieldSpec, a: Scalar) -> FieldElement:
    """The square root of smaller canonical index."""
    a = spec.element(a)
    if not is_square(spec, a):
        raise FieldError(f"{int(a)} is not a square in F_{spec.q}")
    everything = spec.elements()
    roots = np.flatnonzero((everything * everything) == a)
    return spec.GF(int(roots[0]))
