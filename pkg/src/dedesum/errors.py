"""Typed precondition failures, so callers can assert the exact failure mode."""


class DedekindError(ValueError):
    """Base class for every precondition violation raised by dedesum."""


class CharacterError(DedekindError):
    """Malformed, trivial or imprimitive character where one is not allowed."""


class ParityError(DedekindError):
    """chi1(-1) * chi2(-1) != 1."""


class DivisibilityError(DedekindError):
    """c is not a positive multiple of q1*q2."""


class PositivityError(DivisibilityError):
    """c <= 0 where a positive lower-left entry is required."""


class CoprimalityError(DedekindError):
    """gcd(a, c) != 1 (or gcd(h, k) != 1 for the classical sum)."""


class MembershipError(DedekindError):
    """A matrix is not in the congruence subgroup the operation needs."""


class CrossCheckError(AssertionError):
    """Two evaluation routes disagreed; this signals a bug, never bad input."""


class InconclusiveError(RuntimeError):
    """A sampling budget ran out before the quantity could be determined."""
