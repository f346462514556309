"""Sparse multivariate polynomials over exact rationals.

Monomials are tuples of (variable, exponent) pairs sorted by variable name;
coefficients are Fraction.  This is the workhorse behind every symbolic
identity check in the package: all flat-model data is polynomial, so "equals
zero symbolically" reduces to an exact coefficient comparison here.
"""

from fractions import Fraction

_ZERO = Fraction(0)


def _mono_mul(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    out = dict(m1)
    for v, e in m2:
        out[v] = out.get(v, 0) + e
    return tuple(sorted(out.items()))


class Polynomial:
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        # terms: dict monomial -> Fraction, zero coefficients removed
        self.terms = terms or {}

    @staticmethod
    def constant(c):
        c = Fraction(c)
        return Polynomial({(): c} if c else {})

    @staticmethod
    def variable(name):
        return Polynomial({((name, 1),): Fraction(1)})

    @staticmethod
    def coerce(x):
        if isinstance(x, Polynomial):
            return x
        return Polynomial.constant(x)

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("not a constant polynomial")
        return self.terms.get((), _ZERO)

    def variables(self):
        seen = set()
        for mono in self.terms:
            for v, _ in mono:
                seen.add(v)
        return seen

    def degree(self):
        if not self.terms:
            return 0
        return max(sum(e for _, e in mono) for mono in self.terms)

    def __add__(self, other):
        if not isinstance(other, (Polynomial, int, Fraction)):
            return NotImplemented  # lets expression trees absorb polynomials
        other = Polynomial.coerce(other)
        out = dict(self.terms)
        for mono, c in other.terms.items():
            s = out.get(mono, _ZERO) + c
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, (Polynomial, int, Fraction)):
            return NotImplemented
        return self + (-Polynomial.coerce(other))

    def __rsub__(self, other):
        if not isinstance(other, (Polynomial, int, Fraction)):
            return NotImplemented
        return Polynomial.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, (Polynomial, int, Fraction)):
            return NotImplemented
        other = Polynomial.coerce(other)
        if not self.terms or not other.terms:
            return Polynomial()
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                s = out.get(m, _ZERO) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = Polynomial.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == Polynomial.constant(other).terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def diff(self, var):
        out = {}
        for mono, c in self.terms.items():
            for idx, (v, e) in enumerate(mono):
                if v == var:
                    if e == 1:
                        new = mono[:idx] + mono[idx + 1:]
                    else:
                        new = mono[:idx] + ((v, e - 1),) + mono[idx + 1:]
                    s = out.get(new, _ZERO) + c * e
                    if s:
                        out[new] = s
                    else:
                        out.pop(new, None)
                    break
        return Polynomial(out)

    def evaluate(self, env):
        total = None
        for mono, c in self.terms.items():
            val = c
            for v, e in mono:
                val = val * env[v] ** e
            total = val if total is None else total + val
        if total is None:
            return _ZERO
        return total

    def substitute(self, env):
        """Substitute polynomials (or scalars) for a subset of variables."""
        result = Polynomial()
        for mono, c in self.terms.items():
            term = Polynomial.constant(c)
            for v, e in mono:
                rep = env.get(v)
                if rep is None:
                    term = term * Polynomial.variable(v) ** e
                else:
                    term = term * Polynomial.coerce(rep) ** e
            result = result + term
        return result

    def __repr__(self):
        return f"Polynomial({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms, key=lambda m: (-sum(e for _, e in m), m)):
            c = self.terms[mono]
            factors = ["%s^%d" % (v, e) if e > 1 else v for v, e in mono]
            body = "*".join(factors)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{c}*{body}")
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out


ZERO = Polynomial()
ONE = Polynomial.constant(1)
