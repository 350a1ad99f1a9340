"""
Polynomial models: multi-indices, block layouts, sparse polynomials and
truncated multi-sequences.

All values are immutable after construction.
"""

import operator
from functools import cached_property, lru_cache
from math import comb
from types import MappingProxyType

import numpy as np

from nashpoly.exceptions import NashpolyError


class DimensionError(NashpolyError):
    """Raised when vector or polynomial dimensions do not match."""
    pass


class DegreeOverflowError(NashpolyError):
    """Raised when a polynomial degree exceeds a truncation order."""
    pass


class InvalidPlayerError(NashpolyError):
    """Raised when a player (block) index is out of range."""
    pass


class MultiIndex(tuple):
    """
    Exponent vector alpha with graded alphabetical ordering.

    Lower degree sorts first; within a degree, larger exponents on earlier
    variables sort first, so [z]_2 = (1, z1, z2, z1^2, z1*z2, z2^2).
    """

    __slots__ = ()

    def __new__(cls, exponents=()):
        return super().__new__(cls, (int(e) for e in exponents))

    @property
    def degree(self):
        return sum(self)

    def sort_key(self):
        return (sum(self), tuple(-e for e in self))

    def __add__(self, other):
        return MultiIndex(map(operator.add, self, other))

    def __lt__(self, other):
        return self.sort_key() < MultiIndex(other).sort_key()

    def __le__(self, other):
        return self.sort_key() <= MultiIndex(other).sort_key()

    def __gt__(self, other):
        return self.sort_key() > MultiIndex(other).sort_key()

    def __ge__(self, other):
        return self.sort_key() >= MultiIndex(other).sort_key()

    def __repr__(self):
        return f"MultiIndex({tuple(self)})"


def _exponents_of_degree(nvars, d):
    """Yield exponent tuples of total degree d, earlier variables first."""
    if nvars == 1:
        yield (d,)
        return
    for first in range(d, -1, -1):
        for rest in _exponents_of_degree(nvars - 1, d - first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def monomial_basis(nvars, d):
    """
    All multi-indices of degree at most d in graded alphabetical order.

    Args:
        nvars: Number of variables (>= 1)
        d: Maximum degree (>= 0)

    Returns:
        Tuple of MultiIndex of length C(nvars + d, d)
    """
    if nvars < 1 or d < 0:
        raise DimensionError(f"monomial_basis needs nvars >= 1 and d >= 0, got ({nvars}, {d})")
    basis = []
    for degree in range(d + 1):
        basis.extend(MultiIndex(e) for e in _exponents_of_degree(nvars, degree))
    return tuple(basis)


@lru_cache(maxsize=None)
def basis_index(nvars, d):
    """Position of each multi-index in monomial_basis(nvars, d)."""
    return MappingProxyType({alpha: pos for pos, alpha in enumerate(monomial_basis(nvars, d))})


def basis_size(nvars, d):
    return comb(nvars + d, d)


class BlockLayout(tuple):
    """
    Block widths (n_1, ..., n_N) of the stacked variable x = (x_1, ..., x_N).
    """

    __slots__ = ()

    def __new__(cls, widths):
        widths = tuple(int(w) for w in widths)
        if not widths or any(w < 1 for w in widths):
            raise DimensionError(f"Block widths must be positive, got {widths}")
        return super().__new__(cls, widths)

    @property
    def nvars(self):
        return sum(self)

    @property
    def nblocks(self):
        return len(self)

    def offset(self, i):
        self.check_player(i)
        return sum(self[:i])

    def block_slice(self, i):
        start = self.offset(i)
        return slice(start, start + self[i])

    def block_variables(self, i):
        return range(self.offset(i), self.offset(i) + self[i])

    def rival_variables(self, i):
        own = set(self.block_variables(i))
        return [v for v in range(self.nvars) if v not in own]

    def check_player(self, i):
        if not 0 <= i < len(self):
            raise InvalidPlayerError(f"Player index {i} out of range for {len(self)} players")

    def split(self, point):
        """Split a full point into per-block arrays."""
        point = np.asarray(point, dtype=float)
        if point.shape != (self.nvars,):
            raise DimensionError(f"Expected a point of length {self.nvars}, got {point.shape}")
        return [point[self.block_slice(i)] for i in range(len(self))]

    def __repr__(self):
        return f"BlockLayout({tuple(self)})"


class Polynomial:
    """
    Sparse real polynomial in nvars variables.

    Terms map MultiIndex to nonzero float coefficients. The zero polynomial
    has degree 0.
    """

    def __init__(self, terms, nvars, layout=None):
        layout = BlockLayout(layout) if layout is not None else BlockLayout((nvars,))
        if layout.nvars != nvars:
            raise DimensionError(f"Layout {tuple(layout)} does not cover {nvars} variables")
        clean = {}
        for alpha, coef in dict(terms).items():
            alpha = MultiIndex(alpha)
            if len(alpha) != nvars:
                raise DimensionError(f"Exponent {tuple(alpha)} has length {len(alpha)}, expected {nvars}")
            if any(e < 0 for e in alpha):
                raise DimensionError(f"Negative exponent in {tuple(alpha)}")
            coef = float(coef)
            if coef != 0.0:
                clean[alpha] = clean.get(alpha, 0.0) + coef
                if clean[alpha] == 0.0:
                    del clean[alpha]
        self._terms = clean
        self.nvars = nvars
        self.layout = layout

    # Construction helpers

    @classmethod
    def constant(cls, value, nvars, layout=None):
        return cls({(0,) * nvars: value}, nvars, layout)

    @classmethod
    def zero(cls, nvars, layout=None):
        return cls({}, nvars, layout)

    @classmethod
    def variable(cls, index, nvars, layout=None):
        if not 0 <= index < nvars:
            raise DimensionError(f"Variable {index} out of range for {nvars} variables")
        alpha = [0] * nvars
        alpha[index] = 1
        return cls({tuple(alpha): 1.0}, nvars, layout)

    @classmethod
    def variables(cls, nvars, layout=None):
        return [cls.variable(v, nvars, layout) for v in range(nvars)]

    @classmethod
    def from_records(cls, records, nvars, layout=None):
        """Build from [(coefficient, exponent vector), ...] records."""
        terms = {}
        for coef, exps in records:
            alpha = MultiIndex(exps)
            terms[alpha] = terms.get(alpha, 0.0) + float(coef)
        return cls(terms, nvars, layout)

    def to_records(self):
        """Terms as (coefficient, exponent list) in graded alphabetical order."""
        return [(coef, list(alpha)) for alpha, coef in sorted(self._terms.items())]

    # Introspection

    @property
    def terms(self):
        return MappingProxyType(self._terms)

    def degree(self):
        if not self._terms:
            return 0
        return max(alpha.degree for alpha in self._terms)

    def half_degree(self):
        return -(-self.degree() // 2)

    def is_zero(self):
        return not self._terms

    def is_constant(self):
        return all(alpha.degree == 0 for alpha in self._terms)

    def coefficient(self, alpha):
        return self._terms.get(MultiIndex(alpha), 0.0)

    def constant_term(self):
        return self.coefficient((0,) * self.nvars)

    def support_variables(self):
        """Indices of variables that appear with a positive exponent."""
        used = set()
        for alpha in self._terms:
            used.update(v for v, e in enumerate(alpha) if e)
        return used

    def max_abs_coefficient(self):
        return max((abs(c) for c in self._terms.values()), default=0.0)

    # Arithmetic

    def _layout_with(self, other):
        if self.nvars != other.nvars:
            raise DimensionError(f"Cannot combine polynomials in {self.nvars} and {other.nvars} variables")
        if self.layout == other.layout or other.layout.nblocks == 1:
            return self.layout
        if self.layout.nblocks == 1:
            return other.layout
        raise DimensionError(f"Incompatible block layouts {tuple(self.layout)} and {tuple(other.layout)}")

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Polynomial.constant(float(other), self.nvars, self.layout)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        layout = self._layout_with(other)
        terms = dict(self._terms)
        for alpha, coef in other._terms.items():
            terms[alpha] = terms.get(alpha, 0.0) + coef
        return Polynomial(terms, self.nvars, layout)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({alpha: -coef for alpha, coef in self._terms.items()}, self.nvars, self.layout)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            scale = float(other)
            return Polynomial({a: c * scale for a, c in self._terms.items()}, self.nvars, self.layout)
        if not isinstance(other, Polynomial):
            return NotImplemented
        layout = self._layout_with(other)
        terms = {}
        for a, ca in self._terms.items():
            for b, cb in other._terms.items():
                key = a + b
                terms[key] = terms.get(key, 0.0) + ca * cb
        return Polynomial(terms, self.nvars, layout)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self * (1.0 / float(other))
        return NotImplemented

    def __pow__(self, power):
        if not isinstance(power, int) or power < 0:
            return NotImplemented
        result = Polynomial.constant(1.0, self.nvars, self.layout)
        base = self
        while power:
            if power & 1:
                result = result * base
            base = base * base
            power >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self._terms.items())))

    def max_abs_difference(self, other):
        """Largest coefficient gap between two polynomials."""
        return (self - other).max_abs_coefficient()

    # Calculus and substitution

    def diff(self, var):
        if not 0 <= var < self.nvars:
            raise DimensionError(f"Variable {var} out of range for {self.nvars} variables")
        terms = {}
        for alpha, coef in self._terms.items():
            e = alpha[var]
            if e:
                beta = list(alpha)
                beta[var] = e - 1
                terms[tuple(beta)] = terms.get(tuple(beta), 0.0) + coef * e
        return Polynomial(terms, self.nvars, self.layout)

    def partial_evaluate(self, values):
        """
        Substitute numbers for some variables, keeping nvars.

        Args:
            values: Mapping variable index -> float
        """
        values = {int(v): float(x) for v, x in values.items()}
        terms = {}
        for alpha, coef in self._terms.items():
            beta = list(alpha)
            for v, x in values.items():
                if beta[v]:
                    coef *= x ** beta[v]
                    beta[v] = 0
            key = tuple(beta)
            terms[key] = terms.get(key, 0.0) + coef
        return Polynomial(terms, self.nvars, self.layout)

    def select_variables(self, keep, layout=None):
        """
        Re-index onto the variables listed in keep.

        The polynomial must not depend on any other variable.
        """
        keep = list(keep)
        dropped = self.support_variables() - set(keep)
        if dropped:
            raise DimensionError(f"Polynomial still depends on variables {sorted(dropped)}")
        terms = {tuple(alpha[v] for v in keep): coef for alpha, coef in self._terms.items()}
        return Polynomial(terms, len(keep), layout)

    def embed(self, positions, nvars, layout=None):
        """Map variable v of this polynomial to variable positions[v] of a larger space."""
        if len(positions) != self.nvars:
            raise DimensionError(f"Need {self.nvars} positions, got {len(positions)}")
        terms = {}
        for alpha, coef in self._terms.items():
            beta = [0] * nvars
            for v, e in zip(positions, alpha):
                beta[v] += e
            terms[tuple(beta)] = terms.get(tuple(beta), 0.0) + coef
        return Polynomial(terms, nvars, layout)

    # Evaluation

    @cached_property
    def _dense(self):
        if not self._terms:
            return np.zeros((0, self.nvars), dtype=int), np.zeros(0)
        alphas = np.array(list(self._terms.keys()), dtype=int).reshape(len(self._terms), self.nvars)
        coefs = np.array(list(self._terms.values()), dtype=float)
        return alphas, coefs

    def evaluate(self, point):
        point = np.asarray(point, dtype=float)
        if point.shape != (self.nvars,):
            raise DimensionError(f"Point of shape {point.shape} does not match {self.nvars} variables")
        alphas, coefs = self._dense
        if not len(coefs):
            return 0.0
        return float(coefs @ np.prod(point[None, :] ** alphas, axis=1))

    def __call__(self, point):
        return self.evaluate(point)

    def __repr__(self):
        if not self._terms:
            return "Polynomial(0)"
        parts = []
        for alpha, coef in sorted(self._terms.items()):
            mono = '*'.join(
                f"x{v + 1}" + (f"^{e}" if e > 1 else '') for v, e in enumerate(alpha) if e
            )
            parts.append(f"{coef:g}" + (f"*{mono}" if mono else ''))
        return "Polynomial(" + ' + '.join(parts) + ")"


class Tms:
    """
    Truncated multi-sequence y of even order 2k in nvars variables.

    values[pos] is y_alpha for alpha = monomial_basis(nvars, order)[pos].
    """

    def __init__(self, order, nvars, values):
        values = np.asarray(values, dtype=float)
        expected = basis_size(nvars, order)
        if values.shape != (expected,):
            raise DimensionError(f"A tms of order {order} in {nvars} variables needs {expected} values, got {values.shape}")
        self.order = order
        self.nvars = nvars
        self.values = values
        self.values.setflags(write=False)

    @property
    def basis(self):
        return monomial_basis(self.nvars, self.order)

    @property
    def y0(self):
        return float(self.values[0])

    def __getitem__(self, alpha):
        pos = basis_index(self.nvars, self.order).get(MultiIndex(alpha))
        if pos is None:
            raise DegreeOverflowError(f"Multi-index {tuple(alpha)} exceeds tms order {self.order}")
        return float(self.values[pos])

    def first_moments(self):
        """(y_{e_1}, ..., y_{e_n})."""
        return np.array(self.values[1:self.nvars + 1])

    def truncate(self, order):
        if order > self.order:
            raise DegreeOverflowError(f"Cannot truncate order {self.order} tms to order {order}")
        return Tms(order, self.nvars, self.values[:basis_size(self.nvars, order)])

    def __repr__(self):
        return f"Tms(order={self.order}, nvars={self.nvars})"
