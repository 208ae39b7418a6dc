"""Exact sparse multivariate polynomials over the rationals.

Polynomials are stored as ``{exponent tuple: coefficient}`` with coefficients
kept as ``int`` when integral and ``fractions.Fraction`` otherwise.  Monomials
are ordered graded-lexicographically: total degree first, then the exponent
tuple compared lexicographically in the declared variable order.
"""

from fractions import Fraction
import json
import numbers


class NotDivisible(ArithmeticError):
    """An exact division left a nonzero remainder."""


class VariableMismatch(ValueError):
    """Two polynomials are declared over different variable tuples."""


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def as_rational(x):
    """Coerce ints, Fractions and decimal strings like ``"-3/4"`` to a rational."""
    if isinstance(x, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return _norm(x)
    if isinstance(x, str):
        return _norm(Fraction(x.strip()))
    if isinstance(x, numbers.Rational):
        return _norm(Fraction(x.numerator, x.denominator))
    raise TypeError(f"cannot use {type(x).__name__} as an exact coefficient")


def grlex_key(exp):
    return (sum(exp), exp)


def _add_exp(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


class MPoly:
    """Immutable exact polynomial over a fixed ordered tuple of variables."""

    __slots__ = ("vars", "terms")

    def __init__(self, vars, terms=None):
        self.vars = tuple(vars)
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("duplicate variable names")
        n = len(self.vars)
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != n or any(x < 0 for x in e):
                raise ValueError(f"bad exponent {e} for variables {self.vars}")
            c = as_rational(c)
            if c:
                s = clean.get(e, 0) + c
                if s:
                    clean[e] = _norm(s)
                else:
                    clean.pop(e, None)
        self.terms = clean

    @classmethod
    def _raw(cls, vars, terms):
        p = object.__new__(cls)
        p.vars = vars
        p.terms = terms
        return p

    # constructors

    @classmethod
    def const(cls, vars, c):
        vars = tuple(vars)
        c = as_rational(c)
        return cls._raw(vars, {(0,) * len(vars): c} if c else {})

    @classmethod
    def var(cls, vars, name):
        vars = tuple(vars)
        e = tuple(1 if v == name else 0 for v in vars)
        if sum(e) != 1:
            raise ValueError(f"{name!r} not among {vars}")
        return cls._raw(vars, {e: 1})

    @classmethod
    def gens(cls, vars):
        return tuple(cls.var(vars, v) for v in vars)

    @classmethod
    def zero(cls, vars):
        return cls._raw(tuple(vars), {})

    # basic queries

    def is_zero(self):
        return not self.terms

    def degree(self, var=None):
        """Total degree, or degree in one variable; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e) for e in self.terms)
        i = self.vars.index(var)
        return max(e[i] for e in self.terms)

    def leading(self):
        """(exponent, coefficient) of the grlex-largest monomial."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=grlex_key)
        return e, self.terms[e]

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def coeff(self, exp):
        return self.terms.get(tuple(exp), 0)

    def _coerce(self, other):
        if isinstance(other, MPoly):
            if other.vars != self.vars:
                raise VariableMismatch(f"{self.vars} vs {other.vars}")
            return other
        return MPoly.const(self.vars, other)

    # arithmetic

    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            s = t.get(e, 0) + c
            if s:
                t[e] = _norm(s)
            else:
                t.pop(e, None)
        return MPoly._raw(self.vars, t)

    __radd__ = __add__

    def __neg__(self):
        return MPoly._raw(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            c = as_rational(other)
            if not c:
                return MPoly.zero(self.vars)
            return MPoly._raw(self.vars, {e: _norm(v * c) for e, v in self.terms.items()})
        other = self._coerce(other)
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        t = {}
        get = t.get
        for e2, c2 in b.items():
            for e1, c1 in a.items():
                e = _add_exp(e1, e2)
                t[e] = get(e, 0) + c1 * c2
        return MPoly._raw(self.vars, {e: _norm(c) for e, c in t.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative int")
        result = MPoly.const(self.vars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __truediv__(self, other):
        """Division by a nonzero rational scalar only; use ``div_exact`` for polynomials."""
        if isinstance(other, MPoly):
            return div_exact(self, other)
        c = as_rational(other)
        if not c:
            raise ZeroDivisionError("division by zero")
        inv = Fraction(1) / c
        return self * inv

    def __eq__(self, other):
        if isinstance(other, MPoly):
            return self.vars == other.vars and self.terms == other.terms
        try:
            return self == MPoly.const(self.vars, other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def __repr__(self):
        return f"MPoly({self.vars}, {self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, e) if k
            )
            if mono:
                coef = "" if c == 1 else "-" if c == -1 else f"({c})*"
                parts.append(f"{coef}{mono}")
            else:
                parts.append(f"({c})" if isinstance(c, Fraction) else str(c))
        return " + ".join(parts)

    # calculus and substitution

    def diff(self, var):
        i = self.vars.index(var)
        t = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                t[tuple(f)] = _norm(c * e[i])
        return MPoly._raw(self.vars, t)

    def subst(self, mapping, new_vars=None):
        """Substitute variables by polynomials or rationals.

        ``mapping`` sends variable names to MPoly over ``new_vars`` or to
        rational constants.  Unmapped variables must appear in ``new_vars``
        and are carried over.  ``new_vars`` defaults to ``self.vars``.
        """
        new_vars = self.vars if new_vars is None else tuple(new_vars)
        images = []
        for v in self.vars:
            if v in mapping:
                img = mapping[v]
                if isinstance(img, MPoly):
                    if img.vars != new_vars:
                        raise VariableMismatch(f"image of {v} over {img.vars}, expected {new_vars}")
                else:
                    img = MPoly.const(new_vars, img)
            elif v in new_vars:
                img = MPoly.var(new_vars, v)
            else:
                raise VariableMismatch(f"variable {v!r} is neither substituted nor kept")
            images.append(img)
        # cache powers per variable
        powers = [dict() for _ in images]

        def pw(i, k):
            d = powers[i]
            if k not in d:
                d[k] = images[i] ** k
            return d[k]

        out = MPoly.zero(new_vars)
        for e, c in self.terms.items():
            term = MPoly.const(new_vars, c)
            for i, k in enumerate(e):
                if k:
                    term = term * pw(i, k)
            out = out + term
        return out

    def eval(self, point):
        """Evaluate at a point; exact if all values are rational, else complex."""
        if isinstance(point, dict):
            point = [point[v] for v in self.vars]
        point = list(point)
        if len(point) != len(self.vars):
            raise ValueError("wrong number of coordinates")
        if all(isinstance(x, (int, Fraction)) and not isinstance(x, bool) for x in point):
            total = 0
            for e, c in self.terms.items():
                m = c
                for x, k in zip(point, e):
                    if k:
                        m *= x ** k
                total += m
            return _norm(Fraction(total)) if isinstance(total, Fraction) else total
        return _horner(self.terms, [complex(x) for x in point], 0)

    def magnitude_sum(self, point):
        """Sum of |c x^e| over monomials: the scale used for relative residuals."""
        pt = [complex(x) for x in point]
        s = 0.0
        for e, c in self.terms.items():
            m = abs(float(c))
            for x, k in zip(pt, e):
                if k:
                    m *= abs(x) ** k
            s += m
        return s

    def coefficients_in(self, var):
        """Split as sum_k coeff_k * var^k; returns {k: MPoly over same vars}."""
        i = self.vars.index(var)
        out = {}
        for e, c in self.terms.items():
            f = list(e)
            k = f[i]
            f[i] = 0
            out.setdefault(k, {})[tuple(f)] = c
        return {k: MPoly._raw(self.vars, t) for k, t in out.items()}

    # serialization

    def to_json(self):
        terms = []
        for e, c in self.sorted_terms():
            f = Fraction(c)
            terms.append({"num": str(f.numerator), "den": str(f.denominator), "exp": list(e)})
        return {"vars": list(self.vars), "terms": terms}

    def dumps(self):
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        terms = {}
        for t in obj["terms"]:
            e = tuple(t["exp"])
            if e in terms:
                raise ValueError(f"duplicate monomial {e}")
            terms[e] = Fraction(int(t["num"]), int(t["den"]))
        return cls(obj["vars"], terms)


def _horner(terms, point, i):
    # recursive Horner in variable i, coefficients converted to complex first
    if i == len(point):
        return sum(complex(float(c)) for c in terms.values())
    groups = {}
    for e, c in terms.items():
        groups.setdefault(e[i], {})[e] = c
    x = point[i]
    acc = 0j
    for k in range(max(groups), -1, -1):
        acc = acc * x
        if k in groups:
            acc += _horner(groups[k], point, i + 1)
    return acc


def div_exact(p, q):
    """Return p / q, raising NotDivisible unless q divides p exactly."""
    q = p._coerce(q)
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if p.is_zero():
        return MPoly.zero(p.vars)
    lq_e, lq_c = q.leading()
    lq_inv = Fraction(1) / lq_c if not isinstance(lq_c, int) or abs(lq_c) != 1 else lq_c
    rem = dict(p.terms)
    quot = {}
    qterms = list(q.terms.items())
    while rem:
        e, c = max(rem.items(), key=lambda t: grlex_key(t[0]))
        if not _divides(lq_e, e):
            raise NotDivisible(f"leading monomial {e} not divisible by {lq_e}")
        m = tuple(x - y for x, y in zip(e, lq_e))
        f = _norm(c * lq_inv)
        quot[m] = f
        for qe, qc in qterms:
            k = _add_exp(qe, m)
            s = rem.get(k, 0) - f * qc
            if s:
                rem[k] = _norm(s)
            else:
                rem.pop(k, None)
    return MPoly._raw(p.vars, quot)


def divides(q, p):
    try:
        div_exact(p, q)
    except NotDivisible:
        return False
    return True


class PolyMatrix:
    """Dense square or rectangular matrix of MPoly entries over shared variables."""

    def __init__(self, rows):
        rows = [list(r) for r in rows]
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged or empty matrix")
        vars = None
        for r in rows:
            for x in r:
                if isinstance(x, MPoly):
                    if vars is None:
                        vars = x.vars
                    elif x.vars != vars:
                        raise VariableMismatch("entries over different variables")
        if vars is None:
            raise ValueError("need at least one MPoly entry to fix the variables")
        self.vars = vars
        self.rows = [[x if isinstance(x, MPoly) else MPoly.const(vars, x) for x in r] for r in rows]

    @property
    def shape(self):
        return len(self.rows), len(self.rows[0])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, PolyMatrix) and self.rows == other.rows

    def __add__(self, other):
        return PolyMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return PolyMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __matmul__(self, other):
        n, m = self.shape
        m2, k = other.shape
        if m != m2:
            raise ValueError("shape mismatch")
        out = []
        for i in range(n):
            row = []
            for j in range(k):
                acc = MPoly.zero(self.vars)
                for t in range(m):
                    if self.rows[i][t].terms and other.rows[t][j].terms:
                        acc = acc + self.rows[i][t] * other.rows[t][j]
                row.append(acc)
            out.append(row)
        return PolyMatrix(out)

    def scale(self, c):
        return PolyMatrix([[x * c for x in r] for r in self.rows])

    def map(self, fn):
        return PolyMatrix([[fn(x) for x in r] for r in self.rows])

    @classmethod
    def identity(cls, vars, n, c=1):
        return cls([[MPoly.const(vars, c if i == j else 0) for j in range(n)] for i in range(n)])

    def is_zero(self):
        return all(x.is_zero() for r in self.rows for x in r)

    def evaluate(self, point):
        import numpy as np
        return np.array([[complex(x.eval(point)) for x in r] for r in self.rows])

    def det(self):
        return det_bareiss(self)


def det_bareiss(m):
    """Fraction-free Bareiss determinant with exact polynomial division."""
    n, k = m.shape
    if n != k:
        raise ValueError("determinant of a non-square matrix")
    a = [list(r) for r in m.rows]
    vars = m.vars
    sign = 1
    prev = MPoly.const(vars, 1)
    for col in range(n - 1):
        if a[col][col].is_zero():
            # pivot on the sparsest nonzero candidate
            cands = [r for r in range(col + 1, n) if not a[r][col].is_zero()]
            if not cands:
                return MPoly.zero(vars)
            r = min(cands, key=lambda r: len(a[r][col].terms))
            a[col], a[r] = a[r], a[col]
            sign = -sign
        piv = a[col][col]
        for i in range(col + 1, n):
            aic = a[i][col]
            for j in range(col + 1, n):
                num = piv * a[i][j] - aic * a[col][j]
                a[i][j] = div_exact(num, prev) if num.terms else num
            a[i][col] = MPoly.zero(vars)
        prev = piv
    d = a[n - 1][n - 1]
    return d if sign == 1 else -d


def det_cofactor(m):
    """Laplace expansion along the first row; an independent oracle for small sizes."""
    n, k = m.shape
    if n != k:
        raise ValueError("determinant of a non-square matrix")
    rows = m.rows

    def rec(idx_rows, idx_cols):
        if len(idx_rows) == 1:
            return rows[idx_rows[0]][idx_cols[0]]
        r0 = idx_rows[0]
        acc = MPoly.zero(m.vars)
        for t, c in enumerate(idx_cols):
            e = rows[r0][c]
            if e.is_zero():
                continue
            sub = rec(idx_rows[1:], idx_cols[:t] + idx_cols[t + 1:])
            acc = acc + e * sub if t % 2 == 0 else acc - e * sub
        return acc

    return rec(list(range(n)), list(range(n)))


def resultant(p, q, var):
    """Sylvester resultant of p and q with respect to ``var``."""
    q = p._coerce(q)
    pc = p.coefficients_in(var)
    qc = q.coefficients_in(var)
    m = p.degree(var)
    n = q.degree(var)
    if m < 0 or n < 0:
        return MPoly.zero(p.vars)
    if m == 0 and n == 0:
        return MPoly.const(p.vars, 1)
    zero = MPoly.zero(p.vars)
    size = m + n
    rows = []
    for i in range(n):
        row = [zero] * size
        for k in range(m + 1):
            row[i + m - k] = pc.get(k, zero)
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for k in range(n + 1):
            row[i + n - k] = qc.get(k, zero)
        rows.append(row)
    if size == 0:
        return MPoly.const(p.vars, 1)
    return det_bareiss(PolyMatrix(rows))


def discriminant(p, var):
    """Discriminant in ``var``: (-1)^(n(n-1)/2) Res(p, p') / lc(p)."""
    n = p.degree(var)
    if n < 1:
        raise ValueError("discriminant needs positive degree")
    lc = p.coefficients_in(var)[n]
    r = resultant(p, p.diff(var), var)
    d = div_exact(r, lc)
    return d if (n * (n - 1) // 2) % 2 == 0 else -d


# univariate helpers (polynomials in a single variable, as MPoly)

def _univariate_gcd(p, q):
    var = p.vars[0]
    while not q.is_zero():
        p, q = q, _univariate_rem(p, q, var)
    if p.is_zero():
        return p
    return p / p.coefficients_in(var)[p.degree(var)].terms.get((0,) * len(p.vars), 1)


def _univariate_rem(p, q, var):
    i = p.vars.index(var)
    dq = q.degree(var)
    lcq = q.coefficients_in(var)[dq].terms[(0,) * len(p.vars)]
    r = p
    while not r.is_zero() and r.degree(var) >= dq:
        dr = r.degree(var)
        lcr = r.coefficients_in(var)[dr].terms[(0,) * len(p.vars)]
        e = [0] * len(p.vars)
        e[i] = dr - dq
        r = r - q * MPoly._raw(p.vars, {tuple(e): _norm(Fraction(lcr) / lcq)})
    return r


def squarefree_factors(p):
    """Yun's square-free decomposition of a univariate polynomial over Q.

    Returns a list of (factor, multiplicity) with monic factors.
    """
    if len(p.vars) != 1:
        raise ValueError("univariate polynomial expected")
    var = p.vars[0]
    out = []
    dp = p.diff(var)
    a0 = _univariate_gcd(p, dp)
    b = div_exact(p, a0)
    c = div_exact(dp, a0)
    d = c - b.diff(var)
    k = 1
    while b.degree(var) > 0:
        a = _univariate_gcd(b, d)
        if a.degree(var) > 0:
            out.append((a, k))
        b = div_exact(b, a)
        c = div_exact(d, a)
        d = c - b.diff(var)
        k += 1
    return out
