"""Truncated integer power series and the Hilbert-series identities built on them."""

from math import comb


class SeriesError(ValueError):
    pass


class TruncSeries:
    """Integer power series c_0 + c_1 z + ... + c_N z^N + O(z^{N+1})."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs, order=None):
        coeffs = [int(c) for c in coeffs]
        if order is not None:
            coeffs = (coeffs + [0] * (order + 1))[: order + 1]
        if not coeffs:
            raise SeriesError("a series needs at least its constant term")
        self.coeffs = tuple(coeffs)

    @classmethod
    def zero(cls, order):
        return cls([0] * (order + 1))

    @classmethod
    def one(cls, order):
        return cls([1], order)

    @classmethod
    def monomial(cls, n, order, c=1):
        s = [0] * (order + 1)
        if n <= order:
            s[n] = c
        return cls(s)

    @classmethod
    def from_dims(cls, dims, order):
        """Series with coefficient ``dims[n]`` at z^n; keys beyond ``order`` are dropped."""
        s = [0] * (order + 1)
        for n, d in dims.items():
            n = int(n)
            if 0 <= n <= order:
                s[n] += d
        return cls(s)

    @property
    def order(self):
        return len(self.coeffs) - 1

    def __getitem__(self, n):
        return self.coeffs[n]

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def truncate(self, order):
        return TruncSeries(self.coeffs[: order + 1])

    def _other(self, other):
        if isinstance(other, TruncSeries):
            return other
        return TruncSeries([other], self.order)

    def __add__(self, other):
        other = self._other(other)
        n = min(self.order, other.order)
        return TruncSeries([self[i] + other[i] for i in range(n + 1)])

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return self._other(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            return TruncSeries([other * c for c in self.coeffs])
        n = min(self.order, other.order)
        out = [0] * (n + 1)
        for i, a in enumerate(self.coeffs[: n + 1]):
            if a:
                for j in range(n + 1 - i):
                    out[i + j] += a * other[j]
        return TruncSeries(out)

    __rmul__ = __mul__

    def shift(self, k):
        """Multiply by z^k, keeping the order."""
        return TruncSeries([0] * k + list(self.coeffs), self.order)

    def inverse(self):
        if self[0] != 1:
            raise SeriesError(f"inverse requires constant term 1, got {self[0]}")
        n = self.order
        out = [1] + [0] * n
        for k in range(1, n + 1):
            out[k] = -sum(self[i] * out[k - i] for i in range(1, k + 1))
        return TruncSeries(out)

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        n = min(self.order, other.order)
        return self.coeffs[: n + 1] == other.coeffs[: n + 1]

    def __hash__(self):
        return hash(self.coeffs)

    def first_difference(self, other):
        """Smallest exponent where the two series differ, or None."""
        for i in range(min(self.order, other.order) + 1):
            if self[i] != other[i]:
                return i
        return None

    def dims(self):
        return {n: c for n, c in enumerate(self.coeffs) if c}

    def to_list(self):
        return list(self.coeffs)

    def __repr__(self):
        return f"TruncSeries({list(self.coeffs)})"

    def __str__(self):
        terms = []
        for n, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if n == 0 else ("z" if n == 1 else f"z^{n}")
            mag = abs(c)
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{mag} {mono}"
            else:
                body = str(mag)
            if not terms:
                terms.append(("-" if c < 0 else "") + body)
            else:
                terms.append(("- " if c < 0 else "+ ") + body)
        head = " ".join(terms) if terms else "0"
        tail = "z" if self.order == 0 else f"z^{self.order + 1}"
        return f"{head} + O({tail})"


def series_arith(op, a, b=None):
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "inverse":
        return a.inverse()
    raise ValueError(f"unknown op {op!r}")


def _as_series(dims, order):
    if isinstance(dims, TruncSeries):
        return dims if order is None else dims.truncate(order)
    if order is None:
        raise SeriesError("graded dims given as a dict need an explicit order")
    return TruncSeries.from_dims(dims, order)


def pbw_series(lie_dims, order=None):
    """Enveloping-algebra series of a graded Lie algebra with the given dims.

    Odd dimensions contribute exterior factors (1+z^n)^l, even dimensions
    polynomial factors (1-z^n)^{-l}.
    """
    l = _as_series(lie_dims, order)
    N = l.order
    if l[0] != 0:
        raise SeriesError("Lie dims must vanish in dimension 0")
    out = [1] + [0] * N
    for n in range(1, N + 1):
        m = l[n]
        if m < 0:
            raise SeriesError(f"negative Lie dimension {m} at {n}")
        if not m:
            continue
        if n % 2:
            factor = {n * k: comb(m, k) for k in range(0, min(m, N // n) + 1)}
        else:
            factor = {n * k: comb(m + k - 1, k) for k in range(0, N // n + 1)}
        new = [0] * (N + 1)
        for i, a in enumerate(out):
            if a:
                for e, c in factor.items():
                    if i + e > N:
                        break
                    new[i + e] += a * c
        out = new
    return TruncSeries(out)


def witt_inverse(env, order=None):
    """Graded Lie dims l with ``pbw_series(l) == env`` through the order."""
    env = _as_series(env, order)
    N = env.order
    if env[0] != 1:
        raise SeriesError("enveloping series must have constant term 1")
    dims = [0] * (N + 1)
    for n in range(1, N + 1):
        # adding l_n generators in dim n changes the z^n coefficient by exactly l_n
        partial = pbw_series(TruncSeries(dims[:n] + [0] * (N + 1 - n)))
        l = env[n] - partial[n]
        if l < 0:
            raise SeriesError(
                f"not an enveloping series of a graded Lie algebra (through {N}): "
                f"dimension {n} would be {l}")
        dims[n] = l
    return TruncSeries(dims)


def free_lie_dims(gen_dims, order):
    """Graded dims of the free Lie algebra on generators of the given dims."""
    v = TruncSeries.from_dims(_count(gen_dims), order)
    return witt_inverse((1 - v).inverse())


def _count(gen_dims):
    if isinstance(gen_dims, dict):
        return gen_dims
    out = {}
    for d in gen_dims:
        out[d] = out.get(d, 0) + 1
    return out


def free_product_series(ua, ub):
    """Enveloping series of a free product: inverses add, minus one."""
    return (ua.inverse() + ub.inverse() - 1).inverse()


def anick_series(ul0, b0, v1):
    """Loop-homology series from UL_0, (HUL)_0 and the cell-generator series V_1."""
    if v1[0] != 0:
        raise SeriesError("V_1 must vanish in dimension 0")
    n = min(ul0.order, b0.order, v1.order)
    one_plus_z = TruncSeries([1, 1], n)
    z = TruncSeries.monomial(1, n)
    inv = one_plus_z * b0.inverse() - z * ul0.inverse() - v1
    return inv.truncate(n).inverse()
