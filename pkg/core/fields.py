"""
精确域 (Scalar 的四种形态)
    RationalField          Q，元素是 sympy QQ 元素
    PrimeField(p)          F_p (p >= 5)，元素是 sympy GF(p) 元素
    ExtensionField         F[θ]/(m(θ))，基域为 Q 或 F_p
    RationalFunctionField  F(t)，分子分母为一元多项式，分母首一

所有代码都通过域对象操作元素 (is_zero / key / inv / convert)，
不直接对 sympy 元素做真值判断。
"""
import itertools
import random
from abc import ABC, abstractmethod
from typing import Iterator, List, Optional, Sequence

import sympy
from sympy import GF, QQ
from sympy.ntheory import isprime, sqrt_mod

from core import univariate as up
from core.errors import (FieldConstructionError, IncompatibleFieldError,
                         UnsupportedFieldError)


class ScalarField(ABC):
    """精确域的统一接口"""

    name: str = "field"
    is_finite: bool = False

    def __call__(self, a):
        return self.convert(a)

    @property
    @abstractmethod
    def zero(self): ...

    @property
    @abstractmethod
    def one(self): ...

    @abstractmethod
    def convert(self, a): ...

    @abstractmethod
    def contains(self, a) -> bool: ...

    @abstractmethod
    def key(self, a): ...

    @abstractmethod
    def to_str(self, a) -> str: ...

    @abstractmethod
    def random_element(self, rng: random.Random): ...

    @property
    def characteristic(self) -> int:
        return 0

    def is_zero(self, a) -> bool:
        return a == self.zero

    def eq(self, a, b) -> bool:
        return self.is_zero(a - b)

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError(f"{self.name} 中零元不可逆")
        return self.one / a

    def size(self) -> Optional[int]:
        return None

    def elements(self) -> Iterator:
        raise UnsupportedFieldError(f"{self.name} 不是有限域，无法枚举")

    def sqrt(self, a):
        raise UnsupportedFieldError(f"{self.name} 上没有实现开方")

    def frobenius(self, a):
        raise UnsupportedFieldError(f"{self.name} 没有 Frobenius")

    def prime_field(self) -> "ScalarField":
        return self

    def degree_over_prime(self) -> int:
        return 1

    # ---------- sympy 桥 ----------
    def sympy_options(self) -> dict:
        raise UnsupportedFieldError(f"sympy 不支持在 {self.name} 上做 Groebner/分解")

    def to_sympy(self, a):
        raise UnsupportedFieldError(f"{self.name} 元素无法转成 sympy 表达式")

    def from_sympy(self, c):
        raise UnsupportedFieldError(f"{self.name} 无法从 sympy 系数构造元素")

    def __repr__(self):
        return self.name


# ==================== Q ====================

class RationalField(ScalarField):
    name = "QQ"

    def __init__(self):
        self.dom = QQ

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    @property
    def zero(self):
        return QQ.zero

    @property
    def one(self):
        return QQ.one

    def contains(self, a) -> bool:
        return QQ.of_type(a)

    def convert(self, a):
        if isinstance(a, int):
            return QQ(a)
        if self.contains(a):
            return a
        if isinstance(a, sympy.Rational):
            return QQ.from_sympy(a)
        raise IncompatibleFieldError(f"无法把 {a!r} 转换到 QQ")

    def key(self, a):
        return (int(QQ.numer(a)), int(QQ.denom(a)))

    def to_str(self, a) -> str:
        n, d = self.key(a)
        return str(n) if d == 1 else f"{n}/{d}"

    def random_element(self, rng):
        return QQ(rng.randint(-9, 9), rng.randint(1, 9))

    def sqrt(self, a):
        n, d = self.key(a)
        if n < 0:
            return None
        rn, exact_n = sympy.integer_nthroot(n, 2)
        rd, exact_d = sympy.integer_nthroot(d, 2)
        if exact_n and exact_d:
            return QQ(int(rn), int(rd))
        return None

    def sympy_options(self) -> dict:
        return {"domain": QQ}

    def to_sympy(self, a):
        return QQ.to_sympy(a)

    def from_sympy(self, c):
        return QQ.from_sympy(sympy.sympify(c))


# ==================== F_p ====================

class PrimeField(ScalarField):
    is_finite = True

    def __init__(self, p: int):
        p = int(p)
        if p < 5 or not isprime(p):
            raise FieldConstructionError(f"特征必须是 >= 5 的素数，收到 {p}")
        self.p = p
        self.dom = GF(p)
        self.name = f"GF({p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def zero(self):
        return self.dom.zero

    @property
    def one(self):
        return self.dom.one

    def contains(self, a) -> bool:
        if isinstance(a, int) or not self.dom.of_type(a):
            return False
        mod = getattr(a, "mod", None)
        if mod is None and hasattr(a, "modulus"):
            mod = a.modulus()
        return mod is None or int(mod) == self.p

    def convert(self, a):
        if isinstance(a, int):
            return self.dom(a % self.p)
        if self.contains(a):
            return a
        if isinstance(a, sympy.Integer):
            return self.dom(int(a) % self.p)
        raise IncompatibleFieldError(f"无法把 {a!r} 转换到 {self.name}")

    def key(self, a):
        return int(a) % self.p

    def to_str(self, a) -> str:
        return str(self.key(a))

    def random_element(self, rng):
        return self.dom(rng.randrange(self.p))

    def size(self) -> int:
        return self.p

    def elements(self):
        for i in range(self.p):
            yield self.dom(i)

    def sqrt(self, a):
        v = self.key(a)
        if v == 0:
            return self.zero
        r = sqrt_mod(v, self.p)
        return None if r is None else self.dom(int(r))

    def frobenius(self, a):
        return a

    def sympy_options(self) -> dict:
        return {"modulus": self.p}

    def to_sympy(self, a):
        return sympy.Integer(self.key(a))

    def from_sympy(self, c):
        return self.dom(int(c) % self.p)


# ==================== 扩域 ====================

class ExtElement:
    """扩域元素：基域上次数 < k 的多项式"""
    __slots__ = ("field", "c")

    def __init__(self, field: "ExtensionField", coeffs: Sequence):
        self.field = field
        self.c = tuple(coeffs)

    def _coerce(self, other):
        if isinstance(other, ExtElement):
            if other.field != self.field:
                raise IncompatibleFieldError(f"{self.field.name} 与 {other.field.name} 元素混用")
            return other
        return self.field.convert(other)

    def __add__(self, other):
        other = self._coerce(other)
        return ExtElement(self.field, [x + y for x, y in zip(self.c, other.c)])

    __radd__ = __add__

    def __neg__(self):
        return ExtElement(self.field, [-x for x in self.c])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        return self.field._mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * self.field.inv(self._coerce(other))

    def __rtruediv__(self, other):
        return self._coerce(other) * self.field.inv(self)

    def __pow__(self, e: int):
        F = self.field
        if e < 0:
            return F.inv(self) ** (-e)
        result, base = F.one, self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except IncompatibleFieldError:
            return False
        return self.field.key(self) == self.field.key(other)

    def __hash__(self):
        return hash(self.field.key(self))

    def __bool__(self):
        return not self.field.is_zero(self)

    def __repr__(self):
        return self.field.to_str(self)


class ExtensionField(ScalarField):
    """
    基域上的单代数扩张 K = F[θ]/(m(θ))。
    有限基域且未给出模多项式时，取字典序最小的 k 次首一不可约多项式。
    """

    def __init__(self, base: ScalarField, degree: Optional[int] = None,
                 modulus: Optional[Sequence] = None):
        if not isinstance(base, (RationalField, PrimeField)):
            raise FieldConstructionError("扩域的基域必须是 Q 或 F_p")
        self.base = base
        if modulus is None:
            if degree is None or degree < 1:
                raise FieldConstructionError("扩域需要次数或模多项式")
            if not base.is_finite:
                raise FieldConstructionError("Q 上的扩域必须显式给出模多项式")
            modulus = least_irreducible(base, degree)
        modulus = up.monic([base.convert(c) for c in modulus], base)
        if len(modulus) < 2:
            raise FieldConstructionError("模多项式次数至少为 1")
        if not _is_irreducible(modulus, base):
            raise FieldConstructionError(f"模多项式 {up.to_str(modulus, base, 'θ')} 可约")
        self.modulus = modulus
        self.k = len(modulus) - 1
        self.is_finite = base.is_finite
        self.name = f"{base.name}[θ]/({up.to_str(modulus, base, 'θ')})"
        self._zero = ExtElement(self, [base.zero] * self.k)
        self._one = ExtElement(self, [base.one] + [base.zero] * (self.k - 1))

    def __eq__(self, other):
        return (isinstance(other, ExtensionField) and other.base == self.base
                and [self.base.key(c) for c in other.modulus] == [self.base.key(c) for c in self.modulus])

    def __hash__(self):
        return hash((self.base, tuple(self.base.key(c) for c in self.modulus)))

    @property
    def characteristic(self) -> int:
        return self.base.characteristic

    @property
    def zero(self):
        return self._zero

    @property
    def one(self):
        return self._one

    @property
    def gen(self) -> ExtElement:
        if self.k == 1:
            return self.from_base(-self.modulus[0])
        coeffs = [self.base.zero] * self.k
        coeffs[1] = self.base.one
        return ExtElement(self, coeffs)

    def prime_field(self):
        return self.base

    def degree_over_prime(self) -> int:
        return self.k

    def contains(self, a) -> bool:
        return isinstance(a, ExtElement) and a.field == self

    def from_base(self, a) -> ExtElement:
        return ExtElement(self, [self.base.convert(a)] + [self.base.zero] * (self.k - 1))

    def to_base(self, a: ExtElement):
        if any(not self.base.is_zero(c) for c in a.c[1:]):
            raise IncompatibleFieldError(f"{a} 不在基域中")
        return a.c[0]

    def in_base(self, a: ExtElement) -> bool:
        return all(self.base.is_zero(c) for c in a.c[1:])

    def convert(self, a):
        if isinstance(a, ExtElement):
            if a.field != self:
                raise IncompatibleFieldError(f"{a.field.name} 元素不能直接转换到 {self.name}")
            return a
        return self.from_base(a)

    def from_poly(self, coeffs: Sequence) -> ExtElement:
        r = up.rem([self.base.convert(c) for c in coeffs], self.modulus, self.base)
        r = r + [self.base.zero] * (self.k - len(r))
        return ExtElement(self, r)

    def _mul(self, a: ExtElement, b: ExtElement) -> ExtElement:
        return self.from_poly(up.mul(a.c, b.c, self.base))

    def is_zero(self, a) -> bool:
        return all(self.base.is_zero(c) for c in a.c)

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError("扩域中零元不可逆")
        g, s, _ = up.xgcd(list(a.c), self.modulus, self.base)
        return self.from_poly(s)

    def key(self, a):
        return tuple(self.base.key(c) for c in a.c)

    def to_str(self, a) -> str:
        return up.to_str(list(a.c), self.base, "θ")

    def random_element(self, rng):
        return ExtElement(self, [self.base.random_element(rng) for _ in range(self.k)])

    def size(self) -> Optional[int]:
        return self.base.size() ** self.k if self.is_finite else None

    def elements(self):
        if not self.is_finite:
            return super().elements()
        base_elems = list(self.base.elements())
        return (ExtElement(self, list(reversed(cs)))
                for cs in itertools.product(base_elems, repeat=self.k))

    def frobenius(self, a):
        if not self.is_finite:
            return super().frobenius(a)
        return a ** self.base.size()

    def sqrt(self, a):
        if not self.is_finite:
            return super().sqrt(a)
        return tonelli_shanks(self, a)


def _is_irreducible(modulus: List, base: ScalarField) -> bool:
    x = sympy.Symbol("x")
    coeffs = [base.to_sympy(c) for c in reversed(modulus)]
    return sympy.Poly(coeffs, x, **base.sympy_options()).is_irreducible


def least_irreducible(base: PrimeField, k: int) -> List:
    """字典序最小的 k 次首一不可约多项式 (从高次系数往低次比较)"""
    for cs in itertools.product(range(base.p), repeat=k):
        if cs[-1] == 0 and k > 1:
            continue
        modulus = [base(c) for c in reversed(cs)] + [base.one]
        if _is_irreducible(modulus, base):
            return modulus
    raise FieldConstructionError(f"GF({base.p}) 上找不到 {k} 次不可约多项式")


def tonelli_shanks(F: ScalarField, a):
    """有限奇特征域上的开方；非平方返回 None"""
    if F.is_zero(a):
        return F.zero
    q = F.size()
    if not F.eq(a ** ((q - 1) // 2), F.one):
        return None
    s, t = 0, q - 1
    while t % 2 == 0:
        s, t = s + 1, t // 2
    rng = random.Random(q)
    z = F.random_element(rng)
    while F.is_zero(z) or F.eq(z ** ((q - 1) // 2), F.one):
        z = F.random_element(rng)
    m, c, x, b = s, z ** t, a ** ((t + 1) // 2), a ** t
    while not F.eq(b, F.one):
        i, b2 = 0, b
        while not F.eq(b2, F.one):
            b2 = b2 * b2
            i += 1
        g = c ** (2 ** (m - i - 1))
        m, c = i, g * g
        x, b = x * g, b * c
    return x


def extension_tower(base: ScalarField, r: int) -> ScalarField:
    """r == 1 时返回基域本身，否则返回 r 次扩域"""
    return base if r == 1 else ExtensionField(base, degree=r)


# ==================== 有理函数域 ====================

class RatFunc:
    __slots__ = ("field", "num", "den")

    def __init__(self, field: "RationalFunctionField", num: Sequence, den: Sequence):
        self.field = field
        self.num = tuple(num)
        self.den = tuple(den)

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            if other.field != self.field:
                raise IncompatibleFieldError("不同的有理函数域元素混用")
            return other
        return self.field.convert(other)

    def __add__(self, other):
        o = self._coerce(other)
        B = self.field.base
        num = up.add(up.mul(self.num, o.den, B), up.mul(o.num, self.den, B), B)
        return self.field.make(num, up.mul(self.den, o.den, B))

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(self.field, [-c for c in self.num], self.den)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        B = self.field.base
        return self.field.make(up.mul(self.num, o.num, B), up.mul(self.den, o.den, B))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * self.field.inv(self._coerce(other))

    def __rtruediv__(self, other):
        return self._coerce(other) * self.field.inv(self)

    def __pow__(self, e: int):
        F = self.field
        if e < 0:
            return F.inv(self) ** (-e)
        result = F.one
        for _ in range(e):
            result = result * self
        return result

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except IncompatibleFieldError:
            return False
        return self.field.key(self) == self.field.key(other)

    def __hash__(self):
        return hash(self.field.key(self))

    def __repr__(self):
        return self.field.to_str(self)


class RationalFunctionField(ScalarField):
    """一元有理函数域 F(t)"""

    def __init__(self, base: ScalarField, var: str = "t"):
        self.base = base
        self.var = var
        self.name = f"{base.name}({var})"
        self._zero = RatFunc(self, [], [base.one])
        self._one = RatFunc(self, [base.one], [base.one])

    def __eq__(self, other):
        return isinstance(other, RationalFunctionField) and other.base == self.base and other.var == self.var

    def __hash__(self):
        return hash(("RatFunc", self.base, self.var))

    @property
    def characteristic(self) -> int:
        return self.base.characteristic

    @property
    def zero(self):
        return self._zero

    @property
    def one(self):
        return self._one

    @property
    def t(self) -> RatFunc:
        return RatFunc(self, [self.base.zero, self.base.one], [self.base.one])

    def make(self, num: Sequence, den: Sequence) -> RatFunc:
        B = self.base
        num, den = up.trim(num, B), up.trim(den, B)
        if not den:
            raise ZeroDivisionError("有理函数分母为零")
        if not num:
            return self._zero
        g = up.gcd(num, den, B)
        if len(g) > 1:
            num = up.divmod_(num, g, B)[0]
            den = up.divmod_(den, g, B)[0]
        c = B.inv(den[-1])
        return RatFunc(self, up.scale(num, c, B), up.scale(den, c, B))

    def from_poly(self, coeffs: Sequence) -> RatFunc:
        return self.make([self.base.convert(c) for c in coeffs], [self.base.one])

    def contains(self, a) -> bool:
        return isinstance(a, RatFunc) and a.field == self

    def convert(self, a):
        if isinstance(a, RatFunc):
            if a.field != self:
                raise IncompatibleFieldError("不同的有理函数域元素混用")
            return a
        return self.make([self.base.convert(a)], [self.base.one])

    def is_zero(self, a) -> bool:
        return len(a.num) == 0

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError("有理函数零元不可逆")
        return self.make(a.den, a.num)

    def key(self, a):
        return (tuple(self.base.key(c) for c in a.num), tuple(self.base.key(c) for c in a.den))

    def to_str(self, a) -> str:
        n = up.to_str(list(a.num), self.base, self.var)
        if len(a.den) == 1:
            return n
        return f"({n})/({up.to_str(list(a.den), self.base, self.var)})"

    def random_element(self, rng):
        B = self.base
        num = [B.random_element(rng) for _ in range(rng.randint(1, 3))]
        den = [B.random_element(rng) for _ in range(rng.randint(0, 2))] + [B.one]
        return self.make(num, den)

    def valuation(self, a) -> Optional[int]:
        """t 进赋值；零元返回 None"""
        if self.is_zero(a):
            return None
        v = 0
        while self.base.is_zero(a.num[v]):
            v += 1
        w = 0
        while self.base.is_zero(a.den[w]):
            w += 1
        return v - w

    def evaluate(self, a, value):
        B = self.base
        d = up.evaluate(a.den, value, B)
        if B.is_zero(d):
            raise ZeroDivisionError("在分母零点处求值")
        return up.evaluate(a.num, value, B) / d


def parse_field(spec: str) -> ScalarField:
    """'QQ' / '101' / 'GF(101)' / 'GF(7^2)'"""
    s = str(spec).strip().replace(" ", "")
    if s.upper() in ("QQ", "Q"):
        return RationalField()
    if s.upper().startswith("GF(") and s.endswith(")"):
        s = s[3:-1]
    if "^" in s:
        p, k = s.split("^", 1)
        return extension_tower(PrimeField(int(p)), int(k))
    try:
        return PrimeField(int(s))
    except ValueError:
        raise FieldConstructionError(f"无法解析域描述: {spec!r}")
