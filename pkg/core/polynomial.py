"""
齐次多元多项式 MultiPoly
    - 变量数 2/3/4，记为 (x, y, z, w) 的前缀
    - 单项式序：分次反字典序 (grevlex)，x > y > z > w
    - 项表 dict: 指数元组 -> 系数，不存零系数，所有指数总次数相同
"""
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

import sympy

from core.errors import IncompatibleFieldError

VAR_NAMES = ("x", "y", "z", "w")

Exponent = Tuple[int, ...]


def grevlex_key(exp: Exponent):
    """key 越大单项式越大"""
    return (sum(exp), tuple(-e for e in reversed(exp)))


@lru_cache(maxsize=None)
def monomials(nvars: int, degree: int) -> Tuple[Exponent, ...]:
    """给定次数的全部单项式，按 grevlex 降序"""
    if degree < 0:
        return ()
    exps = []
    for combo in combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        exps.append(tuple(e))
    return tuple(sorted(exps, key=grevlex_key, reverse=True))


@lru_cache(maxsize=None)
def monomial_index(nvars: int, degree: int) -> Dict[Exponent, int]:
    return {e: i for i, e in enumerate(monomials(nvars, degree))}


def piece_dim(nvars: int, degree: int) -> int:
    return comb(degree + nvars - 1, nvars - 1) if degree >= 0 else 0


class MultiPoly:
    __slots__ = ("field", "nvars", "degree", "terms")

    def __init__(self, field, nvars: int, degree: int, terms: Optional[Dict[Exponent, object]] = None):
        self.field = field
        self.nvars = nvars
        self.degree = degree
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != nvars or sum(e) != degree:
                raise ValueError(f"单项式 {e} 与 ({nvars} 元, {degree} 次) 不符")
            if not field.is_zero(c):
                clean[e] = c
        self.terms = clean

    # ---------- 构造 ----------
    @classmethod
    def zero(cls, field, nvars: int, degree: int) -> "MultiPoly":
        return cls(field, nvars, degree, {})

    @classmethod
    def constant(cls, field, nvars: int, c=1) -> "MultiPoly":
        return cls(field, nvars, 0, {(0,) * nvars: field.convert(c)})

    @classmethod
    def monomial(cls, field, exp: Exponent, coeff=1) -> "MultiPoly":
        return cls(field, len(exp), sum(exp), {tuple(exp): field.convert(coeff)})

    @classmethod
    def variable(cls, field, nvars: int, i: int) -> "MultiPoly":
        e = [0] * nvars
        e[i] = 1
        return cls.monomial(field, tuple(e))

    @classmethod
    def linear(cls, field, coeffs: Sequence) -> "MultiPoly":
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = field.convert(c)
        return cls(field, n, 1, terms)

    @classmethod
    def from_vector(cls, field, nvars: int, degree: int, vec: Sequence) -> "MultiPoly":
        mons = monomials(nvars, degree)
        return cls(field, nvars, degree, {m: c for m, c in zip(mons, vec)})

    def to_vector(self) -> List:
        F = self.field
        return [self.terms.get(m, F.zero) for m in monomials(self.nvars, self.degree)]

    # ---------- 基本性质 ----------
    def is_zero(self) -> bool:
        return not self.terms

    def _same_ambient(self, other: "MultiPoly"):
        if other.field != self.field:
            raise IncompatibleFieldError(f"{self.field.name} 与 {other.field.name} 的多项式混用")
        if other.nvars != self.nvars:
            raise ValueError("变量数不同")

    def leading(self):
        """grevlex 下的首项 (指数, 系数)；零多项式返回 None"""
        if not self.terms:
            return None
        e = max(self.terms, key=grevlex_key)
        return e, self.terms[e]

    def canonical(self) -> "MultiPoly":
        """射影类代表元：首项系数为 1"""
        lead = self.leading()
        if lead is None:
            return self
        return self.scale(self.field.inv(lead[1]))

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        if other.field != self.field or other.nvars != self.nvars:
            return False
        if self.is_zero() and other.is_zero():
            return True
        return other.degree == self.degree and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def key(self):
        F = self.field
        return tuple(sorted(((e, F.key(c)) for e, c in self.terms.items()), key=lambda t: t[0]))

    def proportional(self, other: "MultiPoly") -> bool:
        return self.canonical() == other.canonical()

    # ---------- 算术 ----------
    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        self._same_ambient(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if other.degree != self.degree:
            raise ValueError(f"次数不同: {self.degree} vs {other.degree}")
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms[e] + c if e in terms else c
        return MultiPoly(self.field, self.nvars, self.degree, terms)

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.field, self.nvars, self.degree, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + (-other)

    def scale(self, c) -> "MultiPoly":
        c = self.field.convert(c)
        return MultiPoly(self.field, self.nvars, self.degree, {e: v * c for e, v in self.terms.items()})

    def __mul__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        self._same_ambient(other)
        terms: Dict[Exponent, object] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = c1 * c2
                terms[e] = terms[e] + v if e in terms else v
        return MultiPoly(self.field, self.nvars, self.degree + other.degree, terms)

    def __rmul__(self, other) -> "MultiPoly":
        return self.scale(other)

    def __pow__(self, k: int) -> "MultiPoly":
        result = MultiPoly.constant(self.field, self.nvars)
        for _ in range(k):
            result = result * self
        return result

    # ---------- 求值与微分 ----------
    def evaluate(self, point: Sequence, K=None):
        """在点上求值；K 为点坐标所在的域 (默认系数域)"""
        K = K or self.field
        lift = (lambda c: c) if K == self.field else K.convert
        acc = K.zero
        pts = [K.convert(v) for v in point]
        for e, c in self.terms.items():
            term = lift(c)
            for v, k in zip(pts, e):
                if k:
                    term = term * v ** k
            acc = acc + term
        return acc

    def partial(self, i: int) -> "MultiPoly":
        if self.degree == 0:
            raise ValueError("常数没有偏导数")
        F = self.field
        terms = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            ne = list(e)
            ne[i] -= 1
            terms[tuple(ne)] = c * F(e[i])
        return MultiPoly(F, self.nvars, self.degree - 1, terms)

    def gradient(self) -> List["MultiPoly"]:
        return [self.partial(i) for i in range(self.nvars)]

    def directional(self, v: Sequence) -> "MultiPoly":
        """沿向量 v 的方向导数 Σ v_i ∂f/∂x_i"""
        F = self.field
        acc = MultiPoly.zero(F, self.nvars, self.degree - 1)
        for i, vi in enumerate(v):
            vi = F.convert(vi)
            if not F.is_zero(vi):
                acc = acc + self.partial(i).scale(vi)
        return acc

    # ---------- 变量替换 ----------
    def substitute(self, forms: Sequence["MultiPoly"]) -> "MultiPoly":
        """x_i -> forms[i]，forms 为同次齐次多项式"""
        if len(forms) != self.nvars:
            raise ValueError("替换表长度与变量数不符")
        F = self.field
        m, k = forms[0].nvars, forms[0].degree
        acc = MultiPoly.zero(F, m, self.degree * k)
        powers: Dict[Tuple[int, int], MultiPoly] = {}
        for e, c in self.terms.items():
            term = MultiPoly.constant(F, m, c)
            for i, ei in enumerate(e):
                if ei:
                    if (i, ei) not in powers:
                        powers[(i, ei)] = forms[i] ** ei
                    term = term * powers[(i, ei)]
            acc = acc + term
        return acc

    def compose_matrix(self, B: Sequence[Sequence]) -> "MultiPoly":
        """f∘B：x_i -> Σ_j B[i][j] y_j"""
        F = self.field
        forms = [MultiPoly.linear(F, row) for row in B]
        return self.substitute(forms)

    def shift_expand(self, i: int, j: int) -> List["MultiPoly"]:
        """x_i -> x_i + t·x_j 后 t 的各次系数 (整数二项式，无除法)"""
        F = self.field
        layers: Dict[int, Dict[Exponent, object]] = {}
        for e, c in self.terms.items():
            for m in range(e[i] + 1):
                ne = list(e)
                ne[i] -= m
                ne[j] += m
                ne = tuple(ne)
                v = c * F(comb(e[i], m))
                bucket = layers.setdefault(m, {})
                bucket[ne] = bucket[ne] + v if ne in bucket else v
        top = max(layers) if layers else 0
        return [MultiPoly(F, self.nvars, self.degree, layers.get(m, {})) for m in range(top + 1)]

    def drop_variable(self, i: int) -> "MultiPoly":
        """去掉一个不出现的变量 (锥方程投影到平面)"""
        terms = {}
        for e, c in self.terms.items():
            if e[i] != 0:
                raise ValueError(f"多项式依赖于第 {i} 个变量")
            terms[e[:i] + e[i + 1:]] = c
        return MultiPoly(self.field, self.nvars - 1, self.degree, terms)

    def extend_scalars(self, K) -> "MultiPoly":
        if K == self.field:
            return self
        return MultiPoly(K, self.nvars, self.degree, {e: K.convert(c) for e, c in self.terms.items()})

    # ---------- sympy 桥 ----------
    def to_sympy(self, gens: Sequence):
        F = self.field
        expr = sympy.Integer(0)
        for e, c in self.terms.items():
            mono = sympy.Integer(1)
            for g, k in zip(gens, e):
                if k:
                    mono = mono * g ** k
            expr = expr + F.to_sympy(c) * mono
        return expr

    @classmethod
    def from_sympy(cls, expr, gens: Sequence, field, degree: Optional[int] = None) -> "MultiPoly":
        poly = sympy.Poly(expr, *gens, **field.sympy_options())
        terms = {tuple(m): field.from_sympy(c) for m, c in poly.terms()}
        if degree is None:
            degree = poly.total_degree() if terms else 0
        return cls(field, len(gens), degree, terms)

    # ---------- 输出 ----------
    def serialize(self) -> str:
        """规范文本：按单项式序降序的 指数:系数 对"""
        F = self.field
        parts = []
        for e in sorted(self.terms, key=grevlex_key, reverse=True):
            parts.append(f"({','.join(map(str, e))}): {F.to_str(self.terms[e])}")
        return "{" + ", ".join(parts) + "}"

    def to_str(self, names: Optional[Sequence[str]] = None) -> str:
        names = names or VAR_NAMES[:self.nvars]
        F = self.field
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=grevlex_key, reverse=True):
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            c = F.to_str(self.terms[e])
            if not mono:
                parts.append(c)
            elif c == "1":
                parts.append(mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts)

    def __repr__(self):
        return f"MultiPoly({self.to_str()})"


def products(forms: Sequence[MultiPoly], k: int) -> List[MultiPoly]:
    """Sym^k：forms 的全部 k 次单项式 (按 forms 上的 grevlex 降序)"""
    F = forms[0].field
    n = forms[0].nvars
    out = []
    for e in monomials(len(forms), k):
        term = MultiPoly.constant(F, n)
        for f, ei in zip(forms, e):
            if ei:
                term = term * f ** ei
        out.append(term)
    return out
