"""
sympy 桥：Groebner 基、零维商代数、结式、因式分解、特征多项式。
只在 Q 与 F_p 上可用 (sympy 不支持素数幂阶有限域)。
"""
import itertools
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

import sympy
from sympy import Poly, factor_list, groebner
from sympy.polys.matrices import DomainMatrix

from core import univariate as up
from core.errors import ConicError
from core.polynomial import MultiPoly, grevlex_key


@lru_cache(maxsize=None)
def symbols_for(n: int, prefix: str = "x") -> Tuple[sympy.Symbol, ...]:
    if n <= 4 and prefix == "x":
        return sympy.symbols("x y z w")[:n]
    return sympy.symbols(f"{prefix}0:{n}")


def to_affine_expr(f: MultiPoly, chart: int, gens: Sequence) -> sympy.Expr:
    """x_chart = 1 后的 sympy 表达式，gens 为其余变量"""
    full = list(gens[:chart]) + [sympy.Integer(1)] + list(gens[chart:])
    return f.to_sympy(full)


def expr_terms(expr, gens: Sequence, field) -> Dict[Tuple[int, ...], object]:
    if expr == 0:
        return {}
    poly = Poly(expr, *gens, **field.sympy_options())
    return {tuple(m): field.from_sympy(c) for m, c in poly.terms() if c != 0}


class GroebnerBasis:
    """约化 Groebner 基 (grevlex，Buchberger)"""

    def __init__(self, exprs: Sequence, gens: Sequence, field, order: str = "grevlex"):
        self.field = field
        self.gens = tuple(gens)
        self.order = order
        exprs = [e for e in exprs if e != 0]
        if not exprs:
            raise ConicError("Groebner 生成元为空")
        self.G = groebner(exprs, *self.gens, order=order, method="buchberger", **field.sympy_options())

    @classmethod
    def from_polys(cls, polys: Sequence[MultiPoly], field=None) -> "GroebnerBasis":
        field = field or polys[0].field
        gens = symbols_for(polys[0].nvars)
        return cls([p.to_sympy(gens) for p in polys], gens, field)

    @property
    def exprs(self) -> List:
        return list(self.G.exprs)

    @property
    def polys(self) -> List[Poly]:
        return list(self.G.polys)

    def is_one(self) -> bool:
        return len(self.G.exprs) == 1 and Poly(self.G.exprs[0], *self.gens).is_ground

    def reduce(self, expr):
        return self.G.reduce(expr)[1]

    def contains(self, expr) -> bool:
        return self.G.contains(expr)

    @property
    def is_zero_dimensional(self) -> bool:
        return self.G.is_zero_dimensional

    def leading_monomials(self) -> List[Tuple[int, ...]]:
        return [p.monoms(order=self.order)[0] for p in self.G.polys]

    def normal_form_homogeneous(self, f: MultiPoly) -> MultiPoly:
        rem = self.reduce(f.to_sympy(self.gens))
        terms = expr_terms(rem, self.gens, self.field)
        return MultiPoly(self.field, f.nvars, f.degree, terms)


class AffineQuotient:
    """零维仿射理想的商代数 F[x]/I：标准单项式基 + 乘法矩阵"""

    def __init__(self, exprs: Sequence, gens: Sequence, field):
        self.field = field
        self.gens = tuple(gens)
        self.gb = GroebnerBasis(exprs, gens, field)
        self._basis = None

    def is_empty(self) -> bool:
        return self.gb.is_one()

    @property
    def basis(self) -> List[Tuple[int, ...]]:
        if self._basis is not None:
            return self._basis
        if self.is_empty():
            self._basis = []
            return self._basis
        if not self.gb.is_zero_dimensional:
            raise ConicError("理想不是零维的，商代数无穷维")
        lms = self.gb.leading_monomials()
        n = len(self.gens)
        bounds = []
        for i in range(n):
            pure = [m[i] for m in lms if all(m[j] == 0 for j in range(n) if j != i) and m[i] > 0]
            bounds.append(min(pure))
        std = []
        for e in itertools.product(*[range(b) for b in bounds]):
            if not any(all(e[j] >= m[j] for j in range(n)) for m in lms):
                std.append(tuple(e))
        self._basis = sorted(std, key=grevlex_key, reverse=True)
        return self._basis

    def dimension(self) -> int:
        return len(self.basis)

    def vector_of(self, expr) -> List:
        F = self.field
        rem = self.gb.reduce(expr)
        terms = expr_terms(rem, self.gens, F)
        index = {m: i for i, m in enumerate(self.basis)}
        v = [F.zero] * len(self.basis)
        for m, c in terms.items():
            v[index[m]] = c
        return v

    def monomial_expr(self, m: Tuple[int, ...]):
        expr = sympy.Integer(1)
        for g, k in zip(self.gens, m):
            expr = expr * g ** k
        return expr

    def multiplication_matrix(self, expr) -> List[List]:
        """M[i][j] = 第 j 个基元乘以 expr 后在第 i 个基元上的坐标"""
        cols = [self.vector_of(sympy.expand(expr * self.monomial_expr(m))) for m in self.basis]
        n = len(self.basis)
        return [[cols[j][i] for j in range(n)] for i in range(n)]


def charpoly(M: Sequence[Sequence], field) -> List:
    """特征多项式系数 (低次在前)"""
    n = len(M)
    if n == 0:
        return [field.one]
    dm = DomainMatrix([[field.convert(x) for x in row] for row in M], (n, n), field.dom)
    coeffs = dm.charpoly()
    return [field.convert(c) if not isinstance(c, int) else field(c) for c in reversed(coeffs)]


def factor_univariate(coeffs: Sequence, field) -> List[Tuple[List, int]]:
    """基域上分解一元多项式 (低次在前)，返回 [(首一因子, 指数)]，按 (次数, 系数) 排序"""
    coeffs = up.trim(coeffs, field)
    if len(coeffs) <= 1:
        return []
    T = sympy.Symbol("T")
    poly = Poly([field.to_sympy(c) for c in reversed(coeffs)], T, **field.sympy_options())
    _, facs = poly.factor_list()
    out = []
    for fac, e in facs:
        low = [field.from_sympy(c) for c in reversed(fac.all_coeffs())]
        out.append((up.monic(low, field), e))
    out.sort(key=lambda t: (len(t[0]), [field.key(c) for c in t[0]]))
    return out


def resultant(f, g, var, field, keep) -> List:
    """消去 var 的结式，作为 keep 的一元多项式返回 (低次在前)"""
    opts = field.sympy_options()
    # keep 必须也是生成元，否则 modulus 下会被塞进系数域
    r = Poly(f, var, keep, **opts).resultant(Poly(g, var, keep, **opts))
    r = r.as_expr() if isinstance(r, Poly) else sympy.sympify(r)
    if r == 0:
        return []
    poly = Poly(r, keep, **opts)
    return up.trim([field.from_sympy(c) for c in reversed(poly.all_coeffs())], field)


def factor_expr(expr, gens: Sequence, field):
    """sympy factor_list 的薄封装"""
    return factor_list(expr, *gens, **field.sympy_options())
