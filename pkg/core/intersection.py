"""
P³ 沿 C 的爆破上的相交数，以及有限域上的几何计数 (投影曲线的结点、投影的分歧点)
"""
import itertools
import random
from dataclasses import dataclass
from typing import List, Optional, Sequence

import sympy
from loguru import logger

import config
from core import univariate as up
from core.conic import cone_equation, random_projective_point, vertex_frame
from core.curves import CurveModel, _dehomogenize, divisor_on_curve
from core.errors import (ContractViolationError, GenericityError, UnsupportedFieldError)
from core.groebner import AffineQuotient, GroebnerBasis, symbols_for, to_affine_expr
from core.linalg import kernel_vectors, rank
from core.polynomial import MultiPoly

L_CLASS, E_CLASS = sympy.symbols("L E")


# ==================== 爆破的相交环 ====================

@dataclass
class BlowupClass:
    """L̃ 与 E 的整系数齐次多项式"""
    expr: sympy.Expr
    codim: int
    d: int
    g: int

    def __add__(self, other: "BlowupClass") -> "BlowupClass":
        self._check(other)
        if other.codim != self.codim:
            raise ValueError("余维数不同的类不能相加")
        return BlowupClass(sympy.expand(self.expr + other.expr), self.codim, self.d, self.g)

    def __mul__(self, other: "BlowupClass") -> "BlowupClass":
        self._check(other)
        return BlowupClass(sympy.expand(self.expr * other.expr), self.codim + other.codim, self.d, self.g)

    def scale(self, n: int) -> "BlowupClass":
        return BlowupClass(sympy.expand(n * self.expr), self.codim, self.d, self.g)

    def _check(self, other: "BlowupClass"):
        if (self.d, self.g) != (other.d, other.g):
            raise ValueError("不同曲线上的类")

    def degree(self) -> int:
        """三次类的数值"""
        if self.codim != 3:
            raise ValueError(f"余维 {self.codim} 的类没有数值")
        table = {(3, 0): 1, (2, 1): 0, (1, 2): -self.d, (0, 3): -2 * self.g + 2 - 4 * self.d}
        poly = sympy.Poly(self.expr, L_CLASS, E_CLASS)
        return int(sum(int(c) * table[m] for m, c in poly.terms()))

    def __repr__(self):
        return f"BlowupClass({self.expr}, codim={self.codim})"


def hyperplane_class(d: int, g: int) -> BlowupClass:
    return BlowupClass(L_CLASS, 1, d, g)


def exceptional_class(d: int, g: int) -> BlowupClass:
    return BlowupClass(E_CLASS, 1, d, g)


def cone_class(d: int, g: int) -> BlowupClass:
    """M = d·L̃ − E"""
    return BlowupClass(d * L_CLASS - E_CLASS, 1, d, g)


def blowup_product(a: BlowupClass, b: BlowupClass, c: BlowupClass) -> int:
    if a.codim + b.codim + c.codim != 3:
        raise ValueError(f"余维数之和为 {a.codim + b.codim + c.codim}，不是 3")
    return (a * b * c).degree()


def castelnuovo_bound(d: int) -> int:
    return (d - 2) ** 2 // 4


# ==================== 平面曲线的奇点 ====================

@dataclass
class SingularityCount:
    count: int
    nodal: bool
    change: List[List]


def _binary_gcd(forms: Sequence[MultiPoly], K):
    """二元形式的公因子：返回 (y=1 时的 gcd, 是否在无穷远处有公共根)"""
    g: List = []
    at_infinity = True
    for f in forms:
        if f.is_zero():
            continue
        g = up.gcd(g, _dehomogenize(f, K), K)
        if not K.is_zero(f.terms.get((f.degree, 0), K.zero)):
            at_infinity = False
    return g, at_infinity


def _restrict_to_line(f: MultiPoly) -> MultiPoly:
    """f(x, y, 0)，作为二元形式"""
    F = f.field
    terms = {(e[0], e[1]): c for e, c in f.terms.items() if e[2] == 0}
    return MultiPoly(F, 2, f.degree, terms)


def plane_singularities(f: MultiPoly, rng: random.Random, attempts: int = config.CHART_ATTEMPTS) -> SingularityCount:
    """
    3 元形式的奇点个数 (代数闭包上计重数)。先做随机线性变换使 z=0 上没有奇点，
    然后在 z=1 上计算 Jacobian 理想的商代数维数；加入 Hessian 后理想为 (1) 即全是结点。
    """
    F = f.field
    if f.nvars != 3:
        raise ValueError("需要平面曲线 (3 元形式)")
    gens = symbols_for(2)
    for _ in range(attempts):
        B = [[F.random_element(rng) for _ in range(3)] for _ in range(3)]
        if rank(B, F, 3) < 3:
            continue
        h = f.compose_matrix(B)
        grad = h.gradient()
        g, at_inf = _binary_gcd([_restrict_to_line(q) for q in [h] + grad], F)
        if len(g) > 1 or at_inf:
            continue
        exprs = [to_affine_expr(q, 2, gens) for q in [h] + grad]
        Q = AffineQuotient(exprs, gens, F)
        count = Q.dimension()
        hx, hy = grad[0], grad[1]
        hess = hx.partial(0) * hy.partial(1) - hx.partial(1) * hx.partial(1)
        nodal = count == 0 or GroebnerBasis(exprs + [to_affine_expr(hess, 2, gens)], gens, F).is_one()
        return SingularityCount(count, nodal, B)
    raise GenericityError(f"{attempts} 次随机变换后 z=0 上仍有奇点")


# ==================== 结点计数 ====================

@dataclass
class NodeCount:
    count: int
    expected: int
    projected: MultiPoly

    @property
    def matches(self) -> bool:
        return self.count == self.expected


def projected_curve(C: CurveModel, p) -> MultiPoly:
    """从 p 投影后的平面曲线 C_p (3 元形式)"""
    F = C.field
    fp = cone_equation(C, p)
    if fp.degree != C.degree:
        raise ContractViolationError("结点计数要求 p ∈ U")
    frame = vertex_frame(list(p), F)
    return frame.pull(fp).drop_variable(3)


def count_nodes(C: CurveModel, p, seed: Optional[int] = None) -> NodeCount:
    d, g = C.degree, C.genus
    if C.field.characteristic != 0 and C.field.characteristic <= d:
        raise UnsupportedFieldError(f"特征 {C.field.characteristic} 太小，奇点计数不可靠")
    rng = random.Random(C.seed if seed is None else seed)
    plane = projected_curve(C, p)
    sing = plane_singularities(plane, rng)
    if not sing.nodal:
        raise GenericityError("投影曲线有非结点奇点，需要重新取 p")
    result = NodeCount(sing.count, (d - 1) * (d - 2) // 2 - g, plane)
    logger.debug(f"[Intersection] C_p 有 {result.count} 个结点 (期望 {result.expected})")
    return result


# ==================== 分歧点计数 ====================

@dataclass
class RamificationCount:
    count: int
    expected: int
    line: tuple

    @property
    def matches(self) -> bool:
        return self.count == self.expected


def random_line(C: CurveModel, rng: random.Random) -> tuple:
    F = C.field
    while True:
        r = random_projective_point(F, rng)
        s = random_projective_point(F, rng)
        if rank([list(r), list(s)], F, 4) == 2:
            return r, s


def _line_forms(r, s, F) -> List[MultiPoly]:
    rows = kernel_vectors([list(r), list(s)], F, 4)
    return [MultiPoly.linear(F, v) for v in rows]


def _leibniz_det(M: List[List[MultiPoly]]) -> MultiPoly:
    n = len(M)
    acc = None
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = M[0][perm[0]]
        for i in range(1, n):
            term = term * M[i][perm[i]]
        if inversions % 2:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def _parametric_ramification(C: CurveModel, h1: MultiPoly, h2: MultiPoly) -> int:
    F = C.field
    A, B = h1.substitute(C.forms), h2.substitute(C.forms)
    g, at_inf = _binary_gcd([A, B], F)
    if len(g) > 1 or at_inf:
        raise GenericityError("直线与曲线相交")
    W = A.partial(0) * B.partial(1) - A.partial(1) * B.partial(0)
    if W.is_zero():
        raise GenericityError("Wronskian 恒为零 (不可分投影)")
    low = _dehomogenize(W, F)
    infinity_mult = W.degree - up.degree(low, F)
    if infinity_mult > 1 or not up.is_squarefree(low, F):
        raise GenericityError("分歧不是单的")
    return W.degree


def _quadric_ramification(C: CurveModel, h1: MultiPoly, h2: MultiPoly) -> int:
    F = C.field
    gens = symbols_for(3)
    for chart in range(4):
        exprs = [to_affine_expr(q, chart, gens) for q in C.quadrics + [h1, h2]]
        if not GroebnerBasis(exprs, gens, F).is_one():
            raise GenericityError("直线与曲线相交")
    consts = [[MultiPoly.constant(F, 4, c) for c in h.to_vector()] for h in (h1, h2)]
    D = _leibniz_det([Q.gradient() for Q in C.quadrics] + consts)
    if D.is_zero():
        raise GenericityError("切向条件退化")
    div = divisor_on_curve(D, C)
    if any(m != 1 for _, m in div.entries):
        raise GenericityError(f"分歧不是单的: {div.serialize()}")
    return div.total_degree


def count_ramification(C: CurveModel, line: Optional[tuple] = None,
                       seed: Optional[int] = None) -> RamificationCount:
    """从直线 ⟨r, s⟩ 投影 C -> P¹ 的分歧点个数"""
    F = C.field
    d, g = C.degree, C.genus
    char = F.characteristic
    if char != 0 and char <= 2 * d:
        raise UnsupportedFieldError(f"特征 {char} ≤ 2d，分歧可能是野的")
    rng = random.Random(C.seed if seed is None else seed)
    line = line or random_line(C, rng)
    h1, h2 = _line_forms(*line, F)
    count = (_parametric_ramification if C.is_parametric else _quadric_ramification)(C, h1, h2)
    return RamificationCount(count, 2 * g - 2 + 2 * d, line)
