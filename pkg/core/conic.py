"""
锥与锥线性系
    W(p)、顶点分类 (U / C′ / S)、锥方程 f_p、极限锥、
    R_k(p) 及其沿直线 ℓ 的平坦极限 R^ℓ_k(p)、锥映射的秩诊断。

S_k 的模型：V_k 模 I(k) 的约化阶梯基后的法式补空间。
"""
import random
from dataclasses import dataclass, field as dc_field
from enum import Enum
from math import comb
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from loguru import logger

import config
from core import univariate as up
from core.curves import (CurveModel, _coords_of, default_truncation, graded_ideal_piece,
                         local_series, random_curve_point, tangent_and_osculating)
from core.errors import (AmbiguousConeError, ContractViolationError, GenericityError,
                         InvalidDirectionError, ZeroClassError)
from core.linalg import (GradedPiece, ParamSubspace, SubspaceBasis, SubspaceRelation, divide_exact,
                         flat_limit_kernel, flat_limit_subspace, inverse, kernel_basis, rank,
                         subspace_compare)
from core.polynomial import MultiPoly, monomials, piece_dim, products
from core.series import valuation

E4 = (0, 0, 0, 1)


# ==================== 坐标框架 ====================

def _standard(i: int, F) -> List:
    return [F.one if j == i else F.zero for j in range(4)]


def complete_basis(vectors: Sequence[Sequence], F) -> List[List]:
    """用标准基向量把线性无关组补成 F^4 的基，返回补充的向量"""
    current = [list(v) for v in vectors]
    extra = []
    for i in range(4):
        if len(current) == 4:
            break
        cand = current + [_standard(i, F)]
        if rank(cand, F, 4) == len(cand):
            current = cand
            extra.append(_standard(i, F))
    if len(current) != 4:
        raise ContractViolationError("给定向量线性相关，无法补成基")
    return extra


@dataclass
class Frame:
    """u = B·y；B 的列是新坐标系的基向量"""
    B: List[List]
    Binv: List[List]
    field: Any
    label: str = ""

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], F, label: str = "") -> "Frame":
        cols = [[F.convert(c) for c in col] for col in cols]
        B = [[cols[j][i] for j in range(4)] for i in range(4)]
        try:
            Binv = inverse(B, F)
        except ZeroDivisionError:
            raise InvalidDirectionError(f"框架 {label} 的列向量线性相关")
        return cls(B, Binv, F, label)

    def to_frame(self, pt: Sequence) -> List:
        F = self.field
        return [sum((a * F.convert(b) for a, b in zip(row, pt)), F.zero) for row in self.Binv]

    def pull(self, f: MultiPoly) -> MultiPoly:
        """原坐标中的形式 -> 框架坐标"""
        return f.compose_matrix(self.B)

    def push(self, g: MultiPoly) -> MultiPoly:
        """框架坐标中的形式 -> 原坐标"""
        return g.compose_matrix(self.Binv)

    def serialize(self) -> str:
        F = self.field
        return "[" + "; ".join(" ".join(F.to_str(x) for x in row) for row in self.B) + "]"


def vertex_frame(p: Sequence, F) -> Frame:
    """顶点在最后一列：p -> (0:0:0:1)"""
    p = [F.convert(c) for c in p]
    return Frame.from_columns(complete_basis([p], F) + [p], F, label="vertex")


# ==================== W(p) 与对称幂 ====================

def wspace(p, F) -> SubspaceBasis:
    """W(p)：在 p 处为零的线性型，维数 3"""
    coords, F = _coords_of(p, F)
    W = kernel_basis([list(coords)], F, 4, piece=GradedPiece(4, 1))
    if W.dim != 3:
        raise ValueError("p 不能是零向量")
    return W


def sym_power(W: SubspaceBasis, k: int) -> SubspaceBasis:
    """Sym^k W ⊂ V_k"""
    if k == 0:
        return SubspaceBasis.full(W.field, GradedPiece(4, 0))
    return SubspaceBasis.from_polys(products(W.polys(), k))


def _point(C: CurveModel, p) -> tuple:
    coords, K = _coords_of(p, C.field)
    if K != C.field:
        raise ContractViolationError("顶点必须定义在曲线的基域上")
    return coords


# ==================== 顶点分类 ====================

class VertexTag(Enum):
    U = "U"
    CPRIME = "Cprime"
    S = "S"


@dataclass
class VertexClass:
    tag: VertexTag
    witness: int
    on_curve: bool
    e: Optional[int] = None      # 非双有理投影的次数
    r: Optional[int] = None      # 约化锥的次数，e·r = d (或 d−1)

    def serialize(self) -> str:
        extra = f", e={self.e}, r={self.r}" if self.tag == VertexTag.S else ""
        where = "on C" if self.on_curve else "off C"
        return f"{self.tag.value} (witness={self.witness}, {where}{extra})"


def cone_intersection(C: CurveModel, p, k: int) -> SubspaceBasis:
    """Sym^k W(p) ∩ I(k)"""
    W = wspace(_point(C, p), C.field)
    return sym_power(W, k).intersection(graded_ideal_piece(C, k))


def classify_vertex(C: CurveModel, p) -> VertexClass:
    coords = _point(C, p)
    d = C.degree
    on_curve = C.contains_point(coords)
    witness = cone_intersection(C, coords, d).dim
    target = d - 1 if on_curve else d
    if on_curve and witness == 3:
        return VertexClass(VertexTag.CPRIME, witness, True)
    if not on_curve and witness == 1:
        return VertexClass(VertexTag.U, witness, False)
    if witness >= 6:
        r = next(k for k in range(1, target + 1) if cone_intersection(C, coords, k).dim > 0)
        if target % r:
            raise ContractViolationError(f"约化锥次数 {r} 不整除 {target}")
        return VertexClass(VertexTag.S, witness, on_curve, e=target // r, r=r)
    raise ContractViolationError(
        f"dim W(p)_d ∩ I(d) = {witness} 不可能出现 ({'on' if on_curve else 'off'} C)", witness=witness)


def cone_equation(C: CurveModel, p) -> MultiPoly:
    """p ∈ U 时为 d 次锥，p ∈ C′ 时为 d−1 次锥 (首项系数为 1)"""
    vc = classify_vertex(C, p)
    if vc.tag == VertexTag.S:
        raise AmbiguousConeError(f"顶点在 S 中 ({vc.serialize()})",
                                 intersection=cone_intersection(C, p, C.degree))
    k = C.degree if vc.tag == VertexTag.U else C.degree - 1
    space = cone_intersection(C, p, k)
    if space.dim != 1:
        raise ContractViolationError(f"{k} 次锥空间维数为 {space.dim}")
    return space.polys()[0].canonical()


def reduced_cone(C: CurveModel, p) -> Tuple[MultiPoly, int]:
    """最小次数的锥 (S 中顶点)：返回 (约化锥, 次数 r)"""
    for k in range(1, C.degree + 1):
        space = cone_intersection(C, p, k)
        if space.dim == 1:
            return space.polys()[0].canonical(), k
        if space.dim > 1:
            raise AmbiguousConeError(f"{k} 次锥不唯一", intersection=space)
    raise ContractViolationError("找不到过 p 的锥")


# ==================== S_k 模型 ====================

@dataclass
class SectionsModel:
    curve: CurveModel
    k: int
    ideal: SubspaceBasis

    @property
    def dim(self) -> int:
        return self.ideal.ncols - self.ideal.dim

    @property
    def standard_monomials(self) -> List[tuple]:
        pivots = set(self.ideal.pivots)
        return [m for i, m in enumerate(monomials(4, self.k)) if i not in pivots]

    def project(self, f: MultiPoly) -> MultiPoly:
        """V_k -> S_k 模型：法式约化"""
        return self.ideal.reduce_poly(f)

    def image(self, polys: Sequence[MultiPoly]) -> SubspaceBasis:
        F = self.curve.field
        piece = GradedPiece(4, self.k)
        return SubspaceBasis(F, piece.dim, [self.ideal.reduce(f) for f in polys], piece=piece)


def sections_space(C: CurveModel, k: int, cross_check: bool = True) -> SectionsModel:
    model = SectionsModel(C, k, graded_ideal_piece(C, k))
    if cross_check and not C.is_parametric:
        _cross_check_normal_form(model)
    return model


def _cross_check_normal_form(model: SectionsModel, trials: int = 3):
    """与 sympy Groebner 法式比较 (仅 Q / F_p)"""
    from core.errors import UnsupportedFieldError
    from core.groebner import GroebnerBasis
    C = model.curve
    try:
        gb = GroebnerBasis.from_polys(C.quadrics)
    except UnsupportedFieldError:
        return
    rng = random.Random(C.seed + model.k)
    F = C.field
    for _ in range(trials):
        f = MultiPoly.from_vector(F, 4, model.k, [F.random_element(rng) for _ in monomials(4, model.k)])
        if gb.normal_form_homogeneous(f) != model.project(f):
            raise ContractViolationError(f"S_{model.k} 法式与 Groebner 法式不一致")


# ==================== 锥线性系 ====================

@dataclass
class ConicSystem:
    vertex: tuple
    degree: int
    basis: SubspaceBasis
    ledger: Dict[str, Any] = dc_field(default_factory=dict)
    frame: Optional[Frame] = None
    flags: Dict[str, bool] = dc_field(default_factory=dict)
    min_order: Optional[int] = None
    closed_form: Optional[SubspaceBasis] = None

    @property
    def dim(self) -> int:
        return self.basis.dim

    def serialize(self) -> str:
        F = self.basis.field
        lines = [f"vertex: ({' : '.join(F.to_str(F.convert(c)) for c in self.vertex)})",
                 f"degree: {self.degree}", f"dim: {self.dim}"]
        if self.frame is not None:
            lines.append(f"frame: {self.frame.serialize()}")
        for key in sorted(self.ledger):
            lines.append(f"ledger.{key}: {self.ledger[key]}")
        for key in sorted(self.flags):
            lines.append(f"flag.{key}: {self.flags[key]}")
        if self.min_order is not None:
            lines.append(f"min_order: {self.min_order}")
        lines.append("basis:")
        lines.append(self.basis.serialize())
        return "\n".join(lines)


def conic_system(C: CurveModel, p, k: int) -> ConicSystem:
    """R_k(p) = φ_k(Sym^k W(p))"""
    coords = _point(C, p)
    if k > C.degree:
        raise ValueError(f"k = {k} 超过曲线次数 {C.degree}")
    W = wspace(coords, C.field)
    model = sections_space(C, k, cross_check=False)
    basis = model.image(products(W.polys(), k))
    return ConicSystem(vertex=coords, degree=k, basis=basis,
                       ledger={"W(p)_k": piece_dim(3, k), "generators": "Sym^k W(p)"})


def remark_dimensions(d: int, tag: VertexTag) -> Dict[int, int]:
    """R_{d−1}(p) 与 R_d(p) 的维数表 (U 与 C′)"""
    if tag == VertexTag.U:
        return {d - 1: comb(d + 1, 2), d: comb(d + 2, 2) - 1}
    if tag == VertexTag.CPRIME:
        return {d - 1: comb(d + 1, 2) - 1, d: comb(d + 2, 2) - 3}
    raise ValueError("S 中的顶点只有不等式")


def conic_systems_equal(C: CurveModel, p, q, k: int) -> bool:
    A = conic_system(C, p, k).basis
    B = conic_system(C, q, k).basis
    return subspace_compare(A, B).relation == SubspaceRelation.EQUAL


# ==================== 极限方向 ====================

@dataclass
class LimitDirection:
    """p ∈ C 与过 p 的直线 ℓ = ⟨p, through⟩；through 为 None 表示 ℓ = t_p"""
    point: tuple
    through: Optional[tuple] = None

    @property
    def tangent(self) -> bool:
        return self.through is None

    def serialize(self, F) -> str:
        fmt = lambda v: "(" + " : ".join(F.to_str(F.convert(c)) for c in v) + ")"
        line = "t_p" if self.tangent else f"⟨p, {fmt(self.through)}⟩"
        return f"p={fmt(self.point)}, ℓ={line}"


def adapted_frame(C: CurveModel, direction: LimitDirection) -> Tuple[Frame, CurveModel, Any]:
    """
    非切方向：B = [r | b2 | τ | p]，于是 ℓ = {y=z=0}，t_p = {x=y=0}，⟨ℓ, t_p⟩ = {y=0}。
    切方向：B = [τ | b2 | b3 | p]。
    p_t = p − t·B[:,0] 在新坐标下为 (−t:0:0:1)，W(p_t) = ⟨x+tw, y, z⟩。
    """
    F = C.field
    p = [F.convert(c) for c in _point(C, direction.point)]
    if not C.contains_point(p):
        raise InvalidDirectionError("极限方向的基点必须在曲线上")
    tdata = tangent_and_osculating(C, p)
    tau = list(tdata.direction)
    if direction.tangent:
        first = [tau]
    else:
        r = [F.convert(c) for c in direction.through]
        if rank([r, tau, p], F, 4) < 3:
            raise InvalidDirectionError("ℓ 与 t_p 重合或 r = p")
        first = [r]
    if direction.tangent:
        extra = complete_basis([tau, p], F)
        cols = [tau] + extra + [p]
        label = "tangent"
    else:
        extra = complete_basis([first[0], tau, p], F)
        cols = [first[0], extra[0], tau, p]
        label = "line"
    frame = Frame.from_columns(cols, F, label=label)
    return frame, C.transformed(frame.B), tdata


def _shift_rows(I: SubspaceBasis, k: int) -> List[List[List]]:
    """每个 α：(x+tw)^a y^b z^c 各 t 层的法式向量"""
    F = I.field
    rows = []
    for a, b, c in monomials(3, k):
        P = MultiPoly.monomial(F, (a, b, c, 0))
        rows.append([I.reduce(layer) for layer in P.shift_expand(0, 3)])
    return rows


def _generic_rank(P: ParamSubspace, F, rng, draws: int = 3) -> int:
    best = 0
    for _ in range(draws):
        t0 = F.random_element(rng)
        if F.is_zero(t0):
            continue
        best = max(best, P.specialize(t0).dim)
    return best


@dataclass
class LimitConeResult:
    direction: LimitDirection
    frame: Frame
    limit_cone: MultiPoly            # 框架坐标
    limit_cone_original: MultiPoly   # 原坐标
    cone_factor: MultiPoly
    exponent: int
    plane: MultiPoly                 # h (框架坐标)
    expected_plane: MultiPoly
    vertex_class: VertexClass

    @property
    def plane_matches(self) -> bool:
        return self.plane.proportional(self.expected_plane)


def limit_cone(C: CurveModel, direction: LimitDirection, seed: Optional[int] = None) -> LimitConeResult:
    """lim_{t→0} [f_{p_t}]，应等于 f_p^r·h"""
    F = C.field
    d = C.degree
    frame, Cf, _ = adapted_frame(C, direction)
    rng = random.Random(C.seed if seed is None else seed)
    I = graded_ideal_piece(Cf, d)
    alphas = monomials(3, d)
    per_alpha = _shift_rows(I, d)
    top = max(len(layers) for layers in per_alpha)
    # N(t)：行 = 法式坐标 β，列 = α
    rows = []
    for beta in range(I.ncols):
        layers = []
        for i in range(top):
            layers.append([per_alpha[j][i][beta] if i < len(per_alpha[j]) else F.zero
                           for j in range(len(alphas))])
        rows.append(layers)
    P = ParamSubspace(F, len(alphas), rows, expected_dim=len(alphas) - 1)
    generic = _generic_rank(P, F, rng)
    if generic != len(alphas) - 1:
        raise InvalidDirectionError(f"路径 p_t 一般地不在 U 中 (秩 {generic} != {len(alphas) - 1})")
    kernel = flat_limit_kernel(P)
    if kernel.dim != 1:
        raise InvalidDirectionError(f"极限核维数为 {kernel.dim}")
    c0 = kernel.rows[0]
    f_lim = MultiPoly(F, 4, d, {(a, b, c, 0): v for (a, b, c), v in zip(alphas, c0)}).canonical()

    vc = classify_vertex(Cf, E4)
    if vc.tag == VertexTag.S:
        factor, r_deg = reduced_cone(Cf, E4)
    else:
        factor, r_deg = cone_equation(Cf, E4), d - 1
    h, exponent = f_lim, 0
    while h.degree >= factor.degree:
        q = divide_exact(h, factor)
        if q is None:
            break
        h, exponent = q, exponent + 1
    if h.degree != 1 or exponent == 0:
        raise ContractViolationError(f"极限锥不能写成 f_p^r·h (剩余次数 {h.degree}, r={exponent})")
    if direction.tangent:
        expected = tangent_and_osculating(Cf, E4).osculating
    else:
        expected = MultiPoly.variable(F, 4, 1)
    result = LimitConeResult(direction, frame, f_lim, frame.push(f_lim), factor, exponent,
                             h.canonical(), expected.canonical(), vc)
    if not result.plane_matches:
        raise ContractViolationError(f"极限锥的平面因子 {h.to_str()} 与 {expected.to_str()} 不成比例")
    logger.debug(f"✅ [Conic] 极限锥 = ({factor.to_str()})^{exponent}·({h.canonical().to_str()})")
    return result


# ==================== 极限线性系 ====================

def _is_bisecant(Cf: CurveModel) -> bool:
    """ℓ = {y=z=0} 是否与 C 再交于 p 之外的点"""
    F = Cf.field
    g: List = []
    at_infinity = True
    for eq in Cf.equations():
        restricted = [F.zero] * (eq.degree + 1)
        for e, c in eq.terms.items():
            if e[1] == 0 and e[2] == 0:
                restricted[e[0]] = c
        restricted = up.trim(restricted, F)
        if not restricted:
            continue
        if len(restricted) == eq.degree + 1:
            at_infinity = False
        g = up.gcd(g, restricted, F)
    return len(g) > 2 or at_infinity


def limit_conic_system(C: CurveModel, direction: LimitDirection, k: int,
                       seed: Optional[int] = None) -> ConicSystem:
    """
    R^ℓ_k(p)，1 ≤ k ≤ d；k < d−1 时与 R_k(p) 相同。
    (a) R_k(p_t) 的平坦极限；(b) ⟨R_k(p), 极限生成元⟩；一般性标志通过时二者必须相等。
    """
    F = C.field
    d = C.degree
    if not 1 <= k <= d:
        raise ValueError(f"k 必须在 1..{d} 之间")
    if direction.tangent:
        raise InvalidDirectionError("极限线性系要求 ℓ ≠ t_p")
    frame, Cf, _ = adapted_frame(C, direction)
    rng = random.Random(C.seed if seed is None else seed)
    vc = classify_vertex(Cf, E4)
    if vc.tag != VertexTag.CPRIME:
        raise InvalidDirectionError(f"基点不在 C′ 中: {vc.serialize()}")

    I = graded_ideal_piece(Cf, k)
    piece = GradedPiece(4, k)
    P = ParamSubspace(F, piece.dim, _shift_rows(I, k), piece=piece)
    generic = _generic_rank(P, F, rng)
    expected = piece_dim(3, k) - (1 if k == d else 0)
    if generic != expected:
        raise InvalidDirectionError(f"dim R_k(p_t) = {generic}，期望 {expected}")
    P.expected_dim = generic
    flat = flat_limit_subspace(P)

    R = conic_system(Cf, E4, k).basis
    f = cone_equation(Cf, E4)
    fx = f.partial(0)
    w = MultiPoly.variable(F, 4, 3)
    x = MultiPoly.variable(F, 4, 0)
    z = MultiPoly.variable(F, 4, 2)
    flags = {
        "not_bisecant": not _is_bisecant(Cf),
        "fx_nonvanishing": not F.is_zero(fx.evaluate([F.zero, F.zero, F.one, F.zero])),
    }
    ledger: Dict[str, Any] = {"R_k(p)": R.dim, "contains_R_k(p)": flat.contains_space(R)}
    closed = None
    if k < d - 1:
        closed = R
        ledger["generators"] = "R_k(p)"
        if closed != flat:
            raise ContractViolationError(f"k = {k} 时平坦极限应等于 R_k(p)")
    elif all(flags.values()):
        if k == d - 1:
            gens = {"w*f_x": w * fx}
        else:
            zwfx = z * w * fx
            xwfx = x * w * fx
            span = R.span_with([I.reduce(zwfx)])
            if not span.contains(I.reduce(xwfx)):
                ledger["xi_case"] = "i"
                xi = xwfx
            else:
                ledger["xi_case"] = "ii"
                xi = _xi_case_ii(Cf, I, f, fx, w, x)
            gens = {"w*z*f_x": zwfx, "xi": xi}
        closed = R.span_with([I.reduce(g) for g in gens.values()])
        ledger["generators"] = ", ".join(gens)
        if closed != flat:
            raise ContractViolationError(
                f"平坦极限 (dim {flat.dim}) 与显式生成 (dim {closed.dim}) 不一致")
    else:
        logger.warning(f"⚠️ [Conic] 一般性标志未通过 {flags}，跳过显式生成元检查")

    N = default_truncation(k, d)
    series = local_series(Cf, E4, N)
    orders = []
    for g in flat.polys():
        v = valuation(series.compose(g), F)
        orders.append(N + 1 if v is None else v)
    min_order = min(orders) if orders else None
    if min_order is not None and min_order < d - 2:
        raise ContractViolationError(f"极限线性系中出现消没阶 {min_order} < d−2")
    if k == d:
        # 一般方向上 k = d 的最小消没阶恰为 d−2
        ledger["min_order_exact"] = min_order == d - 2
        if not ledger["min_order_exact"] and all(flags.values()):
            raise ContractViolationError(f"R^ℓ_d(p) 的最小消没阶为 {min_order}，应恰为 d−2 = {d - 2}")
    return ConicSystem(vertex=tuple(E4), degree=k, basis=flat, ledger=ledger, frame=frame,
                       flags=flags, min_order=min_order, closed_form=closed)


def _xi_case_ii(Cf: CurveModel, I: SubspaceBasis, f: MultiPoly, fx: MultiPoly,
                w: MultiPoly, x: MultiPoly) -> MultiPoly:
    """x·w·f_x ≡ q (mod I(d))，q ∈ W(p)_d；ξ = 2w²f_x + x·w²·f_xx − 2w·q_x"""
    F = Cf.field
    d = Cf.degree
    W_d = products([MultiPoly.variable(F, 4, i) for i in range(3)], d)
    target = I.reduce(x * w * fx)
    from core.linalg import solve_in_span
    lam = solve_in_span([I.reduce(m) for m in W_d], target, F)
    if lam is None:
        raise ContractViolationError("情形 (ii) 中找不到 q ∈ W(p)_d")
    q = MultiPoly.zero(F, 4, d)
    for c, m in zip(lam, W_d):
        q = q + m.scale(c)
    w2 = w * w
    return w2 * fx.scale(2) + x * w2 * fx.partial(0) - w * q.partial(0).scale(2)


# ==================== 秩诊断 ====================

def first_nonvanishing_form(p: Sequence, F) -> MultiPoly:
    i = next(i for i, c in enumerate(p) if not F.is_zero(F.convert(c)))
    return MultiPoly.variable(F, 4, i)


def gamma_dim(C: CurveModel, p) -> int:
    """dim Γ(p) = dim(W_d + I(d) + w·W_{d−1}) − dim(W_d + I(d))"""
    F = C.field
    coords = _point(C, p)
    d = C.degree
    W = wspace(coords, F)
    A = sym_power(W, d) + graded_ideal_piece(C, d)
    w = first_nonvanishing_form(coords, F)
    wB = [w * g for g in products(W.polys(), d - 1)]
    return A.span_with([g.to_vector() for g in wB]).dim - A.dim


def dphi_corank(C: CurveModel, p, g: MultiPoly) -> int:
    """m = 3 − dim((W_d + I(d) + w·J_g)/(W_d + I(d)))，J_g = ⟨D_{b_i} g⟩"""
    F = C.field
    coords = _point(C, p)
    d = C.degree
    W = wspace(coords, F)
    Wd = sym_power(W, d)
    if g.is_zero() or not Wd.contains(g):
        raise ContractViolationError("g 必须是 W(p)_d 中的非零元")
    fp = cone_equation(C, coords)
    if fp.degree == d and SubspaceBasis.from_polys([fp]).contains(g):
        raise ZeroClassError("g ∈ ⟨f_p⟩，[g] 不是切向量的像")
    frame = vertex_frame(coords, F)
    w = MultiPoly.linear(F, frame.Binv[3])
    directions = [[frame.B[i][j] for i in range(4)] for j in range(3)]
    J = [(w * g.directional(b)).to_vector() for b in directions]
    A = Wd + graded_ideal_piece(C, d)
    gap = A.span_with(J).dim - A.dim
    return 3 - gap


def random_cone(C: CurveModel, p, rng: random.Random) -> MultiPoly:
    """W(p)_d 中不与 f_p 成比例的随机元"""
    F = C.field
    coords = _point(C, p)
    basis = products(wspace(coords, F).polys(), C.degree)
    fp = cone_equation(C, coords)
    line = SubspaceBasis.from_polys([fp])
    while True:
        g = MultiPoly.zero(F, 4, C.degree)
        for m in basis:
            g = g + m.scale(F.random_element(rng))
        if not g.is_zero() and not line.contains(g):
            return g


@dataclass
class DominanceCount:
    d: int
    g: int
    source_dim: int    # dim P_U(E) = C(d+2, 2) + 1
    target_dim: int    # dim P(S_d) = d² − g

    @property
    def dominant_possible(self) -> bool:
        return self.source_dim >= self.target_dim


def dominance_count(d: int, g: int) -> DominanceCount:
    return DominanceCount(d, g, comb(d + 2, 2) + 1, d * d - g)


# ==================== 一般性抽样 ====================

def random_projective_point(F, rng: random.Random) -> tuple:
    while True:
        v = tuple(F.random_element(rng) for _ in range(4))
        if any(not F.is_zero(c) for c in v):
            return v


def random_u_point(C: CurveModel, rng: random.Random, tries: int = 50) -> tuple:
    for _ in range(tries):
        p = random_projective_point(C.field, rng)
        if C.contains_point(p):
            continue
        if classify_vertex(C, p).tag == VertexTag.U:
            return p
    raise GenericityError(f"{tries} 次抽样没有得到 U 中的点")


def random_direction(C: CurveModel, rng: random.Random) -> LimitDirection:
    """曲线上随机点 p 与随机直线 ℓ ≠ t_p"""
    F = C.field
    p = random_curve_point(C, rng)
    tau = tangent_and_osculating(C, p).direction
    while True:
        r = random_projective_point(F, rng)
        if rank([list(r), list(tau), list(p.coords)], F, 4) == 3:
            return LimitDirection(tuple(p.coords), r)


@dataclass
class TrialSummary:
    successes: int
    trials: int
    values: List[Any]
    first_witness: Any = None

    @property
    def rate(self) -> float:
        return self.successes / self.trials if self.trials else 0.0


def generic_trials(fn: Callable[[random.Random], Tuple[bool, Any]], trials: int = config.GENERIC_TRIALS,
                   seed: int = config.DEFAULT_SEED, label: str = "") -> TrialSummary:
    """把"一般点"操作化为带种子的若干样本；至少一个见证即可"""
    successes, values, witness = 0, [], None
    for i in range(trials):
        rng = random.Random(seed * 1000 + i)
        try:
            ok, value = fn(rng)
        except (GenericityError, InvalidDirectionError, AmbiguousConeError) as e:
            logger.debug(f"[Conic] {label} 第 {i} 个样本不一般: {e}")
            ok, value = False, None
        values.append(value)
        if ok:
            successes += 1
            if witness is None:
                witness = value
    logger.info(f"📊 [Conic] {label}: {successes}/{trials} 个样本通过")
    return TrialSummary(successes, trials, values, witness)


def injectivity_spot_check(C: CurveModel, k: int, trials: int = 4,
                           seed: int = config.DEFAULT_SEED) -> bool:
    """随机 U 点的 R_k 两两不同"""
    rng = random.Random(seed)
    pts = [random_u_point(C, rng) for _ in range(trials)]
    systems = [conic_system(C, p, k).basis for p in pts]
    for i in range(len(systems)):
        for j in range(i + 1, len(systems)):
            if subspace_compare(systems[i], systems[j]).relation == SubspaceRelation.EQUAL:
                logger.warning(f"⚠️ [Conic] R_{k} 在两个不同顶点处相等")
                return False
    return True
