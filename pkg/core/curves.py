"""
P³ 中的曲线模型
    ParametricRational   四个 d 次二元形式给出的 P¹ -> P³
    QuadricIntersection  两个二次曲面的完全交 (椭圆四次曲线，d=4, g=1)
    WeierstrassEmbedded  由 |4O| 嵌入得到的二次曲面对

主要操作：点采样、I(k)、局部级数、消没阶、曲线上的除子、切线与密切平面。
"""
import math
import random
from dataclasses import dataclass, field as dc_field
from enum import Enum
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import sympy
from loguru import logger

import config
from core import univariate as up
from core.errors import (ContractViolationError, CurveConstructionError,
                         ExtensionExhaustedError, GenericityError, NotSmoothError,
                         SamplingDefectError, TruncationError, UnsupportedFieldError)
from core.fields import (ExtensionField, PrimeField, ScalarField,
                         extension_tower, parse_field)
from core.groebner import AffineQuotient, charpoly, factor_univariate, symbols_for, to_affine_expr
from core.linalg import (GradedPiece, SubspaceBasis, det, inverse, kernel_basis, kernel_vectors,
                         mat_vec, rank, transpose)
from core.polynomial import MultiPoly, monomials, piece_dim, products
from core.series import LocalSeries, newton_branch, s_const, s_inv, s_mul, valuation

INFINITE = math.inf

PARAM_NAMES = ("s", "u")


class CurveKind(Enum):
    PARAMETRIC = "ParametricRational"
    QUADRICS = "QuadricIntersection"
    WEIERSTRASS = "WeierstrassEmbedded"


# ==================== 点 ====================

class CurvePoint:
    """
    射影点，坐标在域 K 中 (曲线域或其扩域)，第一个非零坐标归一为 1。
    degree 为 K 相对曲线域的次数 (Galois 轨道大小)。
    """
    __slots__ = ("coords", "field", "param", "degree")

    def __init__(self, coords: Sequence, K: ScalarField, param: Optional[tuple] = None, degree: int = 1):
        vals = [K.convert(c) for c in coords]
        lead = next((c for c in vals if not K.is_zero(c)), None)
        if lead is None:
            raise ValueError("零向量不是射影点")
        inv = K.inv(lead)
        self.coords = tuple(c * inv for c in vals)
        self.field = K
        self.param = param
        self.degree = degree

    def key(self):
        return (self.field.name, tuple(self.field.key(c) for c in self.coords))

    def __eq__(self, other):
        return isinstance(other, CurvePoint) and other.field == self.field and other.key() == self.key()

    def __hash__(self):
        return hash(self.key())

    def serialize(self) -> str:
        K = self.field
        return "(" + " : ".join(K.to_str(c) for c in self.coords) + f") over {field_label(K)}"

    def __repr__(self):
        return f"CurvePoint{self.serialize()}"


def field_label(K: ScalarField) -> str:
    if isinstance(K, PrimeField):
        return f"F_{K.p}"
    if isinstance(K, ExtensionField) and K.is_finite:
        return f"F_{{{K.base.p}^{K.k}}} = {K.name}"
    return K.name


def _frobenius_point(coords: Sequence, K) -> tuple:
    return tuple(K.frobenius(c) for c in coords)


def _orbit(coords: tuple, K) -> List[tuple]:
    """Frobenius 轨道 (坐标已归一化)"""
    orbit = [coords]
    cur = _frobenius_point(coords, K)
    while tuple(K.key(c) for c in cur) != tuple(K.key(c) for c in coords):
        orbit.append(cur)
        cur = _frobenius_point(cur, K)
        if len(orbit) > 64:
            break
    return orbit


def _canonical_in_orbit(pt: CurvePoint) -> Optional[CurvePoint]:
    """返回轨道中 key 最小的代表；轨道大小不等于扩张次数时返回 None"""
    K = pt.field
    if not isinstance(K, ExtensionField) or not K.is_finite:
        return pt
    orb = _orbit(pt.coords, K)
    if len(orb) != K.k:
        return None
    best = min(orb, key=lambda c: tuple(K.key(x) for x in c))
    param = pt.param
    if param is not None and best != pt.coords:
        # 参数随坐标一起共轭
        j = orb.index(best)
        for _ in range(j):
            param = tuple(K.frobenius(x) for x in param)
    return CurvePoint(best, K, param=param, degree=pt.degree)


def is_proportional(a: Sequence, b: Sequence, K) -> bool:
    n = len(a)
    for i in range(n):
        for j in range(i + 1, n):
            if not K.is_zero(a[i] * b[j] - a[j] * b[i]):
                return False
    return True


# ==================== 曲线模型 ====================

@dataclass
class CurveModel:
    kind: CurveKind
    field: ScalarField
    degree: int
    genus: int
    forms: List[MultiPoly] = dc_field(default_factory=list)
    quadrics: List[MultiPoly] = dc_field(default_factory=list)
    weierstrass: Optional[Tuple] = None
    name: str = "custom"
    seed: int = config.DEFAULT_SEED
    _cache: Dict = dc_field(default_factory=dict, repr=False)

    @property
    def is_parametric(self) -> bool:
        return self.kind == CurveKind.PARAMETRIC

    def equations(self) -> List[MultiPoly]:
        """曲线理想的生成元 (参数曲线取 I(2) 与 I(3) 的基)"""
        if not self.is_parametric:
            return list(self.quadrics)
        gens = graded_ideal_piece(self, 2).polys()
        gens += graded_ideal_piece(self, 3).polys()
        return gens

    def point_at(self, param: Sequence, K: Optional[ScalarField] = None) -> CurvePoint:
        """参数曲线在 (s:u) 处的像"""
        K = K or self.field
        s, u = (K.convert(v) for v in param)
        return CurvePoint([f.evaluate([s, u], K) for f in self.forms], K, param=(s, u))

    def contains_point(self, pt) -> bool:
        coords, K = _coords_of(pt, self.field)
        if self.is_parametric:
            return parameter_of(self, coords, K) is not None
        return all(K.is_zero(Q.evaluate(coords, K)) for Q in self.quadrics)

    def transformed(self, B: Sequence[Sequence]) -> "CurveModel":
        """新坐标 y 满足 u = B·y"""
        F = self.field
        Binv = inverse(B, F)
        if self.is_parametric:
            forms = []
            for row in Binv:
                acc = MultiPoly.zero(F, 2, self.degree)
                for c, f in zip(row, self.forms):
                    acc = acc + f.scale(c)
                forms.append(acc)
            return CurveModel(CurveKind.PARAMETRIC, F, self.degree, self.genus, forms=forms,
                              name=f"{self.name}∘B", seed=self.seed)
        quads = [Q.compose_matrix(B) for Q in self.quadrics]
        return CurveModel(CurveKind.QUADRICS, F, self.degree, self.genus, quadrics=quads,
                          weierstrass=self.weierstrass, name=f"{self.name}∘B", seed=self.seed)

    def extend_scalars(self, K: ScalarField) -> "CurveModel":
        if K == self.field:
            return self
        return CurveModel(self.kind, K, self.degree, self.genus,
                          forms=[f.extend_scalars(K) for f in self.forms],
                          quadrics=[Q.extend_scalars(K) for Q in self.quadrics],
                          weierstrass=self.weierstrass, name=f"{self.name}/{K.name}", seed=self.seed)

    def describe(self) -> str:
        if self.is_parametric:
            body = ", ".join(f.to_str(PARAM_NAMES) for f in self.forms)
        else:
            body = "; ".join(Q.to_str() for Q in self.quadrics)
        return f"{self.name} [{self.kind.value}] d={self.degree} g={self.genus} over {self.field.name}: {body}"


def _coords_of(pt, F) -> Tuple[tuple, ScalarField]:
    if isinstance(pt, CurvePoint):
        return pt.coords, pt.field
    return tuple(F.convert(c) for c in pt), F


# ==================== 构造 ====================

BUILTIN_CURVES: Dict[str, dict] = {
    "twisted-cubic": {"variant": "parametric", "forms": ["s**3", "s**2*u", "s*u**2", "u**3"]},
    "rational-quartic": {"variant": "parametric", "forms": ["s**4", "s**3*u", "s*u**3", "u**4"]},
    "elliptic-quartic": {"variant": "quadrics",
                         "quadrics": ["x**2 + y**2 + z**2 + w**2",
                                      "x**2 + 2*y**2 + 3*z**2 + 4*w**2"]},
    "weierstrass": {"variant": "weierstrass", "a": 1, "b": 1},
}


def parse_form(text, nvars: int, F: ScalarField, degree: Optional[int] = None) -> MultiPoly:
    if isinstance(text, MultiPoly):
        return text.extend_scalars(F) if text.field != F else text
    gens = sympy.symbols(" ".join(PARAM_NAMES)) if nvars == 2 else symbols_for(nvars)
    expr = sympy.sympify(str(text), locals={str(g): g for g in gens})
    f = MultiPoly.from_sympy(sympy.expand(expr), gens, F, degree)
    if any(sum(e) != f.degree for e in f.terms):
        raise CurveConstructionError(f"{text} 不是齐次多项式")
    return f


def weierstrass_quadrics(a, b, F: ScalarField) -> List[MultiPoly]:
    """Q1 = u1² − u0u3, Q2 = u2² − u1u3 − a·u0u1 − b·u0²"""
    a, b = F.convert(a), F.convert(b)
    Q1 = MultiPoly(F, 4, 2, {(0, 2, 0, 0): F.one, (1, 0, 0, 1): -F.one})
    Q2 = MultiPoly(F, 4, 2, {(0, 0, 2, 0): F.one, (0, 1, 0, 1): -F.one,
                             (1, 1, 0, 0): -a, (2, 0, 0, 0): -b})
    return [Q1, Q2]


def build_curve(spec, F: Optional[ScalarField] = None, seed: int = config.DEFAULT_SEED,
                certify_smooth: bool = False) -> CurveModel:
    """
    spec: 内置曲线名，或 dict(variant=parametric|quadrics|weierstrass, forms/quadrics/a/b, field)
    """
    name = "custom"
    if isinstance(spec, str):
        if spec not in BUILTIN_CURVES:
            raise CurveConstructionError(f"未知内置曲线: {spec}", known=sorted(BUILTIN_CURVES))
        name, spec = spec, BUILTIN_CURVES[spec]
    spec = dict(spec)
    name = spec.get("name", name)
    if F is None:
        F = spec.get("field") or PrimeField(config.DEFAULT_PRIME)
    if isinstance(F, (str, int)):
        F = parse_field(str(F))
    variant = str(spec.get("variant", "")).lower()

    if variant == "parametric":
        forms = [parse_form(t, 2, F) for t in spec["forms"]]
        C = _build_parametric(forms, F, name, seed)
    elif variant in ("quadrics", "quadric", "quadricintersection"):
        quads = [parse_form(t, 4, F, 2) for t in spec["quadrics"]]
        C = _build_quadrics(quads, F, name, seed, CurveKind.QUADRICS, None, certify_smooth)
    elif variant == "weierstrass":
        a, b = int(spec["a"]), int(spec["b"])
        if F.is_zero(F.convert(4 * a ** 3 + 27 * b ** 2)):
            raise CurveConstructionError(f"判别式 4a³+27b² 为零: a={a}, b={b}")
        C = _build_quadrics(weierstrass_quadrics(a, b, F), F, name, seed,
                            CurveKind.WEIERSTRASS, (a, b), certify_smooth)
    else:
        raise CurveConstructionError(f"未知曲线类型: {variant!r}")
    logger.debug(f"✅ [Curves] {C.describe()}")
    return C


def _dehomogenize(f: MultiPoly, K) -> List:
    """二元形式 f(s, 1) 的系数表 (低次在前)"""
    out = [K.zero] * (f.degree + 1)
    lift = (lambda c: c) if K == f.field else K.convert
    for (a, _), c in f.terms.items():
        out[a] = lift(c)
    return up.trim(out, K)


def _build_parametric(forms: List[MultiPoly], F, name: str, seed: int) -> CurveModel:
    if len(forms) != 4:
        raise CurveConstructionError("参数曲线需要四个二元形式")
    d = forms[0].degree
    if any(f.degree != d or f.nvars != 2 for f in forms):
        raise CurveConstructionError("四个形式的次数必须相同")
    if d < 3:
        raise CurveConstructionError(f"次数 {d} < 3 的曲线必然退化")
    if rank([f.to_vector() for f in forms], F) < 4:
        raise CurveConstructionError("形式线性相关，曲线落在平面里")
    g = []
    for f in forms:
        g = up.gcd(g, _dehomogenize(f, F), F)
    at_infinity = all(F.is_zero(f.terms.get((d, 0), F.zero)) for f in forms)
    if len(g) > 1 or at_infinity:
        raise CurveConstructionError("四个形式有公共根，映射无定义")
    return CurveModel(CurveKind.PARAMETRIC, F, d, 0, forms=forms, name=name, seed=seed)


def quadric_matrix(Q: MultiPoly) -> List[List]:
    """对称矩阵 A，使 Q(u) = uᵀAu"""
    F = Q.field
    half = F.inv(F(2))
    A = [[F.zero] * 4 for _ in range(4)]
    for e, c in Q.terms.items():
        idx = [i for i in range(4) for _ in range(e[i])]
        i, j = idx
        if i == j:
            A[i][i] = c
        else:
            A[i][j] = c * half
            A[j][i] = c * half
    return A


def pencil_discriminant(Q1: MultiPoly, Q2: MultiPoly) -> List:
    """det(λ·A1 + A2) 作为 λ 的多项式 (低次在前)；λ=∞ 对应 Q1"""
    F = Q1.field
    lam = sympy.Symbol("lam")
    A1, A2 = quadric_matrix(Q1), quadric_matrix(Q2)
    M = sympy.Matrix(4, 4, lambda i, j: lam * F.to_sympy(A1[i][j]) + F.to_sympy(A2[i][j]))
    poly = sympy.Poly(M.det(method="berkowitz"), lam, **F.sympy_options())
    return up.trim([F.from_sympy(c) for c in reversed(poly.all_coeffs())], F)


def _build_quadrics(quads: List[MultiPoly], F, name, seed, kind, ab, certify_smooth) -> CurveModel:
    if len(quads) != 2 or any(Q.nvars != 4 or Q.degree != 2 for Q in quads):
        raise CurveConstructionError("需要 4 元的两个二次型")
    if rank([Q.to_vector() for Q in quads], F) < 2:
        raise CurveConstructionError("两个二次型线性相关")
    disc = pencil_discriminant(*quads)
    if len(disc) < 4 or not up.is_squarefree(disc, F):
        raise CurveConstructionError("二次曲面束的判别式有重根，完全交不光滑")
    C = CurveModel(kind, F, 4, 1, quadrics=quads, weierstrass=ab, name=name, seed=seed)
    if F.is_finite:
        _spot_check_smooth(C)
    if certify_smooth:
        certify_smoothness(C)
    return C


def _spot_check_smooth(C: CurveModel, n: int = 20):
    pts = sample_points(C, n)
    for pt in pts:
        rows = [[g.evaluate(pt.coords, pt.field) for g in Q.gradient()] for Q in C.quadrics]
        if rank(rows, pt.field, 4) < 2:
            raise CurveConstructionError(f"Jacobian 在 {pt.serialize()} 处秩不足")


def certify_smoothness(C: CurveModel) -> bool:
    """Jacobian 理想 + 曲线方程在四个仿射图上的 Groebner 基均为 [1]"""
    from core.groebner import GroebnerBasis
    gens3 = symbols_for(3)
    Q1, Q2 = C.quadrics
    minors = []
    g1, g2 = Q1.gradient(), Q2.gradient()
    for i in range(4):
        for j in range(i + 1, 4):
            minors.append(g1[i] * g2[j] - g1[j] * g2[i])
    for chart in range(4):
        exprs = [to_affine_expr(f, chart, gens3) for f in [Q1, Q2] + minors]
        if not GroebnerBasis(exprs, gens3, C.field).is_one():
            raise CurveConstructionError(f"第 {chart} 个仿射图上存在奇点")
    logger.info(f"✅ [Curves] {C.name}: 光滑性已由 Groebner 基证明")
    return True


# ==================== 点采样 ====================

def _rng_for(C: CurveModel, seed: Optional[int]) -> random.Random:
    return random.Random(C.seed if seed is None else seed)


def _param_values(K, rng) -> Iterator:
    """基域 K 上的参数 (s:u)：有限域按带种子的顺序穷举，无限域取小整数"""
    if K.is_finite and K.size() <= config.EXHAUSTIVE_SAMPLING_LIMIT:
        params = [(K.one, K.zero)] + [(a, K.one) for a in K.elements()]
        rng.shuffle(params)
        yield from params
    elif K.is_finite:
        seen = set()
        for _ in range(config.EXHAUSTIVE_SAMPLING_LIMIT):
            a = K.random_element(rng)
            if K.key(a) not in seen:
                seen.add(K.key(a))
                yield (a, K.one)
    else:
        yield (K.one, K.zero)
        n = 0
        while True:
            yield (K.convert(n), K.one)
            if n > 0:
                yield (K.convert(-n), K.one)
            n += 1


def _param_stage(C: CurveModel, r: int, rng) -> Iterator[CurvePoint]:
    F = C.field
    if r == 1:
        for s, u in _param_values(F, rng):
            yield C.point_at((s, u))
        return
    K = extension_tower(F, r)
    if K.size() <= config.EXHAUSTIVE_SAMPLING_LIMIT:
        candidates = list(K.elements())
        rng.shuffle(candidates)
    else:
        candidates = (K.random_element(rng) for _ in range(config.EXHAUSTIVE_SAMPLING_LIMIT))
    seen = set()
    for a in candidates:
        pt = _canonical_in_orbit(C.point_at((a, K.one), K))
        if pt is None or pt.key() in seen:
            continue
        seen.add(pt.key())
        pt.degree = r
        yield pt


def _random_invertible(K, rng, n: int = 4) -> List[List]:
    while True:
        B = [[K.random_element(rng) for _ in range(n)] for _ in range(n)]
        if not K.is_zero(det(B, K)):
            return B


def _conic_coeffs(Q: MultiPoly, K) -> List[List]:
    """平面 y0 = 0、仿射 y3 = 1 上的二次曲线，按 z 的次数给出 x 的多项式系数"""
    coeffs = [[K.zero] * 3 for _ in range(3)]
    for (e0, a, b, _), c in Q.terms.items():
        if e0 == 0:
            coeffs[b][a] = coeffs[b][a] + c
    return [up.trim(c, K) for c in coeffs]


def conic_resultant(A: List[List], B: List[List], K) -> List:
    """两个关于 z 的二次式的结式：(a2b0−a0b2)² − (a2b1−a1b2)(a1b0−a0b1)"""
    a0, a1, a2 = A
    b0, b1, b2 = B
    m = lambda p, q: up.mul(p, q, K)
    t1 = up.sub(m(a2, b0), m(a0, b2), K)
    t2 = up.sub(m(a2, b1), m(a1, b2), K)
    t3 = up.sub(m(a1, b0), m(a0, b1), K)
    return up.sub(m(t1, t1), m(t2, t3), K)


def _slice_points(C: CurveModel, K, rng) -> List[CurvePoint]:
    """随机平面截线：两条平面二次曲线的交点"""
    B = _random_invertible(K, rng)
    Qs = [Q.extend_scalars(K).compose_matrix(B) for Q in C.quadrics]
    A, Bc = (_conic_coeffs(Q, K) for Q in Qs)
    res = conic_resultant(A, Bc, K)
    if len(res) <= 1:
        return []
    out = []
    for x0 in up.roots(res, K, rng):
        pa = [up.evaluate(c, x0, K) for c in A]
        pb = [up.evaluate(c, x0, K) for c in Bc]
        g = up.gcd(up.trim(pa, K), up.trim(pb, K), K)
        if len(g) <= 1:
            continue
        for z0 in up.roots(g, K, rng):
            u = mat_vec(B, [K.zero, x0, z0, K.one], K)
            if all(K.is_zero(Q.evaluate(u, K)) for Q in C.quadrics):
                out.append(CurvePoint(u, K))
    return out


def _quadric_stage(C: CurveModel, r: int, rng) -> Iterator[CurvePoint]:
    F = C.field
    if not F.is_finite:
        raise UnsupportedFieldError(f"{F.name} 上的二次曲面交无法做平面截线采样")
    if r > 1 and not isinstance(F, PrimeField):
        return
    K = extension_tower(F, r)
    seen = set()
    misses = 0
    while misses < 64:
        fresh = 0
        for pt in _slice_points(C, K, rng):
            if r > 1:
                pt = _canonical_in_orbit(pt)
                if pt is None:
                    continue
                pt.degree = r
            if pt.key() not in seen:
                seen.add(pt.key())
                fresh += 1
                yield pt
        misses = 0 if fresh else misses + 1


def point_stream(C: CurveModel, max_ext: int = config.EXTENSION_CAP,
                 seed: Optional[int] = None) -> Iterator[CurvePoint]:
    """按扩域次数递增、每层带种子的确定性点流 (每个 Galois 轨道给一个代表)"""
    rng = _rng_for(C, seed)
    for r in range(1, max_ext + 1):
        if r > 1 and not (C.field.is_finite and isinstance(C.field, PrimeField)):
            return
        stage = _param_stage if C.is_parametric else _quadric_stage
        yield from stage(C, r, rng)


def sample_points(C: CurveModel, n: int, max_ext: int = config.EXTENSION_CAP,
                  seed: Optional[int] = None, weighted: bool = False) -> List[CurvePoint]:
    """
    n 个互异点 (不同 Galois 轨道)。weighted=True 时按代数闭包中的点数计
    (一个 r 次轨道算 r 个点)。
    """
    if n < 1:
        raise ValueError("n 至少为 1")
    out, total = [], 0
    for pt in point_stream(C, max_ext, seed):
        out.append(pt)
        total += pt.degree if weighted else 1
        if total >= n:
            return out
    raise ExtensionExhaustedError(
        f"{C.name}: 扩域次数 <= {max_ext} 内只找到 {total} 个点，需要 {n}", found=total, needed=n)


def random_curve_point(C: CurveModel, rng: random.Random) -> CurvePoint:
    """基域上的一个随机点"""
    for pt in point_stream(C, 1, seed=rng.randrange(1 << 30)):
        return pt
    raise ExtensionExhaustedError(f"{C.name} 在基域上没有点")


# ==================== I(k) ====================

def _monomial_values(coords: Sequence, K, k: int) -> List:
    out = []
    for e in monomials(len(coords), k):
        v = K.one
        for c, ei in zip(coords, e):
            if ei:
                v = v * c ** ei
        out.append(v)
    return out


def _split_rows(vals: Sequence, K, F) -> List[List]:
    """扩域上的一行拆成基域上的 r 行"""
    if K == F:
        return [list(vals)]
    r = K.k
    return [[v.c[i] for v in vals] for i in range(r)]


def _ideal_by_evaluation(C: CurveModel, k: int) -> SubspaceBasis:
    F = C.field
    piece = GradedPiece(4, k)
    target = C.degree * k + 1 + config.SAMPLE_MARGIN
    rows = []
    for pt in sample_points(C, target, weighted=True):
        rows.extend(_split_rows(_monomial_values(pt.coords, pt.field, k), pt.field, F))
    return kernel_basis(rows, F, piece.dim, piece=piece)


def _ideal_by_generators(C: CurveModel, k: int) -> SubspaceBasis:
    F = C.field
    piece = GradedPiece(4, k)
    if C.is_parametric:
        # 精确的复合核：f(F_0, ..., F_3) = 0
        images = products(C.forms, k)
        cols = [g.to_vector() for g in images]
        return kernel_basis(transpose(cols), F, piece.dim, piece=piece)
    if k < 2:
        return SubspaceBasis.zero(F, piece)
    mult = [Q * MultiPoly.monomial(F, m) for Q in C.quadrics for m in monomials(4, k - 2)]
    return SubspaceBasis.from_polys(mult)


def graded_ideal_piece(C: CurveModel, k: int) -> SubspaceBasis:
    """I(k) = 在 C 上消没的 k 次形式；取值核与生成元两种算法必须一致"""
    if k < 0:
        raise ValueError("k 不能为负")
    cache = C._cache.setdefault("ideal", {})
    if k in cache:
        return cache[k]
    exact = _ideal_by_generators(C, k)
    try:
        sampled = _ideal_by_evaluation(C, k)
    except UnsupportedFieldError:
        logger.debug(f"[Curves] {C.field.name} 上无法采样，I({k}) 只用生成元计算")
        sampled = exact
    if sampled != exact:
        raise SamplingDefectError(
            f"{C.name}: I({k}) 取值核维数 {sampled.dim} 与生成元维数 {exact.dim} 不一致",
            sampled=sampled.dim, exact=exact.dim)
    if k >= C.degree - 2:
        expected = piece_dim(4, k) - (C.degree * k - C.genus + 1)
        if exact.dim != expected:
            logger.warning(f"⚠️ [Curves] {C.name}: dim I({k}) = {exact.dim}，期望 {expected}")
    cache[k] = exact
    return exact


# ==================== 局部级数 ====================

def parameter_of(C: CurveModel, coords: Sequence, K) -> Optional[tuple]:
    """参数曲线上点的参数 (s:u)；不在曲线上返回 None"""
    coords = [K.convert(c) for c in coords]
    at_inf = [K.convert(f.terms.get((C.degree, 0), f.field.zero)) for f in C.forms]
    if any(not K.is_zero(v) for v in at_inf) and is_proportional(coords, at_inf, K):
        return (K.one, K.zero)
    A = [_dehomogenize(f, K) for f in C.forms]
    g: List = []
    for i in range(4):
        for j in range(i + 1, 4):
            m = up.sub(up.scale(A[j], coords[i], K), up.scale(A[i], coords[j], K), K)
            g = up.gcd(g, m, K)
    if len(g) < 2:
        return None
    if len(g) == 2:
        cands = [-g[0]]
    elif K.is_finite:
        cands = up.roots(g, K)
    else:
        return None
    for s0 in cands:
        vals = [up.evaluate(a, s0, K) for a in A]
        if any(not K.is_zero(v) for v in vals) and is_proportional(coords, vals, K):
            return (s0, K.one)
    return None


def _shifted_series(poly: List, s0, K, N: int) -> List:
    """poly(s0 + σ) mod σ^{N+1}"""
    base = s_const(s0, K, N)
    if N >= 1:
        base[1] = K.one
    acc = s_const(K.zero, K, N)
    for c in reversed(poly):
        acc = s_mul(acc, base, K, N)
        acc[0] = acc[0] + c
    return acc


def _parametric_series(C: CurveModel, coords, K, N: int) -> LocalSeries:
    param = parameter_of(C, coords, K)
    if param is None:
        raise NotSmoothError("点不在参数曲线上")
    s0, u0 = param
    if K.is_zero(u0):
        # (1 : σ)：交换 s, u 的角色
        polys = [_dehomogenize(MultiPoly(f.field, 2, f.degree, {(b, a): c for (a, b), c in f.terms.items()}), K)
                 for f in C.forms]
        s0 = K.zero
    else:
        polys = [_dehomogenize(f, K) for f in C.forms]
        s0 = s0 * K.inv(u0)
    raw = [_shifted_series(p, s0, K, N) for p in polys]
    chart = next(i for i, v in enumerate(raw) if not K.is_zero(v[0]))
    inv = s_inv(raw[chart], K, N)
    series = [s_mul(x, inv, K, N) for x in raw]
    pt = tuple(x[0] for x in series)
    return LocalSeries(point=pt, field=K, chart=chart, param=None, order=N, coords=series)


def local_series(C: CurveModel, q, N: int) -> LocalSeries:
    """q 处的局部参数化，坐标满足曲线方程 mod σ^{N+1}"""
    if N < 1:
        raise ValueError("截断阶至少为 1")
    coords, K = _coords_of(q, C.field)
    pt = CurvePoint(coords, K)
    cache = C._cache.setdefault("series", {})
    key = (pt.key(), N)
    if key in cache:
        return cache[key]
    if C.is_parametric:
        series = _parametric_series(C, pt.coords, K, N)
    else:
        if not all(K.is_zero(Q.evaluate(pt.coords, K)) for Q in C.quadrics):
            raise NotSmoothError(f"{pt.serialize()} 不在曲线上")
        series = newton_branch(C.quadrics, pt.coords, K, N)
    cache[key] = series
    return series


# ==================== 消没阶 ====================

def default_truncation(f_degree: int, d: int) -> int:
    return 2 * f_degree * d + config.TRUNCATION_MARGIN


def vanishing_order(f: MultiPoly, C: CurveModel, q, N: Optional[int] = None):
    """ν_q(f|_C)；f ∈ I(deg f) 时返回 INFINITE"""
    N = N or default_truncation(f.degree, C.degree)
    if f.is_zero():
        return INFINITE
    series = local_series(C, q, N)
    v = valuation(series.compose(f), series.field)
    if v is not None:
        return v
    if graded_ideal_piece(C, f.degree).contains(f):
        return INFINITE
    raise TruncationError(f"截断到 σ^{N} 仍为零，但 f 不在 I({f.degree}) 中", truncation=N)


# ==================== 除子 ====================

@dataclass
class CurveDivisor:
    entries: List[Tuple[CurvePoint, int]]
    form_degree: int = 0

    @property
    def total_degree(self) -> int:
        return sum(m * pt.degree for pt, m in self.entries)

    def is_multiple_of(self, pt: CurvePoint, m: int) -> bool:
        return len(self.entries) == 1 and self.entries[0][0] == pt and self.entries[0][1] == m

    def multiplicity_at(self, pt: CurvePoint) -> int:
        return sum(m for p, m in self.entries if p == pt)

    def serialize(self) -> str:
        if not self.entries:
            return "0"
        return " + ".join(f"{m}·{pt.serialize()}" for pt, m in self.entries)


def _sorted_entries(entries):
    return sorted(entries, key=lambda t: (t[0].degree, t[0].serialize()))


def _parametric_divisor(f: MultiPoly, C: CurveModel, max_ext: int) -> CurveDivisor:
    F = C.field
    pull = f.substitute(C.forms)
    total = pull.degree
    poly = _dehomogenize(pull, F)
    entries = []
    inf_mult = total - (len(poly) - 1)
    if inf_mult > 0:
        entries.append((C.point_at((F.one, F.zero)), inf_mult))
    for fac, e in factor_univariate(poly, F):
        r = len(fac) - 1
        if r > max_ext:
            raise ExtensionExhaustedError(f"支撑点需要 {r} 次扩域，超过上限 {max_ext}", degree=r)
        if r == 1:
            entries.append((C.point_at((-fac[0], F.one)), e))
        else:
            K = ExtensionField(F, modulus=fac)
            pt = C.point_at((K.gen, K.one), K)
            pt.degree = r
            entries.append((pt, e))
    return CurveDivisor(_sorted_entries(entries), f.degree)


class _Retry(Exception):
    pass


def _quadric_divisor_attempt(f: MultiPoly, C: CurveModel, max_ext: int, rng) -> CurveDivisor:
    F = C.field
    B = _random_invertible(F, rng)
    gens = symbols_for(3)
    exprs = [to_affine_expr(g.compose_matrix(B), 3, gens) for g in [f] + C.quadrics]
    A = AffineQuotient(exprs, gens, F)
    expected = C.degree * f.degree
    if A.dimension() != expected:
        raise _Retry(f"商代数维数 {A.dimension()} != {expected} (有点落在无穷远)")
    lam = [F.random_element(rng) for _ in range(3)]
    lam_expr = sum(F.to_sympy(c) * g for c, g in zip(lam, gens))
    M = A.multiplication_matrix(lam_expr)
    coord_vecs = [A.vector_of(g) for g in gens] + [A.vector_of(sympy.Integer(1))]
    entries = []
    for fac, e in factor_univariate(charpoly(M, F), F):
        r = len(fac) - 1
        if r > max_ext:
            raise ExtensionExhaustedError(f"支撑点需要 {r} 次扩域，超过上限 {max_ext}", degree=r)
        K = F if r == 1 else ExtensionField(F, modulus=fac)
        theta = -fac[0] if r == 1 else K.gen
        n = len(M)
        shifted_t = [[K.convert(M[i][j]) - (theta if i == j else K.zero) for i in range(n)] for j in range(n)]
        left = kernel_vectors(shifted_t, K, n)
        if len(left) != 1:
            raise _Retry("左特征空间不是一维 (线性型不分离)")
        ev = left[0]
        vals = []
        for vec in coord_vecs:
            acc = K.zero
            for a, b in zip(ev, vec):
                acc = acc + a * K.convert(b)
            vals.append(acc)
        if K.is_zero(vals[3]):
            raise _Retry("特征向量在 1 上取零")
        inv = K.inv(vals[3])
        y = [vals[0] * inv, vals[1] * inv, vals[2] * inv, K.one]
        u = mat_vec([[K.convert(x) for x in row] for row in B], y, K)
        pt = CurvePoint(u, K, degree=r)
        if not all(K.is_zero(Q.evaluate(pt.coords, K)) for Q in C.quadrics):
            raise _Retry("恢复的点不在曲线上")
        if vanishing_order(f, C, pt) != e:
            raise _Retry("重数与消没阶不符")
        entries.append((pt, e))
    return CurveDivisor(_sorted_entries(entries), f.degree)


def divisor_on_curve(f: MultiPoly, C: CurveModel, max_ext: int = config.EXTENSION_CAP,
                     seed: Optional[int] = None) -> CurveDivisor:
    """f 在 C 上截出的除子，总次数 d·deg f"""
    if f.is_zero() or graded_ideal_piece(C, f.degree).contains(f):
        raise ContractViolationError("f 属于 I(deg f)，除子无定义")
    if C.is_parametric:
        D = _parametric_divisor(f, C, max_ext)
    else:
        rng = _rng_for(C, seed)
        D = None
        for attempt in range(config.CHART_ATTEMPTS):
            try:
                D = _quadric_divisor_attempt(f, C, max_ext, rng)
                break
            except _Retry as e:
                logger.debug(f"[Curves] 除子第 {attempt + 1} 次尝试失败: {e}")
        if D is None:
            raise GenericityError(f"{config.CHART_ATTEMPTS} 次随机坐标变换后仍无法分离支撑点")
    if D.total_degree != C.degree * f.degree:
        raise ContractViolationError(f"除子次数 {D.total_degree} != {C.degree * f.degree}")
    return D


# ==================== 切线与密切平面 ====================

@dataclass
class TangentData:
    point: tuple
    field: ScalarField
    tangent: SubspaceBasis       # 两个线性型，交为 t_q
    osculating: MultiPoly
    direction: List              # 切方向 γ1
    degenerate: bool = False     # γ2 与 γ0, γ1 共线，改用 γ3


def tangent_and_osculating(C: CurveModel, q) -> TangentData:
    series = local_series(C, q, 4)
    K = series.field
    g = [series.term(i) for i in range(4)]
    piece = GradedPiece(4, 1)
    tangent = kernel_basis([g[0], g[1]], K, 4, piece=piece)
    if tangent.dim != 2:
        raise NotSmoothError("局部级数的一次项为零")
    degenerate = rank([g[0], g[1], g[2]], K, 4) < 3
    rows = [g[0], g[1], g[3] if degenerate else g[2]]
    osc = kernel_basis(rows, K, 4, piece=piece)
    if osc.dim != 1:
        raise GenericityError("三阶以内无法确定密切平面")
    if degenerate:
        logger.warning("⚠️ [Curves] 二阶项退化，密切平面由三阶项确定")
    return TangentData(point=series.point, field=K, tangent=tangent,
                       osculating=osc.polys()[0], direction=g[1], degenerate=degenerate)
