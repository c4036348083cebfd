"""
素域上的 Weierstrass 椭圆曲线：群律、16 阶点搜索、|4O| 嵌入
    y² = x³ + a·x + b，O 为无穷远点
"""
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from loguru import logger
from sympy import factorint, isprime
from sympy.ntheory import legendre_symbol, sqrt_mod

import config
from core import univariate as up
from core.conic import VertexTag, classify_vertex
from core.curves import (CurveModel, CurvePoint, build_curve, pencil_discriminant, quadric_matrix,
                         tangent_and_osculating, vanishing_order)
from core.errors import (ContractViolationError, CurveConstructionError, SearchBudgetError)
from core.fields import PrimeField, extension_tower
from core.groebner import factor_univariate
from core.linalg import kernel_vectors


@dataclass(frozen=True)
class EPoint:
    """仿射点 (x, y)；x 为 None 表示 O"""
    x: Optional[int] = None
    y: Optional[int] = None

    @property
    def is_identity(self) -> bool:
        return self.x is None

    def serialize(self) -> str:
        return "O" if self.is_identity else f"({self.x}, {self.y})"


IDENTITY = EPoint()


@dataclass
class WeierstrassCurve:
    p: int
    a: int
    b: int
    _order: Optional[int] = dc_field(default=None, repr=False)

    def __post_init__(self):
        if self.p < 5 or not isprime(self.p):
            raise CurveConstructionError(f"p = {self.p} 必须是 >= 5 的素数")
        self.a %= self.p
        self.b %= self.p
        if (4 * self.a ** 3 + 27 * self.b ** 2) % self.p == 0:
            raise CurveConstructionError(f"判别式为零: a={self.a}, b={self.b}")

    def rhs(self, x: int) -> int:
        return (x * x * x + self.a * x + self.b) % self.p

    def contains(self, P: EPoint) -> bool:
        return P.is_identity or (P.y * P.y - self.rhs(P.x)) % self.p == 0

    def neg(self, P: EPoint) -> EPoint:
        if P.is_identity:
            return P
        return EPoint(P.x, (-P.y) % self.p)

    def add(self, P: EPoint, Q: EPoint) -> EPoint:
        p = self.p
        if P.is_identity:
            return Q
        if Q.is_identity:
            return P
        if P.x != Q.x:
            s = (Q.y - P.y) * pow(Q.x - P.x, -1, p) % p
        elif P.y == Q.y and P.y != 0:
            s = (3 * P.x * P.x + self.a) * pow(2 * P.y, -1, p) % p
        else:
            return IDENTITY
        x = (s * s - P.x - Q.x) % p
        y = (s * (P.x - x) - P.y) % p
        return EPoint(x, y)

    def points(self) -> Iterator[EPoint]:
        """按 x 递增枚举全部仿射点"""
        for x in range(self.p):
            r = self.rhs(x)
            if r == 0:
                yield EPoint(x, 0)
            elif legendre_symbol(r, self.p) == 1:
                y = sqrt_mod(r, self.p)
                for yy in sorted({y, self.p - y}):
                    yield EPoint(x, yy)

    def order(self) -> int:
        """#E(F_p) = p + 1 + Σ_x (x³+ax+b / p)"""
        if self._order is None:
            total = self.p + 1
            for x in range(self.p):
                r = self.rhs(x)
                if r:
                    total += legendre_symbol(r, self.p)
            self._order = total
        return self._order

    def random_point(self, rng: random.Random) -> EPoint:
        while True:
            x = rng.randrange(self.p)
            r = self.rhs(x)
            if r == 0:
                return EPoint(x, 0)
            if legendre_symbol(r, self.p) == 1:
                y = sqrt_mod(r, self.p)
                return EPoint(x, y if rng.random() < 0.5 else self.p - y)

    def serialize(self) -> str:
        return f"y^2 = x^3 + {self.a}*x + {self.b} over F_{self.p}"


def ec_scalar_mul(E: WeierstrassCurve, P: EPoint, n: int) -> EPoint:
    """二进制展开的倍点-加法"""
    if not E.contains(P):
        raise ContractViolationError(f"{P.serialize()} 不在曲线上")
    if n < 0:
        return ec_scalar_mul(E, E.neg(P), -n)
    result, base = IDENTITY, P
    while n:
        if n & 1:
            result = E.add(result, base)
        base = E.add(base, base)
        n >>= 1
    return result


def point_order(E: WeierstrassCurve, P: EPoint) -> int:
    """从群阶的素因子分解剥离得到点的阶"""
    n = E.order()
    for q, e in factorint(n).items():
        for _ in range(e):
            if ec_scalar_mul(E, P, n // q).is_identity:
                n //= q
            else:
                break
    return n


def lin_equiv_cert(E: WeierstrassCurve, q: EPoint, n: int) -> Tuple[bool, bool]:
    """(n·q ~ n·O, (n/2)·q ~ (n/2)·O)，即 n·q = O 与 (n/2)·q = O"""
    if n % 2:
        raise ValueError("n 必须是偶数")
    return ec_scalar_mul(E, q, n).is_identity, ec_scalar_mul(E, q, n // 2).is_identity


# ==================== 16 阶点搜索 ====================

@dataclass
class TorsionWitness:
    curve: WeierstrassCurve
    point: EPoint
    n: int
    group_order: int


def _candidates(p: int, seed: int, count: int) -> List[Tuple[int, int]]:
    rng = random.Random(seed * 7919 + p)
    seen, out = set(), []
    while len(out) < min(count, p * p):
        ab = (rng.randrange(p), rng.randrange(p))
        if ab in seen:
            continue
        seen.add(ab)
        if (4 * ab[0] ** 3 + 27 * ab[1] ** 2) % p:
            out.append(ab)
    return out


def _try_curve(p: int, a: int, b: int, n: int, max_points: int = 32) -> Optional[TorsionWitness]:
    E = WeierstrassCurve(p, a, b)
    N = E.order()
    if N % n:
        return None
    half = n // 2
    for i, P in enumerate(E.points()):
        if i >= max_points:
            break
        Q = ec_scalar_mul(E, P, N // n)
        if not ec_scalar_mul(E, Q, half).is_identity:
            return TorsionWitness(E, Q, n, N)
    return None


def find_point_of_order(n: int = config.TORSION_ORDER, primes: Sequence[int] = None,
                        curves_per_prime: int = config.CURVES_PER_PRIME, seed: int = config.DEFAULT_SEED,
                        budget: int = 0, resume: Optional[Dict] = None,
                        workers: int = config.MAX_WORKERS) -> TorsionWitness:
    """
    按素数阶梯与带种子的 (a, b) 候选搜索恰好 n 阶的点；每个素数内并行，
    取候选顺序中第一个成功者，保证结果可复现。
    """
    primes = [p for p in (primes or config.PRIME_LADDER) if p <= config.MAX_PRIME]
    resume = resume or {}
    start_prime = resume.get("prime", primes[0] if primes else 0)
    start_index = resume.get("index", 0)
    examined = 0
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for p in primes:
            if p < start_prime:
                continue
            cands = _candidates(p, seed, curves_per_prime)
            offset = start_index if p == start_prime else 0
            cands = cands[offset:]
            if budget and examined + len(cands) > budget:
                cut = budget - examined
                cands = cands[:cut]
            results = list(pool.map(lambda ab: _try_curve(p, ab[0], ab[1], n), cands))
            for res in results:
                if res is not None:
                    logger.info(f"✅ [Elliptic] {res.curve.serialize()}，q = {res.point.serialize()} 的阶为 {n}")
                    return res
            examined += len(cands)
            if budget and examined >= budget:
                raise SearchBudgetError(f"已检查 {examined} 条曲线，预算耗尽",
                                        resume_token={"prime": p, "index": offset + len(cands), "seed": seed})
            logger.debug(f"[Elliptic] p = {p}: {len(cands)} 条曲线中没有 {n} 阶点")
    raise SearchBudgetError(f"素数阶梯 (至 {config.MAX_PRIME}) 上没有找到 {n} 阶点",
                            resume_token={"prime": config.MAX_PRIME + 1, "index": 0, "seed": seed})


# ==================== |4O| 嵌入 ====================

def embed_by_4O(E: WeierstrassCurve, seed: int = config.DEFAULT_SEED) -> CurveModel:
    """L(4O) 的基 {1, x, y, x²}：u1² = u0·u3，u2² = u1·u3 + a·u0·u1 + b·u0²"""
    F = PrimeField(E.p)
    C = build_curve({"variant": "weierstrass", "a": E.a, "b": E.b,
                     "name": f"E({E.a},{E.b})/F_{E.p}"}, F, seed=seed)
    return C


def embed_point(E: WeierstrassCurve, P: EPoint, C: CurveModel) -> CurvePoint:
    if P.is_identity:
        return CurvePoint((0, 0, 0, 1), C.field)
    return CurvePoint((1, P.x, P.y, P.x * P.x), C.field)


def point_from_curve(E: WeierstrassCurve, pt: CurvePoint) -> EPoint:
    """(u0 : u1 : u2 : u3) -> (u1/u0, u2/u0)；u0 = 0 只有 O"""
    F = pt.field
    u0, u1, u2, _ = pt.coords
    if F.is_zero(u0):
        return IDENTITY
    inv = F.inv(u0)
    return EPoint(int(u1 * inv) % E.p, int(u2 * inv) % E.p)


def flex_diagnostic(C: CurveModel) -> int:
    """O 处密切平面与 C 的接触阶"""
    O = CurvePoint((0, 0, 0, 1), C.field)
    return int(vanishing_order(tangent_and_osculating(C, O).osculating, C, O))


# ==================== 二次曲面束的奇异成员 ====================

@dataclass
class SingularMember:
    parameter: object           # λ，None 表示 Q1 本身
    vertex: tuple
    field: object
    vertex_class: Optional[object] = None

    def serialize(self) -> str:
        K = self.field
        lam = "∞" if self.parameter is None else K.to_str(self.parameter)
        v = " : ".join(K.to_str(c) for c in self.vertex)
        tag = f" -> {self.vertex_class.serialize()}" if self.vertex_class else ""
        return f"λ = {lam}, vertex = ({v}){tag}"


def quadric_pencil_singular_members(C: CurveModel, classify: bool = True) -> List[SingularMember]:
    """det(λA1 + A2) = 0 的四个根及其锥顶 (必要时在扩域上)"""
    F = C.field
    Q1, Q2 = C.quadrics
    disc = pencil_discriminant(Q1, Q2)
    degs = [len(fac) - 1 for fac, _ in factor_univariate(disc, F)]
    r = math.lcm(*degs) if degs else 1
    K = extension_tower(F, r)
    A1 = [[K.convert(x) for x in row] for row in quadric_matrix(Q1)]
    A2 = [[K.convert(x) for x in row] for row in quadric_matrix(Q2)]
    params: List = list(up.roots([K.convert(c) for c in disc], K))
    if len(disc) == 4:
        params.append(None)
    CK = C.extend_scalars(K) if classify else None
    members = []
    for lam in params:
        M = A1 if lam is None else [[lam * a + b for a, b in zip(r1, r2)] for r1, r2 in zip(A1, A2)]
        ker = kernel_vectors(M, K, 4)
        if len(ker) != 1:
            raise ContractViolationError(f"奇异成员的核维数为 {len(ker)}，判别式应无重根")
        vertex = tuple(CurvePoint(ker[0], K).coords)
        vc = classify_vertex(CK, vertex) if classify else None
        if vc is not None and (vc.tag != VertexTag.S or vc.witness != 6 or vc.e != 2 or vc.r != 2):
            raise ContractViolationError(f"锥顶分类异常: {vc.serialize()}")
        members.append(SingularMember(lam, vertex, K, vc))
    if len(members) != 4:
        raise ContractViolationError(f"找到 {len(members)} 个奇异成员，应为 4")
    return members


# ==================== 金证书 ====================

@dataclass
class GoldenCertificate:
    p: int
    a: int
    b: int
    qx: int
    qy: int
    order: int = config.TORSION_ORDER

    @classmethod
    def from_witness(cls, w: TorsionWitness) -> "GoldenCertificate":
        return cls(w.curve.p, w.curve.a, w.curve.b, w.point.x, w.point.y, w.n)

    @property
    def curve(self) -> WeierstrassCurve:
        return WeierstrassCurve(self.p, self.a, self.b)

    @property
    def point(self) -> EPoint:
        return EPoint(self.qx, self.qy)

    def to_text(self) -> str:
        return "".join(f"{k}={getattr(self, k)}\n" for k in ("p", "a", "b", "qx", "qy", "order"))

    @classmethod
    def from_text(cls, text: str) -> "GoldenCertificate":
        values = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            values[key.strip()] = int(value.strip())
        try:
            return cls(**values)
        except TypeError as e:
            raise ContractViolationError(f"金证书格式错误: {e}")

    def save(self, path: str = config.GOLDEN_PATH):
        with open(path, "w", encoding="utf-8") as f:
            f.write(self.to_text())

    @classmethod
    def load(cls, path: str = config.GOLDEN_PATH) -> "GoldenCertificate":
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_text(f.read())

    def verify(self) -> bool:
        """q 在曲线上、n·q = O、(n/2)·q ≠ O，并由逐点枚举确认阶"""
        E = self.curve
        q = self.point
        if not E.contains(q):
            return False
        full, half = lin_equiv_cert(E, q, self.order)
        return full and not half and point_order(E, q) == self.order
