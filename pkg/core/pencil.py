"""
平面四次曲线束：
    在椭圆正规四次曲线上找截出 16q 的四次锥，从顶点投影得到 λ·k_p + μ·f_p，
    并给出四项证据 (基点、不可约、光滑成员、非等平凡)。
"""
import random
from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional, Sequence, Tuple

from loguru import logger

import config
from core import univariate as up
from core.conic import (Frame, VertexTag, classify_vertex, cone_equation, vertex_frame, wspace)
from core.curves import (CurveDivisor, CurveModel, CurvePoint, divisor_on_curve, graded_ideal_piece,
                         local_series, tangent_and_osculating, vanishing_order)
from core.elliptic import (EPoint, GoldenCertificate, WeierstrassCurve, embed_by_4O, embed_point,
                           find_point_of_order, lin_equiv_cert)
from core.errors import (CertificateError, ContractViolationError, EmptyScanError, GenericityError,
                         NotSmoothError, SearchBudgetError)
from core.fields import extension_tower
from core.groebner import GroebnerBasis, factor_univariate, resultant, symbols_for, to_affine_expr
from core.intersection import _binary_gcd, _restrict_to_line, plane_singularities
from core.linalg import SubspaceBasis, inverse, kernel_basis, rank
from core.polynomial import MultiPoly, monomials, products
from core.scanner import CONE_DEGREE, TORSION_CONDITIONS, osculating_space, scan_vertices
from core.series import compose_form, newton_branch

BASE_MULTIPLICITY = CONE_DEGREE * CONE_DEGREE
BRANCH_ORDER = 13   # > 3·4，三次曲线与不可约四次曲线在一点的相交数上界


# ==================== 顶点条件 ====================

def vertex_conditions(C: CurveModel, p, q, m: int = TORSION_CONDITIONS) -> SubspaceBasis:
    """{h ∈ W(p)_4 : ν_q(h|_C) ≥ m}"""
    F = C.field
    basis = products(wspace(p, F).polys(), CONE_DEGREE)
    series = local_series(C, q, m)
    if series.order < m:
        raise ContractViolationError(f"局部级数截断 {series.order} < {m}")
    cols = [compose_form(b, series.coords, series.field, m)[:m] for b in basis]
    rows = [[cols[j][i] for j in range(len(basis))] for i in range(m)]
    kernel = kernel_basis(rows, F, len(basis))
    polys = []
    for c in kernel.rows:
        acc = MultiPoly.zero(F, 4, CONE_DEGREE)
        for cj, b in zip(c, basis):
            acc = acc + b.scale(cj)
        polys.append(acc)
    return SubspaceBasis.from_polys(polys, F, 4, CONE_DEGREE)


@dataclass
class ConeWitness:
    vertex: tuple
    cone: MultiPoly          # f_p
    g: MultiPoly
    solution_dim: int
    divisor: str = ""

    def serialize(self, F) -> str:
        v = " : ".join(F.to_str(F.convert(c)) for c in self.vertex)
        return f"p = ({v}), dim = {self.solution_dim}, g = {self.g.to_str()}, div(g) = {self.divisor}"


def _witness_at(C: CurveModel, p: tuple, q: CurvePoint) -> Optional[ConeWitness]:
    if C.contains_point(p):
        return None
    vc = classify_vertex(C, p)
    if vc.tag != VertexTag.U:
        return None
    sol = vertex_conditions(C, p, q)
    if sol.dim < 2:
        return None
    fp = cone_equation(C, p)
    line = SubspaceBasis.from_polys([fp])
    g = next(h for h in sol.polys() if not line.contains(h)).canonical()
    div = divisor_on_curve(g, C)
    if not div.is_multiple_of(q, BASE_MULTIPLICITY):
        raise ContractViolationError(f"g 截出 {div.serialize()}，不是 16q")
    return ConeWitness(tuple(p), fp, g, sol.dim, div.serialize())


def search_vertices(C: CurveModel, q: CurvePoint, region: Optional[Sequence] = None,
                    budget: int = config.SCAN_BUDGET, limit: int = 0,
                    progress: bool = False) -> List[ConeWitness]:
    """region 为 None 时全空间扫描，否则只检查给定的顶点；每个候选都做精确复核"""
    F = C.field
    if region is None:
        scan = scan_vertices(C, q, budget=budget, progress=progress)
        candidates = scan.hits
    else:
        candidates = [tuple(F.convert(c) for c in p) for p in region]
    witnesses = []
    for p in candidates:
        w = _witness_at(C, tuple(F.convert(c) for c in p), q)
        if w is not None:
            witnesses.append(w)
            if limit and len(witnesses) >= limit:
                break
    logger.info(f"📊 [Pencil] {len(candidates)} 个候选中有 {len(witnesses)} 个锥见证")
    if not witnesses and region is None:
        raise EmptyScanError(
            f"F_{F.characteristic} 上全空间扫描没有找到顶点；族 B 的有理点太少，请增大 p", prime=F.characteristic)
    return witnesses


# ==================== 密切四次曲线 ====================

@dataclass
class OsculatingQuartic:
    cone: MultiPoly          # 以 q 为顶点的四次锥 (P³ 坐标)
    plane: MultiPoly         # P(W(q)*) 中的四次曲线
    frame: Frame
    order_on_projection: int
    divisor: str
    outside_cubic_multiples: bool


def osculating_quartic(C: CurveModel, q: CurvePoint) -> OsculatingQuartic:
    F = C.field
    T = osculating_space(C, q)
    S = SubspaceBasis.from_polys(products(wspace(q, F).polys(), CONE_DEGREE))
    sol = S.intersection(T)
    ideal = graded_ideal_piece(C, CONE_DEGREE)
    outside = [h for h in sol.polys() if not ideal.contains(h)]
    if not outside:
        raise ContractViolationError("Sym^4 W(q) ∩ T 全在 I(4) 中，检查挠点证书")
    cone = outside[0].canonical()
    div = divisor_on_curve(cone, C)
    if not div.is_multiple_of(q, BASE_MULTIPLICITY):
        raise ContractViolationError(f"密切四次锥截出 {div.serialize()}")
    order = int(vanishing_order(cone, C, q)) - CONE_DEGREE
    if order != 12:
        raise ContractViolationError(f"在投影曲线上的接触阶为 {order}，应为 12")
    frame = vertex_frame(q.coords, F)
    plane = frame.pull(cone).drop_variable(3)
    return OsculatingQuartic(cone, plane, frame, int(order), div.serialize(), True)


def osculating_residual(C: CurveModel, q: CurvePoint) -> CurveDivisor:
    """密切平面在 C 上截出 3q + q′ (4q 说明 q 是拐点)"""
    return divisor_on_curve(tangent_and_osculating(C, q).osculating, C)


# ==================== 构造平面四次曲线束 ====================

@dataclass
class Pencil:
    k: MultiPoly             # k_p，3 元
    f: MultiPoly             # f_p，3 元
    base_point: tuple        # q̄
    frame: Frame
    vertex: tuple

    def member(self, lam, mu) -> MultiPoly:
        return self.k.scale(lam) + self.f.scale(mu)

    def extend_scalars(self, K) -> "Pencil":
        return Pencil(self.k.extend_scalars(K), self.f.extend_scalars(K),
                      tuple(K.convert(c) for c in self.base_point), self.frame, self.vertex)

    def serialize(self) -> str:
        F = self.k.field
        qbar = " : ".join(F.to_str(c) for c in self.base_point)
        return "\n".join([f"k_p = {self.k.to_str(('x', 'y', 'z'))}",
                          f"f_p = {self.f.to_str(('x', 'y', 'z'))}",
                          f"q̄ = ({qbar})", f"frame = {self.frame.serialize()}"])


def build_pencil(C: CurveModel, witness: ConeWitness, q: CurvePoint) -> Pencil:
    F = C.field
    frame = vertex_frame(witness.vertex, F)
    try:
        k = frame.pull(witness.g).drop_variable(3)
        f = frame.pull(witness.cone).drop_variable(3)
    except ValueError:
        raise GenericityError("锥方程依赖于顶点方向的坐标，框架退化")
    qbar = frame.to_frame(q.coords)[:3]
    if all(F.is_zero(c) for c in qbar):
        raise GenericityError("q 是顶点，重新选择见证")
    qbar = tuple(CurvePoint(list(qbar) + [F.zero], F).coords[:3])
    if not (F.is_zero(k.evaluate(qbar)) and F.is_zero(f.evaluate(qbar))):
        raise ContractViolationError("q̄ 不是束的基点")
    return Pencil(k, f, qbar, frame, witness.vertex)


# ==================== 证书 ====================

@dataclass
class CertificateRecord:
    name: str
    passed: bool
    evidence: List[str] = dc_field(default_factory=list)
    needs_review: bool = False

    def serialize(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        if self.needs_review:
            status += " (review)"
        return "\n".join([f"## {self.name}: {status}"] + [f"  {line}" for line in self.evidence])


@dataclass
class PencilCertificate:
    pencil: Pencil
    records: List[CertificateRecord]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def record(self, name: str) -> CertificateRecord:
        return next(r for r in self.records if r.name == name)

    def serialize(self) -> str:
        return "\n".join(["# pencil", self.pencil.serialize()] + [r.serialize() for r in self.records])


def _random_change(F, rng) -> Tuple[List[List], List[List]]:
    while True:
        B = [[F.random_element(rng) for _ in range(3)] for _ in range(3)]
        if rank(B, F, 3) == 3:
            return B, inverse(B, F)


def _single_root_power(res: List, F, power: int) -> Optional[object]:
    """res = c·(T − t0)^power 时返回 t0"""
    facs = factor_univariate(res, F)
    if len(facs) != 1 or len(facs[0][0]) != 2 or facs[0][1] != power:
        return None
    return -facs[0][0][0]


def base_locus_record(pencil: Pencil, rng: random.Random) -> CertificateRecord:
    k, f = pencil.k, pencil.f
    F = k.field
    rec = CertificateRecord("base_locus", False)
    if k.proportional(f):
        rec.evidence.append("k_p 与 f_p 成比例，基点轨迹是整条曲线")
        return rec
    x, y = symbols_for(2)
    for _ in range(config.CHART_ATTEMPTS):
        B, Binv = _random_change(F, rng)
        k2, f2 = k.compose_matrix(B), f.compose_matrix(B)
        g, at_inf = _binary_gcd([_restrict_to_line(k2), _restrict_to_line(f2)], F)
        if len(g) > 1 or at_inf:
            continue
        ek, ef = to_affine_expr(k2, 2, (x, y)), to_affine_expr(f2, 2, (x, y))
        ry = resultant(ek, ef, x, F, y)
        rx = resultant(ek, ef, y, F, x)
        if len(ry) != BASE_MULTIPLICITY + 1 or len(rx) != BASE_MULTIPLICITY + 1:
            continue
        y0 = _single_root_power(ry, F, BASE_MULTIPLICITY)
        x0 = _single_root_power(rx, F, BASE_MULTIPLICITY)
        rec.evidence.append(f"Res_x = {up.to_str(ry, F, 'y')}")
        rec.evidence.append(f"Res_y = {up.to_str(rx, F, 'x')}")
        if x0 is None or y0 is None:
            rec.evidence.append("结式不是线性因子的 16 次幂")
            return rec
        expected = [sum((Binv[i][j] * pencil.base_point[j] for j in range(3)), F.zero) for i in range(3)]
        found = [x0, y0, F.one]
        rec.passed = rank([expected, found], F, 3) == 1
        rec.evidence.append(f"唯一公共零点 ({F.to_str(x0)} : {F.to_str(y0)} : 1)，与 q̄ 一致: {rec.passed}")
        return rec
    rec.evidence.append(f"{config.CHART_ATTEMPTS} 次坐标变换都不一般")
    return rec


def _plane_point(M: MultiPoly, K, rng: random.Random, tries: int = 60) -> Optional[tuple]:
    """M 上的光滑 K-点：随机取 x = a，解 M(a, y, 1) = 0"""
    Mk = M.extend_scalars(K)
    grad = Mk.gradient()
    for _ in range(tries):
        a = K.random_element(rng)
        coeffs = [K.zero] * (Mk.degree + 1)
        for e, c in Mk.terms.items():
            coeffs[e[1]] = coeffs[e[1]] + c * a ** e[0]
        for b in up.roots(coeffs, K, rng):
            pt = (a, b, K.one)
            if any(not K.is_zero(g.evaluate(pt)) for g in grad):
                return pt
    return None


def member_is_absolutely_irreducible(M: MultiPoly, K, rng: random.Random) -> Optional[bool]:
    """
    光滑点 r 处分支展开到 σ^13，求与之接触 ≥ 13 的三次曲线：
    M 不可约时只有 0 (3·4 < 13)；M = A·B 时 r 所在的分支给出非零解。
    找不到光滑点返回 None。
    """
    r = None
    for deg in ((1, 2, 3) if K.degree_over_prime() == 1 else (1,)):
        L = extension_tower(K, deg) if deg > 1 else K
        r = _plane_point(M, L, rng)
        if r is not None:
            K = L
            break
    if r is None:
        return None
    try:
        branch = newton_branch([M.extend_scalars(K)], r, K, BRANCH_ORDER)
    except NotSmoothError:
        return None
    rows = [compose_form(MultiPoly.monomial(K, e), branch.coords, K, BRANCH_ORDER)[:BRANCH_ORDER]
            for e in monomials(3, 3)]
    matrix = [[rows[j][i] for j in range(len(rows))] for i in range(BRANCH_ORDER)]
    return kernel_basis(matrix, K, len(rows)).dim == 0


def irreducibility_record(pencil: Pencil, E: WeierstrassCurve, q: EPoint,
                          rng: random.Random, members: int = config.EXTENSION_MEMBERS) -> CertificateRecord:
    F = pencil.k.field
    rec = CertificateRecord("irreducibility", False)
    full, half = lin_equiv_cert(E, q, BASE_MULTIPLICITY)
    four = lin_equiv_cert(E, q, BASE_MULTIPLICITY // 2)[1]
    primary = full and not half and not four
    rec.evidence.append(f"torsion: 16q = O {full}, 8q = O {half}, 4q = O {four}")
    failures = []
    checked = 0
    params = [(F.one, F.zero)] + [(F.convert(t), F.one) for t in F.elements()]
    K2 = extension_tower(F, 2)
    for _ in range(members):
        params.append((K2.random_element(rng), K2.one))
    for lam, mu in params:
        K = F if F.contains(lam) and F.contains(mu) else K2
        M = pencil.extend_scalars(K).member(K.convert(lam), K.convert(mu))
        verdict = member_is_absolutely_irreducible(M, K, rng)
        checked += 1
        if verdict is not True:
            failures.append(f"({K.to_str(K.convert(lam))} : {K.to_str(K.convert(mu))}) -> {verdict}")
    rec.evidence.append(f"members checked: {checked} ({F.size() + 1} over F_{F.characteristic}, {members} over {K2.name})")
    if failures:
        rec.evidence.append("secondary failures: " + "; ".join(failures[:5]))
    rec.passed = primary
    rec.needs_review = primary and bool(failures)
    return rec


def is_smooth_plane_curve(M: MultiPoly) -> bool:
    """Jacobian 理想在三个仿射图上都是 (1)"""
    gens = symbols_for(2)
    grad = M.gradient()
    for chart in range(3):
        exprs = [to_affine_expr(g, chart, gens) for g in grad]
        if not GroebnerBasis(exprs, gens, M.field).is_one():
            return False
    return True


def smooth_member_record(pencil: Pencil, rng: random.Random,
                         draws: int = config.SMOOTH_MEMBER_DRAWS) -> Tuple[CertificateRecord, Optional[tuple]]:
    F = pencil.k.field
    rec = CertificateRecord("smooth_member", False)
    for i in range(draws):
        lam, mu = F.random_element(rng), F.random_element(rng)
        if F.is_zero(lam) and F.is_zero(mu):
            continue
        if is_smooth_plane_curve(pencil.member(lam, mu)):
            rec.passed = True
            rec.evidence.append(f"(λ : μ) = ({F.to_str(lam)} : {F.to_str(mu)}) 光滑，第 {i + 1} 次抽取")
            return rec, (lam, mu)
    rec.evidence.append(f"{draws} 次抽取没有光滑成员")
    return rec, None


def non_isotrivial_record(pencil: Pencil, smooth_param: Optional[tuple],
                          rng: random.Random) -> CertificateRecord:
    F = pencil.f.field
    rec = CertificateRecord("non_isotrivial", False)
    sing = plane_singularities(pencil.f, rng)
    rec.evidence.append(f"f_p: {sing.count} 个奇点, nodal = {sing.nodal}")
    distinct = smooth_param is not None and not F.is_zero(smooth_param[0])
    rec.evidence.append(f"光滑成员与 f_p 不同: {distinct}")
    rec.passed = sing.count == 2 and sing.nodal and distinct
    return rec


def certify_pencil(pencil: Pencil, E: WeierstrassCurve, q: EPoint,
                   seed: int = config.DEFAULT_SEED, strict: bool = True) -> PencilCertificate:
    rng = random.Random(seed)
    base = base_locus_record(pencil, rng)
    irred = irreducibility_record(pencil, E, q, rng)
    smooth, param = smooth_member_record(pencil, rng)
    noniso = non_isotrivial_record(pencil, param, rng)
    cert = PencilCertificate(pencil, [base, irred, smooth, noniso])
    for r in cert.records:
        icon = "✅" if r.passed else "❌"
        logger.info(f"{icon} [Pencil] {r.name}: {'PASS' if r.passed else 'FAIL'}")
    if strict:
        failed = [r for r in cert.records if not r.passed]
        if failed:
            raise CertificateError(f"证书记录 {failed[0].name} 未通过", record=failed[0].name)
    return cert


# ==================== 完整流程 ====================

@dataclass
class WitnessSearch:
    golden: GoldenCertificate
    curve: CurveModel
    q: CurvePoint
    witnesses: List[ConeWitness]
    attempts: Dict[int, int] = dc_field(default_factory=dict)

    @property
    def E(self) -> WeierstrassCurve:
        return self.golden.curve


@dataclass
class PipelineResult:
    search: WitnessSearch
    pencil: Pencil
    certificate: PencilCertificate

    @property
    def golden(self) -> GoldenCertificate:
        return self.search.golden


def locate_witness(seed: int = config.DEFAULT_SEED, golden: Optional[GoldenCertificate] = None,
                   primes: Optional[Sequence[int]] = None, budget: int = config.SCAN_BUDGET,
                   region: Optional[Sequence] = None, progress: bool = False) -> WitnessSearch:
    """挠点 -> 嵌入 -> 扫描顶点；全空间扫描为空时沿素数阶梯上升 (不超过 MAX_PRIME)"""
    attempts: Dict[int, int] = {}
    resume = None
    ladder = [p for p in (primes or config.PRIME_LADDER) if p <= config.MAX_PRIME]
    while True:
        if golden is None:
            w = find_point_of_order(primes=ladder, seed=seed, resume=resume)
            golden = GoldenCertificate.from_witness(w)
        E, qE = golden.curve, golden.point
        C = embed_by_4O(E, seed=seed)
        q = embed_point(E, qE, C)
        try:
            witnesses = search_vertices(C, q, region=region, budget=budget, progress=progress, limit=1)
        except EmptyScanError as e:
            attempts[golden.p] = 0
            logger.warning(f"⚠️ [Pencil] {e}")
            bigger = [p for p in ladder if p > golden.p]
            if not bigger:
                raise SearchBudgetError(f"素数阶梯 (至 {config.MAX_PRIME}) 耗尽，没有找到顶点",
                                        resume_token={"prime": golden.p + 1, "attempts": attempts})
            logger.info(f"🔍 [Pencil] 升级到 p = {bigger[0]}")
            resume = {"prime": bigger[0], "index": 0}
            golden = None
            continue
        attempts[golden.p] = len(witnesses)
        return WitnessSearch(golden, C, q, witnesses, attempts)


def run_pipeline(seed: int = config.DEFAULT_SEED, golden: Optional[GoldenCertificate] = None,
                 primes: Optional[Sequence[int]] = None, progress: bool = False) -> PipelineResult:
    search = locate_witness(seed, golden, primes, progress=progress)
    if not search.witnesses:
        raise ContractViolationError(f"F_{search.golden.p} 的给定区域内没有锥见证")
    pencil = build_pencil(search.curve, search.witnesses[0], search.q)
    cert = certify_pencil(pencil, search.E, search.golden.point, seed=seed)
    return PipelineResult(search, pencil, cert)
