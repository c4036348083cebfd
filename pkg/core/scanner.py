"""
顶点扫描 (性能关键路径)
    T = {h ∈ V_4 : ν_q(h|_C) ≥ 16}，dim T = 20。
    h ∈ T 是以 p 为顶点的锥 ⟺ D_p h = Σ p_i ∂h/∂x_i = 0，
    所以 dim(W(p)_4 ∩ T) = 20 − rank A(p)，A(p) = Σ p_i A_i。
    在 P³(F_p) 上分批计算 A(p) 的秩 (numpy int64，模 P 消元)，秩 ≤ 18 即为候选。
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import List, Tuple

import numpy as np
from loguru import logger
from tqdm import tqdm

import config
from core.curves import CurveModel, local_series
from core.errors import ContractViolationError, SearchBudgetError, UnsupportedFieldError
from core.linalg import GradedPiece, SubspaceBasis, kernel_basis
from core.polynomial import MultiPoly, monomial_index, monomials, piece_dim
from core.series import compose_form

CONE_DEGREE = 4
TORSION_CONDITIONS = 16
HIT_RANK = 18


def osculating_space(C: CurveModel, q, m: int = TORSION_CONDITIONS, k: int = CONE_DEGREE) -> SubspaceBasis:
    """{h ∈ V_k : ν_q(h|_C) ≥ m}"""
    F = C.field
    series = local_series(C, q, m)
    cols = []
    for e in monomials(4, k):
        s = compose_form(MultiPoly.monomial(F, e), series.coords, series.field, m)
        cols.append(s[:m])
    rows = [[cols[j][i] for j in range(len(cols))] for i in range(m)]
    if series.field != F:
        raise UnsupportedFieldError("q 必须是基域上的点")
    return kernel_basis(rows, F, piece_dim(4, k), piece=GradedPiece(4, k))


def derivative_matrices(T: SubspaceBasis, P: int) -> np.ndarray:
    """A_i[r, j] = D_i(t_j) 在 V_3 单项式 r 上的系数 (mod P)，形状 (4, 20, dim T)"""
    basis = T.polys()
    k = basis[0].degree
    index = monomial_index(4, k - 1)
    A = np.zeros((4, piece_dim(4, k - 1), len(basis)), dtype=np.int64)
    for i in range(4):
        for j, t in enumerate(basis):
            for e, c in t.partial(i).terms.items():
                A[i, index[e], j] = int(c) % P
    return A


def inverse_table(P: int) -> np.ndarray:
    inv = np.zeros(P, dtype=np.int64)
    for a in range(1, P):
        inv[a] = pow(a, -1, P)
    return inv


def batch_rank(M: np.ndarray, P: int, inv: np.ndarray) -> np.ndarray:
    """一批 n×m 矩阵模 P 的秩 (逐列消元，每个矩阵独立选主元)"""
    M = M.copy() % P
    B, n, m = M.shape
    rank = np.zeros(B, dtype=np.int64)
    rows = np.arange(n)
    for c in range(m):
        cand = (M[:, :, c] != 0) & (rows[None, :] >= rank[:, None])
        has = cand.any(axis=1)
        if not has.any():
            continue
        b = np.nonzero(has)[0]
        piv = np.argmax(cand[b], axis=1)
        r = rank[b]
        top = M[b, r].copy()
        M[b, r] = M[b, piv]
        M[b, piv] = top
        M[b, r] = M[b, r] * inv[M[b, r, c]][:, None] % P
        factor = M[b, :, c].copy()
        factor[rows[None, :] <= r[:, None]] = 0
        M[b] = (M[b] - factor[:, :, None] * M[b, r][:, None, :]) % P
        rank[b] += 1
    return rank


def point_count(P: int) -> int:
    return P ** 3 + P ** 2 + P + 1


def points_from_index(idx: np.ndarray, P: int) -> np.ndarray:
    """规范化射影点的编号：(1,a,b,c)、(0,1,b,c)、(0,0,1,c)、(0,0,0,1)"""
    out = np.zeros((len(idx), 4), dtype=np.int64)
    b0, b1, b2 = P ** 3, P ** 3 + P ** 2, P ** 3 + P ** 2 + P
    m = idx < b0
    j = idx[m]
    out[m] = np.stack([np.ones_like(j), j // (P * P), (j // P) % P, j % P], axis=1)
    m = (idx >= b0) & (idx < b1)
    j = idx[m] - b0
    out[m] = np.stack([np.zeros_like(j), np.ones_like(j), j // P, j % P], axis=1)
    m = (idx >= b1) & (idx < b2)
    j = idx[m] - b1
    out[m] = np.stack([np.zeros_like(j), np.zeros_like(j), np.ones_like(j), j], axis=1)
    m = idx >= b2
    out[m] = np.array([0, 0, 0, 1], dtype=np.int64)
    return out


@dataclass
class ScanResult:
    prime: int
    hits: List[Tuple[int, int, int, int]] = dc_field(default_factory=list)
    scanned: int = 0
    total: int = 0
    kernel_dims: dict = dc_field(default_factory=dict)

    @property
    def complete(self) -> bool:
        return self.scanned >= self.total


def _scan_block(A: np.ndarray, P: int, inv: np.ndarray, start: int, stop: int):
    idx = np.arange(start, stop, dtype=np.int64)
    pts = points_from_index(idx, P)
    M = np.einsum("bi,irj->brj", pts, A) % P
    rk = batch_rank(M, P, inv)
    width = A.shape[2]
    hit = rk <= HIT_RANK
    return [(tuple(int(x) for x in pts[i]), int(width - rk[i])) for i in np.nonzero(hit)[0]]


def scan_vertices(C: CurveModel, q, start: int = 0, budget: int = config.SCAN_BUDGET,
                  batch: int = config.SCAN_BATCH, workers: int = config.MAX_WORKERS,
                  progress: bool = False) -> ScanResult:
    """全空间扫描；budget > 0 时超出预算抛出带续扫令牌的 SearchBudgetError"""
    F = C.field
    if not F.is_finite or F.degree_over_prime() != 1:
        raise UnsupportedFieldError("顶点扫描只在素域上进行")
    P = F.characteristic
    T = osculating_space(C, q)
    if T.dim != 20:
        raise ContractViolationError(f"dim T = {T.dim}，应为 20 (检查 q 的阶)")
    A = derivative_matrices(T, P)
    inv = inverse_table(P)
    total = point_count(P)
    stop = total if budget <= 0 else min(total, start + budget)
    blocks = [(s, min(s + batch, stop)) for s in range(start, stop, batch)]
    result = ScanResult(P, total=total)
    logger.info(f"🔍 [Scanner] F_{P}: 扫描 {stop - start} 个顶点 ({len(blocks)} 批)")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        it = pool.map(lambda blk: _scan_block(A, P, inv, *blk), blocks)
        for found in tqdm(it, total=len(blocks), disable=not progress, desc=f"scan F_{P}"):
            for pt, dim in found:
                result.hits.append(pt)
                result.kernel_dims[pt] = dim
    result.hits.sort()
    result.scanned = stop
    logger.info(f"📊 [Scanner] 候选顶点 {len(result.hits)} 个 (约 {math.ceil(len(result.hits) / P)}·p)")
    if stop < total:
        raise SearchBudgetError(f"扫描到第 {stop} 个点时预算耗尽",
                                resume_token={"prime": P, "start": stop, "hits": result.hits})
    return result
