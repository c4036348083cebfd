"""
截断幂级数与 Newton 提升
级数是长度 N+1 的系数列表 (σ^0..σ^N)，系数在某个精确域 K 中。
"""
from dataclasses import dataclass, field as dc_field
from typing import List, Optional, Sequence

from core.errors import NotSmoothError
from core.linalg import det
from core.polynomial import MultiPoly

Series = List


def s_const(c, K, N: int) -> Series:
    return [K.convert(c)] + [K.zero] * N


def s_add(a: Series, b: Series, K) -> Series:
    return [x + y for x, y in zip(a, b)]


def s_sub(a: Series, b: Series, K) -> Series:
    return [x - y for x, y in zip(a, b)]


def s_scale(a: Series, c, K) -> Series:
    return [x * c for x in a]


def s_mul(a: Series, b: Series, K, N: Optional[int] = None) -> Series:
    N = len(a) - 1 if N is None else N
    out = [K.zero] * (N + 1)
    for i in range(min(len(a), N + 1)):
        ai = a[i]
        if K.is_zero(ai):
            continue
        for j in range(min(len(b), N + 1 - i)):
            out[i + j] = out[i + j] + ai * b[j]
    return out


def s_inv(a: Series, K, N: Optional[int] = None) -> Series:
    """可逆级数的逆 (首项非零)"""
    N = len(a) - 1 if N is None else N
    if K.is_zero(a[0]):
        raise ZeroDivisionError("级数首项为零，不可逆")
    inv0 = K.inv(a[0])
    out = [inv0] + [K.zero] * N
    for n in range(1, N + 1):
        acc = K.zero
        for i in range(1, min(n, len(a) - 1) + 1):
            acc = acc + a[i] * out[n - i]
        out[n] = -acc * inv0
    return out


def valuation(a: Series, K) -> Optional[int]:
    """首个非零系数的下标；截断范围内全零返回 None"""
    for i, c in enumerate(a):
        if not K.is_zero(c):
            return i
    return None


def s_pow(a: Series, e: int, K, N: int) -> Series:
    result = s_const(K.one, K, N)
    base = a
    while e:
        if e & 1:
            result = s_mul(result, base, K, N)
        base = s_mul(base, base, K, N)
        e >>= 1
    return result


def compose_form(f: MultiPoly, coords: Sequence[Series], K, N: int) -> Series:
    """f(γ(σ)) mod σ^{N+1}"""
    lift = (lambda c: c) if K == f.field else K.convert
    cache = {}
    acc = [K.zero] * (N + 1)
    for e, c in f.terms.items():
        term = s_const(lift(c), K, N)
        for i, k in enumerate(e):
            if k:
                if (i, k) not in cache:
                    cache[(i, k)] = s_pow(coords[i], k, K, N)
                term = s_mul(term, cache[(i, k)], K, N)
        acc = s_add(acc, term, K)
    return acc


@dataclass
class LocalSeries:
    """曲线在点 q 处的局部参数化"""
    point: tuple
    field: object
    chart: int
    param: Optional[int]
    order: int
    coords: List[Series] = dc_field(default_factory=list)

    def term(self, i: int) -> List:
        """σ^i 的系数向量 γ_i"""
        return [c[i] for c in self.coords]

    def compose(self, f: MultiPoly, N: Optional[int] = None) -> Series:
        N = self.order if N is None else min(N, self.order)
        return compose_form(f, [c[:N + 1] for c in self.coords], self.field, N)


def _truncate(a: Series, n: int, K) -> Series:
    a = list(a[:n + 1])
    return a + [K.zero] * (n + 1 - len(a))


def newton_branch(equations: Sequence[MultiPoly], point: Sequence, K, N: int,
                  chart: Optional[int] = None, param: Optional[int] = None) -> LocalSeries:
    """
    光滑点处的局部分支：x_chart = 1，x_param = a + σ，其余坐标 Newton 提升
    (精度 1 -> 2 -> 4 -> ...)。方程个数 = 变量数 - 2。
    """
    n = equations[0].nvars
    m = len(equations)
    if m != n - 2:
        raise ValueError(f"{n} 元变量需要 {n - 2} 个方程，收到 {m}")
    pt = [K.convert(v) for v in point]
    if chart is None:
        chart = next(i for i, v in enumerate(pt) if not K.is_zero(v))
    inv = K.inv(pt[chart])
    pt = [v * inv for v in pt]

    grads = [[eq.partial(j) for j in range(n)] for eq in equations]

    def jac_det(unknowns):
        M = [[grads[k][u].evaluate(pt, K) for u in unknowns] for k in range(m)]
        return det(M, K)

    candidates = [i for i in range(n) if i != chart] if param is None else [param]
    chosen = None
    for i in candidates:
        unknowns = [u for u in range(n) if u not in (chart, i)]
        if not K.is_zero(jac_det(unknowns)):
            chosen = (i, unknowns)
            break
    if chosen is None:
        raise NotSmoothError(f"点 {pt} 处 Jacobian 秩不足，不是光滑点")
    param, unknowns = chosen

    def coords_at(vals: dict, prec: int) -> List[Series]:
        out = []
        for j in range(n):
            if j == chart:
                out.append(s_const(K.one, K, prec))
            elif j == param:
                s = s_const(pt[j], K, prec)
                if prec >= 1:
                    s[1] = K.one
                out.append(s)
            else:
                out.append(_truncate(vals[j], prec, K))
        return out

    vals = {u: [pt[u]] for u in unknowns}
    prec = 0
    while prec < N:
        prec = min(2 * prec + 1, N)
        coords = coords_at(vals, prec)
        E = [compose_form(eq, coords, K, prec) for eq in equations]
        J = [[compose_form(grads[k][u], coords, K, prec) for u in unknowns] for k in range(m)]
        if m == 1:
            delta = [s_mul(s_inv(J[0][0], K, prec), E[0], K, prec)]
        else:
            (a, b), (c, d) = J
            dt = s_sub(s_mul(a, d, K, prec), s_mul(b, c, K, prec), K)
            di = s_inv(dt, K, prec)
            delta = [
                s_mul(di, s_sub(s_mul(d, E[0], K, prec), s_mul(b, E[1], K, prec), K), K, prec),
                s_mul(di, s_sub(s_mul(a, E[1], K, prec), s_mul(c, E[0], K, prec), K), K, prec),
            ]
        for u, du in zip(unknowns, delta):
            vals[u] = s_sub(_truncate(vals[u], prec, K), du, K)

    coords = coords_at(vals, N)
    for eq in equations:
        residual = compose_form(eq, coords, K, N)
        if valuation(residual, K) is not None:
            raise NotSmoothError("Newton 提升后残差非零，局部分支计算失败")
    return LocalSeries(point=tuple(pt), field=K, chart=chart, param=param, order=N, coords=coords)
