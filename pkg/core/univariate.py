"""
一元多项式算术
多项式用系数列表表示，下标即次数 (低次在前)，系数属于给定的域对象。
扩域、有理函数域、参数曲线和求根共用这里的函数。
"""
import random
from typing import List, Optional, Sequence, Tuple

import sympy

Poly = List


def trim(a: Sequence, F) -> Poly:
    a = list(a)
    while a and F.is_zero(a[-1]):
        a.pop()
    return a


def degree(a: Sequence, F) -> int:
    return len(trim(a, F)) - 1


def add(a: Sequence, b: Sequence, F) -> Poly:
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else F.zero
        y = b[i] if i < len(b) else F.zero
        out.append(x + y)
    return trim(out, F)


def neg(a: Sequence, F) -> Poly:
    return [-c for c in a]


def sub(a: Sequence, b: Sequence, F) -> Poly:
    return add(a, neg(b, F), F)


def scale(a: Sequence, c, F) -> Poly:
    if F.is_zero(c):
        return []
    return trim([x * c for x in a], F)


def mul(a: Sequence, b: Sequence, F) -> Poly:
    a, b = trim(a, F), trim(b, F)
    if not a or not b:
        return []
    out = [F.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if F.is_zero(x):
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return trim(out, F)


def shift(a: Sequence, k: int, F) -> Poly:
    """乘以 X^k"""
    a = trim(a, F)
    return [F.zero] * k + a if a else []


def divmod_(a: Sequence, b: Sequence, F) -> Tuple[Poly, Poly]:
    a, b = trim(a, F), trim(b, F)
    if not b:
        raise ZeroDivisionError("除以零多项式")
    if len(a) < len(b):
        return [], a
    inv_lc = F.inv(b[-1])
    r = list(a)
    q = [F.zero] * (len(a) - len(b) + 1)
    for k in range(len(a) - len(b), -1, -1):
        c = r[k + len(b) - 1] * inv_lc
        q[k] = c
        if F.is_zero(c):
            continue
        for j, y in enumerate(b):
            r[k + j] = r[k + j] - c * y
    return trim(q, F), trim(r[:len(b) - 1], F)


def rem(a: Sequence, b: Sequence, F) -> Poly:
    return divmod_(a, b, F)[1]


def monic(a: Sequence, F) -> Poly:
    a = trim(a, F)
    if not a:
        return []
    return scale(a, F.inv(a[-1]), F)


def gcd(a: Sequence, b: Sequence, F) -> Poly:
    a, b = trim(a, F), trim(b, F)
    while b:
        a, b = b, rem(a, b, F)
    return monic(a, F)


def xgcd(a: Sequence, b: Sequence, F) -> Tuple[Poly, Poly, Poly]:
    """返回 (g, s, t)，满足 s*a + t*b = g，g 首一"""
    r0, r1 = trim(a, F), trim(b, F)
    s0, s1 = [F.one], []
    t0, t1 = [], [F.one]
    while r1:
        q, r = divmod_(r0, r1, F)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, mul(q, s1, F), F)
        t0, t1 = t1, sub(t0, mul(q, t1, F), F)
    if not r0:
        return [], [], []
    c = F.inv(r0[-1])
    return scale(r0, c, F), scale(s0, c, F), scale(t0, c, F)


def evaluate(a: Sequence, x, F):
    acc = F.zero
    for c in reversed(list(a)):
        acc = acc * x + c
    return acc


def derivative(a: Sequence, F) -> Poly:
    return trim([a[i] * F(i) for i in range(1, len(a))], F)


def powmod(a: Sequence, e: int, m: Sequence, F) -> Poly:
    result = [F.one]
    base = rem(a, m, F)
    while e > 0:
        if e & 1:
            result = rem(mul(result, base, F), m, F)
        base = rem(mul(base, base, F), m, F)
        e >>= 1
    return result


def is_squarefree(a: Sequence, F) -> bool:
    a = trim(a, F)
    if len(a) <= 2:
        return True
    return len(gcd(a, derivative(a, F), F)) == 1


def _equal_degree_split(f: Poly, F, rng: random.Random) -> List:
    """f 是若干互异一次因子之积，返回全部根 (奇特征 Cantor-Zassenhaus)"""
    f = monic(f, F)
    if len(f) == 1:
        return []
    if len(f) == 2:
        return [-f[0]]
    q = F.size()
    for _ in range(200):
        delta = F.random_element(rng)
        h = powmod([delta, F.one], (q - 1) // 2, f, F)
        g = gcd(sub(h, [F.one], F), f, F)
        if 1 < len(g) < len(f):
            other = divmod_(f, g, F)[0]
            return _equal_degree_split(g, F, rng) + _equal_degree_split(other, F, rng)
    raise RuntimeError("等次分解未能分裂多项式")


def _prime_field_roots(a: Poly, F) -> List:
    T = sympy.Symbol("T")
    poly = sympy.Poly([F.to_sympy(c) for c in reversed(a)], T, **F.sympy_options())
    _, facs = poly.factor_list()
    found = []
    for fac, _ in facs:
        if fac.degree() == 1:
            c1, c0 = fac.all_coeffs()
            found.append(-F.from_sympy(c0) * F.inv(F.from_sympy(c1)))
    return sorted(found, key=F.key)


def roots(a: Sequence, F, rng: Optional[random.Random] = None) -> List:
    """有限域上的全部互异根，按 key 排序保证确定性。
    F_p 上交给 sympy 分解；sympy 没有 F_{p^k}，扩域上用等次分裂。
    """
    a = trim(a, F)
    if len(a) <= 1:
        return []
    if not F.is_finite:
        raise ValueError("roots 只支持有限域")
    if F.degree_over_prime() == 1:
        return _prime_field_roots(a, F)
    rng = rng or random.Random(len(a))
    q = F.size()
    xq = powmod([F.zero, F.one], q, a, F)
    g = gcd(sub(xq, [F.zero, F.one], F), a, F)
    found = _equal_degree_split(g, F, rng)
    return sorted(found, key=F.key)


def to_str(a: Sequence, F, var: str = "t") -> str:
    a = trim(a, F)
    if not a:
        return "0"
    terms = []
    for i in range(len(a) - 1, -1, -1):
        if F.is_zero(a[i]):
            continue
        c = F.to_str(a[i])
        if i == 0:
            terms.append(c)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            terms.append(mono if c == "1" else f"({c})*{mono}")
    return " + ".join(terms)
