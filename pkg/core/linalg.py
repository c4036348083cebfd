"""
精确线性代数
    rref / kernel_basis       通用 Gauss-Jordan，适用于任意精确域
    SubspaceBasis             分次片中子空间的约化阶梯基 (阶梯基唯一，相等即基相等)
    subspace_compare          子空间关系 + 和/交的维数
    ParamSubspace             系数依赖参数 t 的子空间 (按 t 的幂分层存储)
    flat_limit_subspace       Grassmannian 中 t -> 0 的平坦极限
"""
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

from core.errors import AmbientMismatchError, FlatLimitError, IncompatibleFieldError
from core.polynomial import MultiPoly, monomials, piece_dim

Vector = List


# ==================== Gauss-Jordan ====================

def _convert_rows(rows: Sequence[Sequence], field, ncols: Optional[int]) -> List[List]:
    out = []
    for r in rows:
        if ncols is not None and len(r) != ncols:
            raise ValueError(f"行长度 {len(r)} 与列数 {ncols} 不符")
        out.append([field.convert(x) for x in r])
    return out


def rref_with_pivots(rows: Sequence[Sequence], field, ncols: Optional[int] = None):
    """返回 (阶梯行, 秩, 主元列)"""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    M = _convert_rows(rows, field, ncols)
    pivots: List[int] = []
    r = 0
    nrows = len(M)
    for c in range(ncols):
        if r == nrows:
            break
        piv = None
        for i in range(r, nrows):
            if not field.is_zero(M[i][c]):
                piv = i
                break
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = field.inv(M[r][c])
        M[r] = [x * inv for x in M[r]]
        for i in range(nrows):
            if i != r and not field.is_zero(M[i][c]):
                factor = M[i][c]
                Mi, Mr = M[i], M[r]
                M[i] = [a - factor * b for a, b in zip(Mi, Mr)]
        pivots.append(c)
        r += 1
    return M[:r], r, pivots


def rref(rows: Sequence[Sequence], field, ncols: Optional[int] = None) -> Tuple[List[List], int]:
    """唯一的约化行阶梯形及其秩"""
    R, rank, _ = rref_with_pivots(rows, field, ncols)
    return R, rank


def rank(rows: Sequence[Sequence], field, ncols: Optional[int] = None) -> int:
    return rref_with_pivots(rows, field, ncols)[1]


def kernel_vectors(rows: Sequence[Sequence], field, ncols: int) -> List[List]:
    R, _, pivots = rref_with_pivots(rows, field, ncols) if rows else ([], 0, [])
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [field.zero] * ncols
        v[f] = field.one
        for row, pc in zip(R, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def kernel_basis(rows: Sequence[Sequence], field, ncols: Optional[int] = None,
                 piece: Optional["GradedPiece"] = None) -> "SubspaceBasis":
    """右零空间；维数 + 秩 = 列数"""
    if ncols is None:
        ncols = len(rows[0]) if rows else (piece.dim if piece else 0)
    return SubspaceBasis(field, ncols, kernel_vectors(rows, field, ncols), piece=piece)


def transpose(rows: Sequence[Sequence], ncols: Optional[int] = None) -> List[List]:
    if not rows:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*rows)]


def solve_in_span(vectors: Sequence[Sequence], target: Sequence, field) -> Optional[List]:
    """求 λ 使 Σ λ_i v_i = target；无解返回 None"""
    m = len(vectors)
    n = len(target)
    if m == 0:
        return [] if all(field.is_zero(field.convert(x)) for x in target) else None
    aug = [[vectors[i][r] for i in range(m)] + [target[r]] for r in range(n)]
    R, _, pivots = rref_with_pivots(aug, field, m + 1)
    if m in pivots:
        return None
    lam = [field.zero] * m
    for row, pc in zip(R, pivots):
        lam[pc] = row[m]
    return lam


def mat_vec(M: Sequence[Sequence], v: Sequence, field) -> List:
    out = []
    for row in M:
        acc = field.zero
        for a, b in zip(row, v):
            acc = acc + a * b
        out.append(acc)
    return out


def mat_mul(A: Sequence[Sequence], B: Sequence[Sequence], field) -> List[List]:
    Bt = transpose(B)
    return [[sum((a * b for a, b in zip(row, col)), field.zero) for col in Bt] for row in A]


def inverse(M: Sequence[Sequence], field) -> List[List]:
    n = len(M)
    aug = [list(M[i]) + [field.one if i == j else field.zero for j in range(n)] for i in range(n)]
    R, rk, pivots = rref_with_pivots(aug, field, 2 * n)
    if rk < n or pivots[n - 1] != n - 1:
        raise ZeroDivisionError("矩阵不可逆")
    return [row[n:] for row in R]


def det(M: Sequence[Sequence], field):
    n = len(M)
    A = [[field.convert(x) for x in row] for row in M]
    d = field.one
    for c in range(n):
        piv = next((i for i in range(c, n) if not field.is_zero(A[i][c])), None)
        if piv is None:
            return field.zero
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            d = -d
        d = d * A[c][c]
        inv = field.inv(A[c][c])
        for i in range(c + 1, n):
            if not field.is_zero(A[i][c]):
                f = A[i][c] * inv
                A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return d


# ==================== 子空间 ====================

@dataclass(frozen=True)
class GradedPiece:
    """V_k：nvars 元 k 次齐次多项式空间"""
    nvars: int
    degree: int

    @property
    def dim(self) -> int:
        return piece_dim(self.nvars, self.degree)


class SubspaceBasis:
    def __init__(self, field, ncols: int, rows: Sequence[Sequence] = (),
                 piece: Optional[GradedPiece] = None, reduced: bool = False):
        if piece is not None and piece.dim != ncols:
            raise AmbientMismatchError(f"列数 {ncols} 与分次片 {piece} 不符")
        self.field = field
        self.ncols = ncols
        self.piece = piece
        if reduced:
            R = [list(r) for r in rows]
            pivots = [next(i for i, x in enumerate(r) if not field.is_zero(x)) for r in R]
        else:
            R, _, pivots = rref_with_pivots(list(rows), field, ncols) if rows else ([], 0, [])
        self.rows: Tuple[Tuple, ...] = tuple(tuple(r) for r in R)
        self.pivots: Tuple[int, ...] = tuple(pivots)

    # ---------- 构造 ----------
    @classmethod
    def from_polys(cls, polys: Sequence[MultiPoly], field=None, nvars: Optional[int] = None,
                   degree: Optional[int] = None) -> "SubspaceBasis":
        if polys:
            field, nvars, degree = polys[0].field, polys[0].nvars, polys[0].degree
        piece = GradedPiece(nvars, degree)
        vecs = []
        for f in polys:
            if f.is_zero():
                continue
            if f.nvars != nvars or f.degree != degree:
                raise AmbientMismatchError("多项式不在同一分次片中")
            vecs.append(f.to_vector())
        return cls(field, piece.dim, vecs, piece=piece)

    @classmethod
    def zero(cls, field, piece: GradedPiece) -> "SubspaceBasis":
        return cls(field, piece.dim, [], piece=piece)

    @classmethod
    def full(cls, field, piece: GradedPiece) -> "SubspaceBasis":
        n = piece.dim
        eye = [[field.one if i == j else field.zero for j in range(n)] for i in range(n)]
        return cls(field, n, eye, piece=piece, reduced=True)

    # ---------- 性质 ----------
    @property
    def dim(self) -> int:
        return len(self.rows)

    def __len__(self):
        return self.dim

    def _check(self, other: "SubspaceBasis"):
        if other.field != self.field:
            raise IncompatibleFieldError("子空间的域不同")
        if other.ncols != self.ncols or (self.piece and other.piece and self.piece != other.piece):
            raise AmbientMismatchError(f"环境空间不同: {self.piece or self.ncols} vs {other.piece or other.ncols}")

    def vector(self, v) -> List:
        if isinstance(v, MultiPoly):
            if self.piece and (v.nvars, v.degree) != (self.piece.nvars, self.piece.degree):
                raise AmbientMismatchError("多项式不在该分次片中")
            v = v.to_vector()
        if len(v) != self.ncols:
            raise AmbientMismatchError("向量长度不符")
        return [self.field.convert(x) for x in v]

    def reduce(self, v) -> List:
        """模该子空间的法式：消去主元列"""
        F = self.field
        v = self.vector(v)
        for row, pc in zip(self.rows, self.pivots):
            c = v[pc]
            if not F.is_zero(c):
                v = [a - c * b for a, b in zip(v, row)]
        return v

    def reduce_poly(self, f: MultiPoly) -> MultiPoly:
        return MultiPoly.from_vector(self.field, f.nvars, f.degree, self.reduce(f))

    def contains(self, v) -> bool:
        return all(self.field.is_zero(x) for x in self.reduce(v))

    def contains_space(self, other: "SubspaceBasis") -> bool:
        self._check(other)
        return all(self.contains(list(r)) for r in other.rows)

    def polys(self) -> List[MultiPoly]:
        if self.piece is None:
            raise AmbientMismatchError("该子空间没有分次片描述")
        return [MultiPoly.from_vector(self.field, self.piece.nvars, self.piece.degree, r) for r in self.rows]

    def key(self):
        F = self.field
        return tuple(tuple(F.key(x) for x in r) for r in self.rows)

    def __eq__(self, other):
        if not isinstance(other, SubspaceBasis):
            return NotImplemented
        return (other.field == self.field and other.ncols == self.ncols
                and other.key() == self.key())

    def __hash__(self):
        return hash((self.ncols, self.key()))

    # ---------- 运算 ----------
    def __add__(self, other: "SubspaceBasis") -> "SubspaceBasis":
        self._check(other)
        return SubspaceBasis(self.field, self.ncols, list(self.rows) + list(other.rows),
                             piece=self.piece or other.piece)

    def span_with(self, vectors: Sequence) -> "SubspaceBasis":
        extra = [self.vector(v) for v in vectors]
        return SubspaceBasis(self.field, self.ncols, list(self.rows) + extra, piece=self.piece)

    def intersection(self, other: "SubspaceBasis") -> "SubspaceBasis":
        """A ∩ B：[A; -B] 的左零空间给出组合系数"""
        self._check(other)
        F = self.field
        piece = self.piece or other.piece
        if self.dim == 0 or other.dim == 0:
            return SubspaceBasis(F, self.ncols, [], piece=piece)
        stacked = [list(r) for r in self.rows] + [[-x for x in r] for r in other.rows]
        coeffs = kernel_vectors(transpose(stacked), F, len(stacked))
        vecs = []
        for lam in coeffs:
            v = [F.zero] * self.ncols
            for li, row in zip(lam[:self.dim], self.rows):
                if not F.is_zero(li):
                    v = [a + li * b for a, b in zip(v, row)]
            vecs.append(v)
        return SubspaceBasis(F, self.ncols, vecs, piece=piece)

    def extend_scalars(self, K) -> "SubspaceBasis":
        if K == self.field:
            return self
        return SubspaceBasis(K, self.ncols, [[K.convert(x) for x in r] for r in self.rows],
                             piece=self.piece, reduced=True)

    def serialize(self) -> str:
        if self.piece is not None:
            return "\n".join(p.serialize() for p in self.polys()) or "{}"
        F = self.field
        return "\n".join("[" + ", ".join(F.to_str(x) for x in r) + "]" for r in self.rows) or "[]"

    def __repr__(self):
        where = f"V_{self.piece.degree}({self.piece.nvars})" if self.piece else f"F^{self.ncols}"
        return f"SubspaceBasis(dim={self.dim} in {where})"


class SubspaceRelation(Enum):
    EQUAL = "Equal"
    A_CONTAINS_B = "AContainsB"
    B_CONTAINS_A = "BContainsA"
    INCOMPARABLE = "Incomparable"


@dataclass
class CompareResult:
    relation: SubspaceRelation
    dim_a: int
    dim_b: int
    dim_sum: int
    dim_intersection: int

    @property
    def gap(self) -> int:
        return self.dim_sum - self.dim_intersection


def subspace_compare(A: SubspaceBasis, B: SubspaceBasis) -> CompareResult:
    A._check(B)
    dim_sum = (A + B).dim
    dim_int = A.dim + B.dim - dim_sum
    if dim_int == A.dim == B.dim:
        rel = SubspaceRelation.EQUAL
    elif dim_int == B.dim:
        rel = SubspaceRelation.A_CONTAINS_B
    elif dim_int == A.dim:
        rel = SubspaceRelation.B_CONTAINS_A
    else:
        rel = SubspaceRelation.INCOMPARABLE
    return CompareResult(rel, A.dim, B.dim, dim_sum, dim_int)


def divide_exact(f: MultiPoly, g: MultiPoly) -> Optional[MultiPoly]:
    """f = g·h 时返回 h，否则 None (线性求解)"""
    if g.is_zero():
        raise ZeroDivisionError("除以零多项式")
    k = f.degree - g.degree
    if k < 0:
        return None if not f.is_zero() else MultiPoly.zero(f.field, f.nvars, 0)
    F = f.field
    mons = monomials(f.nvars, k)
    cols = [(g * MultiPoly.monomial(F, m)).to_vector() for m in mons]
    lam = solve_in_span(cols, f.to_vector(), F)
    if lam is None:
        return None
    return MultiPoly(F, f.nvars, k, {m: c for m, c in zip(mons, lam)})


# ==================== 参数子空间与平坦极限 ====================

Layers = List[List]  # layers[i] = t^i 的系数向量


def _layers_trim(layers: Layers, field) -> Layers:
    layers = [list(l) for l in layers]
    while layers and all(field.is_zero(x) for x in layers[-1]):
        layers.pop()
    while layers and all(field.is_zero(x) for x in layers[0]):
        layers.pop(0)
    return layers


class ParamSubspace:
    """
    F(t) 上的子空间，每行清分母后按 t 的幂分层存储；
    构造时去掉每行的 t 公因子 (t 饱和形式)。
    """

    def __init__(self, field, ncols: int, rows: Sequence[Layers],
                 piece: Optional[GradedPiece] = None, expected_dim: Optional[int] = None,
                 var: str = "t"):
        self.field = field
        self.ncols = ncols
        self.piece = piece
        self.expected_dim = expected_dim
        self.var = var
        clean = []
        for r in rows:
            layers = _layers_trim([[field.convert(x) for x in l] for l in r], field)
            if layers:
                clean.append(layers)
        self.rows: List[Layers] = clean

    @classmethod
    def from_ratfunc_rows(cls, rows: Sequence[Sequence], FT, piece=None, expected_dim=None):
        """FT 为 RationalFunctionField；逐行乘以分母的最小公倍式"""
        from core import univariate as up
        B = FT.base
        out = []
        for row in rows:
            row = [FT.convert(x) for x in row]
            lcm = [B.one]
            for x in row:
                g = up.gcd(lcm, list(x.den), B)
                lcm = up.divmod_(up.mul(lcm, list(x.den), B), g, B)[0]
            polys = [up.divmod_(up.mul(list(x.num), lcm, B), list(x.den), B)[0] for x in row]
            top = max((len(p) for p in polys), default=0)
            layers = [[p[i] if i < len(p) else B.zero for p in polys] for i in range(top)]
            out.append(layers)
        return cls(B, len(rows[0]) if rows else 0, out, piece=piece, expected_dim=expected_dim, var=FT.var)

    def specialize(self, value) -> SubspaceBasis:
        """在 t = value 处取值 (一般 t 的检查)"""
        F = self.field
        vecs = []
        for layers in self.rows:
            v = [F.zero] * self.ncols
            power = F.one
            for l in layers:
                v = [a + power * b for a, b in zip(v, l)]
                power = power * value
            vecs.append(v)
        return SubspaceBasis(F, self.ncols, vecs, piece=self.piece)


def _saturate(rows: List[Layers], field, ncols: int) -> List[Layers]:
    """
    t 进饱和：t^0 层线性相关时，把参与关系且 t 次数最高的行
    替换为 (Σ c_j r_j)/t^m；次数和严格下降，故必然终止。
    """
    rows = [r for r in (_layers_trim(r, field) for r in rows) if r]
    while rows:
        M0 = [r[0] for r in rows]
        rel = kernel_vectors(transpose(M0, ncols), field, len(M0))
        if not rel:
            return rows
        c = rel[0]
        support = [j for j, cj in enumerate(c) if not field.is_zero(cj)]
        k = max(support, key=lambda j: (len(rows[j]), j))
        top = max(len(rows[j]) for j in support)
        combo = [[field.zero] * ncols for _ in range(top)]
        for j in support:
            for i, layer in enumerate(rows[j]):
                combo[i] = [a + c[j] * b for a, b in zip(combo[i], layer)]
        if any(not field.is_zero(x) for x in combo[0]):
            raise FlatLimitError("t^0 层组合非零，饱和步骤出错")
        v = _layers_trim(combo, field)
        if v:
            rows[k] = v
        else:
            del rows[k]
    return rows


def flat_limit_subspace(P: ParamSubspace) -> SubspaceBasis:
    """t -> 0 的 Grassmannian 极限，维数与一般 t 处相同"""
    rows = _saturate(P.rows, P.field, P.ncols)
    limit = SubspaceBasis(P.field, P.ncols, [r[0] for r in rows], piece=P.piece)
    if limit.dim != len(rows):
        raise FlatLimitError("饱和后的 t^0 层仍线性相关")
    if P.expected_dim is not None and limit.dim != P.expected_dim:
        raise FlatLimitError(f"平坦极限维数 {limit.dim} 与预期 {P.expected_dim} 不符")
    return limit


def flat_limit_kernel(P: ParamSubspace, piece: Optional[GradedPiece] = None) -> SubspaceBasis:
    """
    lim ker N(t)：P 的各行是 N(t) 的行，零化子与极限交换，
    所以取行空间的极限再求核。
    """
    limit = flat_limit_subspace(P)
    return kernel_basis([list(r) for r in limit.rows], P.field, P.ncols, piece=piece)
