"""
异常层次
所有业务异常都继承 ConicError，并携带命令行退出码：
    1 检查失败 / 2 用法错误 / 3 预算或扩域耗尽
"""
from typing import Any, Optional


class ConicError(Exception):
    exit_code = 1

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.details = details


# ==================== 代数层 ====================

class IncompatibleFieldError(ConicError):
    """混合了不同域的元素"""


class FieldConstructionError(ConicError):
    """域参数非法 (特征 2/3、非素数、可约模多项式)"""
    exit_code = 2


class UnsupportedFieldError(ConicError):
    """该运算在此域上没有实现 (如 Q 上的有限枚举)"""
    exit_code = 2


class AmbientMismatchError(ConicError):
    """两个子空间不在同一个分次片上"""


class FlatLimitError(ConicError):
    """t 饱和后维数下降，只可能是实现缺陷"""


# ==================== 曲线层 ====================

class CurveConstructionError(ConicError):
    exit_code = 2


class NotSmoothError(ConicError):
    pass


class TruncationError(ConicError):
    pass


class ExtensionExhaustedError(ConicError):
    exit_code = 3


class SamplingDefectError(ConicError):
    pass


# ==================== 锥与线性系 ====================

class ContractViolationError(ConicError):
    pass


class AmbiguousConeError(ConicError):
    """顶点落在 S 中，锥方程不唯一；intersection 携带整个交空间"""

    def __init__(self, message: str, intersection: Optional[Any] = None):
        super().__init__(message)
        self.intersection = intersection


class InvalidDirectionError(ConicError):
    pass


class ZeroClassError(ConicError):
    pass


class GenericityError(ConicError):
    """样本不满足一般性假设，调用方应重新取样"""


class EmptyScanError(ConicError):
    """全空间扫描没有有理顶点；调用方可以换更大的素数"""

    def __init__(self, message: str, prime: int = 0):
        super().__init__(message)
        self.prime = prime


# ==================== 搜索与证书 ====================

class SearchBudgetError(ConicError):
    exit_code = 3

    def __init__(self, message: str, resume_token: Optional[dict] = None):
        super().__init__(message)
        self.resume_token = resume_token or {}


class CertificateError(ConicError):
    def __init__(self, message: str, record: str = ""):
        super().__init__(message)
        self.record = record


class ScenarioError(ConicError):
    exit_code = 2
