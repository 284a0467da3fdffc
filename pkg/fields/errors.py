"""
异常层级定义。

所有数值与输入错误都继承 SubLorentzError，CLI 根据异常类型映射退出码。
"""

from __future__ import annotations


class SubLorentzError(Exception):
    """项目内所有错误的基类。"""


class FieldEvaluationError(SubLorentzError):
    """势或度规的求值 / 求导出现非有限值。"""


class DegenerateMetricError(SubLorentzError):
    """度规在查询点退化（|det g| 低于容差）。"""


class SignatureError(SubLorentzError):
    """度规签名不是 (+,−,−,−)。"""


class DivergenceError(SubLorentzError):
    """积分过程中出现非有限状态。"""

    def __init__(self, message: str, last_good_t: float):
        super().__init__(message)
        self.last_good_t = last_good_t


class AbnormalityViolation(SubLorentzError):
    """a0=0 时速度不在 F 的核中。"""


class CausalityError(SubLorentzError):
    """作用量诊断要求类时样本，遇到非类时样本。"""

    def __init__(self, message: str, sample_index: int):
        super().__init__(message)
        self.sample_index = sample_index


class SpecError(SubLorentzError):
    """球面 / 波前采样规格不合法。"""


class DomainError(SubLorentzError):
    """参数超出公式定义域。"""


class ScenarioError(SubLorentzError):
    """场景文件解析或校验失败。"""

    def __init__(self, message: str, field: str = "", line: int | None = None):
        location = field
        if line is not None:
            location = f"{field} (line {line})" if field else f"line {line}"
        super().__init__(f"{location}: {message}" if location else message)
        self.field = field
        self.line = line
