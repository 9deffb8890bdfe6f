"""异常与告警定义：致命错误抛异常，可继续的数值退化以 warnings 发出"""


class SpectralError(Exception):
    """库内所有致命错误的基类"""

    exit_code = 1


class NumericalDrift(SpectralError):
    """浮点误差超出容差（例如 arccos 参数越界超过 1e-12）"""

    exit_code = 3


class InvalidForm(SpectralError):
    pass


class RankAmbiguous(SpectralError):
    exit_code = 3


class InconsistentSigns(SpectralError):
    pass


class ComplexRoots(SpectralError):
    pass


class InconsistentCompletion(SpectralError):
    pass


class AmbiguousBranch(SpectralError):
    """两个根都满足秩 4，调用方必须显式给出分支"""

    exit_code = 3


class NotInDomain(SpectralError):
    pass


class InsufficientSamples(SpectralError):
    exit_code = 2


class NegativeDiscriminant(SpectralError):
    exit_code = 3


class RankDegenerate(SpectralError):
    exit_code = 3


class NotClosed(SpectralError):
    pass


class Unsamplable(SpectralError):
    pass


class NotPure(SpectralError):
    exit_code = 2


class WordSyntaxError(SpectralError, ValueError):
    exit_code = 2


class SchemaError(SpectralError, ValueError):
    exit_code = 2

    def __init__(self, message: str, line: int = 0):
        super().__init__(f"第 {line} 行: {message}" if line else message)
        self.line = line


class DegeneracyWarning(UserWarning):
    """非一般位置：结果仍然返回，但唯一性不再保证"""


class DegenerateTuple(DegeneracyWarning):
    pass


class Borderline(DegeneracyWarning):
    pass


class DegenerateQuadratic(DegeneracyWarning):
    pass


class RankDegenerateFallback(DegeneracyWarning):
    pass
