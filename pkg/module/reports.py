"""检验结果：拟合优度报告 GofReport 与代数检查报告 CheckReport"""
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional


@dataclass
class GofReport:
    statistic: str
    value: float
    sample_count: int
    bins: Dict[str, Any] = field(default_factory=dict)
    p_value: Optional[float] = None
    sigma: Optional[float] = None
    threshold: Optional[float] = None
    passed: bool = False
    details: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.threshold is None:
            return
        if self.sigma is not None:
            consistent = abs(self.sigma) <= self.threshold
        elif self.p_value is not None:
            consistent = self.p_value >= self.threshold
        else:
            consistent = self.value <= self.threshold
        if consistent != self.passed:
            raise ValueError(f"{self.statistic}: passed={self.passed} 与阈值 {self.threshold} 不一致")

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["kind"] = "gof"
        return data


@dataclass
class CheckReport:
    name: str
    trials: int
    failures: List[Dict[str, Any]] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, trial: int, reason: str, **extra) -> None:
        self.failures.append({"trial": trial, "reason": reason, **extra})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": "check", "name": self.name, "trials": self.trials, "passed": self.passed,
            "failure_count": len(self.failures), "failures": self.failures[:20], "details": self.details,
        }
