# src/components/report_models.py

from typing import List, Literal, Optional
from pydantic import BaseModel, Field


class IdentityResidual(BaseModel):
    name: str
    max_residual: float
    window: str
    threshold: float

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.threshold


class VerificationReport(BaseModel):
    identities: List[IdentityResidual] = Field(default_factory=list)
    verdict: Literal["pass", "fail"] = "pass"
    accept: float
    depth: Optional[int] = None
    note: Optional[str] = None

    def add(self, name: str, residual: float, window: str, threshold: float) -> "VerificationReport":
        self.identities.append(IdentityResidual(name=name, max_residual=float(residual), window=window, threshold=threshold))
        self.verdict = "pass" if all(item.passed for item in self.identities) else "fail"
        return self

    def failed(self) -> List[str]:
        return [item.name for item in self.identities if not item.passed]

    def worst(self) -> Optional[IdentityResidual]:
        failing = [item for item in self.identities if not item.passed]
        if not failing:
            return None
        return max(failing, key=lambda item: item.max_residual / item.threshold)
