"""Pydantic models for check reports and numeric results."""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field


class Report(BaseModel):
    """Result of a single identity check or computation.

    ``passed`` is serialized under the JSON key ``pass``.
    """

    model_config = ConfigDict(populate_by_name=True)

    check: str = Field(description="Name of the check, e.g. 'check-twisted'")
    passed: bool = Field(alias="pass", description="Whether lhs equals rhs under the check's rule")
    lhs: str = Field(description="Left-hand side, pretty-printed")
    rhs: str = Field(description="Right-hand side, pretty-printed")
    meta: Dict[str, Any] = Field(
        default_factory=dict,
        description="Signs, tolerances, steps and intermediate objects",
    )

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, indent=2)


class StageResult(BaseModel):
    """One stage of the counterexample chain."""

    model_config = ConfigDict(populate_by_name=True)

    stage: str = Field(description="Stage name")
    passed: bool = Field(alias="pass", description="Whether the stage succeeded")
    actual: str = Field(description="Computed object, pretty-printed")
    expected: Optional[str] = Field(
        default=None, description="Anchor the stage is compared against, if any"
    )
    applicable: bool = Field(
        default=True, description="False when the anchor does not apply to the chosen field"
    )


class OrbitIntegral(BaseModel):
    """Line integral of a function over one closed orbit."""

    value: float = Field(description="Integral over one period")
    period: float = Field(gt=0, description="Detected period")
    step: float = Field(gt=0, description="Integration step actually used")
    error_estimate: float = Field(ge=0, description="Step-halving difference")


class CounterexampleReport(BaseModel):
    """Full record of a counterexample run."""

    model_config = ConfigDict(populate_by_name=True)

    magnetic_form: str = Field(description="The magnetic 2-form B, pretty-printed")
    stages: List[StageResult] = Field(default_factory=list, description="Stages in order")
    orbit: Optional[OrbitIntegral] = Field(default=None, description="Orbit integral of the witness")
    verdict: str = Field(description="Final verdict text")
    verdict_holds: bool = Field(description="Whether every stage passed")

    def to_report(self) -> Report:
        return Report(
            check="reproduce-paper",
            passed=self.verdict_holds,
            lhs=self.verdict,
            rhs=self.verdict,
            meta={
                "magnetic_form": self.magnetic_form,
                "stages": [stage.model_dump(by_alias=True) for stage in self.stages],
                "orbit": self.orbit.model_dump() if self.orbit else None,
            },
        )
