"""
Report Models - Stability Reports and Run Artifacts
"""

from pathlib import Path
from typing import Any, Dict, List, Tuple

from pydantic import BaseModel, Field, model_validator


class StabilityReport(BaseModel):
    """
    Step-size stability limits of the estimators and the bound recursion.

    Attributes:
        mu_h_max (float): Upper limit of the channel-estimator step
        mu_A_max (float): Upper limit of the amplitude-estimator step
        beta_range (tuple): Open interval of convergent forgetting factors
        lambda_max (float): Largest eigenvalue of C^H C
    """

    mu_h_max: float = Field(gt=0.0)
    mu_A_max: float = Field(gt=0.0)
    beta_range: Tuple[float, float] = (0.0, 2.0)
    lambda_max: float = Field(gt=0.0)

    def to_text(self) -> str:
        low, high = self.beta_range
        return "\n".join(
            [
                f"lambda_max = {self.lambda_max:.10g}",
                f"mu_h range = (0, {self.mu_h_max:.10g})",
                f"mu_A range = (0, {self.mu_A_max:.10g})",
                f"beta range = ({low:g}, {high:g})",
            ]
        )


class RunArtifact(BaseModel):
    """
    Outputs of one scenario execution.

    Attributes:
        scenario (str): Scenario identifier
        out_dir (Path): Directory holding the written files
        files (list): Written CSV/manifest paths
        summary (dict): One-line summary values (update rates, final SINR, ...)
        manifest (dict): Effective configuration echo
    """

    scenario: str
    out_dir: Path
    files: List[Path] = Field(default_factory=list)
    summary: Dict[str, Any] = Field(default_factory=dict)
    manifest: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_files(self) -> "RunArtifact":
        for path in self.files:
            if path.parent != self.out_dir:
                raise ValueError(f"{path} is outside {self.out_dir}")
        return self

    def summary_line(self) -> str:
        values = ", ".join(f"{key}={value}" for key, value in self.summary.items())
        return f"{self.scenario}: {values}" if values else self.scenario
