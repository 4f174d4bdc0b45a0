"""Data models for the lambdamu workbench."""

from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, PositiveInt, field_validator


class BaseModelWithDictAccess(BaseModel):
    """Base model with dictionary-style access."""

    def __getitem__(self, key):
        """Allow dictionary-style access to model attributes."""
        return getattr(self, key)


class RuleName(str, Enum):
    """Wire names of the reduction rules."""

    BETA = "beta"
    MU = "mu"
    MU_PRIME = "mu_prime"


class RedexRefModel(BaseModelWithDictAccess):
    """One redex occurrence: a path of selectors and a rule."""

    path: List[str] = Field(default_factory=list)
    rule: RuleName

    @field_validator("path")
    @classmethod
    def check_selectors(cls, value: List[str]) -> List[str]:
        """Reject selectors outside the five node positions."""
        allowed = {"AppFun", "AppArg", "LamBody", "MuBody", "NamedBody"}
        for selector in value:
            if selector not in allowed:
                raise ValueError(f"unknown path selector {selector!r}")
        return value


class TraceModel(BaseModelWithDictAccess):
    """Trace file format: the terms in concrete syntax and the fired redexes."""

    terms: List[str]
    steps: List[RedexRefModel] = Field(default_factory=list)

    @field_validator("terms")
    @classmethod
    def check_nonempty(cls, value: List[str]) -> List[str]:
        """A trace has at least its first term."""
        if not value:
            raise ValueError("a trace needs at least one term")
        return value


class ClauseModel(BaseModelWithDictAccess):
    """One node of a standardness certificate.

    ``start`` and ``end`` index the certified slice of the trace, ``focus`` is the
    path of the sub-term the slice talks about and ``split`` is the index where a
    phase ends (the ``k`` of the clause), when the clause has one.
    """

    clause: str
    start: int
    end: int
    focus: List[str] = Field(default_factory=list)
    split: Optional[int] = None
    children: List["ClauseModel"] = Field(default_factory=list)


class CertificateModel(BaseModelWithDictAccess):
    """A certified standard trace."""

    trace: TraceModel
    root: ClauseModel


class VerdictKind(str, Enum):
    """Outcome of a strong-normalization analysis."""

    SN = "SN"
    NON_SN = "NonSN"
    UNKNOWN = "Unknown"


class VerdictSummary(BaseModelWithDictAccess):
    """Printable summary of an SN verdict."""

    kind: VerdictKind
    eta: Optional[int] = None
    nodes: int = 0
    edges: int = 0
    witness: Optional[TraceModel] = None
    reason: Optional[str] = None


class ClaimStatus(str, Enum):
    """Outcome of one catalog claim."""

    PASS = "PASS"
    FAIL = "FAIL"
    UNKNOWN = "UNKNOWN"


class ClaimResult(BaseModelWithDictAccess):
    """Outcome of one catalog claim."""

    name: str
    status: ClaimStatus
    detail: str = ""

    def line(self) -> str:
        """Render the claim as a report line."""
        return f"CLAIM {self.name}: {self.status.value} ({self.detail})"


class SuiteReport(BaseModelWithDictAccess):
    """Outcome of the whole claim suite, in a fixed order."""

    claims: List[ClaimResult] = Field(default_factory=list)

    def lines(self) -> List[str]:
        """Render every claim as a report line."""
        return [claim.line() for claim in self.claims]

    @property
    def all_passed(self) -> bool:
        """Whether every claim passed."""
        return all(claim.status == ClaimStatus.PASS for claim in self.claims)

    @property
    def exit_code(self) -> int:
        """0 when all pass, 3 when any claim failed, otherwise 2."""
        statuses = {claim.status for claim in self.claims}
        if ClaimStatus.FAIL in statuses:
            return 3
        if ClaimStatus.UNKNOWN in statuses:
            return 2
        return 0


class CliConfig(BaseModelWithDictAccess):
    """Validated command-line configuration."""

    model_config = ConfigDict(extra="forbid")

    subcommand: str
    terms: List[str] = Field(default_factory=list)
    ctx: Optional[str] = None
    strategy: str = "lo"
    seed: int = 0
    max_steps: PositiveInt = 10_000
    max_nodes: PositiveInt = 1_000_000
    trace: Optional[str] = None
    dot: Optional[str] = None
    output: Optional[str] = None
    index: Optional[int] = None
    json_output: bool = False
    verbose: bool = False

    @field_validator("strategy")
    @classmethod
    def check_strategy(cls, value: str) -> str:
        """Only the deterministic strategies and the seeded random one exist."""
        if value not in ("lo", "ri", "random"):
            raise ValueError(f"unknown strategy {value!r}")
        return value
