from enum import Enum
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.grid import BinaryGrid, IntGrid
from app.errors import InvalidInputError


class WindowSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    p: int = Field(..., ge=1, description="Window height in rows")
    q: int = Field(..., ge=1, description="Window width in columns")

    @property
    def area(self) -> int:
        return self.p * self.q

    def transposed(self) -> "WindowSpec":
        return WindowSpec(p=self.q, q=self.p)

    def check_fits(self, rows: int, cols: int) -> None:
        if self.p > rows or self.q > cols:
            raise InvalidInputError(f"window {self.p}x{self.q} does not fit a {rows}x{cols} grid")


class SubgridRef(BaseModel):
    """Residue class (a, b) of an m×n grid under a (p, q) window."""

    model_config = ConfigDict(frozen=True)

    a: int = Field(..., ge=1, description="Row residue, 1..p")
    b: int = Field(..., ge=1, description="Column residue, 1..q")
    window: WindowSpec
    rows: int = Field(..., ge=1, description="Parent grid rows m")
    cols: int = Field(..., ge=1, description="Parent grid columns n")

    @model_validator(mode="after")
    def _check_residues(self) -> "SubgridRef":
        if self.a > self.window.p or self.b > self.window.q:
            raise ValueError(f"residue ({self.a}, {self.b}) outside window {self.window.p}x{self.window.q}")
        self.window.check_fits(self.rows, self.cols)
        return self

    @property
    def row_slice(self) -> slice:
        return slice(self.a - 1, self.rows, self.window.p)

    @property
    def col_slice(self) -> slice:
        return slice(self.b - 1, self.cols, self.window.q)

    @property
    def subgrid_shape(self) -> tuple[int, int]:
        return len(range(self.a - 1, self.rows, self.window.p)), len(range(self.b - 1, self.cols, self.window.q))


class Decomposition(BaseModel):
    """Split of a (1,1)-smooth scan into a constant-row part and a constant-column part."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    row_part: IntGrid = Field(..., description="Constant rows, non-negative")
    col_part: IntGrid = Field(..., description="Constant columns, non-negative")
    t: int = Field(..., ge=0, description="Units moved from the column part to the row part")


class PartialFill(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    pent: tuple[int, ...] = Field(..., description="Entries placed per row (or per column for the dual)")
    k_remaining: int = Field(..., description="Residue left for Step 2; negative means the scan undershoots")
    partial: BinaryGrid


class Infeasible(BaseModel):
    """A reconstruction stage that provably has no answer on its input."""

    model_config = ConfigDict(frozen=True)

    stage: str
    reason: str


class Valuation(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: BinaryGrid = Field(..., description="m×n grid, zero outside the support subgrid")
    support: SubgridRef

    @model_validator(mode="after")
    def _check_support(self) -> "Valuation":
        if self.grid.shape != (self.support.rows, self.support.cols):
            raise ValueError(f"valuation grid {self.grid.shape} does not match its parent {self.support.rows}x{self.support.cols}")
        outside = self.grid.cells.copy()
        outside[self.support.row_slice, self.support.col_slice] = 0
        if outside.any():
            raise ValueError("valuation has ones outside its subgrid")
        return self

    def subgrid(self) -> np.ndarray:
        return self.grid.cells[self.support.row_slice, self.support.col_slice]


class FrontierStep(BaseModel):
    """One column step of the minimal-valuation frontier."""

    column: int = Field(..., ge=1, description="Column step, 1-based")
    forced: bool = Field(False, description="The target column holds a ±2 entry")
    children: List[int] = Field(default_factory=list, description="Extensions kept per frontier state")
    parent_zero_rows: List[int] = Field(default_factory=list, description="Still-undetermined rows per frontier state")
    frontier_size: int = 0
    zero_row_states: int = Field(0, description="States after the step that still carry an undetermined row")


class GridFamily(str, Enum):
    GENERAL = "general"
    SMOOTH = "smooth"
    ROW_INVARIANT = "row-invariant"  # (0,q)-invariant
    COL_INVARIANT = "col-invariant"  # (p,0)-invariant
    HOMOGENEOUS = "homogeneous"


class InstanceSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    m: int = Field(..., ge=1)
    n: int = Field(..., ge=1)
    window: WindowSpec
    density: float = Field(0.5, ge=0.0, le=1.0)
    seed: int = Field(0, ge=0)
    family: GridFamily = GridFamily.GENERAL


class ReconstructionStats(BaseModel):
    valuation_counts: List[int] = Field(default_factory=list, description="Minimal valuations per subgrid, (a,b) order")
    candidates_tried: int = 0
    candidates_pruned: int = 0
    smooth_infeasible: int = 0
    symbolic_grids_tried: int = 0
    merge_conflicts: int = 0
    exact_completions: int = 0
    merge_limit_hits: int = Field(0, description="Candidates whose symbolic family was cut at SYMBOLIC_MERGE_LIMIT")
    stage: str = ""


class ReconstructionOutcome(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    solution: Optional[BinaryGrid] = None
    failure: Optional[str] = Field(None, description="Why no solution was produced")
    stats: ReconstructionStats = Field(default_factory=ReconstructionStats)

    @property
    def succeeded(self) -> bool:
        return self.solution is not None
