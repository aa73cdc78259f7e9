from dataclasses import dataclass
from typing import Any, Dict, Optional

from domain.metrics import DEFAULT_IOU
from domain.refinement import DEFAULT_ITERATIONS, DEFAULT_SEG_THRESHOLD
from domain.statuses import CliqueOrdering, MergeStrategy
from domain.structure_recovery import DEFAULT_MERGE_RATIO, RecoveryConfig

FORMATS = ('json', 'html')
SOURCES = ('refined', 'predictions')


@dataclass(frozen=True)
class RunConfig:
    """Эффективная конфигурация одного запуска команды"""
    output: str
    input: Optional[str] = None
    gt: Optional[str] = None
    seg_threshold: float = DEFAULT_SEG_THRESHOLD
    merge_ratio: float = DEFAULT_MERGE_RATIO
    merge_strategy: MergeStrategy = MergeStrategy.VOTE
    clique_ordering: CliqueOrdering = CliqueOrdering.SHARED_BAND
    iou: float = DEFAULT_IOU
    iterations: int = DEFAULT_ITERATIONS
    seed: int = 0
    jobs: int = 1
    format: str = 'json'
    source: str = 'refined'
    pgm: bool = False

    def __post_init__(self):
        if not self.output:
            raise ValueError("output path is required")
        if not 0 < self.seg_threshold < 1:
            raise ValueError(f"seg_threshold must lie in (0, 1), got {self.seg_threshold}")
        if not 0 <= self.merge_ratio <= 1:
            raise ValueError(f"merge_ratio must lie in [0, 1], got {self.merge_ratio}")
        if not 0 < self.iou <= 1:
            raise ValueError(f"iou must lie in (0, 1], got {self.iou}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.jobs < 1:
            raise ValueError(f"jobs must be >= 1, got {self.jobs}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.source not in SOURCES:
            raise ValueError(f"source must be one of {SOURCES}, got {self.source!r}")

    @property
    def input_path(self) -> str:
        return self.input or self.output

    @property
    def gt_path(self) -> str:
        return self.gt or self.input_path

    @property
    def recovery(self) -> RecoveryConfig:
        return RecoveryConfig(self.merge_ratio, self.merge_strategy, self.clique_ordering)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'input': self.input_path,
            'output': self.output,
            'gt': self.gt_path,
            'seg_threshold': self.seg_threshold,
            'merge_ratio': self.merge_ratio,
            'merge_strategy': self.merge_strategy.value,
            'clique_ordering': self.clique_ordering.value,
            'iou': self.iou,
            'iterations': self.iterations,
            'seed': self.seed,
            'jobs': self.jobs,
            'format': self.format,
            'source': self.source,
            'pgm': self.pgm
        }
