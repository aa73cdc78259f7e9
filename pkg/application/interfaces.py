from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

from domain.mask_targets import GlobalTarget, LocalTarget
from domain.predictions import GlobalPrediction, ProposalPrediction
from domain.rect import Rect
from domain.refinement import RefinedBox
from domain.scalar_map import ScalarMap
from domain.structure_recovery import CellBox
from domain.table_annotation import TableAnnotation
from domain.table_grid import TableGrid

ANNOTATIONS = 'annotations'
PREDICTIONS = 'predictions'
TARGETS = 'targets'
REFINED = 'refined'
GRIDS = 'grids'


@dataclass(frozen=True)
class BoxList:
    """Рамки непустых ячеек одного изображения и, при наличии, карта сегментации"""
    image_width: int
    image_height: int
    boxes: Tuple[CellBox, ...]
    seg: Optional[ScalarMap] = None


class CorpusRepository(ABC):
    """Интерфейс хранилища корпуса таблиц"""

    @abstractmethod
    def exists(self) -> bool:
        """Существует ли корень хранилища"""
        pass

    @abstractmethod
    def list_documents(self, kind: str) -> List[str]:
        """Имена документов, для которых есть данные вида kind"""
        pass

    @abstractmethod
    def has_document(self, kind: str, name: str) -> bool:
        pass

    @abstractmethod
    def load_annotation(self, name: str) -> TableAnnotation:
        pass

    @abstractmethod
    def save_annotation(self, name: str, ann: TableAnnotation) -> None:
        pass

    @abstractmethod
    def load_bundle(self, name: str) -> Tuple[List[ProposalPrediction], GlobalPrediction]:
        pass

    @abstractmethod
    def save_bundle(self, name: str, proposals: Sequence[ProposalPrediction],
                    global_pred: GlobalPrediction) -> None:
        pass

    @abstractmethod
    def seg_path(self, name: str) -> str:
        """Путь к карте сегментации документа в этом хранилище"""
        pass

    @abstractmethod
    def save_targets(self, name: str, local: Sequence[Tuple[int, LocalTarget]],
                     global_target: GlobalTarget, pgm: bool = False) -> None:
        pass

    @abstractmethod
    def load_box_list(self, name: str) -> BoxList:
        pass

    @abstractmethod
    def save_refined(self, name: str, image_size: Tuple[int, int], refined: Sequence[RefinedBox],
                     text_rects: Dict[int, Rect], seg_path: Optional[str]) -> None:
        pass

    @abstractmethod
    def load_grid(self, name: str) -> TableGrid:
        pass

    @abstractmethod
    def save_grid(self, name: str, grid: TableGrid, html: bool = False) -> None:
        pass

    @abstractmethod
    def save_manifest(self, manifest: Dict[str, Any]) -> None:
        pass

    @abstractmethod
    def save_report(self, command: str, report: Dict[str, Any]) -> None:
        pass


class TableGenerator(ABC):
    """Интерфейс генератора аннотаций таблиц"""

    @abstractmethod
    def generate_table(self, seed: int) -> TableAnnotation:
        pass


class Detector(ABC):
    """Интерфейс детектора: выдаёт предсказания для размеченной таблицы"""

    @abstractmethod
    def detect(self, ann: TableAnnotation, aligned: Dict[int, Rect],
               seed: int) -> Tuple[List[ProposalPrediction], GlobalPrediction]:
        """
        Построить предсказания

        Returns:
            предложения по непустым ячейкам и глобальные карты
        """
        pass
