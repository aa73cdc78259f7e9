import logging
from typing import Any, Dict

from domain.structure_recovery import CellBox, recover
from .batch import run_documents
from .interfaces import PREDICTIONS, REFINED, BoxList, CorpusRepository
from .run_config import RunConfig
from .run_report import RunReport

logger = logging.getLogger(__name__)


class RecoverStructureUseCase:
    """Use case восстановления сетки таблицы по выровненным рамкам"""

    def __init__(self, source: CorpusRepository, sink: CorpusRepository):
        self.source = source
        self.sink = sink

    def _box_list(self, name: str, kind: str) -> BoxList:
        if kind == REFINED:
            return self.source.load_box_list(name)
        proposals, global_pred = self.source.load_bundle(name)
        boxes = tuple(CellBox(p.id, p.box, p.text_rect) for p in proposals)
        return BoxList(global_pred.width, global_pred.height, boxes, global_pred.seg)

    def execute(self, config: RunConfig) -> RunReport:
        if not self.source.exists():
            report = RunReport('recover', config.to_dict(), error=f"input {config.input_path} does not exist",
                               error_code='io')
            self.sink.save_report('recover', report.to_dict())
            return report
        kind = REFINED if config.source == 'refined' else PREDICTIONS
        recovery = config.recovery

        def handle(name: str) -> Dict[str, Any]:
            box_list = self._box_list(name, kind)
            grid = recover(box_list.boxes, box_list.seg, recovery)
            self.sink.save_grid(name, grid, html=config.format == 'html')
            return {
                'n_rows': grid.n_rows,
                'n_cols': grid.n_cols,
                'cells': len(grid.cells),
                'empty_cells': len(grid.empty_cells)
            }

        documents = run_documents(self.source.list_documents(kind), handle, config.jobs)
        failed = sum(1 for d in documents if not d.success)
        report = RunReport('recover', config.to_dict(), documents,
                           {'documents': len(documents), 'failed': failed,
                            'empty_cells': sum(d.details['empty_cells'] for d in documents if d.success)})
        self.sink.save_report('recover', report.to_dict())
        logger.info("recover: %d documents, %d failed", len(documents), failed)
        return report
