import logging
from typing import Any, Dict

from domain.mask_targets import gpma_targets, lpma_targets
from domain.table_annotation import derive_aligned_boxes
from .batch import run_documents
from .interfaces import ANNOTATIONS, CorpusRepository
from .run_config import RunConfig
from .run_report import RunReport

logger = logging.getLogger(__name__)


class BuildTargetsUseCase:
    """Use case построения обучающих целей LPMA и GPMA по аннотациям"""

    def __init__(self, source: CorpusRepository, sink: CorpusRepository):
        self.source = source
        self.sink = sink

    def execute(self, config: RunConfig) -> RunReport:
        if not self.source.exists():
            report = RunReport('targets', config.to_dict(), error=f"input {config.input_path} does not exist",
                               error_code='io')
            self.sink.save_report('targets', report.to_dict())
            return report

        def handle(name: str) -> Dict[str, Any]:
            ann = self.source.load_annotation(name)
            aligned = derive_aligned_boxes(ann)
            # Предложение в обучении - это истинная выровненная рамка
            local = [(cell.id, lpma_targets(aligned[cell.id], cell.text_rect))
                     for cell in ann.non_empty_cells]
            global_target = gpma_targets(ann, aligned)
            self.sink.save_targets(name, local, global_target, pgm=config.pgm)
            return {'local_targets': len(local), 'image_size': [ann.image_width, ann.image_height]}

        documents = run_documents(self.source.list_documents(ANNOTATIONS), handle, config.jobs)
        failed = sum(1 for d in documents if not d.success)
        report = RunReport('targets', config.to_dict(), documents,
                           {'documents': len(documents), 'failed': failed})
        self.sink.save_report('targets', report.to_dict())
        logger.info("targets: %d documents, %d failed", len(documents), failed)
        return report
