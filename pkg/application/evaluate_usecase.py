import logging
from typing import Any, Dict, List

from domain.metrics import (
    DetectionScore,
    RelationScore,
    aligned_detection_score,
    empty_cell_detection_score,
    relation_score,
    relations_count,
    teds_struct
)
from .batch import run_documents
from .interfaces import ANNOTATIONS, GRIDS, CorpusRepository
from .run_config import RunConfig
from .run_report import DocumentResult, RunReport

logger = logging.getLogger(__name__)


def _scores(details: Dict[str, Any]):
    rel = details['relation']
    aligned = details['aligned_detection']
    empty = details['empty_detection']
    return (RelationScore(rel['correct'], rel['predicted'], rel['ground_truth']),
            DetectionScore(aligned['matched'], aligned['predicted'], aligned['ground_truth']),
            DetectionScore(empty['matched'], empty['predicted'], empty['ground_truth']))


class EvaluateUseCase:
    """Use case оценки восстановленных сеток по эталонным аннотациям

    Документ без сетки (восстановление не удалось) входит в итог с нулевым
    TEDS и без верно найденных отношений.
    """

    def __init__(self, source: CorpusRepository, gt_source: CorpusRepository, sink: CorpusRepository):
        self.source = source
        self.gt_source = gt_source
        self.sink = sink

    def execute(self, config: RunConfig) -> RunReport:
        if not self.gt_source.exists():
            report = RunReport('eval', config.to_dict(), error=f"ground truth {config.gt_path} does not exist",
                               error_code='io')
            self.sink.save_report('eval', report.to_dict())
            return report

        def handle(name: str) -> Dict[str, Any]:
            ann = self.gt_source.load_annotation(name)
            if not self.source.has_document(GRIDS, name):
                return {'missing_grid': True, 'gt_relations': relations_count(ann)}
            grid = self.source.load_grid(name)
            return {
                'relation': relation_score(grid, ann, config.iou).to_dict(),
                'teds_struct': teds_struct(grid, ann),
                'aligned_detection': aligned_detection_score(grid, ann).to_dict(),
                'empty_detection': empty_cell_detection_score(grid, ann).to_dict()
            }

        documents = run_documents(self.gt_source.list_documents(ANNOTATIONS), handle, config.jobs)
        documents = [self._missing(d) for d in documents]
        report = RunReport('eval', config.to_dict(), documents, self._summary(documents))
        self.sink.save_report('eval', report.to_dict())
        summary = report.summary
        logger.info("eval: relation F1 %.4f, TEDS-Struc %.4f over %d documents",
                    summary['relation']['f1'], summary['teds_struct'], summary['documents'])
        return report

    @staticmethod
    def _missing(result: DocumentResult) -> DocumentResult:
        if result.success and result.details.get('missing_grid'):
            return DocumentResult(result.name, False, result.details,
                                  error="no recovered grid for this document", error_code='missing-grid')
        return result

    @staticmethod
    def _summary(documents: List[DocumentResult]) -> Dict[str, Any]:
        relation = RelationScore()
        aligned = DetectionScore()
        empty = DetectionScore()
        teds: List[float] = []
        for d in documents:
            if d.details.get('missing_grid'):
                relation += RelationScore(0, 0, d.details['gt_relations'])
                teds.append(0.0)
            elif d.success:
                rel, det, emp = _scores(d.details)
                relation, aligned, empty = relation + rel, aligned + det, empty + emp
                teds.append(d.details['teds_struct'])
        return {
            'documents': len(documents),
            'evaluated': sum(1 for d in documents if d.success),
            'failed': sum(1 for d in documents if not d.success),
            'relation': relation.to_dict(),
            'teds_struct': sum(teds) / len(teds) if teds else 1.0,
            'aligned_detection': aligned.to_dict(),
            'empty_detection': empty.to_dict(),
            'errors': [{'name': d.name, 'error': d.error, 'error_code': d.error_code}
                       for d in documents if not d.success]
        }
