import logging
from typing import Any, Dict, List

from domain.metrics import DEFAULT_DETECTION_IOU, DetectionScore, detection_score
from domain.rect import Rect
from domain.refinement import SIDES, RefinedBox, refine_proposal
from domain.statuses import SideStatus
from domain.table_annotation import derive_aligned_boxes
from .batch import run_documents
from .interfaces import ANNOTATIONS, PREDICTIONS, CorpusRepository
from .run_config import RunConfig
from .run_report import DocumentResult, RunReport

logger = logging.getLogger(__name__)

# Допуск, с которым сторона считается совпавшей с истинной границей
SIDE_TOLERANCE = 1.0


def sides_within(box: Rect, truth: Rect, tolerance: float = SIDE_TOLERANCE) -> int:
    return sum(1 for side in SIDES if abs(getattr(box, side) - getattr(truth, side)) <= tolerance)


def _accuracy(refined: List[RefinedBox], truth: Dict[int, Rect]) -> Dict[str, Any]:
    """Сравнить рамки до и после уточнения с истинными выровненными рамками"""
    known = [r for r in refined if r.id in truth]
    before = detection_score([r.input_box for r in known], [truth[r.id] for r in known], DEFAULT_DETECTION_IOU)
    after = detection_score([r.rect for r in known], [truth[r.id] for r in known], DEFAULT_DETECTION_IOU)
    return {
        'sides': len(SIDES) * len(known),
        'unrefined_within_1px': sum(sides_within(r.input_box, truth[r.id]) for r in known),
        'refined_within_1px': sum(sides_within(r.rect, truth[r.id]) for r in known),
        'unrefined_detection': before.to_dict(),
        'refined_detection': after.to_dict()
    }


def _summary(documents: List[DocumentResult]) -> Dict[str, Any]:
    done = [d.details for d in documents if d.success]
    summary: Dict[str, Any] = {
        'documents': len(documents),
        'failed': len(documents) - len(done),
        'proposals': sum(d['proposals'] for d in done),
        'side_status': {s.value: sum(d['side_status'][s.value] for d in done) for s in SideStatus},
        'midpoint_clamped': sum(len(d['midpoint_clamped']) for d in done),
        'local_only': sum(len(d['local_only']) for d in done)
    }
    measured = [d['accuracy'] for d in done if 'accuracy' in d]
    if measured:
        sides = sum(a['sides'] for a in measured)
        refined = sum(a['refined_within_1px'] for a in measured)
        unrefined = sum(a['unrefined_within_1px'] for a in measured)
        before, after = DetectionScore(), DetectionScore()
        for a in measured:
            before += DetectionScore(a['unrefined_detection']['matched'], a['unrefined_detection']['predicted'],
                                     a['unrefined_detection']['ground_truth'])
            after += DetectionScore(a['refined_detection']['matched'], a['refined_detection']['predicted'],
                                    a['refined_detection']['ground_truth'])
        summary['accuracy'] = {
            'sides': sides,
            'refined_within_1px_rate': refined / sides if sides else 1.0,
            'unrefined_within_1px_rate': unrefined / sides if sides else 1.0,
            'unrefined_detection': before.to_dict(),
            'refined_detection': after.to_dict()
        }
    return summary


class RefineBoxesUseCase:
    """Use case уточнения границ выровненных рамок"""

    def __init__(self, source: CorpusRepository, sink: CorpusRepository):
        self.source = source
        self.sink = sink

    def execute(self, config: RunConfig) -> RunReport:
        """
        Уточнить рамки каждого пакета предсказаний

        Если во входном корпусе есть аннотация документа, отчёт сравнивает
        рамки до и после уточнения с истинными.
        """
        if not self.source.exists():
            report = RunReport('refine', config.to_dict(), error=f"input {config.input_path} does not exist",
                               error_code='io')
            self.sink.save_report('refine', report.to_dict())
            return report

        def handle(name: str) -> Dict[str, Any]:
            proposals, global_pred = self.source.load_bundle(name)
            refined = [refine_proposal(p, global_pred, config.seg_threshold, config.iterations)
                       for p in proposals]
            self.sink.save_refined(name, (global_pred.width, global_pred.height), refined,
                                   {p.id: p.text_rect for p in proposals}, self.source.seg_path(name))
            details: Dict[str, Any] = {
                'proposals': len(refined),
                'side_status': {s.value: sum(1 for r in refined for side in SIDES if r.side_status[side] == s)
                                for s in SideStatus},
                'midpoint_clamped': [r.id for r in refined if r.midpoint_clamped],
                'local_only': [r.id for r in refined if r.local_only]
            }
            if self.source.has_document(ANNOTATIONS, name):
                details['accuracy'] = _accuracy(refined, derive_aligned_boxes(self.source.load_annotation(name)))
            return details

        documents = run_documents(self.source.list_documents(PREDICTIONS), handle, config.jobs)
        summary = _summary(documents)
        report = RunReport('refine', config.to_dict(), documents, summary)
        self.sink.save_report('refine', report.to_dict())
        if 'accuracy' in summary:
            logger.info("refine: %d proposals, within 1 px: refined %.4f, unrefined %.4f",
                        summary['proposals'], summary['accuracy']['refined_within_1px_rate'],
                        summary['accuracy']['unrefined_within_1px_rate'])
        else:
            logger.info("refine: %d proposals in %d documents", summary['proposals'], len(documents))
        return report
