import logging
from typing import Any, Dict

from domain.table_annotation import derive_aligned_boxes
from .batch import derive_seed, run_documents
from .interfaces import CorpusRepository, Detector, TableGenerator
from .run_config import RunConfig
from .run_report import RunReport

logger = logging.getLogger(__name__)


def document_name(index: int) -> str:
    return f"table_{index:05d}"


class SynthCorpusUseCase:
    """Use case генерации синтетического корпуса"""

    def __init__(self, generator: TableGenerator, detector: Detector, repository: CorpusRepository):
        self.generator = generator
        self.detector = detector
        self.repository = repository

    def execute(self, config: RunConfig, n: int, settings: Dict[str, Any]) -> RunReport:
        """
        Сгенерировать n таблиц с предсказаниями

        Steps:
        1. Вывести seed таблицы и seed детектора из (seed, номер документа)
        2. Сгенерировать аннотацию и выровненные рамки
        3. Испортить идеальные карты детектором
        4. Сохранить аннотацию, пакет предсказаний и манифест
        """
        if n < 0:
            raise ValueError(f"n must be >= 0, got {n}")
        index = {document_name(i): i for i in range(n)}

        def handle(name: str) -> Dict[str, Any]:
            table_seed = derive_seed(config.seed, index[name], 0)
            detector_seed = derive_seed(config.seed, index[name], 1)
            ann = self.generator.generate_table(table_seed)
            aligned = derive_aligned_boxes(ann)
            proposals, global_pred = self.detector.detect(ann, aligned, detector_seed)
            self.repository.save_annotation(name, ann)
            self.repository.save_bundle(name, proposals, global_pred)
            return {
                'table_seed': table_seed,
                'detector_seed': detector_seed,
                'n_rows': ann.n_rows,
                'n_cols': ann.n_cols,
                'cells': len(ann.cells),
                'empty_cells': len(ann.cells) - len(ann.non_empty_cells)
            }

        documents = run_documents(list(index), handle, config.jobs)
        self.repository.save_manifest({
            'seed': config.seed,
            'synth': settings,
            'documents': [{'name': d.name, 'table_seed': d.details['table_seed'],
                           'detector_seed': d.details['detector_seed']}
                          for d in documents if d.success]
        })
        generated = sum(1 for d in documents if d.success)
        report = RunReport('synth', {**config.to_dict(), 'n': n, 'synth': settings}, documents,
                           {'documents': n, 'generated': generated, 'failed': n - generated})
        self.repository.save_report('synth', report.to_dict())
        logger.info("synth: %d of %d tables generated", generated, n)
        return report
