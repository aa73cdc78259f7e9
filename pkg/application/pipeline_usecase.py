import logging
from dataclasses import replace

from .build_targets_usecase import BuildTargetsUseCase
from .evaluate_usecase import EvaluateUseCase
from .interfaces import CorpusRepository
from .recover_structure_usecase import RecoverStructureUseCase
from .refine_boxes_usecase import RefineBoxesUseCase
from .run_config import RunConfig
from .run_report import RunReport

logger = logging.getLogger(__name__)


class PipelineUseCase:
    """Use case полного прогона: targets, refine, recover, eval

    Стадии обмениваются только файлами рабочего каталога, поэтому результат
    совпадает с ручным запуском четырёх команд:
    targets/refine --input CORPUS --output WORK, recover --input WORK --output WORK,
    eval --input WORK --gt CORPUS --output WORK.
    """

    def __init__(self, corpus: CorpusRepository, work: CorpusRepository):
        self.corpus = corpus
        self.work = work

    def execute(self, config: RunConfig) -> RunReport:
        if not self.corpus.exists():
            report = RunReport('pipeline', config.to_dict(), error=f"input {config.input_path} does not exist",
                               error_code='io')
            self.work.save_report('pipeline', report.to_dict())
            return report

        stages = [
            BuildTargetsUseCase(self.corpus, self.work).execute(config),
            RefineBoxesUseCase(self.corpus, self.work).execute(config),
            RecoverStructureUseCase(self.work, self.work).execute(replace(config, input=config.output)),
            EvaluateUseCase(self.work, self.corpus, self.work).execute(
                replace(config, input=config.output, gt=config.gt_path))
        ]
        report = RunReport('pipeline', config.to_dict(), summary=stages[-1].summary, stages=stages)
        self.work.save_report('pipeline', report.to_dict())
        logger.info("pipeline finished with exit code %d", report.exit_code)
        return report
