from .batch import derive_seed, run_documents
from .build_targets_usecase import BuildTargetsUseCase
from .evaluate_usecase import EvaluateUseCase
from .interfaces import BoxList, CorpusRepository, Detector, TableGenerator
from .pipeline_usecase import PipelineUseCase
from .recover_structure_usecase import RecoverStructureUseCase
from .refine_boxes_usecase import RefineBoxesUseCase
from .run_config import RunConfig
from .run_report import DocumentResult, RunReport
from .synth_corpus_usecase import SynthCorpusUseCase

__all__ = [
    'BoxList',
    'BuildTargetsUseCase',
    'CorpusRepository',
    'Detector',
    'DocumentResult',
    'EvaluateUseCase',
    'PipelineUseCase',
    'RecoverStructureUseCase',
    'RefineBoxesUseCase',
    'RunConfig',
    'RunReport',
    'SynthCorpusUseCase',
    'TableGenerator',
    'derive_seed',
    'run_documents'
]
