import argparse
import logging
import sys
from typing import List, Optional

from domain.metrics import DEFAULT_IOU
from domain.refinement import DEFAULT_ITERATIONS, DEFAULT_SEG_THRESHOLD
from domain.statuses import CliqueOrdering, MergeStrategy
from domain.structure_recovery import DEFAULT_MERGE_RATIO
from application.build_targets_usecase import BuildTargetsUseCase
from application.evaluate_usecase import EvaluateUseCase
from application.pipeline_usecase import PipelineUseCase
from application.recover_structure_usecase import RecoverStructureUseCase
from application.refine_boxes_usecase import RefineBoxesUseCase
from application.run_config import FORMATS, SOURCES, RunConfig
from application.run_report import EXIT_IO_ERROR, RunReport
from application.synth_corpus_usecase import SynthCorpusUseCase
from infrastructure.file_corpus_repository import FileCorpusRepository
from infrastructure.simulated_detector import SimulatedDetector
from infrastructure.synthetic_tables import SynthConfig, SyntheticTableGenerator

logger = logging.getLogger(__name__)

DEFAULT_SYNTH = SynthConfig()


def _common(parser: argparse.ArgumentParser, needs_input: bool = True) -> None:
    if needs_input:
        parser.add_argument('--input', required=True, help="input corpus directory")
    parser.add_argument('--output', required=True, help="output directory")
    parser.add_argument('--seed', type=int, default=0, help="base seed (default: %(default)s)")
    parser.add_argument('--jobs', type=int, default=1, help="worker threads (default: %(default)s)")
    parser.add_argument('--verbose', action='store_true', help="log debug messages")
    parser.add_argument('--quiet', action='store_true', help="log errors only")


def _refine_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--seg-threshold', type=float, default=DEFAULT_SEG_THRESHOLD,
                        help="segmentation binarization threshold (default: %(default)s)")
    parser.add_argument('--iterations', type=int, default=DEFAULT_ITERATIONS,
                        help="refinement iterations (default: %(default)s)")


def _recover_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--merge-ratio', type=float, default=DEFAULT_MERGE_RATIO,
                        help="share of foreground strip pixels needed to merge (default: %(default)s)")
    parser.add_argument('--merge-strategy', choices=[s.value for s in MergeStrategy],
                        default=MergeStrategy.VOTE.value, help="empty cell merging (default: %(default)s)")
    parser.add_argument('--clique-ordering', choices=[o.value for o in CliqueOrdering],
                        default=CliqueOrdering.SHARED_BAND.value,
                        help="row/column ordering: shared-band sorts cliques by the centre of the interval "
                             "their members share, member-mean by the mean centre of the members, which "
                             "can misorder rows beside tall spanning cells (default: %(default)s)")
    parser.add_argument('--format', choices=FORMATS, default='json',
                        help="grid output format; html also writes the JSON (default: %(default)s)")
    parser.add_argument('--source', choices=SOURCES, default='refined',
                        help="read refined box lists or raw prediction bundles (default: %(default)s)")


def _eval_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--iou', type=float, default=DEFAULT_IOU,
                        help="cell matching IoU threshold (default: %(default)s)")
    parser.add_argument('--gt', help="directory with ground-truth annotations (default: --input)")


def _range(text: str) -> List[int]:
    lo, _, hi = text.partition('-')
    try:
        return [int(lo), int(hi or lo)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MIN-MAX, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='tablegrid',
                                     description="Table structure recovery from aligned cell boxes")
    commands = parser.add_subparsers(dest='command', required=True)

    synth = commands.add_parser('synth', help="generate a synthetic corpus")
    _common(synth, needs_input=False)
    synth.add_argument('--n', type=int, default=10, help="number of tables (default: %(default)s)")
    synth.add_argument('--rows', type=_range, default=list(DEFAULT_SYNTH.rows), help="MIN-MAX rows")
    synth.add_argument('--cols', type=_range, default=list(DEFAULT_SYNTH.cols), help="MIN-MAX columns")
    synth.add_argument('--span-prob', type=float, default=DEFAULT_SYNTH.span_prob)
    synth.add_argument('--empty-prob', type=float, default=DEFAULT_SYNTH.empty_prob)
    synth.add_argument('--jitter', type=float, default=DEFAULT_SYNTH.jitter,
                       help="box side jitter as a fraction of cell extent")
    synth.add_argument('--pyr-noise', type=float, default=DEFAULT_SYNTH.pyramid_noise,
                       help="uniform pyramid noise amplitude")
    synth.add_argument('--flip-rate', type=float, default=DEFAULT_SYNTH.flip_rate,
                       help="segmentation pixel flip probability")

    targets = commands.add_parser('targets', help="build LPMA/GPMA training targets")
    _common(targets)
    targets.add_argument('--pgm', action='store_true', help="also write PGM previews")

    refine = commands.add_parser('refine', help="refine aligned box boundaries")
    _common(refine)
    _refine_flags(refine)

    recover = commands.add_parser('recover', help="recover table grids")
    _common(recover)
    _recover_flags(recover)

    evaluate = commands.add_parser('eval', help="score grids against annotations")
    _common(evaluate)
    _eval_flags(evaluate)

    pipeline = commands.add_parser('pipeline', help="targets, refine, recover and eval in one run")
    _common(pipeline)
    pipeline.add_argument('--pgm', action='store_true', help="also write PGM previews")
    _refine_flags(pipeline)
    _recover_flags(pipeline)
    _eval_flags(pipeline)
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        output=args.output,
        input=getattr(args, 'input', None),
        gt=getattr(args, 'gt', None),
        seg_threshold=getattr(args, 'seg_threshold', DEFAULT_SEG_THRESHOLD),
        merge_ratio=getattr(args, 'merge_ratio', DEFAULT_MERGE_RATIO),
        merge_strategy=MergeStrategy(getattr(args, 'merge_strategy', MergeStrategy.VOTE.value)),
        clique_ordering=CliqueOrdering(getattr(args, 'clique_ordering', CliqueOrdering.SHARED_BAND.value)),
        iou=getattr(args, 'iou', DEFAULT_IOU),
        iterations=getattr(args, 'iterations', DEFAULT_ITERATIONS),
        seed=args.seed,
        jobs=args.jobs,
        format=getattr(args, 'format', 'json'),
        source=getattr(args, 'source', 'refined'),
        pgm=getattr(args, 'pgm', False)
    )


def _synth_config(args: argparse.Namespace) -> SynthConfig:
    return SynthConfig(rng_seed=args.seed, rows=tuple(args.rows), cols=tuple(args.cols),
                       span_prob=args.span_prob, empty_prob=args.empty_prob, jitter=args.jitter,
                       pyramid_noise=args.pyr_noise, flip_rate=args.flip_rate)


def run(args: argparse.Namespace) -> RunReport:
    config = _run_config(args)
    output = FileCorpusRepository(config.output)
    source = FileCorpusRepository(config.input_path)
    if args.command == 'synth':
        synth = _synth_config(args)
        use_case = SynthCorpusUseCase(SyntheticTableGenerator(synth), SimulatedDetector(synth), output)
        return use_case.execute(config, args.n, synth.to_dict())
    if args.command == 'targets':
        return BuildTargetsUseCase(source, output).execute(config)
    if args.command == 'refine':
        return RefineBoxesUseCase(source, output).execute(config)
    if args.command == 'recover':
        return RecoverStructureUseCase(source, output).execute(config)
    if args.command == 'eval':
        return EvaluateUseCase(source, FileCorpusRepository(config.gt_path), output).execute(config)
    return PipelineUseCase(source, output).execute(config)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.ERROR if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        report = run(args)
    except ValueError as e:
        logger.error("invalid configuration: %s", e)
        return EXIT_IO_ERROR
    except OSError as e:
        logger.error("I/O failure: %s", e)
        return EXIT_IO_ERROR
    for failure in report.failures:
        logger.warning("%s failed [%s]: %s", failure.name, failure.error_code, failure.error)
    if report.error:
        logger.error("%s: %s", report.command, report.error)
    return report.exit_code


if __name__ == '__main__':
    sys.exit(main())
