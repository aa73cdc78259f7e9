import json
import os
import tempfile
import unittest
from pathlib import Path

from application import (
    BuildTargetsUseCase, EvaluateUseCase, PipelineUseCase, RecoverStructureUseCase,
    RefineBoxesUseCase, RunConfig, SynthCorpusUseCase
)
from application.batch import derive_seed, process_document, run_documents
from application.run_report import EXIT_IO_ERROR, EXIT_OK, EXIT_STRUCTURE_ERROR
from domain import DegenerateFitError
from infrastructure import FileCorpusRepository, SimulatedDetector, SynthConfig, SyntheticTableGenerator


def synth(root: str, n: int = 5, seed: int = 0, settings: SynthConfig = SynthConfig(span_prob=0.3)):
    use_case = SynthCorpusUseCase(SyntheticTableGenerator(settings), SimulatedDetector(settings),
                                  FileCorpusRepository(root))
    return use_case.execute(RunConfig(output=root, seed=seed), n, settings.to_dict())


def data_files(root: str):
    """Все файлы каталога, кроме отчётов, с содержимым"""
    base = Path(root)
    return {str(p.relative_to(base)): p.read_bytes() for p in sorted(base.rglob('*'))
            if p.is_file() and p.relative_to(base).parts[0] != 'reports'}


class TestBatch(unittest.TestCase):
    """Тесты пакетной обработки документов"""

    def test_error_codes(self):
        """Тест: исключения превращаются в коды ошибок документа"""
        def handler(name):
            if name == 'domain':
                raise DegenerateFitError("flat")
            if name == 'io':
                raise FileNotFoundError("gone")
            if name == 'format':
                raise ValueError("bad")
            if name == 'internal':
                raise KeyError("x")
            return {'ok': True}

        results = run_documents(['ok', 'domain', 'io', 'format', 'internal'], handler, jobs=3)
        self.assertEqual([r.name for r in results], ['ok', 'domain', 'io', 'format', 'internal'])
        self.assertEqual([r.error_code for r in results], [None, 'degenerate-fit', 'io', 'format', 'internal'])
        self.assertTrue(results[0])
        self.assertFalse(process_document('io', handler))

    def test_derived_seeds(self):
        """Тест: seed документа детерминирован и различается по ключам"""
        self.assertEqual(derive_seed(7, 3, 0), derive_seed(7, 3, 0))
        self.assertNotEqual(derive_seed(7, 3, 0), derive_seed(7, 3, 1))
        self.assertNotEqual(derive_seed(7, 3, 0), derive_seed(8, 3, 0))


class TestSynthCorpus(unittest.TestCase):
    """Тесты генерации корпуса"""

    def test_layout_and_manifest(self):
        """Тест: аннотации, пакеты предсказаний, манифест и отчёт"""
        with tempfile.TemporaryDirectory() as tmp:
            report = synth(tmp, n=3, seed=4)
            self.assertEqual(report.exit_code, EXIT_OK)
            repo = FileCorpusRepository(tmp)
            names = ['table_00000', 'table_00001', 'table_00002']
            self.assertEqual(repo.list_documents('annotations'), names)
            self.assertEqual(repo.list_documents('predictions'), names)
            manifest = json.loads(Path(tmp, 'manifest.json').read_text())
            self.assertEqual(manifest['seed'], 4)
            self.assertEqual([d['name'] for d in manifest['documents']], names)
            self.assertTrue(Path(tmp, 'reports', 'synth.json').is_file())
            proposals, global_pred = repo.load_bundle('table_00001')
            ann = repo.load_annotation('table_00001')
            self.assertEqual(len(proposals), len(ann.non_empty_cells))
            self.assertEqual((global_pred.width, global_pred.height), (ann.image_width, ann.image_height))

    def test_deterministic(self):
        """Тест: одинаковый seed - побайтно одинаковый корпус"""
        with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
            synth(a, n=4, seed=7)
            synth(b, n=4, seed=7)
            self.assertEqual(data_files(a), data_files(b))

    def test_parallel_matches_serial(self):
        """Тест: число потоков не влияет на результат"""
        settings = SynthConfig(span_prob=0.3, jitter=0.1, pyramid_noise=0.05)
        with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
            SynthCorpusUseCase(SyntheticTableGenerator(settings), SimulatedDetector(settings),
                               FileCorpusRepository(a)).execute(RunConfig(output=a, seed=2), 4, settings.to_dict())
            SynthCorpusUseCase(SyntheticTableGenerator(settings), SimulatedDetector(settings),
                               FileCorpusRepository(b)).execute(RunConfig(output=b, seed=2, jobs=4), 4,
                                                                settings.to_dict())
            self.assertEqual(data_files(a), data_files(b))


class TestPipeline(unittest.TestCase):
    """Тесты стадий и полного прогона"""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.corpus = os.path.join(self.tmp.name, 'corpus')
        synth(self.corpus, n=6, seed=11, settings=SynthConfig(span_prob=0.3, empty_prob=0.25))

    def tearDown(self):
        self.tmp.cleanup()

    def _work(self, name: str) -> str:
        return os.path.join(self.tmp.name, name)

    def test_noiseless_scores_are_perfect(self):
        """Тест: без шума F1 отношений и TEDS равны 1"""
        work = self._work('work')
        report = PipelineUseCase(FileCorpusRepository(self.corpus), FileCorpusRepository(work)).execute(
            RunConfig(output=work, input=self.corpus))
        self.assertEqual(report.exit_code, EXIT_OK)
        self.assertEqual([s.command for s in report.stages], ['targets', 'refine', 'recover', 'eval'])
        self.assertEqual(report.summary['relation']['f1'], 1.0)
        self.assertEqual(report.summary['teds_struct'], 1.0)
        refine = json.loads(Path(work, 'reports', 'refine.json').read_text())
        self.assertEqual(refine['summary']['accuracy']['refined_within_1px_rate'], 1.0)
        self.assertTrue(Path(work, 'reports', 'pipeline.json').is_file())
        self.assertTrue(Path(work, 'targets', 'table_00000', 'targets.json').is_file())

    def test_pipeline_equals_manual_stages(self):
        """Тест: прогон целиком и по стадиям дают одинаковые файлы"""
        pipeline_dir, manual_dir = self._work('pipeline'), self._work('manual')
        PipelineUseCase(FileCorpusRepository(self.corpus), FileCorpusRepository(pipeline_dir)).execute(
            RunConfig(output=pipeline_dir, input=self.corpus))

        corpus, work = FileCorpusRepository(self.corpus), FileCorpusRepository(manual_dir)
        BuildTargetsUseCase(corpus, work).execute(RunConfig(output=manual_dir, input=self.corpus))
        RefineBoxesUseCase(corpus, work).execute(RunConfig(output=manual_dir, input=self.corpus))
        RecoverStructureUseCase(work, work).execute(RunConfig(output=manual_dir, input=manual_dir))
        evaluation = EvaluateUseCase(work, corpus, work).execute(
            RunConfig(output=manual_dir, input=manual_dir, gt=self.corpus))

        self.assertEqual(data_files(pipeline_dir), data_files(manual_dir))
        pipeline_eval = json.loads(Path(pipeline_dir, 'reports', 'eval.json').read_text())
        self.assertEqual(pipeline_eval['summary'], evaluation.summary)

    def test_recover_from_raw_predictions(self):
        """Тест: восстановление прямо из пакетов предсказаний"""
        work = self._work('raw')
        corpus = FileCorpusRepository(self.corpus)
        report = RecoverStructureUseCase(corpus, FileCorpusRepository(work)).execute(
            RunConfig(output=work, input=self.corpus, source='predictions', format='html'))
        self.assertEqual(report.exit_code, EXIT_OK)
        self.assertTrue(Path(work, 'grids', 'table_00003.html').is_file())
        evaluation = EvaluateUseCase(FileCorpusRepository(work), corpus, FileCorpusRepository(work)).execute(
            RunConfig(output=work, gt=self.corpus))
        self.assertEqual(evaluation.summary['relation']['f1'], 1.0)

    def test_missing_input(self):
        """Тест: несуществующий вход - код 1"""
        work = self._work('work')
        missing = self._work('nowhere')
        report = RefineBoxesUseCase(FileCorpusRepository(missing), FileCorpusRepository(work)).execute(
            RunConfig(output=work, input=missing))
        self.assertEqual(report.exit_code, EXIT_IO_ERROR)
        self.assertTrue(Path(work, 'reports', 'refine.json').is_file())

    def test_schema_error(self):
        """Тест: повреждённая аннотация - ошибка схемы и код 1, остальные документы обработаны"""
        Path(self.corpus, 'annotations', 'table_00002.json').write_text('{"image_width": 10}')
        work = self._work('work')
        report = BuildTargetsUseCase(FileCorpusRepository(self.corpus), FileCorpusRepository(work)).execute(
            RunConfig(output=work, input=self.corpus))
        self.assertEqual(report.exit_code, EXIT_IO_ERROR)
        self.assertEqual([d.name for d in report.failures], ['table_00002'])
        self.assertEqual(report.failures[0].error_code, 'schema')
        self.assertEqual(report.summary['failed'], 1)

    def test_structure_error(self):
        """Тест: совпадающие рамки дают конфликт структуры и код 2"""
        work = self._work('conflict')
        Path(work, 'refined').mkdir(parents=True)
        box = {'id': 0, 'box': [10, 10, 40, 20]}
        Path(work, 'refined', 'doc.json').write_text(json.dumps(
            {'image_width': 60, 'image_height': 40, 'seg': None, 'boxes': [box, dict(box, id=1)]}))
        report = RecoverStructureUseCase(FileCorpusRepository(work), FileCorpusRepository(work)).execute(
            RunConfig(output=work))
        self.assertEqual(report.exit_code, EXIT_STRUCTURE_ERROR)
        self.assertEqual(report.failures[0].error_code, 'structure-conflict')

    def test_missing_grid_scores_zero(self):
        """Тест: документ без сетки входит в итог с нулём"""
        work = self._work('empty')
        os.makedirs(work)
        report = EvaluateUseCase(FileCorpusRepository(work), FileCorpusRepository(self.corpus),
                                 FileCorpusRepository(work)).execute(RunConfig(output=work, gt=self.corpus))
        self.assertEqual(report.exit_code, EXIT_STRUCTURE_ERROR)
        self.assertEqual({d.error_code for d in report.failures}, {'missing-grid'})
        self.assertEqual(report.summary['teds_struct'], 0.0)
        self.assertEqual(report.summary['relation']['correct'], 0)
        self.assertGreater(report.summary['relation']['ground_truth'], 0)


class TestRunConfig(unittest.TestCase):
    """Тесты конфигурации запуска"""

    def test_defaults(self):
        """Тест: вход и эталон по умолчанию совпадают с выходом"""
        config = RunConfig(output='w')
        self.assertEqual((config.input_path, config.gt_path), ('w', 'w'))
        self.assertEqual(config.to_dict()['merge_strategy'], 'vote')

    def test_validation(self):
        """Тест: параметры вне диапазона отвергаются"""
        for kwargs in ({'seg_threshold': 1.0}, {'merge_ratio': -0.1}, {'iou': 0.0},
                       {'iterations': 0}, {'jobs': 0}, {'format': 'xml'}, {'source': 'boxes'}):
            with self.assertRaises(ValueError):
                RunConfig(output='w', **kwargs)


if __name__ == '__main__':
    unittest.main()
