import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from domain.domain_exceptions import SchemaError
from domain.json_fields import int_field, optional_rect_field, rect_field
from domain.mask_targets import GlobalTarget, LocalTarget
from domain.predictions import GlobalPrediction, ProposalPrediction
from domain.rect import Rect
from domain.refinement import RefinedBox
from domain.scalar_map import ScalarMap
from domain.structure_recovery import CellBox
from domain.table_annotation import TableAnnotation
from domain.table_grid import TableGrid
from application.interfaces import ANNOTATIONS, GRIDS, PREDICTIONS, REFINED, TARGETS, BoxList, CorpusRepository
from .atomic_files import read_json, write_bytes_atomic, write_json_atomic
from .html_export import grid_to_html
from .scalar_map_codec import encode_pgm, read_scalar_map, write_scalar_map

logger = logging.getLogger(__name__)

REPORTS = 'reports'
BUNDLE_FILE = 'bundle.json'
MAP_SUFFIX = '.tgmap'


def _check_keys(data: Any, required: set, optional: set, path: str, prefix: str) -> None:
    """Как require_keys, но часть полей может отсутствовать"""
    if not isinstance(data, dict):
        raise SchemaError(path, prefix or "<root>", "expected an object")
    unknown = sorted(set(data) - required - optional)
    if unknown:
        name = unknown[0]
        raise SchemaError(path, f"{prefix}.{name}" if prefix else name, "unknown field")
    missing = sorted(required - set(data))
    if missing:
        name = missing[0]
        raise SchemaError(path, f"{prefix}.{name}" if prefix else name, "missing field")


def _map_ref(value: Any, path: str, name: str) -> str:
    if not isinstance(value, str) or not value:
        raise SchemaError(path, name, "expected a relative path to a TGMAP file")
    return value


class FileCorpusRepository(CorpusRepository):
    """Корпус на диске: аннотации, предсказания, цели, рамки, сетки, отчёты"""

    def __init__(self, root: Union[str, Path]):
        self.root = Path(root)

    def exists(self) -> bool:
        return self.root.is_dir()

    def _dir(self, kind: str) -> Path:
        return self.root / kind

    def _document_path(self, kind: str, name: str) -> Path:
        if kind == PREDICTIONS:
            return self._dir(PREDICTIONS) / name / BUNDLE_FILE
        return self._dir(kind) / f"{name}.json"

    def list_documents(self, kind: str) -> List[str]:
        directory = self._dir(kind)
        if not directory.is_dir():
            return []
        if kind == PREDICTIONS:
            return sorted(p.parent.name for p in directory.glob(f"*/{BUNDLE_FILE}"))
        return sorted(p.stem for p in directory.glob("*.json"))

    def has_document(self, kind: str, name: str) -> bool:
        return self._document_path(kind, name).is_file()

    def load_annotation(self, name: str) -> TableAnnotation:
        path = self._document_path(ANNOTATIONS, name)
        return TableAnnotation.from_dict(read_json(path), str(path))

    def save_annotation(self, name: str, ann: TableAnnotation) -> None:
        write_json_atomic(self._document_path(ANNOTATIONS, name), ann.to_dict())

    def load_bundle(self, name: str) -> Tuple[List[ProposalPrediction], GlobalPrediction]:
        path = self._document_path(PREDICTIONS, name)
        data = read_json(path)
        _check_keys(data, {'proposals', 'global'}, set(), str(path), "")
        base = path.parent

        raw_global = data['global']
        _check_keys(raw_global, {'seg', 'pyr_h', 'pyr_v'}, set(), str(path), "global")
        maps = [read_scalar_map(base / _map_ref(raw_global[k], str(path), f"global.{k}"))
                for k in ('seg', 'pyr_h', 'pyr_v')]
        try:
            global_pred = GlobalPrediction(*maps)
        except ValueError as e:
            raise SchemaError(str(path), "global", str(e)) from e

        if not isinstance(data['proposals'], list):
            raise SchemaError(str(path), "proposals", "expected a list")
        proposals = []
        for i, raw in enumerate(data['proposals']):
            prefix = f"proposals[{i}]"
            _check_keys(raw, {'box', 'text_rect', 'pyr_h', 'pyr_v'}, {'id'}, str(path), prefix)
            pyr_h = read_scalar_map(base / _map_ref(raw['pyr_h'], str(path), f"{prefix}.pyr_h"))
            pyr_v = read_scalar_map(base / _map_ref(raw['pyr_v'], str(path), f"{prefix}.pyr_v"))
            try:
                proposals.append(ProposalPrediction(
                    id=int_field(raw.get('id', i), str(path), f"{prefix}.id"),
                    box=rect_field(raw['box'], str(path), f"{prefix}.box"),
                    text_rect=rect_field(raw['text_rect'], str(path), f"{prefix}.text_rect"),
                    pyr_h_local=pyr_h,
                    pyr_v_local=pyr_v
                ))
            except ValueError as e:
                raise SchemaError(str(path), prefix, str(e)) from e
        return proposals, global_pred

    def save_bundle(self, name: str, proposals: Sequence[ProposalPrediction],
                    global_pred: GlobalPrediction) -> None:
        base = self._dir(PREDICTIONS) / name
        entries = []
        for p in proposals:
            h_name, v_name = f"proposal_{p.id}_pyr_h{MAP_SUFFIX}", f"proposal_{p.id}_pyr_v{MAP_SUFFIX}"
            write_scalar_map(base / h_name, p.pyr_h_local)
            write_scalar_map(base / v_name, p.pyr_v_local)
            entries.append({'id': p.id, 'box': p.box.to_list(), 'text_rect': p.text_rect.to_list(),
                            'pyr_h': h_name, 'pyr_v': v_name})
        refs = {}
        for key, scalar_map in (('seg', global_pred.seg), ('pyr_h', global_pred.pyr_h_global),
                                ('pyr_v', global_pred.pyr_v_global)):
            refs[key] = f"global_{key}{MAP_SUFFIX}"
            write_scalar_map(base / refs[key], scalar_map)
        # Манифест пакета пишется последним: он ссылается на уже записанные карты
        write_json_atomic(base / BUNDLE_FILE, {'proposals': entries, 'global': refs})
        logger.debug("%s: bundle with %d proposals written to %s", name, len(entries), base)

    def seg_path(self, name: str) -> str:
        return str((self._dir(PREDICTIONS) / name / f"global_seg{MAP_SUFFIX}").resolve())

    def save_targets(self, name: str, local: Sequence[Tuple[int, LocalTarget]],
                     global_target: GlobalTarget, pgm: bool = False) -> None:
        base = self._dir(TARGETS) / name
        index: Dict[str, Any] = {'global': {}, 'local': []}

        def put(stem: str, scalar_map: ScalarMap) -> str:
            write_scalar_map(base / f"{stem}{MAP_SUFFIX}", scalar_map)
            if pgm:
                write_bytes_atomic(base / f"{stem}.pgm", encode_pgm(scalar_map))
            return f"{stem}{MAP_SUFFIX}"

        for key, scalar_map in (('seg', global_target.seg), ('pyr_h', global_target.pyr_h),
                                ('pyr_v', global_target.pyr_v)):
            index['global'][key] = put(f"global_{key}", scalar_map)
        for cell_id, target in local:
            index['local'].append({
                'id': cell_id,
                'proposal': target.proposal.to_list(),
                'text_rect': target.text_rect.to_list(),
                'mask': put(f"local_{cell_id}_mask", target.mask),
                'pyr_h': put(f"local_{cell_id}_pyr_h", target.pyr_h),
                'pyr_v': put(f"local_{cell_id}_pyr_v", target.pyr_v)
            })
        write_json_atomic(base / 'targets.json', index)

    def load_box_list(self, name: str) -> BoxList:
        path = self._document_path(REFINED, name)
        data = read_json(path)
        _check_keys(data, {'image_width', 'image_height', 'boxes'}, {'seg'}, str(path), "")
        width = int_field(data['image_width'], str(path), "image_width")
        height = int_field(data['image_height'], str(path), "image_height")
        if not isinstance(data['boxes'], list):
            raise SchemaError(str(path), "boxes", "expected a list")
        boxes = []
        for i, raw in enumerate(data['boxes']):
            prefix = f"boxes[{i}]"
            _check_keys(raw, {'id', 'box'},
                        {'text_rect', 'input_box', 'side_status', 'midpoint_clamped', 'local_only'},
                        str(path), prefix)
            boxes.append(CellBox(int_field(raw['id'], str(path), f"{prefix}.id"),
                                 rect_field(raw['box'], str(path), f"{prefix}.box"),
                                 optional_rect_field(raw.get('text_rect'), str(path), f"{prefix}.text_rect")))
        seg = None
        if data.get('seg') is not None:
            seg = read_scalar_map(path.parent / _map_ref(data['seg'], str(path), "seg"))
            if (seg.width, seg.height) != (width, height):
                raise SchemaError(str(path), "seg", f"map is {seg.width}x{seg.height}, image is {width}x{height}")
        return BoxList(width, height, tuple(boxes), seg)

    def save_refined(self, name: str, image_size: Tuple[int, int], refined: Sequence[RefinedBox],
                     text_rects: Dict[int, Rect], seg_path: Optional[str]) -> None:
        path = self._document_path(REFINED, name)
        boxes = []
        for r in refined:
            entry = r.to_dict()
            entry['box'] = entry.pop('refined')
            entry['text_rect'] = text_rects[r.id].to_list() if r.id in text_rects else None
            boxes.append(entry)
        seg_ref = None
        if seg_path is not None:
            seg_ref = os.path.relpath(seg_path, path.parent.resolve()).replace(os.sep, '/')
        write_json_atomic(path, {'image_width': image_size[0], 'image_height': image_size[1],
                                 'seg': seg_ref, 'boxes': boxes})

    def load_grid(self, name: str) -> TableGrid:
        path = self._document_path(GRIDS, name)
        return TableGrid.from_dict(read_json(path), str(path))

    def save_grid(self, name: str, grid: TableGrid, html: bool = False) -> None:
        write_json_atomic(self._document_path(GRIDS, name), grid.to_dict())
        if html:
            write_bytes_atomic(self._dir(GRIDS) / f"{name}.html", grid_to_html(grid).encode('utf-8'))

    def save_manifest(self, manifest: Dict[str, Any]) -> None:
        write_json_atomic(self.root / 'manifest.json', manifest)

    def save_report(self, command: str, report: Dict[str, Any]) -> None:
        write_json_atomic(self._dir(REPORTS) / f"{command}.json", report)
