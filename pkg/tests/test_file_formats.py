import os
import struct
import tempfile
import unittest

import numpy as np
from lxml import html

from domain import GridCell, Rect, SchemaError, ScalarMap, TableGrid
from infrastructure.atomic_files import dump_json, read_json, write_json_atomic
from infrastructure.html_export import grid_to_html
from infrastructure.scalar_map_codec import (
    MAGIC, decode_scalar_map, encode_pgm, encode_scalar_map, read_scalar_map, write_scalar_map
)


class TestScalarMapCodec(unittest.TestCase):
    """Тесты двоичного формата карт"""

    def setUp(self):
        self.scalar_map = ScalarMap(np.array([[0.0, 0.25, 0.5], [0.75, 1.0, 0.125]]))

    def test_layout(self):
        """Тест: magic, размеры и значения построчно"""
        data = encode_scalar_map(self.scalar_map)
        self.assertEqual(data[:6], b"TGMAP\0")
        self.assertEqual(struct.unpack_from('<II', data, 6), (3, 2))
        self.assertEqual(len(data), 6 + 8 + 6 * 4)
        self.assertEqual(struct.unpack_from('<f', data, 14 + 4 * 3)[0], 0.75)
        self.assertEqual(decode_scalar_map(data), self.scalar_map)

    def test_bad_magic(self):
        """Тест: чужой файл - ошибка схемы"""
        with self.assertRaises(SchemaError) as ctx:
            decode_scalar_map(b"PNG\0\0\0" + bytes(8), "x.tgmap")
        self.assertEqual((ctx.exception.path, ctx.exception.field), ("x.tgmap", "magic"))

    def test_truncated(self):
        """Тест: обрезанные заголовок и данные"""
        data = encode_scalar_map(self.scalar_map)
        with self.assertRaises(SchemaError) as ctx:
            decode_scalar_map(MAGIC + b"\x01")
        self.assertEqual(ctx.exception.field, "header")
        with self.assertRaises(SchemaError) as ctx:
            decode_scalar_map(data[:-1])
        self.assertEqual(ctx.exception.field, "values")

    def test_file_round_trip(self):
        """Тест записи и чтения файла"""
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'maps', 'seg.tgmap')
            write_scalar_map(path, self.scalar_map)
            self.assertEqual(read_scalar_map(path), self.scalar_map)
            self.assertEqual(os.listdir(os.path.dirname(path)), ['seg.tgmap'])

    def test_pgm(self):
        """Тест заголовка и квантования PGM"""
        data = encode_pgm(self.scalar_map)
        header = b"P5\n3 2\n255\n"
        self.assertTrue(data.startswith(header))
        self.assertEqual(list(data[len(header):]), [0, 64, 128, 191, 255, 32])


class TestJsonFiles(unittest.TestCase):
    """Тесты записи JSON"""

    def test_stable_output(self):
        """Тест: ключи отсортированы, отступ 2, перевод строки в конце"""
        self.assertEqual(dump_json({'b': 1, 'a': [1, 2]}), b'{\n  "a": [\n    1,\n    2\n  ],\n  "b": 1\n}\n')

    def test_not_json(self):
        """Тест: повреждённый документ - ошибка схемы"""
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'broken.json')
            with open(path, 'w') as f:
                f.write('{"cells": [')
            with self.assertRaises(SchemaError) as ctx:
                read_json(path)
            self.assertEqual(ctx.exception.field, "<root>")

    def test_round_trip(self):
        """Тест: записанный документ читается обратно"""
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'a', 'doc.json')
            write_json_atomic(path, {'x': 1})
            self.assertEqual(read_json(path), {'x': 1})


class TestHtmlExport(unittest.TestCase):
    """Тесты экспорта сетки в HTML"""

    def test_spans(self):
        """Тест: ячейка на два столбца и две строки"""
        grid = TableGrid.with_adjacency([
            GridCell(0, Rect(0, 0, 40, 10), 0, 0, 0, 1),
            GridCell(1, Rect(0, 20, 20, 50), 1, 2, 0, 0),
            GridCell(2, Rect(20, 20, 40, 30), 1, 1, 1, 1),
            GridCell(3, Rect(20, 40, 40, 50), 2, 2, 1, 1, is_empty=True),
        ])
        text = grid_to_html(grid)
        self.assertTrue(text.startswith('<!DOCTYPE html>'))
        rows = html.fromstring(text).findall('.//tr')
        self.assertEqual([len(tr.findall('td')) for tr in rows], [1, 2, 1])
        self.assertEqual(rows[0][0].get('colspan'), '2')
        self.assertEqual(rows[1][0].get('rowspan'), '2')
        self.assertIsNone(rows[1][1].get('rowspan'))


if __name__ == '__main__':
    unittest.main()
