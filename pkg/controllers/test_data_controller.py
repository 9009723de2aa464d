# Unit Testing the data controller
# Under normal circumstances, all tests should pass

# Import requirements
import os
import tempfile
import unittest
from unittest.mock import patch

import numpy as np
import pandas as pd

from controllers.data_controller import load_catalog, persist_catalog, write_table_csv
from models.equilibria import EquilibriumRecord, MassVector
from models.errors import CatalogIOError, CatalogParseError
from models.geometry import PolarConfiguration, SpaceSpec, solve_z_block


def triangle_record():
    space = SpaceSpec(1, 2)
    cfg = PolarConfiguration(0.5, [0.0, 2 * np.pi / 3, 4 * np.pi / 3], solve_z_block(0.5, space))
    return EquilibriumRecord(space, MassVector([1.0, 1.0, 1.0]), cfg, 2.5118864315095806,
                             1.1102230246251565e-16, True, 5)


class TestCatalogPersistence(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.tmp.name, 'catalog.jsonl')

    def tearDown(self):
        self.tmp.cleanup()

    def test_empty_catalog(self):
        self.assertEqual(persist_catalog([], self.path), 0)
        with open(self.path, encoding='utf-8') as handle:
            self.assertEqual(handle.read(), '')
        self.assertEqual(load_catalog(self.path), [])

    def test_single_record_round_trip(self):
        record = triangle_record()
        self.assertEqual(persist_catalog([record], self.path), 1)
        with open(self.path, encoding='utf-8') as handle:
            self.assertEqual(len(handle.read().splitlines()), 1)
        self.assertEqual(load_catalog(self.path), [record])

    def test_blank_lines_skipped(self):
        persist_catalog([triangle_record(), triangle_record()], self.path)
        with open(self.path, encoding='utf-8') as handle:
            lines = handle.read().splitlines()
        with open(self.path, 'w', encoding='utf-8') as handle:
            handle.write(lines[0] + '\n\n' + lines[1] + '\n')
        self.assertEqual(len(load_catalog(self.path)), 2)

    def test_corrupted_line(self):
        persist_catalog([triangle_record(), triangle_record()], self.path)
        with open(self.path, encoding='utf-8') as handle:
            lines = handle.read().splitlines()
        with open(self.path, 'w', encoding='utf-8') as handle:
            handle.write(lines[0] + '\n' + lines[1][:-5] + '\n')
        with self.assertRaises(CatalogParseError) as ctx:
            load_catalog(self.path)
        self.assertEqual(ctx.exception.line_number, 2)
        self.assertEqual(ctx.exception.exit_code, 5)

    def test_record_off_the_manifold(self):
        persist_catalog([triangle_record()], self.path)
        with open(self.path, encoding='utf-8') as handle:
            text = handle.read().replace('"r": 0.5', '"r": 0.6')
        with open(self.path, 'w', encoding='utf-8') as handle:
            handle.write(text)
        with self.assertRaises(CatalogParseError):
            load_catalog(self.path)

    def test_missing_file(self):
        with self.assertRaises(CatalogIOError):
            load_catalog(os.path.join(self.tmp.name, 'missing.jsonl'))

    @patch('builtins.open', side_effect=OSError('disk full'))
    def test_write_failure(self, mock_open):
        with self.assertRaises(CatalogIOError):
            persist_catalog([triangle_record()], self.path)


class TestTableOutput(unittest.TestCase):

    def test_headers_and_precision(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'table.csv')
            write_table_csv(pd.DataFrame({'r': [0.1, 1 / 3], 'a_squared': [2.0, np.pi]}), path)
            with open(path, encoding='utf-8') as handle:
                lines = handle.read().splitlines()
        self.assertEqual(lines[0], 'r,a_squared')
        self.assertEqual(lines[2], '0.33333333333333331,3.1415926535897931')
        self.assertEqual(float(lines[2].split(',')[0]), 1 / 3)

    @patch('pandas.DataFrame.to_csv', side_effect=OSError('read-only'))
    def test_write_failure(self, mock_to_csv):
        with self.assertRaises(CatalogIOError):
            write_table_csv(pd.DataFrame({'r': [1.0]}), 'unused.csv')


if __name__ == '__main__':
    unittest.main()
