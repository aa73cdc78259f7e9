from lxml import etree, html

from domain.table_grid import TableGrid


def grid_to_element(grid: TableGrid) -> etree._Element:
    """<table> только со структурой: строки и пустые <td> с rowspan/colspan"""
    table = html.Element('table')
    for r in range(grid.n_rows):
        tr = etree.SubElement(table, 'tr')
        starting = sorted((c for c in grid.cells if c.row_start == r), key=lambda c: c.col_start)
        for cell in starting:
            td = etree.SubElement(tr, 'td')
            if cell.row_span > 1:
                td.set('rowspan', str(cell.row_span))
            if cell.col_span > 1:
                td.set('colspan', str(cell.col_span))
            td.text = ''
    return table


def grid_to_html(grid: TableGrid) -> str:
    page = html.Element('html')
    body = etree.SubElement(page, 'body')
    body.append(grid_to_element(grid))
    return html.tostring(page, pretty_print=True, doctype='<!DOCTYPE html>', encoding='unicode')
