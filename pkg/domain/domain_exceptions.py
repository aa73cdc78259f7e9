class DomainException(Exception):
    """Базовое исключение доменного слоя"""
    code = "domain"


class InvalidRectError(DomainException):
    """Некорректный прямоугольник"""
    code = "invalid-rect"


class InvalidAnnotationError(DomainException):
    """Аннотация таблицы нарушает инварианты сетки"""
    code = "invalid-annotation"


class UnderdeterminedExtentError(DomainException):
    """Строка или столбец без одиночной непустой ячейки"""
    code = "underdetermined-extent"

    def __init__(self, axis: str, index: int):
        super().__init__(f"{axis} {index} has no single-span non-empty cell to define its extent")
        self.axis = axis
        self.index = index


class DegeneratePyramidError(DomainException):
    """Пик пирамиды совпадает с краем предложения"""
    code = "degenerate-pyramid"


class VanishedCellError(DomainException):
    """Ячейка исчезла после сжатия"""
    code = "vanished-cell"


class NoGlobalMatchError(DomainException):
    """Нет связной области сегментации под рамкой"""
    code = "no-global-match"


class DegenerateMidpointError(DomainException):
    """Середина текста лежит на краю рамки"""
    code = "degenerate-midpoint"


class DegenerateFitError(DomainException):
    """Вырожденная задача наименьших квадратов"""
    code = "degenerate-fit"


class NonContiguousSpanError(DomainException):
    """Индексы строк/столбцов узла не образуют отрезок"""
    code = "non-contiguous-span"

    def __init__(self, node_id: int, axis: str, indices):
        super().__init__(f"node {node_id} has non-contiguous {axis} indices {sorted(indices)}")
        self.node_id = node_id
        self.axis = axis


class StructureConflictError(DomainException):
    """Восстановленная структура противоречива"""
    code = "structure-conflict"


class InvalidGridError(DomainException):
    """Сетка таблицы нарушает инварианты"""
    code = "invalid-grid"

    def __init__(self, violations):
        super().__init__("; ".join(str(v) for v in violations))
        self.violations = list(violations)


class SchemaError(DomainException):
    """Документ не соответствует JSON-схеме"""
    code = "schema"

    def __init__(self, path: str, field: str, message: str):
        super().__init__(f"{path}: field '{field}': {message}")
        self.path = path
        self.field = field


class GenerationError(DomainException):
    """Генератор не смог построить таблицу"""
    code = "generation"
