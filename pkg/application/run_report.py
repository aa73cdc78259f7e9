from typing import Any, Dict, List, Optional

# Коды ошибок ввода-вывода и формата; остальные - ошибки структуры
IO_ERROR_CODES = frozenset({'schema', 'io', 'format'})

EXIT_OK = 0
EXIT_IO_ERROR = 1
EXIT_STRUCTURE_ERROR = 2


class DocumentResult:
    """Результат обработки одного документа"""

    def __init__(self, name: str, success: bool, details: Optional[Dict[str, Any]] = None,
                 error: str = None, error_code: str = None):
        self.name = name
        self.success = success
        self.details = details or {}
        self.error = error
        self.error_code = error_code

    def __bool__(self) -> bool:
        return self.success

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'success': self.success,
            'details': self.details,
            'error': self.error,
            'error_code': self.error_code
        }


class RunReport:
    """Машиночитаемый отчёт команды с эффективной конфигурацией"""

    def __init__(self, command: str, config: Dict[str, Any],
                 documents: List[DocumentResult] = None,
                 summary: Optional[Dict[str, Any]] = None,
                 error: str = None, error_code: str = None,
                 stages: Optional[List['RunReport']] = None):
        self.command = command
        self.config = config
        self.documents = documents or []
        self.summary = summary or {}
        self.error = error
        self.error_code = error_code
        self.stages = stages or []

    @property
    def failures(self) -> List[DocumentResult]:
        return [d for d in self.documents if not d.success]

    @property
    def exit_code(self) -> int:
        codes = [d.error_code for d in self.failures]
        if self.error_code is not None:
            codes.append(self.error_code)
        stage_codes = [s.exit_code for s in self.stages]
        if any(c in IO_ERROR_CODES for c in codes) or EXIT_IO_ERROR in stage_codes:
            return EXIT_IO_ERROR
        if codes or EXIT_STRUCTURE_ERROR in stage_codes:
            return EXIT_STRUCTURE_ERROR
        return EXIT_OK

    def __bool__(self) -> bool:
        return self.exit_code == EXIT_OK

    def to_dict(self) -> Dict[str, Any]:
        data = {
            'command': self.command,
            'config': self.config,
            'documents': [d.to_dict() for d in self.documents],
            'summary': self.summary,
            'error': self.error,
            'error_code': self.error_code,
            'exit_code': self.exit_code
        }
        if self.stages:
            data['stages'] = [s.command for s in self.stages]
        return data
