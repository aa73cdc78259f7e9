import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Sequence

import numpy as np

from domain.domain_exceptions import DomainException
from .run_report import DocumentResult

logger = logging.getLogger(__name__)

DocumentHandler = Callable[[str], Dict[str, Any]]


def derive_seed(seed: int, *keys: int) -> int:
    """Независимый seed документа, зависящий только от (seed, keys)"""
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1)[0])


def process_document(name: str, handler: DocumentHandler) -> DocumentResult:
    """Обработать документ, превратив любое исключение в неуспешный результат"""
    try:
        return DocumentResult(name, True, handler(name))
    except DomainException as e:
        logger.error("%s: %s", name, e)
        return DocumentResult(name, False, error=str(e), error_code=e.code)
    except OSError as e:
        logger.error("%s: I/O failure: %s", name, e)
        return DocumentResult(name, False, error=f"I/O error: {e}", error_code='io')
    except ValueError as e:
        logger.error("%s: invalid input: %s", name, e)
        return DocumentResult(name, False, error=f"invalid input: {e}", error_code='format')
    except Exception as e:
        logger.exception("%s: unexpected failure", name)
        return DocumentResult(name, False, error=f"processing error: {e}", error_code='internal')


def run_documents(names: Sequence[str], handler: DocumentHandler, jobs: int = 1) -> List[DocumentResult]:
    """Обработать документы пулом потоков; порядок результатов совпадает с names"""
    if jobs <= 1 or len(names) <= 1:
        return [process_document(name, handler) for name in names]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda name: process_document(name, handler), names))
