from .file_corpus_repository import FileCorpusRepository
from .html_export import grid_to_html
from .scalar_map_codec import decode_scalar_map, encode_scalar_map, read_scalar_map, write_scalar_map
from .simulated_detector import SimulatedDetector
from .synthetic_tables import SynthConfig, SyntheticTableGenerator

__all__ = [
    'FileCorpusRepository',
    'SimulatedDetector',
    'SynthConfig',
    'SyntheticTableGenerator',
    'decode_scalar_map',
    'encode_scalar_map',
    'grid_to_html',
    'read_scalar_map',
    'write_scalar_map'
]
