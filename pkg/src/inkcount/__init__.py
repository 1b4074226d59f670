"""Counting distinct inks in hyperspectral document cubes."""
from .cube import BandImage, HyperCube, SpectralSignature
from .envi import EnviHeader, parse_header, read_cube, write_cube
from .pipeline import PipelineConfig, run

__version__ = "0.1.0"

__all__ = [
    "BandImage",
    "EnviHeader",
    "HyperCube",
    "PipelineConfig",
    "SpectralSignature",
    "parse_header",
    "read_cube",
    "run",
    "write_cube",
]
