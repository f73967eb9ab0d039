"""Bridge from pretrained transformer checkpoints to plsim lrep archives.

This package talks to plsim only through its file formats: it reads the
samples export written by `plsim embed --export-samples` and writes lrep v1
archives that `plsim sim` and friends accept.  No plsim code is imported.
"""

from .extract import ExtractionError, ExtractionJob, extract

__all__ = ["ExtractionError", "ExtractionJob", "extract"]

__version__ = "0.1.0"
