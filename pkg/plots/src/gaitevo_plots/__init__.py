"""Figure rendering for gaitevo experiment CSV logs."""

from .figures import (
    FIGURE_KINDS,
    SchemaMismatch,
    build_figure,
    load_final,
    load_summary,
    render,
)

__version__ = "0.1.0"
