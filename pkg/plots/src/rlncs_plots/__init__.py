from .figures import FigureSpec, MissingColumnError, render, spec_for_kind

__version__ = "0.1.0"

__all__ = ["FigureSpec", "MissingColumnError", "render", "spec_for_kind",
           "__version__"]
