"""Template context variables for Jinja2 rendering.

Provides the ``kolmogorov.*`` namespace available in output paths and
figure templates, next to the run values (``scenario``, ``seed``, ...).
"""

from __future__ import annotations

import os
import platform as _platform


class RunContext:
    """Lazy-evaluated namespace exposed as ``kolmogorov.*`` in templates.

    Attribute access is deferred so we only import conda internals when
    a template actually references a variable.
    """

    @property
    def platform(self) -> str:
        """The conda platform/subdir string, e.g. ``linux-64`` or ``osx-arm64``."""
        from conda.base.context import context

        return context.subdir

    @property
    def version(self) -> str:
        """The installed conda-kolmogorov version string."""
        from . import __version__

        return __version__

    @property
    def conda_version(self) -> str:
        from conda import __version__

        return __version__

    @property
    def python_version(self) -> str:
        return _platform.python_version()

    @property
    def numpy_version(self) -> str:
        import numpy

        return numpy.__version__

    @property
    def scipy_version(self) -> str:
        import scipy

        return scipy.__version__

    @property
    def init_cwd(self) -> str:
        """The working directory at the time of rendering."""
        return os.getcwd()

    def versions(self) -> dict[str, str]:
        """Everything a run manifest records about the software stack."""
        return {
            "conda-kolmogorov": self.version,
            "conda": self.conda_version,
            "python": self.python_version,
            "numpy": self.numpy_version,
            "scipy": self.scipy_version,
        }


def build_template_context(
    values: dict[str, object] | None = None,
) -> dict[str, object]:
    """Build the full Jinja2 template context dict.

    The returned dict contains ``kolmogorov`` (a :class:`RunContext`) and
    any run values supplied by the caller.
    """
    result: dict[str, object] = {"kolmogorov": RunContext()}
    if values:
        result.update(values)
    return result
