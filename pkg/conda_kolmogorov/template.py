"""Jinja2 rendering for output paths and SVG figures."""

from __future__ import annotations

from functools import lru_cache

from .context import build_template_context


@lru_cache(maxsize=1)
def _get_jinja_env():
    """Create and cache a Jinja2 Environment for inline strings (singleton)."""
    from jinja2 import Environment, StrictUndefined

    return Environment(undefined=StrictUndefined)


@lru_cache(maxsize=1)
def get_figure_env():
    """Environment loading the packaged ``templates/`` directory, with autoescaping."""
    from jinja2 import Environment, PackageLoader, StrictUndefined, select_autoescape

    return Environment(
        loader=PackageLoader("conda_kolmogorov", "templates"),
        autoescape=select_autoescape(["svg", "xml", "html"]),
        undefined=StrictUndefined,
        trim_blocks=True,
        lstrip_blocks=True,
    )


def render(template_str: str, values: dict[str, object] | None = None) -> str:
    """Render a Jinja2 template string with the run context.

    If *template_str* contains no template markers it is returned as-is
    (fast path that avoids Jinja2 import entirely).
    """
    if "{{" not in template_str and "{%" not in template_str:
        return template_str

    env = _get_jinja_env()
    tpl = env.from_string(template_str)
    return tpl.render(build_template_context(values))
