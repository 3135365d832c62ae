#!/usr/bin/env python3
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Optional

from rich.panel import Panel
from rich.text import Text

from ..config import Config

# Cell colours for engine modes and check outcomes.
STATUS_STYLES = {
    "engine": "#e78284",
    "fridge": "#8caaee",
    "dud": "dim",
    "pass": "#a6d189",
    "fail": "bold #e78284",
}


@dataclass(frozen=True)
class PanelStyle:
    border_style: str
    padding: Optional[tuple[int, int]] = (0, 1)
    title_style: Optional[str] = None


class PanelTheme:

    @staticmethod
    def get_style(name: str) -> PanelStyle:
        fallback = Config.PANEL_STYLES.get("default", {})
        theme = Config.PANEL_STYLES.get(name, fallback)
        padding = theme.get("padding", fallback.get("padding"))
        return PanelStyle(
            border_style=theme.get("border_style", fallback.get("border_style", "#888888")),
            padding=tuple(padding) if padding is not None else None,
            title_style=theme.get("title_style"),
        )

    @staticmethod
    def status(label: str) -> Text:
        return Text(label, style=STATUS_STYLES.get(label.lower(), ""))

    @staticmethod
    def build(renderable: Any, title: str = "", style: str = "default", *, fit: bool = False, **overrides: Any) -> Panel:
        panel_style = PanelTheme.get_style(style)
        kwargs: Dict[str, Any] = {"border_style": panel_style.border_style, "title_align": "left"}
        if panel_style.padding is not None:
            kwargs["padding"] = panel_style.padding
        kwargs.update(overrides)

        heading: Any = title
        if title and panel_style.title_style:
            heading = Text(title, style=panel_style.title_style)
        if fit:
            return Panel.fit(renderable, title=heading, **kwargs)
        return Panel(renderable, title=heading, **kwargs)
