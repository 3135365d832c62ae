from rich.console import Console

console = Console(stderr=True)

from .manager import UIManager  # noqa: E402
from .theme import PanelTheme  # noqa: E402

__all__ = ["PanelTheme", "UIManager", "console"]
