from .executor import CommandExecutor, parse_range

__all__ = ["CommandExecutor", "parse_range"]
