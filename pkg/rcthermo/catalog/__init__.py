from .base import BaseFamily, CatalogEntry
from .registry import FAMILY_CLASSES, TABLE_FAMILIES, create_family, list_families, lookup

__all__ = [
    "BaseFamily",
    "CatalogEntry",
    "FAMILY_CLASSES",
    "TABLE_FAMILIES",
    "create_family",
    "list_families",
    "lookup",
]
