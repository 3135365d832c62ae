from .writer import OutputWriter, canonical_json, config_hash, format_cell, to_jsonable

__all__ = ["OutputWriter", "canonical_json", "config_hash", "format_cell", "to_jsonable"]
