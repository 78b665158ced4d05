"""Self-describing run records: every CLI invocation emits one JSON object
that can be validated and re-run from its own fields."""

from __future__ import annotations

import json

VERSION = "0.1.0"

RUN_RECORD_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "lapdiag run record",
    "type": "object",
    "required": ["version", "command", "parameters", "result", "timings"],
    "properties": {
        "version": {"type": "string"},
        "command": {"type": "string"},
        "graph": {"type": ["string", "null"]},
        "parameters": {"type": "object"},
        "result": {"type": "object"},
        "timings": {"type": "object"},
        "error": {"type": "string"},
    },
}

ERROR_REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "lapdiag comparison report",
    "type": "object",
    "required": ["max_abs", "l1_rel", "l2_rel", "e_rel", "inverted_pairs_pct",
                 "topk_jaccard"],
    "properties": {
        "max_abs": {"type": "number"},
        "l1_rel": {"type": "number"},
        "l2_rel": {"type": "number"},
        "e_rel": {"type": "number"},
        "inverted_pairs_pct": {"type": "number"},
        "topk_jaccard": {"type": "object"},
    },
}

_TYPES = {"string": str, "object": dict, "null": type(None), "number": (int, float)}


def validate_error_report(obj):
    if not isinstance(obj, dict):
        raise ValueError("error report must be a JSON object")
    for key in ERROR_REPORT_SCHEMA["required"]:
        if key not in obj:
            raise ValueError(f"error report missing field {key!r}")
        kind = ERROR_REPORT_SCHEMA["properties"][key]["type"]
        expected = _TYPES[kind]
        if not isinstance(obj[key], expected) or isinstance(obj[key], bool):
            raise ValueError(f"error report field {key!r} has type "
                             f"{type(obj[key]).__name__}, expected {kind}")


def make_run_record(command, graph=None, parameters=None, result=None, timings=None):
    return {
        "version": VERSION,
        "command": command,
        "graph": str(graph) if graph is not None else None,
        "parameters": dict(parameters or {}),
        "result": dict(result or {}),
        "timings": dict(timings or {}),
    }


def validate_run_record(obj):
    """Check a record against RUN_RECORD_SCHEMA; raises ValueError."""
    if not isinstance(obj, dict):
        raise ValueError("run record must be a JSON object")
    for key in RUN_RECORD_SCHEMA["required"]:
        if key not in obj:
            raise ValueError(f"run record missing field {key!r}")
    for key, spec in RUN_RECORD_SCHEMA["properties"].items():
        if key not in obj:
            continue
        kinds = spec["type"]
        if isinstance(kinds, str):
            kinds = [kinds]
        if not isinstance(obj[key], tuple(_TYPES[k] for k in kinds)):
            raise ValueError(f"run record field {key!r} has type "
                             f"{type(obj[key]).__name__}, expected {kinds}")


def dump_record(record, fh):
    json.dump(record, fh, indent=2)
    fh.write("\n")
