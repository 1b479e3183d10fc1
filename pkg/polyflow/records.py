"""
Serialization of run results as versioned JSON records or CSV tables.
"""

import csv
import io
import json
from dataclasses import asdict, is_dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union
import logging

import click
import numpy as np

from . import __version__
from .coeff import Coeff

logger = logging.getLogger(__name__)

SCHEMA = 1
SIGNIFICANT_DIGITS = 12


def to_jsonable(obj: Any) -> Any:
    """Plain JSON data with sorted keys and floats rounded to 12 significant digits."""
    if hasattr(obj, 'to_dict'):
        return to_jsonable(obj.to_dict())
    if is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(asdict(obj))
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(obj[k]) for k in sorted(obj, key=str)}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(f"{float(obj):.{SIGNIFICANT_DIGITS}g}")
    if isinstance(obj, (complex, np.complexfloating)):
        return [to_jsonable(obj.real), to_jsonable(obj.imag)]
    if isinstance(obj, (Fraction, Coeff)):
        return str(obj)
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def make_record(config: Mapping[str, Any], result: Any) -> Dict[str, Any]:
    return {
        'schema': SCHEMA,
        'version': __version__,
        'config': to_jsonable(config),
        'result': to_jsonable(result),
    }


def dumps_json(record: Mapping[str, Any]) -> str:
    return json.dumps(to_jsonable(record), sort_keys=True, indent=2) + "\n"


def _flatten(prefix: str, value: Any, out: Dict[str, Any]) -> None:
    if isinstance(value, Mapping):
        for k in sorted(value, key=str):
            _flatten(f"{prefix}.{k}" if prefix else str(k), value[k], out)
    else:
        out[prefix] = json.dumps(value) if isinstance(value, list) else value


def dumps_csv(config: Mapping[str, Any], rows: Sequence[Mapping[str, Any]]) -> str:
    """
    Config as '# key=value' comment lines, then a header row and one line per
    result row. Nested values are flattened with dotted keys.
    """
    header_kv: Dict[str, Any] = {'schema': SCHEMA, 'version': __version__}
    _flatten('', to_jsonable(config), header_kv)
    flat_rows: List[Dict[str, Any]] = []
    for row in rows:
        flat: Dict[str, Any] = {}
        _flatten('', to_jsonable(row), flat)
        flat_rows.append(flat)
    columns: List[str] = []
    for flat in flat_rows:
        columns.extend(key for key in flat if key not in columns)

    buffer = io.StringIO()
    for key, value in header_kv.items():
        buffer.write(f"# {key}={value}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for flat in flat_rows:
        writer.writerow([flat.get(column, '') for column in columns])
    return buffer.getvalue()


def write_output(text: str, path: Optional[Union[str, Path]] = None) -> None:
    """Write to ``path`` or, when omitted, to stdout."""
    if path is None:
        click.echo(text, nl=False)
        return
    Path(path).write_text(text, encoding='utf-8')
    logger.info(f"Wrote results to {path}")
