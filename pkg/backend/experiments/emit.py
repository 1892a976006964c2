"""
CSV and JSON output of curves and bound curves.

CSV floats are printed with 17 significant digits so they read back to the
same double. JSON files hold an array of objects with the same keys as the
CSV columns; Python's ``json`` already writes floats round-trippably.
"""
import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, TextIO, Union

from bandits.exceptions import UsageError
from experiments.curves import BOUND_COLUMNS, CURVE_COLUMNS, AggregatedCurve, curves_from_records


logger = logging.getLogger(__name__)

FORMATS = ('csv', 'json')


def _format_cell(value: Any) -> str:
    if isinstance(value, float):
        return format(value, '.17g')
    return str(value)


def check_format(fmt: str) -> str:
    """
    Validate an output format name.

    Raises:
        UsageError: If the format is not csv or json
    """
    if fmt not in FORMATS:
        raise UsageError(f'format must be one of {", ".join(FORMATS)}, got {fmt!r}.')
    return fmt


def write_table(rows: Iterable[Dict[str, Any]], columns: Sequence[str], stream: TextIO, fmt: str) -> None:
    """
    Write rows to a text stream.

    Args:
        rows: Mappings with ``columns`` keys
        columns: Column order
        stream: Destination
        fmt: ``csv`` or ``json``
    """
    check_format(fmt)
    if fmt == 'csv':
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format_cell(row[c]) for c in columns])
    else:
        records = [{c: row[c] for c in columns} for row in rows]
        json.dump(records, stream, indent=2)
        stream.write('\n')


def render_table(rows: Iterable[Dict[str, Any]], columns: Sequence[str], fmt: str) -> str:
    """``write_table`` into a string."""
    buffer = io.StringIO()
    write_table(rows, columns, buffer, fmt)
    return buffer.getvalue()


def curve_rows(curves: Sequence[AggregatedCurve]) -> List[Dict[str, Any]]:
    """All curve records, policies in the given order."""
    return [row for curve in curves for row in curve.records()]


def bounds_path_for(path: Union[str, Path]) -> Path:
    """Sibling path for bound curves: ``run.csv`` -> ``run.bounds.csv``."""
    path = Path(path)
    return path.with_name(f'{path.stem}.bounds{path.suffix}')


def _write_file(path: Path, text: str) -> None:
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(exc.errno, f'Cannot write results: {exc.strerror or exc}', str(path)) from exc
    logger.info('Wrote %s', path)


def emit(
    curves: Sequence[AggregatedCurve],
    bounds: Optional[Sequence[Dict[str, Any]]],
    path: Union[str, Path],
    fmt: str = 'csv',
) -> List[Path]:
    """
    Write curves to ``path`` and, when given, bound rows to its sibling file.

    Args:
        curves: Aggregated curves
        bounds: Rows with ``BOUND_COLUMNS`` keys, or None
        path: Curve file path
        fmt: ``csv`` or ``json``

    Returns:
        List[Path]: Paths written

    Raises:
        UsageError: On an unknown format
        OSError: If a file cannot be written; the message carries the path
    """
    check_format(fmt)
    path = Path(path)
    # Render everything before touching the filesystem.
    files = [(path, render_table(curve_rows(curves), CURVE_COLUMNS, fmt))]
    if bounds is not None:
        files.append((bounds_path_for(path), render_table(bounds, BOUND_COLUMNS, fmt)))

    written: List[Path] = []
    try:
        for target, text in files:
            _write_file(target, text)
            written.append(target)
    except OSError:
        # No curves file without its bounds sibling
        for target in written:
            target.unlink(missing_ok=True)
        raise
    return written


def emit_bounds(bounds: Sequence[Dict[str, Any]], path: Union[str, Path], fmt: str = 'csv') -> Path:
    """Write bound rows to ``path``."""
    check_format(fmt)
    path = Path(path)
    _write_file(path, render_table(bounds, BOUND_COLUMNS, fmt))
    return path


def read_records(path: Union[str, Path]) -> List[Dict[str, Any]]:
    """
    Read rows written by ``emit``; the format follows the file suffix.

    Raises:
        OSError: If the file cannot be read
        UsageError: If the content cannot be parsed
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(exc.errno, f'Cannot read results: {exc.strerror or exc}', str(path)) from exc
    if path.suffix.lower() == '.json':
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f'{path} is not valid JSON: {exc}') from exc
        if not isinstance(data, list):
            raise UsageError(f'{path} must contain a JSON array of records.')
        return data
    return list(csv.DictReader(io.StringIO(text)))


def read_curves(path: Union[str, Path]) -> List[AggregatedCurve]:
    """Curves from a file written by ``emit``."""
    return curves_from_records(read_records(path))
