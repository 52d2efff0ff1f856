"""Net and field files.

JSON Lines: a header object first, then one record per vertex, edge or
plaquette. Rationals are "p/q" strings so files round-trip exactly and diff
cleanly. Reports are plain key=value lines.
"""

from __future__ import annotations

import json
from typing import Any, Dict, Iterable, List, Optional, Tuple

import config
from core.errors import FormatError, GrassnetError
from core.grassmann import Subspace
from core.linalg import RationalMatrix
from engine.coefficients import EdgeField, LatticeField, PlaquetteField, VertexField
from engine.darboux_net import EdgeNet
from engine.qnet import QNet

_FIELD_KINDS = {'plaquette': PlaquetteField, 'edge': EdgeField, 'vertex': VertexField}


def _version() -> int:
    return int(getattr(config, 'NET_FORMAT_VERSION', 1))


def _dump(obj: Dict[str, Any]) -> str:
    return json.dumps(obj, separators=(", ", ": "))


def _write_lines(path: str, header: Dict[str, Any], records: Iterable[Dict[str, Any]]) -> int:
    count = 0
    with open(path, 'w', encoding='utf-8', newline='\n') as fh:
        fh.write(_dump(header) + "\n")
        for rec in records:
            fh.write(_dump(rec) + "\n")
            count += 1
    return count


def _read_lines(path: str) -> Tuple[Dict[str, Any], List[Tuple[int, Dict[str, Any]]]]:
    try:
        with open(path, 'r', encoding='utf-8') as fh:
            lines = [(no, line) for no, line in enumerate(fh, start=1) if line.strip()]
    except OSError as e:
        raise FormatError(f"cannot read {path}: {e}") from e
    if not lines:
        raise FormatError(f"{path} is empty")
    parsed = []
    for no, line in lines:
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise FormatError(f"invalid JSON: {e.msg}", location=f"{path}:{no}") from None
        if not isinstance(obj, dict):
            raise FormatError("record is not an object", location=f"{path}:{no}")
        parsed.append((no, obj))
    header = parsed[0][1]
    if header.get('version') != _version():
        raise FormatError(f"unsupported version {header.get('version')!r}", location=f"{path}:1")
    return header, parsed[1:]


def _require(obj: Dict[str, Any], keys: Iterable[str], where: str) -> None:
    missing = [k for k in keys if k not in obj]
    if missing:
        raise FormatError(f"missing keys {', '.join(missing)}", location=where)


def _matrix(rows: Any, ncols: Optional[int], where: str) -> RationalMatrix:
    try:
        return RationalMatrix.from_text_rows(rows, ncols=ncols)
    except (ValueError, TypeError) as e:
        raise FormatError(f"bad matrix: {e}", location=where) from None


# ============================================================================
# Q-nets
# ============================================================================

def write_qnet(net: QNet, path: str, meta: Optional[Dict[str, Any]] = None) -> int:
    header = {'format': 'qnet', 'version': _version(), 'N': net.N, 'r': net.r, 'd': net.d}
    header.update(meta or {})
    records = (
        {'n': list(n), 'rows': net.get(n).basis.to_text_rows()}
        for n in net.vertices()
    )
    return _write_lines(path, header, records)


def read_qnet(path: str) -> Tuple[QNet, Dict[str, Any]]:
    header, records = _read_lines(path)
    if header.get('format') != 'qnet':
        raise FormatError(f"expected a qnet file, got {header.get('format')!r}", location=f"{path}:1")
    _require(header, ('N', 'r', 'd'), f"{path}:1")
    net = QNet(int(header['N']), int(header['r']), int(header['d']))
    for no, rec in records:
        where = f"{path}:{no}"
        _require(rec, ('n', 'rows'), where)
        try:
            net.set(tuple(int(x) for x in rec['n']), Subspace(_matrix(rec['rows'], net.d + 1, where)))
        except (GrassnetError, ValueError) as e:
            if isinstance(e, FormatError):
                raise
            raise FormatError(str(e), location=where) from None
    return net, header


# ============================================================================
# Edge nets
# ============================================================================

def write_edgenet(net: EdgeNet, path: str, meta: Optional[Dict[str, Any]] = None) -> int:
    header = {'format': 'edgenet', 'version': _version(), 'N': net.N, 'r': net.r, 'd': net.d}
    header.update(meta or {})
    records = (
        {'n': list(n), 'axis': i, 'rows': net.get(n, i).basis.to_text_rows()}
        for n, i in net.edges()
    )
    return _write_lines(path, header, records)


def read_edgenet(path: str) -> Tuple[EdgeNet, Dict[str, Any]]:
    header, records = _read_lines(path)
    if header.get('format') != 'edgenet':
        raise FormatError(f"expected an edgenet file, got {header.get('format')!r}", location=f"{path}:1")
    _require(header, ('N', 'r', 'd'), f"{path}:1")
    net = EdgeNet(int(header['N']), int(header['r']), int(header['d']))
    for no, rec in records:
        where = f"{path}:{no}"
        _require(rec, ('n', 'axis', 'rows'), where)
        try:
            net.set(tuple(int(x) for x in rec['n']), int(rec['axis']), Subspace(_matrix(rec['rows'], net.d + 1, where)))
        except (GrassnetError, ValueError) as e:
            if isinstance(e, FormatError):
                raise
            raise FormatError(str(e), location=where) from None
    return net, header


# ============================================================================
# Coefficient fields
# ============================================================================

def write_field(field_: LatticeField, path: str, name: str = '', meta: Optional[Dict[str, Any]] = None) -> int:
    header = {'format': 'field', 'version': _version(), 'kind': field_.kind, 'N': field_.N, 'r': field_.r, 'name': name}
    header.update(meta or {})

    def _record(key, value):
        if field_.kind == 'vertex':
            n, axes = key, []
        else:
            n, axes = key[0], list(key[1:])
        return {'n': list(n), 'axes': axes, 'rows': value.to_text_rows()}

    return _write_lines(path, header, (_record(k, v) for k, v in field_.items()))


def read_field(path: str) -> Tuple[LatticeField, Dict[str, Any]]:
    header, records = _read_lines(path)
    if header.get('format') != 'field':
        raise FormatError(f"expected a field file, got {header.get('format')!r}", location=f"{path}:1")
    _require(header, ('kind', 'N', 'r'), f"{path}:1")
    cls = _FIELD_KINDS.get(header['kind'])
    if cls is None:
        raise FormatError(f"unknown field kind {header['kind']!r}", location=f"{path}:1")
    field_ = cls(int(header['N']), int(header['r']))
    arity = {'plaquette': 2, 'edge': 1, 'vertex': 0}[header['kind']]
    for no, rec in records:
        where = f"{path}:{no}"
        _require(rec, ('n', 'axes', 'rows'), where)
        axes = [int(a) for a in rec['axes']]
        if len(axes) != arity:
            raise FormatError(f"{header['kind']} record needs {arity} axes", location=where)
        try:
            field_.set(tuple(int(x) for x in rec['n']), *axes, _matrix(rec['rows'], None, where))
        except ValueError as e:
            if isinstance(e, FormatError):
                raise
            raise FormatError(str(e), location=where) from None
    return field_, header


def read_any(path: str) -> Tuple[Any, Dict[str, Any]]:
    """Dispatch on the header's format."""
    header, _ = _read_lines(path)
    readers = {'qnet': read_qnet, 'edgenet': read_edgenet, 'field': read_field}
    reader = readers.get(header.get('format'))
    if reader is None:
        raise FormatError(f"unknown format {header.get('format')!r}", location=f"{path}:1")
    return reader(path)


# ============================================================================
# Reports
# ============================================================================

def _report_value(value: Any) -> str:
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, (tuple, list)):
        return ",".join(str(v) for v in value)
    return str(value)


def report_lines(entries: Iterable[Tuple[str, Any]]) -> List[str]:
    return [f"{key}={_report_value(value)}" for key, value in entries]


def parse_report(text: str) -> List[Tuple[str, str]]:
    """Whitespace-separated key=value tokens, in order."""
    out = []
    for token in text.split():
        if "=" not in token:
            continue
        key, _, value = token.partition("=")
        out.append((key, value))
    return out
