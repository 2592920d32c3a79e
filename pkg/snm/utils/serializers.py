import csv

from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from typing import Any

import numpy as np
import rtoml

from msgspec import DecodeError, json

from snm.common.exception import errors


def _enc_hook(obj: Any) -> Any:
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise NotImplementedError(f'Cannot serialize {type(obj).__name__}')


_encoder = json.Encoder(enc_hook=_enc_hook)


def to_json(content: Any) -> bytes:
    """
    Serialize to JSON with msgspec, numpy scalars and arrays included

    :param content: Data
    :return:
    """
    return _encoder.encode(content)


def _prepare(path: Path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise errors.ConfigError(msg=f'Cannot create output directory {path.parent}: {e}') from e
    return path


def write_json(path: str | Path, content: Any) -> Path:
    path = _prepare(Path(path))
    try:
        path.write_bytes(json.format(to_json(content), indent=2) + b'\n')
    except OSError as e:
        raise errors.ConfigError(msg=f'Cannot write {path}: {e}') from e
    return path


def _cell(value: Any) -> Any:
    # str(float) is the shortest round-trip representation
    if isinstance(value, np.generic):
        value = value.item()
    if value is None:
        return ''
    return value


def write_csv(path: str | Path, rows: Iterable[Mapping[str, Any]], columns: Sequence[str]) -> Path:
    """
    Write rows as UTF-8 CSV with a header and full-precision floats

    :param path: Output file
    :param rows: One mapping per row
    :param columns: Column order
    :return:
    """
    path = _prepare(Path(path))
    try:
        with path.open('w', encoding='utf-8', newline='') as f:
            writer = csv.DictWriter(f, fieldnames=list(columns), lineterminator='\n')
            writer.writeheader()
            for row in rows:
                writer.writerow({k: _cell(row.get(k)) for k in columns})
    except OSError as e:
        raise errors.ConfigError(msg=f'Cannot write {path}: {e}') from e
    return path


def read_csv(path: str | Path) -> list[dict[str, str]]:
    try:
        with Path(path).open(encoding='utf-8', newline='') as f:
            return list(csv.DictReader(f))
    except OSError as e:
        raise errors.ConfigError(msg=f'Cannot read {path}: {e}') from e


def load_config_file(path: str | Path) -> dict[str, Any]:
    """
    Load a TOML or JSON configuration file

    :param path: ``.toml`` or ``.json`` file
    :return:
    """
    path = Path(path)
    try:
        match path.suffix.lower():
            case '.toml':
                with path.open(encoding='utf-8') as f:
                    return rtoml.load(f)
            case '.json':
                content = json.decode(path.read_bytes())
            case _:
                raise errors.ConfigError(msg=f'Unsupported config file type {path.suffix!r}, expected .toml or .json')
    except OSError as e:
        raise errors.ConfigError(msg=f'Cannot read config file {path}: {e}') from e
    except (rtoml.TomlParsingError, DecodeError) as e:
        raise errors.ConfigError(msg=f'Invalid config file {path}: {e}') from e
    if not isinstance(content, dict):
        raise errors.ConfigError(msg=f'Config file {path} must contain a table')
    return content
