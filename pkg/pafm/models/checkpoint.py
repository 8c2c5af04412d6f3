"""Binary checkpoint format for :class:`MlpModel`.

Layout, all little-endian::

    offset  size  field
    0       8     magic b"PAFMCKPT"
    8       4     format version (u32, currently 1)
    12      4     d (u32)
    16      4     hidden width (u32)
    20      4     time-embedding width (u32)
    24      4     layer count (u32)
    28      1     conditioned flag (u8)
    29      4     class count (u32, 0 when unconditioned)
    33      8     omega_max (f64)
    41      8     parameter count (u64)
    49      8*P   parameters (f64)
"""
import struct
from pathlib import Path
from typing import Union

import numpy as np

from pafm.errors import ParseError
from pafm.models.mlp import MlpModel, TimeEmbedding

MAGIC = b"PAFMCKPT"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<8sIIIIIBIdQ")


def checkpoint_bytes(model: MlpModel) -> bytes:
    header = _HEADER.pack(
        MAGIC, FORMAT_VERSION, model.d, model.hidden, model.embed.width, model.layers,
        1 if model.conditioned else 0, model.n_classes, model.embed.omega_max, model.n_params,
    )
    return header + model.params.astype("<f8").tobytes()


def save_checkpoint(model: MlpModel, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(checkpoint_bytes(model))
    tmp.replace(path)
    return path


def model_from_bytes(blob: bytes, source: str = "<bytes>") -> MlpModel:
    if len(blob) < _HEADER.size:
        raise ParseError("checkpoint shorter than its header", path=source)
    magic, version, d, hidden, embed, layers, conditioned, n_classes, omega_max, count = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise ParseError(f"bad checkpoint magic {magic!r}", path=source)
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported checkpoint version {version}", path=source)
    body = blob[_HEADER.size:]
    if len(body) != 8 * count:
        raise ParseError(f"expected {count} parameters, found {len(body) // 8}", path=source)
    params = np.frombuffer(body, dtype="<f8").astype(np.float64)
    return MlpModel(
        d=d, params=params, hidden=hidden, embed=TimeEmbedding(embed, omega_max),
        n_classes=n_classes if conditioned else 0, layers=layers,
    )


def load_checkpoint(path: Union[str, Path]) -> MlpModel:
    path = Path(path)
    return model_from_bytes(path.read_bytes(), str(path))
