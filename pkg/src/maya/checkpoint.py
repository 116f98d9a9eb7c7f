"""Binary model checkpoints.

Layout: magic ``MAYA``, u32 version, u32 byte length + UTF-8 JSON descriptor
(layer specs plus metadata), then each parameter as little-endian float32 in
layer order. The descriptor JSON is canonical (sorted keys), so
save(load(data)) reproduces the input byte for byte.
"""

from __future__ import annotations

import hashlib
import json
import struct
from typing import Optional, Union

import numpy as np

from .errors import CheckpointError
from .nn import LayerSpec, Network

MAGIC = b"MAYA"
VERSION = 1


def serialize_network(network: Network, meta: Optional[dict] = None) -> bytes:
    descriptor = {
        "v": VERSION,
        "layers": [spec.to_dict() for spec in network.specs],
        "meta": meta or {},
    }
    desc_bytes = json.dumps(descriptor, sort_keys=True, separators=(",", ":")).encode("utf-8")
    chunks = [MAGIC, struct.pack("<I", VERSION), struct.pack("<I", len(desc_bytes)), desc_bytes]
    for p in network.params():
        chunks.append(np.ascontiguousarray(p.value, dtype="<f4").tobytes())
    return b"".join(chunks)


def deserialize_network(data: bytes) -> tuple[Network, dict]:
    if data[:4] != MAGIC:
        raise CheckpointError(f"bad magic {data[:4]!r}")
    (version,) = struct.unpack_from("<I", data, 4)
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    (desc_len,) = struct.unpack_from("<I", data, 8)
    desc_end = 12 + desc_len
    try:
        descriptor = json.loads(data[12:desc_end].decode("utf-8"))
        specs = [LayerSpec.from_dict(doc) for doc in descriptor["layers"]]
    except (ValueError, KeyError, TypeError) as exc:
        raise CheckpointError(f"corrupt descriptor: {exc}")
    network = Network(specs, seed=0)
    offset = desc_end
    weights = []
    for p in network.params():
        nbytes = p.value.size * 4
        block = data[offset : offset + nbytes]
        if len(block) != nbytes:
            raise CheckpointError(f"truncated parameter block for {p.name}")
        weights.append(
            np.frombuffer(block, dtype="<f4").reshape(p.value.shape).astype(np.float64)
        )
        offset += nbytes
    if offset != len(data):
        raise CheckpointError(f"{len(data) - offset} trailing bytes")
    network.set_weights(weights)
    return network, descriptor.get("meta", {})


def save_checkpoint(network: Network, path, meta: Optional[dict] = None) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_network(network, meta))


def load_checkpoint(source: Union[str, bytes]) -> tuple[Network, dict]:
    if isinstance(source, bytes):
        return deserialize_network(source)
    with open(source, "rb") as fh:
        return deserialize_network(fh.read())


def checkpoint_hash(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()
