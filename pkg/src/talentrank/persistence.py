"""Versioned file envelope for every persisted artifact.

Layout: a single header line followed by a canonical-JSON payload:

    talentrank:<kind>:v<version>:<sha256 of payload>:<payload byte length>
    {...}

Canonical JSON (sorted keys, no whitespace, repr-roundtripped floats) makes
save -> load -> save produce identical bytes. Arrays are embedded as
little-endian base64 so matrices survive bit-exactly.
"""

from __future__ import annotations

import base64
import hashlib
import json
from pathlib import Path

import numpy as np

from .errors import IntegrityError, VersionError

_MAGIC = "talentrank"


def canonical_json(obj) -> bytes:
    return json.dumps(
        obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"), allow_nan=False
    ).encode("utf-8")


def encode_array(arr: np.ndarray) -> dict:
    a = np.ascontiguousarray(arr)
    if a.dtype.byteorder == ">":
        a = a.astype(a.dtype.newbyteorder("<"))
    return {
        "dtype": a.dtype.str,
        "shape": list(a.shape),
        "data": base64.b64encode(a.tobytes()).decode("ascii"),
    }


def decode_array(spec: dict) -> np.ndarray:
    raw = base64.b64decode(spec["data"])
    arr = np.frombuffer(raw, dtype=np.dtype(spec["dtype"]))
    return arr.reshape(spec["shape"]).copy()


def dump_artifact(kind: str, payload: dict, version: int = 1) -> bytes:
    body = canonical_json(payload)
    digest = hashlib.sha256(body).hexdigest()
    header = f"{_MAGIC}:{kind}:v{version}:{digest}:{len(body)}\n".encode("utf-8")
    return header + body


def save_artifact(path: str | Path, kind: str, payload: dict, version: int = 1) -> None:
    Path(path).write_bytes(dump_artifact(kind, payload, version))


def parse_artifact(data: bytes, kind: str, supported_version: int = 1) -> dict:
    newline = data.find(b"\n")
    if newline < 0:
        raise IntegrityError("missing header line", offset=0)
    header = data[:newline].decode("utf-8", errors="replace")
    parts = header.split(":")
    if len(parts) != 5 or parts[0] != _MAGIC:
        raise IntegrityError("malformed artifact header", offset=0)
    _, file_kind, version_tag, digest, length_str = parts
    if file_kind != kind:
        raise IntegrityError(f"expected artifact kind {kind!r}, found {file_kind!r}", offset=0)
    if not version_tag.startswith("v") or not version_tag[1:].isdigit():
        raise IntegrityError("malformed version tag", offset=len(_MAGIC) + len(kind) + 2)
    version = int(version_tag[1:])
    if version > supported_version:
        raise VersionError(
            f"artifact {kind!r} has version {version}, newest supported is {supported_version}"
        )
    try:
        expected_len = int(length_str)
    except ValueError:
        raise IntegrityError("malformed payload length", offset=0) from None
    body = data[newline + 1 :]
    if len(body) != expected_len:
        raise IntegrityError(
            f"payload length {len(body)} != declared {expected_len}",
            offset=newline + 1 + min(len(body), expected_len),
        )
    if hashlib.sha256(body).hexdigest() != digest:
        raise IntegrityError("payload checksum mismatch", offset=newline + 1)
    try:
        return json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise IntegrityError(f"payload is not valid JSON: {exc}", offset=newline + 1) from None


def load_artifact(path: str | Path, kind: str, supported_version: int = 1) -> dict:
    return parse_artifact(Path(path).read_bytes(), kind, supported_version)
