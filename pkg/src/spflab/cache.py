"""On-disk persistence for Schur-algebra structure constants.

Two interchangeable formats:

* binary (``.sc`` files): a little-endian header (magic, format version, p,
  n, d, basis count) followed by one record per computed left factor; this
  is the default.
* JSONL (``.sc.jsonl``): a header object on the first line, then one object
  per left factor.  Human-inspectable; round-trips to the same store.

Binary layout (all integers little-endian):

    header:  8s magic | u32 version | u32 p | u32 n | u32 d | u64 basis_count
    record:  u64 left | u64 n_rights
             each right: u64 right | u64 n_terms | n_terms x (u64 index, u32 coeff)

Writes go to a temporary file in the same directory followed by an atomic
rename, so a cache file is never observed half-written.
"""

from __future__ import annotations

import json
import os
import struct
import tempfile
from pathlib import Path

MAGIC = b"SPFLABSC"
FORMAT_VERSION = 1

_HEADER = struct.Struct("<8sIIIIQ")
_U64 = struct.Struct("<Q")
_TERM = struct.Struct("<QI")

ENV_CACHE_DIR = "SPF_CACHE_DIR"


def default_cache_dir():
    override = os.environ.get(ENV_CACHE_DIR)
    if override:
        return Path(override)
    return Path.home() / ".cache" / "spf-lab"


def cache_path(p, n, d, cache_dir=None, jsonl=False):
    base = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    suffix = ".sc.jsonl" if jsonl else ".sc"
    return base / f"schur_p{p}_n{n}_d{d}{suffix}"


def save_store(path, p, n, d, basis_count, store):
    """Write a structure-constant store ({left: {right: {idx: coeff}}})."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix == ".jsonl":
        payload = _encode_jsonl(p, n, d, basis_count, store)
    else:
        payload = _encode_binary(p, n, d, basis_count, store)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_store(path, p, n, d, basis_count):
    """Read a store, validating the header against the requested algebra.

    Returns an empty store when the file does not exist; raises ValueError
    on a malformed file or a header mismatch.
    """
    path = Path(path)
    if not path.exists():
        return {}
    data = path.read_bytes()
    if path.suffix == ".jsonl":
        return _decode_jsonl(data, p, n, d, basis_count)
    return _decode_binary(data, p, n, d, basis_count)


def _encode_binary(p, n, d, basis_count, store):
    chunks = [_HEADER.pack(MAGIC, FORMAT_VERSION, p, n, d, basis_count)]
    for left in sorted(store):
        row = store[left]
        chunks.append(_U64.pack(left))
        chunks.append(_U64.pack(len(row)))
        for right in sorted(row):
            terms = row[right]
            chunks.append(_U64.pack(right))
            chunks.append(_U64.pack(len(terms)))
            for idx in sorted(terms):
                chunks.append(_TERM.pack(idx, terms[idx]))
    return b"".join(chunks)


def _decode_binary(data, p, n, d, basis_count):
    if len(data) < _HEADER.size:
        raise ValueError("truncated cache header")
    magic, version, fp, fn, fd_, count = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise ValueError("not a structure-constant cache file")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported cache format version {version}")
    if (fp, fn, fd_, count) != (p, n, d, basis_count):
        raise ValueError(
            f"cache header (p={fp}, n={fn}, d={fd_}, dim={count}) does not "
            f"match requested algebra (p={p}, n={n}, d={d}, dim={basis_count})"
        )
    store = {}
    off = _HEADER.size
    try:
        while off < len(data):
            left = _U64.unpack_from(data, off)[0]
            n_rights = _U64.unpack_from(data, off + 8)[0]
            off += 16
            row = {}
            for _ in range(n_rights):
                right = _U64.unpack_from(data, off)[0]
                n_terms = _U64.unpack_from(data, off + 8)[0]
                off += 16
                terms = {}
                for _ in range(n_terms):
                    idx, coeff = _TERM.unpack_from(data, off)
                    off += _TERM.size
                    terms[idx] = coeff
                row[right] = terms
            store[left] = row
    except struct.error as exc:
        raise ValueError("truncated cache record") from exc
    return store


def _encode_jsonl(p, n, d, basis_count, store):
    lines = [
        json.dumps(
            {
                "magic": MAGIC.decode(),
                "format_version": FORMAT_VERSION,
                "p": p,
                "n": n,
                "d": d,
                "basis_count": basis_count,
            },
            sort_keys=True,
        )
    ]
    for left in sorted(store):
        row = {
            str(right): {str(i): c for i, c in sorted(terms.items())}
            for right, terms in sorted(store[left].items())
        }
        lines.append(json.dumps({"left": left, "row": row}, sort_keys=True))
    return ("\n".join(lines) + "\n").encode()


def _decode_jsonl(data, p, n, d, basis_count):
    lines = data.decode().splitlines()
    if not lines:
        raise ValueError("empty cache file")
    header = json.loads(lines[0])
    if header.get("magic") != MAGIC.decode():
        raise ValueError("not a structure-constant cache file")
    if header.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported cache format version {header.get('format_version')}")
    key = (header.get("p"), header.get("n"), header.get("d"), header.get("basis_count"))
    if key != (p, n, d, basis_count):
        raise ValueError("cache header does not match requested algebra")
    store = {}
    for line in lines[1:]:
        rec = json.loads(line)
        store[int(rec["left"])] = {
            int(right): {int(i): int(c) for i, c in terms.items()}
            for right, terms in rec["row"].items()
        }
    return store
