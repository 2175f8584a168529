"""Coefficient oracle backed by an external command.

Protocol: the command reads lines "n m" on stdin and writes one residue per
line on stdout, in the same order.  Answers are cached on disk in an
append-only "n residue" file per (command, modulus), next to a small JSON
manifest, so long searches can be resumed.
"""
from __future__ import annotations

import hashlib
import json
import os
import shlex
import subprocess
from pathlib import Path
from typing import Callable

from filelock import FileLock

from .families import CoefficientOracle, OracleError


class OracleProcessError(OracleError):
    """Backend exited with a nonzero status."""


class OracleProtocolError(OracleError):
    """Backend output does not follow the line protocol."""


class OracleTimeout(OracleError):
    """Backend did not answer in time."""


def partition_index_map(n: int) -> int | None:
    """Coefficient index of 1/eta(24z) -> partition argument."""
    return (n + 1) // 24 if (n + 1) % 24 == 0 and n >= -1 else None


def default_cache_dir() -> Path:
    base = os.environ.get("ETACONG_CACHE") or os.path.join(
        os.environ.get("XDG_CACHE_HOME", os.path.expanduser("~/.cache")), "etacong")
    return Path(base)


class DiskCache:
    def __init__(self, root: Path, command: str, modulus: int):
        key = hashlib.sha256(f"{command}\0{modulus}".encode()).hexdigest()[:20]
        self.dir = Path(root) / key
        self.dir.mkdir(parents=True, exist_ok=True)
        self.values_path = self.dir / "values.txt"
        self.lock = FileLock(str(self.dir / "lock"))
        manifest = self.dir / "manifest.json"
        with self.lock:
            if not manifest.exists():
                manifest.write_text(json.dumps({"command": command, "modulus": modulus,
                                                "format": "n residue"}, sort_keys=True) + "\n")
        self._data: dict[int, int] = {}
        self._loaded_bytes = 0

    def _refresh(self) -> None:
        if not self.values_path.exists():
            return
        with open(self.values_path, "rb") as fh:
            fh.seek(self._loaded_bytes)
            chunk = fh.read()
        # ignore a trailing partial line from an interrupted writer
        end = chunk.rfind(b"\n") + 1
        for line in chunk[:end].decode().splitlines():
            if line.strip():
                n, r = line.split()
                self._data[int(n)] = int(r)
        self._loaded_bytes += end

    def get_many(self, keys) -> dict[int, int]:
        with self.lock:
            self._refresh()
        return {k: self._data[k] for k in keys if k in self._data}

    def put_many(self, items: dict[int, int]) -> None:
        if not items:
            return
        with self.lock:
            self._refresh()
            new = {k: v for k, v in items.items() if k not in self._data}
            if new:
                with open(self.values_path, "a") as fh:
                    for k in sorted(new):
                        fh.write(f"{k} {new[k]}\n")
            self._refresh()


class SubprocessOracle(CoefficientOracle):
    def __init__(self, command: str, modulus: int,
                 index_map: Callable[[int], int | None] | None = None,
                 cache_dir: str | Path | None = None, batch_size: int = 256,
                 timeout: float = 3600.0, use_cache: bool = True):
        self.command = command
        self.modulus = modulus
        self.index_map = index_map or (lambda n: n if n >= 0 else None)
        self.batch_size = batch_size
        self.timeout = timeout
        self.cache = DiskCache(Path(cache_dir) if cache_dir else default_cache_dir(),
                               command, modulus) if use_cache else None
        self.spawned = 0

    @property
    def max_index(self) -> int:
        return 2**63 - 1

    def _run(self, args: list[int]) -> list[int]:
        payload = "".join(f"{a} {self.modulus}\n" for a in args)
        self.spawned += 1
        try:
            proc = subprocess.run(shlex.split(self.command), input=payload, capture_output=True,
                                  text=True, timeout=self.timeout)
        except subprocess.TimeoutExpired as exc:
            raise OracleTimeout(f"backend timed out after {self.timeout}s") from exc
        except OSError as exc:
            raise OracleProcessError(f"cannot start backend: {exc}") from exc
        if proc.returncode != 0:
            raise OracleProcessError(f"backend exited with status {proc.returncode}: "
                                     f"{proc.stderr.strip()[:500]}")
        lines = [ln for ln in proc.stdout.splitlines() if ln.strip()]
        if len(lines) != len(args):
            raise OracleProtocolError(f"expected {len(args)} lines, got {len(lines)}")
        out = []
        for ln in lines:
            try:
                v = int(ln.strip())
            except ValueError:
                raise OracleProtocolError(f"non-integer reply {ln!r}") from None
            out.append(v % self.modulus)
        return out

    def fetch_many(self, indices) -> list[int]:
        idx = [int(i) for i in indices]
        args = {i: self.index_map(i) for i in idx}
        wanted = sorted({a for a in args.values() if a is not None})
        known = self.cache.get_many(wanted) if self.cache else {}
        missing = [a for a in wanted if a not in known]
        for start in range(0, len(missing), self.batch_size):
            batch = missing[start:start + self.batch_size]
            got = dict(zip(batch, self._run(batch)))
            if self.cache:
                self.cache.put_many(got)
            known.update(got)
        return [0 if args[i] is None else known[args[i]] for i in idx]
