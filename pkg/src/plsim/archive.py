"""Portable "lrep v1" embedding archives.

Line 1 is a JSON header object; every following line is one JSON record
holding a token string, an occurrence index, and the embedding vector.
Floats are written with 9 significant digits, so a round trip is lossless
to well under 1e-6 per component.
"""

from __future__ import annotations

import json
from collections import defaultdict
from pathlib import Path

import numpy as np

from .representation import LanguageRepresentation, RepresentationError, TokenEmbeddingSet


class ArchiveError(ValueError):
    pass


FORMAT = "lrep"
VERSION = 1


def export_archive(rep: LanguageRepresentation, path: str | Path) -> None:
    header = {
        "format": FORMAT,
        "version": VERSION,
        "language": rep.language,
        "dim": rep.dim,
        "encoder": rep.encoder_tag,
    }
    if rep.dropped:
        header["dropped"] = list(rep.dropped)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(header) + "\n")
        for token in sorted(rep.sets):
            for occ, vec in enumerate(rep.sets[token].vectors):
                cells = ", ".join(f"{float(x):.9g}" for x in vec)
                record = f'{{"token": {json.dumps(token)}, "occ": {occ}, "vec": [{cells}]}}'
                fh.write(record + "\n")


def import_archive(path: str | Path) -> LanguageRepresentation:
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
        if not first.strip():
            raise ArchiveError(f"{path}: empty archive")
        try:
            header = json.loads(first)
        except json.JSONDecodeError as exc:
            raise ArchiveError(f"{path}: bad header: {exc}") from exc
        if header.get("format") != FORMAT:
            raise ArchiveError(f"{path}: not an lrep archive")
        if header.get("version") != VERSION:
            raise ArchiveError(
                f"{path}: unsupported lrep version {header.get('version')!r}"
            )
        dim = header.get("dim")
        if not isinstance(dim, int) or dim <= 0:
            raise ArchiveError(f"{path}: bad dim in header: {dim!r}")

        by_token: dict[str, dict[int, list[float]]] = defaultdict(dict)
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ArchiveError(f"{path}:{lineno}: bad record: {exc}") from exc
            token, occ, vec = record["token"], record["occ"], record["vec"]
            if len(vec) != dim:
                raise ArchiveError(
                    f"{path}:{lineno}: vector width {len(vec)} does not match "
                    f"header dim {dim}"
                )
            if occ in by_token[token]:
                raise ArchiveError(
                    f"{path}:{lineno}: duplicate (token, occurrence) key "
                    f"({token!r}, {occ})"
                )
            by_token[token][occ] = vec

    if not by_token:
        raise ArchiveError(f"{path}: archive holds no records (degenerate representation)")
    sets = {}
    for token, by_occ in by_token.items():
        rows = [by_occ[k] for k in sorted(by_occ)]
        try:
            sets[token] = TokenEmbeddingSet(token, np.array(rows, dtype=np.float32))
        except RepresentationError as exc:
            raise ArchiveError(f"{path}: {exc}") from exc
    return LanguageRepresentation(
        language=header.get("language", ""),
        encoder_tag=header.get("encoder", ""),
        dim=dim,
        sets=sets,
        dropped=tuple(header.get("dropped", [])),
    )
