"""Delimited-text readers and writers for decision and ID streams."""
from __future__ import annotations

import csv
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import MalformedInputError
from .sketch import DecisionStream

DEFAULT_TOKENS = ("alpha", "beta")


class ParseError(MalformedInputError):
    def __init__(self, message, line: Optional[int] = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


def _sniff_delimiter(first_line: str) -> str:
    return "\t" if "\t" in first_line and "," not in first_line else ","


def read_decisions(path, labels: Sequence[str] = DEFAULT_TOKENS) -> DecisionStream:
    """Read a header row ``c1,...,cn[,truth]`` followed by one row per item."""
    codes = {labels[0]: 0, labels[1]: 1}
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty file", 1)
    reader = csv.reader(lines, delimiter=_sniff_delimiter(lines[0]))
    header = [h.strip() for h in next(reader)]
    has_truth = bool(header) and header[-1].lower() == "truth"
    n = len(header) - has_truth
    if n < 1:
        raise ParseError("header names no classifier columns", 1)
    width = len(header)
    out = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != width:
            raise ParseError(f"expected {width} values, found {len(row)}", lineno)
        try:
            out.append([codes[c.strip()] for c in row])
        except KeyError as exc:
            raise ParseError(f"unknown label token {exc.args[0]!r}", lineno) from None
    arr = np.asarray(out, dtype=np.uint8).reshape(len(out), width)
    if has_truth:
        return DecisionStream(n, arr[:, :n], arr[:, n])
    return DecisionStream(n, arr)


def write_decisions(stream: DecisionStream, path, labels: Sequence[str] = DEFAULT_TOKENS) -> None:
    header = [f"c{i + 1}" for i in range(stream.n)] + (["truth"] if stream.has_truth else [])
    tok = np.asarray(labels, dtype=object)
    body = stream.decisions if not stream.has_truth else np.column_stack([stream.decisions, stream.truth])
    rows = tok[body]
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        fh.writelines(",".join(r) + "\n" for r in rows)


def read_ids(path) -> list[list[str]]:
    """Read an ID file: header row of system names, then one token per system per row."""
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ParseError("empty file", 1)
    reader = csv.reader(lines, delimiter=_sniff_delimiter(lines[0]))
    header = next(reader)
    systems = [[] for _ in header]
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} tokens, found {len(row)}", lineno)
        for col, tok in zip(systems, row):
            col.append(tok)
    return systems


def write_ids(systems: Sequence[Sequence[str]], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"id{i + 1}" for i in range(len(systems))])
        w.writerows(zip(*systems))
