"""Text serialisations for matrices, spectra and spectral functions."""

from __future__ import annotations

import os
import tempfile
from pathlib import Path
from typing import Sequence

import numpy as np

from .laplacian import Spectrum
from .spectra import MatchMethod, SpectralFunction


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def atomic_write(path: str | Path, text: str) -> None:
    """Write via a temp file in the same directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def matrix_to_csv(values: np.ndarray) -> str:
    return "".join(",".join(fmt(v) for v in row) + "\n" for row in np.asarray(values))


def spectrum_to_csv(E: Spectrum) -> str:
    lines = ["index,eigenvalue"]
    lines += [f"{i},{fmt(v)}" for i, v in enumerate(E.eigenvalues, 1)]
    return "\n".join(lines) + "\n"


def spectral_function_to_csv(F: SpectralFunction) -> str:
    lines = [f"# method={F.method.value} source_n={F.source_n}", "x,value"]
    lines += [f"{fmt(x)},{fmt(v)}" for x, v in zip(F.knots, F.values)]
    return "\n".join(lines) + "\n"


def spectral_function_from_csv(text: str) -> SpectralFunction:
    meta: dict[str, str] = {}
    xs, vs = [], []
    for line in text.splitlines():
        if line.startswith("#"):
            for part in line[1:].split():
                key, _, val = part.partition("=")
                meta[key] = val
        elif line and line != "x,value":
            x, v = line.split(",")
            xs.append(float(x))
            vs.append(float(v))
    return SpectralFunction(xs, vs, MatchMethod.parse(meta["method"]), int(meta["source_n"]))


def clustering_to_csv(ids: Sequence[str], assignment: Sequence[int]) -> str:
    lines = ["doc_id,cluster"] + [f"{d},{int(c)}" for d, c in zip(ids, assignment)]
    return "\n".join(lines) + "\n"


def read_clustering_csv(path: str | Path) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        col = header.index("cluster") if "cluster" in header else header.index("global_cluster")
        for line in fh:
            if line.strip():
                parts = line.rstrip("\n").split(",")
                out[parts[0]] = parts[col]
    return out
