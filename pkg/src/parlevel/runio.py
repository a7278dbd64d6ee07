"""Run persistence: versioned CSV files, JSON metadata sidecars, config files.

Every data file is written atomically (temp file + rename) and paired with
a ``<name>.meta.json`` sidecar carrying the full effective configuration,
the seed, the package version, a timestamp and the host name.  The CSV
payload itself is deterministic for a given (config, seed): floats are
serialized with ``repr`` (shortest round-trip form), so reruns produce
bitwise-identical files.

CSV header convention: the first line is ``# parlevel csv v1 <schema>``;
consumers must check it before parsing.
"""

from __future__ import annotations

import configparser
import json
import os
import socket
import tempfile
import time

import numpy as np

from . import __version__
from .correlator import CorrelatorGrid

CSV_VERSION = "v1"

__all__ = [
    "atomic_write",
    "write_metadata",
    "read_metadata",
    "sidecar_path",
    "write_correlator_csv",
    "read_correlator_csv",
    "write_analytic_csv",
    "read_analytic_csv",
    "write_spectra_csv",
    "load_config",
    "parse_grid",
]


def atomic_write(path, text):
    """Write text via a temp file in the same directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sidecar_path(path):
    base, _ = os.path.splitext(path)
    return base + ".meta.json"


def write_metadata(path, config, seed):
    """JSON sidecar with config echo, seed, version, timestamp and host."""
    payload = {
        "config": config,
        "seed": None if seed is None else int(seed),
        "version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "host": socket.gethostname(),
    }
    atomic_write(sidecar_path(path), json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_metadata(path):
    with open(sidecar_path(path)) as fh:
        return json.load(fh)


def _header(schema, columns):
    return f"# parlevel csv {CSV_VERSION} {schema}\n" + ",".join(columns) + "\n"


def _check_header(line, schema):
    expected = f"# parlevel csv {CSV_VERSION} {schema}"
    if line.strip() != expected:
        raise ValueError(f"unexpected CSV header {line.strip()!r}; "
                         f"expected {expected!r}")


def write_correlator_csv(path, grid: CorrelatorGrid):
    """Correlator grid rows: epsilon_over_d, gamma_over_d, re_k, im_k, std_err, samples."""
    lines = [_header("correlator", ["epsilon_over_d", "gamma_over_d", "re_k",
                                    "im_k", "std_err", "samples"])]
    for i, r in enumerate(grid.epsilon_over_d):
        for j, g in enumerate(grid.gamma_over_d):
            v = grid.values[i, j]
            lines.append(f"{float(r)!r},{float(g)!r},{float(v.real)!r},"
                         f"{float(v.imag)!r},{float(grid.std_err[i, j])!r},"
                         f"{grid.samples}\n")
    atomic_write(path, "".join(lines))


def read_correlator_csv(path):
    """Rebuild a :class:`CorrelatorGrid` (meta from the sidecar if present)."""
    with open(path) as fh:
        first = fh.readline()
        _check_header(first, "correlator")
        fh.readline()  # column names
        rows = [line.strip().split(",") for line in fh if line.strip()]
    rs = sorted({float(row[0]) for row in rows})
    gs = sorted({float(row[1]) for row in rows})
    values = np.zeros((len(rs), len(gs)), dtype=complex)
    std_err = np.zeros((len(rs), len(gs)))
    samples = 0
    for row in rows:
        i = rs.index(float(row[0]))
        j = gs.index(float(row[1]))
        values[i, j] = float(row[2]) + 1j * float(row[3])
        std_err[i, j] = float(row[4])
        samples = int(row[5])
    try:
        meta = read_metadata(path).get("config", {})
    except FileNotFoundError:
        meta = {}
    return CorrelatorGrid(epsilon_over_d=np.array(rs), gamma_over_d=np.array(gs),
                          values=values, std_err=std_err, samples=samples,
                          meta=meta)


def write_analytic_csv(path, epsilon_over_d, gamma_over_d, values, errors):
    """Analytic grid rows: epsilon_over_d, gamma_over_d, re_k, im_k, quad_error."""
    lines = [_header("analytic", ["epsilon_over_d", "gamma_over_d", "re_k",
                                  "im_k", "quad_error"])]
    for i, r in enumerate(epsilon_over_d):
        for j, g in enumerate(gamma_over_d):
            v = values[i, j]
            lines.append(f"{float(r)!r},{float(g)!r},{float(v.real)!r},"
                         f"{float(v.imag)!r},{float(errors[i, j])!r}\n")
    atomic_write(path, "".join(lines))


def read_analytic_csv(path):
    with open(path) as fh:
        first = fh.readline()
        _check_header(first, "analytic")
        fh.readline()
        rows = [line.strip().split(",") for line in fh if line.strip()]
    rs = sorted({float(row[0]) for row in rows})
    gs = sorted({float(row[1]) for row in rows})
    values = np.zeros((len(rs), len(gs)), dtype=complex)
    errors = np.zeros((len(rs), len(gs)))
    for row in rows:
        i = rs.index(float(row[0]))
        j = gs.index(float(row[1]))
        values[i, j] = float(row[2]) + 1j * float(row[3])
        errors[i, j] = float(row[4])
    return np.array(rs), np.array(gs), values, errors


def write_spectra_csv(path, rows):
    """Spectra rows: (stream, x, eigenvalues...) per realization."""
    lines = [_header("spectra", ["stream", "x", "eigenvalues..."])]
    for stream, x, eigs in rows:
        eig_text = ",".join(repr(float(e)) for e in eigs)
        lines.append(f"{stream},{x!r},{eig_text}\n")
    atomic_write(path, "".join(lines))


def load_config(path):
    """Key-value config file with a [run] section; values stay strings."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise FileNotFoundError(path)
    if "run" not in parser:
        raise ValueError(f"config file {path} has no [run] section")
    return dict(parser["run"])


def parse_grid(text):
    """Grid syntax: comma list ``a,b,c`` or linspace ``start:stop:count``."""
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid spec {text!r} must be start:stop:count")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ValueError("grid count must be >= 1")
        return np.linspace(start, stop, count)
    return np.array([float(tok) for tok in text.split(",") if tok.strip() != ""])
