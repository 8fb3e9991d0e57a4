"""Self-describing snapshot files: a text header followed by raw
little-endian float64 blocks, one per variable, x index fastest.

The header is line oriented::

    ctmhd-snapshot
    version 1
    nx 64 ny 128 nz 1
    dx 0.015625 dy 0.0078125 dz 1.0
    origin 0.0 0.0 0.0
    time 1.5
    variables rho mx my mz E Bx By Bz
    byteorder little
    end

and is followed immediately by ``len(variables)`` binary blocks of
nx*ny*nz float64 values each.  Write -> read round trips are bit exact.
"""

from __future__ import annotations

import numpy as np

from .grid import ConfigurationError, Field, GridSpec

MAGIC = "ctmhd-snapshot"
VERSION = 1

#: conserved-variable names in component order
CONSERVED_NAMES = ("rho", "mx", "my", "mz", "E", "Bx", "By", "Bz")
POTENTIAL_NAMES = ("Ax", "Ay", "Az")


class SnapshotError(ConfigurationError):
    """Malformed or inconsistent snapshot file."""


def write_snapshot(path, field: Field, time: float, names=None) -> None:
    """Write the interior of ``field`` with the given variable names."""
    spec = field.spec
    if names is None:
        names = CONSERVED_NAMES if field.ncomp == 8 else \
            tuple(f"v{c}" for c in range(field.ncomp))
    if len(names) != field.ncomp:
        raise SnapshotError("one name per component required")
    header = "\n".join([
        MAGIC,
        f"version {VERSION}",
        f"nx {spec.nx} ny {spec.ny} nz {spec.nz}",
        f"dx {float(spec.dx)!r} dy {float(spec.dy)!r} dz {float(spec.dz)!r}",
        f"origin {float(spec.x0)!r} {float(spec.y0)!r} {float(spec.z0)!r}",
        f"time {float(time)!r}",
        "variables " + " ".join(names),
        "byteorder little",
        "end",
    ]) + "\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        for c in range(field.ncomp):
            # interior is (nz, ny, nx) C order, so x runs fastest
            fh.write(np.ascontiguousarray(
                field.interior[c], dtype="<f8").tobytes())


def read_snapshot(path):
    """Read a snapshot; returns (Field, time, names).

    The returned field uses the default ghost width with zeroed ghosts.
    """
    with open(path, "rb") as fh:
        lines = []
        while True:
            line = fh.readline().decode("ascii").strip()
            if not line:
                raise SnapshotError("unterminated header")
            lines.append(line)
            if line == "end":
                break
        if lines[0] != MAGIC:
            raise SnapshotError(f"bad magic line {lines[0]!r}")
        head = {}
        for line in lines[1:-1]:
            toks = line.split()
            if toks[0] in ("variables", "origin"):
                head[toks[0]] = toks[1:]
            else:  # alternating key value pairs on one line
                head.update(zip(toks[::2], toks[1::2]))
        if int(head["version"]) != VERSION:
            raise SnapshotError("unsupported snapshot version")
        if head["byteorder"] != "little":
            raise SnapshotError("unsupported byte order")
        nx, ny, nz = int(head["nx"]), int(head["ny"]), int(head["nz"])
        dx, dy, dz = float(head["dx"]), float(head["dy"]), float(head["dz"])
        x0, y0, z0 = map(float, head["origin"])
        time = float(head["time"])
        names = tuple(head["variables"])

        spec = GridSpec(nx, ny, nz, x0=x0, y0=y0, z0=z0,
                        dx=dx, dy=dy, dz=dz)
        field = Field(spec, len(names))
        count = nx * ny * nz
        for c in range(len(names)):
            raw = fh.read(8 * count)
            if len(raw) != 8 * count:
                raise SnapshotError("truncated variable block")
            field.interior[c] = np.frombuffer(
                raw, dtype="<f8").reshape(nz, ny, nx)
    return field, time, names
