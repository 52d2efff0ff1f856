"""Quad-mesh export of rank-0 nets in P^3 (Wavefront OBJ)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import config
from core.errors import ConfigError, NotAffine
from core.grassmann import to_affine
from core.lattice import Vertex, shift
from engine.qnet import QNet


@dataclass
class QuadMesh:
    vertices: List[Tuple[float, float, float]] = field(default_factory=list)
    faces: List[Tuple[int, int, int, int]] = field(default_factory=list)  # 1-based
    lattice: List[Vertex] = field(default_factory=list)


def mesh_from_net(net: QNet, axes: Tuple[int, int] = (0, 1), fixed: Optional[Dict[int, int]] = None) -> QuadMesh:
    """2D slice of the net spanned by ``axes``; other coordinates fixed (default 0)."""
    if net.r != 0 or net.d != 3:
        raise ConfigError(f"mesh export needs r=0 and d=3, got r={net.r} d={net.d}")
    a, b = axes
    if a == b or not (0 <= a < net.N and 0 <= b < net.N):
        raise ConfigError(f"invalid mesh axes {axes} for N={net.N}")
    fixed = dict(fixed or {})
    others = [k for k in range(net.N) if k not in axes]

    def on_slice(n: Vertex) -> bool:
        return all(n[k] == fixed.get(k, 0) for k in others)

    lattice = sorted((n for n in net.values if on_slice(n)), key=lambda n: (n[a], n[b], n))
    mesh = QuadMesh(lattice=lattice)
    index = {}
    for n in lattice:
        try:
            block = to_affine(net.get(n)).block
        except NotAffine:
            raise NotAffine("vertex is a point at infinity", location=n) from None
        mesh.vertices.append(tuple(float(block[0, c]) for c in range(3)))
        index[n] = len(mesh.vertices)

    for n in lattice:
        quad = (n, shift(n, a), shift(n, a, b), shift(n, b))
        if all(q in index for q in quad):
            mesh.faces.append(tuple(index[q] for q in quad))
    return mesh


def to_obj_text(mesh: QuadMesh) -> str:
    precision = int(getattr(config, 'MESH_FLOAT_PRECISION', 12))
    lines = [f"# quad mesh: {len(mesh.vertices)} vertices, {len(mesh.faces)} faces"]
    for x, y, z in mesh.vertices:
        lines.append("v " + " ".join(format(c, f".{precision}g") for c in (x, y, z)))
    for face in mesh.faces:
        lines.append("f " + " ".join(str(k) for k in face))
    return "\n".join(lines) + "\n"


def write_obj(mesh: QuadMesh, path: str) -> None:
    with open(path, 'w', encoding='utf-8', newline='\n') as fh:
        fh.write(to_obj_text(mesh))
