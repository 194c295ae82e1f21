"""Line-oriented scene files with linear per-frame animation.

Layout::

    # comment
    WIDTH HEIGHT FRAMES [DX DY]
    SHADER  x y z r g b [u v]  x y z r g b [u v]  x y z r g b [u v]  [move DX DY]

SHADER is FLAT, GOURAUD or CHECKER:<cell>. Colors are reals in [0, 1]. The
header delta moves every triangle by (DX, DY) pixels per frame; a trailing
``move`` clause overrides it for one triangle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from dsrsim.pipeline import Shader, Triangle, Vertex


class SceneFormatError(ValueError):
    pass


@dataclass
class Scene:
    width: int
    height: int
    frame_count: int
    triangles: list[Triangle]
    deltas: list[tuple[float, float]] = field(default_factory=list)

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0 or self.frame_count <= 0:
            raise SceneFormatError("scene width, height and frame count must be positive")
        if not self.deltas:
            self.deltas = [(0.0, 0.0)] * len(self.triangles)
        if len(self.deltas) != len(self.triangles):
            raise SceneFormatError("one delta per triangle required")

    def at(self, frame_index: int) -> list[Triangle]:
        return [
            t.moved(dx * frame_index, dy * frame_index) if (dx or dy) else t
            for t, (dx, dy) in zip(self.triangles, self.deltas)
        ]

    def frames(self) -> list[list[Triangle]]:
        return [self.at(i) for i in range(self.frame_count)]


def _parse_shader(tag: str) -> Shader:
    kind, _, cell = tag.partition(":")
    kind = kind.upper()
    if kind == "CHECKER":
        return Shader(kind, float(cell) if cell else 8.0)
    return Shader(kind)


def _parse_vertices(nums: list[float]) -> tuple[Vertex, Vertex, Vertex]:
    if len(nums) not in (18, 24):
        raise SceneFormatError(f"expected 18 or 24 vertex numbers, got {len(nums)}")
    per = len(nums) // 3
    verts = []
    for i in range(3):
        v = nums[i * per : (i + 1) * per]
        uv = (v[6], v[7]) if per == 8 else (0.0, 0.0)
        verts.append(Vertex(v[0], v[1], v[2], (v[3], v[4], v[5], 1.0), uv))
    return tuple(verts)


def parse_scene(text: str, source: str = "<scene>") -> Scene:
    header = None
    tris: list[Triangle] = []
    deltas: list[tuple[float, float]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        try:
            if header is None:
                if len(fields) not in (3, 5):
                    raise SceneFormatError("header needs WIDTH HEIGHT FRAMES [DX DY]")
                w, h, f = (int(x) for x in fields[:3])
                dx, dy = (float(x) for x in fields[3:5]) if len(fields) == 5 else (0.0, 0.0)
                header = (w, h, f, (dx, dy))
                continue
            move = None
            if "move" in fields:
                k = fields.index("move")
                if len(fields) != k + 3:
                    raise SceneFormatError("move clause needs exactly DX DY")
                move = (float(fields[k + 1]), float(fields[k + 2]))
                fields = fields[:k]
            shader = _parse_shader(fields[0])
            v0, v1, v2 = _parse_vertices([float(x) for x in fields[1:]])
        except SceneFormatError as exc:
            raise SceneFormatError(f"{source}:{lineno}: {exc}") from None
        except ValueError as exc:
            raise SceneFormatError(f"{source}:{lineno}: {exc}") from None
        tris.append(Triangle(v0, v1, v2, shader))
        deltas.append(move if move is not None else header[3])
    if header is None:
        raise SceneFormatError(f"{source}: missing header line")
    w, h, f, _ = header
    return Scene(w, h, f, tris, deltas)


def read_scene(path) -> Scene:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SceneFormatError(f"{path}: cannot read ({exc.strerror})") from None
    return parse_scene(text, str(path))


def format_scene(scene: Scene) -> str:
    lines = [f"{scene.width} {scene.height} {scene.frame_count}"]
    for tri, (dx, dy) in zip(scene.triangles, scene.deltas):
        parts = [str(tri.shader)]
        for v in (tri.v0, tri.v1, tri.v2):
            parts += [repr(v.x), repr(v.y), repr(v.z), *(repr(c) for c in v.color[:3]), *(repr(u) for u in v.uv)]
        if dx or dy:
            parts += ["move", repr(dx), repr(dy)]
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"
