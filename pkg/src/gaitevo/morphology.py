"""Decode symbol strings into planar modular bodies and measure their shape.

Bodies live on an integer grid: one core at the origin, bricks and active
hinges attached face to face, forming a tree.  The decoder is a turtle walk;
placements that would collide or exceed the module cap are skipped so every
string maps to some body.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .lsystem import ACTIVE_HINGE, BRICK, CORE, MOUNT_FRONT, MOUNT_LEFT, MOUNT_RIGHT, MOVE_BACK

MAX_MODULES = 15

FACE_FRONT = "front"
FACE_LEFT = "left"
FACE_RIGHT = "right"


class EmptyBody(Exception):
    """No module besides the core could be placed: a degenerate genotype."""


class ModuleKind(enum.Enum):
    CORE = "core"
    BRICK = "brick"
    ACTIVE_HINGE = "active_hinge"


_KIND_FOR_SYMBOL = {BRICK: ModuleKind.BRICK, ACTIVE_HINGE: ModuleKind.ACTIVE_HINGE}


@dataclass(frozen=True)
class Module:
    kind: ModuleKind
    grid_pos: tuple[int, int]
    parent: int | None
    attachment_face: str | None
    joint_index: int | None
    heading: tuple[int, int]


@dataclass(frozen=True)
class BodyPlan:
    """Connected tree of modules rooted at the core."""

    modules: tuple[Module, ...]

    def __post_init__(self):
        if not self.modules or self.modules[0].kind is not ModuleKind.CORE:
            raise ValueError("body must start with a core module at index 0")
        if self.modules[0].grid_pos != (0, 0):
            raise ValueError("core must sit at the grid origin")
        if len(self.modules) > MAX_MODULES:
            raise ValueError(f"body exceeds {MAX_MODULES} modules")
        cells = set()
        joints = 0
        for i, m in enumerate(self.modules):
            if m.grid_pos in cells:
                raise ValueError("two modules share a grid cell")
            cells.add(m.grid_pos)
            if i == 0:
                if m.parent is not None:
                    raise ValueError("core has no parent")
            else:
                if m.kind is ModuleKind.CORE:
                    raise ValueError("only one core allowed")
                if m.parent is None or not 0 <= m.parent < i:
                    raise ValueError("parents must precede children")
            if m.kind is ModuleKind.ACTIVE_HINGE:
                if m.joint_index != joints:
                    raise ValueError("joint indices must be 0..N-1 in module order")
                joints += 1
            elif m.joint_index is not None:
                raise ValueError("only active hinges carry a joint index")

    @property
    def n_joints(self) -> int:
        return sum(1 for m in self.modules if m.kind is ModuleKind.ACTIVE_HINGE)

    @property
    def bounding_box(self) -> tuple[int, int]:
        """(width, length) in cells; width is perpendicular to the core's heading."""
        xs = [m.grid_pos[0] for m in self.modules]
        ys = [m.grid_pos[1] for m in self.modules]
        return (max(ys) - min(ys) + 1, max(xs) - min(xs) + 1)

    def children_counts(self) -> list[int]:
        counts = [0] * len(self.modules)
        for m in self.modules[1:]:
            counts[m.parent] += 1
        return counts


def _face_direction(heading: tuple[int, int], face: str) -> tuple[int, int]:
    hx, hy = heading
    if face == FACE_FRONT:
        return (hx, hy)
    if face == FACE_LEFT:
        return (-hy, hx)
    if face == FACE_RIGHT:
        return (hy, -hx)
    raise ValueError(f"unknown face {face!r}")


def decode(symbols, max_modules: int = MAX_MODULES) -> BodyPlan:
    """Turtle-walk a symbol sequence into a BodyPlan.

    Module symbols place a module on the selected face of the current module
    and advance the cursor onto it; mounting commands select a face;
    move-back-to-parent retreats the cursor.  Collisions and placements past
    the module cap are skipped.  Raises EmptyBody if module symbols were
    present but nothing besides the core could be placed.
    """
    symbols = list(symbols)
    if not symbols or symbols[0] != CORE:
        raise ValueError("symbol sequence must begin with the core symbol")
    modules = [Module(ModuleKind.CORE, (0, 0), None, None, None, (1, 0))]
    occupied = {(0, 0)}
    current = 0
    face = FACE_FRONT
    joints = 0
    saw_module_symbol = False
    for sym in symbols[1:]:
        if sym in (BRICK, ACTIVE_HINGE):
            saw_module_symbol = True
            if len(modules) >= max_modules:
                continue
            cur = modules[current]
            d = _face_direction(cur.heading, face)
            cell = (cur.grid_pos[0] + d[0], cur.grid_pos[1] + d[1])
            if cell in occupied:
                continue
            joint_index = None
            if sym == ACTIVE_HINGE:
                joint_index = joints
                joints += 1
            modules.append(Module(_KIND_FOR_SYMBOL[sym], cell, current, face, joint_index, d))
            occupied.add(cell)
            current = len(modules) - 1
            face = FACE_FRONT
        elif sym == CORE:
            saw_module_symbol = True  # a second core can never be placed
        elif sym == MOUNT_FRONT:
            face = FACE_FRONT
        elif sym == MOUNT_LEFT:
            face = FACE_LEFT
        elif sym == MOUNT_RIGHT:
            face = FACE_RIGHT
        elif sym == MOVE_BACK:
            parent = modules[current].parent
            if parent is not None:
                current = parent
            face = FACE_FRONT
        else:
            raise ValueError(f"unknown symbol {sym!r}")
    if saw_module_symbol and len(modules) == 1:
        raise EmptyBody("no module besides the core could be placed")
    return BodyPlan(tuple(modules))


def core_only_body() -> BodyPlan:
    """The degenerate single-core body used when decode raises EmptyBody."""
    return decode([CORE])


@dataclass(frozen=True)
class DescriptorVector:
    absolute_size: int
    width: int
    proportion: float
    n_bricks: int
    rel_limbs: float
    n_active_hinges: int


def max_limbs(m: int) -> int:
    """Most one-face modules an m-module body could have, rearranged freely."""
    if m >= 6:
        return 2 * (m - 6) // 3 + (m - 6) % 3 + 4
    return m - 1


def descriptors(body: BodyPlan) -> DescriptorVector:
    """The six morphological descriptors of a body."""
    m = len(body.modules)
    n_bricks = sum(1 for mod in body.modules if mod.kind is ModuleKind.BRICK)
    n_hinges = body.n_joints
    width, length = body.bounding_box
    proportion = min(width, length) / max(width, length)
    counts = body.children_counts()
    # Attached faces of a non-core module = 1 (parent link) + children.
    limbs = sum(1 for i in range(1, m) if counts[i] == 0)
    l_max = max_limbs(m)
    rel_limbs = limbs / l_max if l_max > 0 else 0.0
    return DescriptorVector(
        absolute_size=m,
        width=width,
        proportion=proportion,
        n_bricks=n_bricks,
        rel_limbs=rel_limbs,
        n_active_hinges=n_hinges,
    )


BODY_EXPORT_COLUMNS = ("id", "kind", "x", "y", "parent", "face")


def format_body(body: BodyPlan) -> str:
    """One module per line: id, kind, x, y, parent, face (stable column order)."""
    lines = [",".join(BODY_EXPORT_COLUMNS)]
    for i, m in enumerate(body.modules):
        parent = "" if m.parent is None else str(m.parent)
        face = "" if m.attachment_face is None else m.attachment_face
        lines.append(f"{i},{m.kind.value},{m.grid_pos[0]},{m.grid_pos[1]},{parent},{face}")
    return "\n".join(lines) + "\n"
