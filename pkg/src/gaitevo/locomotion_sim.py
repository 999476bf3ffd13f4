"""Deterministic planar crawling surrogate producing the gait fitness.

The model is quasi-static: at every step the controller reshapes the body
(forward kinematics in the body frame), and the new shape is anchored to the
world by the rigid SE(2) transform that least-slips against the previous
world positions of the modules (2D Procrustes).  Net drift of that anchoring
is locomotion; fitness is the center-of-mass speed in cm/s.

A uniform least-squares fit maps centroid onto centroid exactly, which would
pin the center of mass forever.  Ground contact is therefore stick-slip:
each step, modules that barely moved within the shape grip the ground with a
high weight while fast-sweeping modules slip, and the fit minimizes the
grip-weighted slip.  Weights depend only on body-frame shape change, so the
update is equivariant under rigid motions of the initial pose, reciprocal
single-joint gaits still cancel, and an unchanged shape yields the identity
transform exactly.

Because the optimal fit commutes with rigid motions of its target, fitting
each new shape against the previous *world* layout equals composing the
accumulated pose with the fit between consecutive *body-frame* shapes.  The
implementation exploits this to vectorize whole trajectories; the step-wise
operators `crawl_step` (uniform weights) and `weighted_crawl_step` are the
references the batch path is tested against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .controller import WEIGHTS_PER_JOINT, integrate_outputs
from .morphology import BodyPlan, ModuleKind

_TINY = 1e-30


@dataclass(frozen=True)
class SimConfig:
    eval_time: float = 30.0
    dt: float = 1.0 / 240.0
    module_edge: float = 0.05
    joint_amplitude: float = math.pi / 3.0
    # relative grip loss of the fastest-sweeping module; None disables
    # stick-slip (uniform grip, which cannot translate the COM at all)
    grip_slip: float | None = 0.1
    # oscillators are sampled at cpg_rate * dt so gaits cycle many times
    # within one evaluation
    cpg_rate: float = 8.0

    def __post_init__(self):
        if self.eval_time <= 0 or self.dt <= 0:
            raise ValueError("eval_time and dt must be positive")
        steps = self.eval_time / self.dt
        if abs(steps - round(steps)) > 1e-9:
            raise ValueError("eval_time must be an integer number of dt steps")
        if self.grip_slip is not None and self.grip_slip <= 0:
            raise ValueError("grip_slip must be positive or None")
        if self.cpg_rate <= 0:
            raise ValueError("cpg_rate must be positive")

    @property
    def n_steps(self) -> int:
        return int(round(self.eval_time / self.dt))


@dataclass(frozen=True)
class Trajectory:
    """World pose of the body frame and center of mass, one row per step."""

    poses: np.ndarray  # (n_steps + 1, 3): x, y, theta
    com: np.ndarray  # (n_steps + 1, 2)

    @property
    def com_start(self) -> np.ndarray:
        return self.com[0]

    @property
    def com_end(self) -> np.ndarray:
        return self.com[-1]


def forward_kinematics(body: BodyPlan, joint_angles, module_edge: float = 0.05) -> np.ndarray:
    """Module center positions (meters, body frame) for one joint-angle vector.

    Each active hinge rotates its whole subtree about the hinge cell center,
    composing from the root outward.
    """
    angles = np.asarray(joint_angles, dtype=float).ravel()
    if angles.size != body.n_joints:
        raise ValueError(f"expected {body.n_joints} joint angles, got {angles.size}")
    return _fk_batch(body, angles[None, None, :], module_edge)[0, 0]


def _fk_batch(body: BodyPlan, joint_angles: np.ndarray, module_edge: float) -> np.ndarray:
    """Positions (B, S, M, 2) for joint angles (B, S, N)."""
    batch, steps, _ = joint_angles.shape
    n_modules = len(body.modules)
    positions = np.empty((batch, steps, n_modules, 2))
    # frame = None (identity) or (cos, sin, ux, uy) arrays of shape (B, S);
    # a module's frame excludes its own hinge rotation (its center is the pivot).
    frames: list[tuple | None] = [None] * n_modules
    for i, mod in enumerate(body.modules):
        if i == 0:
            frame = None
        else:
            parent = body.modules[mod.parent]
            frame = frames[mod.parent]
            if parent.kind is ModuleKind.ACTIVE_HINGE:
                phi = joint_angles[:, :, parent.joint_index]
                cx = parent.grid_pos[0] * module_edge
                cy = parent.grid_pos[1] * module_edge
                cp = np.cos(phi)
                sp = np.sin(phi)
                # rotation about the hinge center: (phi, c - R(phi) c)
                tx = cx - (cp * cx - sp * cy)
                ty = cy - (sp * cx + cp * cy)
                if frame is None:
                    frame = (cp, sp, tx, ty)
                else:
                    ca, sa, ux, uy = frame
                    frame = (
                        ca * cp - sa * sp,
                        sa * cp + ca * sp,
                        ca * tx - sa * ty + ux,
                        sa * tx + ca * ty + uy,
                    )
        frames[i] = frame
        gx = mod.grid_pos[0] * module_edge
        gy = mod.grid_pos[1] * module_edge
        if frame is None:
            positions[:, :, i, 0] = gx
            positions[:, :, i, 1] = gy
        else:
            ca, sa, ux, uy = frame
            positions[:, :, i, 0] = ca * gx - sa * gy + ux
            positions[:, :, i, 1] = sa * gx + ca * gy + uy
    return positions


def _fit(p: np.ndarray, q: np.ndarray, weights: np.ndarray | None) -> tuple[float, np.ndarray]:
    """Rigid transform minimizing the (weighted) squared slip of q onto p."""
    if weights is None:
        w = np.ones(p.shape[0])
    else:
        w = np.asarray(weights, dtype=float)
    wsum = w.sum()
    pc = (w[:, None] * p).sum(axis=0) / wsum
    qc = (w[:, None] * q).sum(axis=0) / wsum
    pp = p - pc
    qq = q - qc
    dot = float((w * (qq * pp).sum(axis=1)).sum())
    cross = float((w * (qq[:, 0] * pp[:, 1] - qq[:, 1] * pp[:, 0])).sum())
    phi = math.atan2(cross, dot)
    c, s = math.cos(phi), math.sin(phi)
    trans = pc - np.array([c * qc[0] - s * qc[1], s * qc[0] + c * qc[1]])
    return phi, trans


def crawl_step(prev_world_positions, new_body_positions) -> tuple[float, np.ndarray]:
    """Least-slip rigid transform (rotation phi, translation T) onto the previous layout.

    Minimizes sum ||R q_k + T - p_k||^2 over SE(2).  When all points coincide
    the fit is degenerate and collapses to the identity rotation with a pure
    centroid translation.
    """
    p = np.asarray(prev_world_positions, dtype=float)
    q = np.asarray(new_body_positions, dtype=float)
    if p.shape != q.shape or p.ndim != 2 or p.shape[1] != 2 or p.shape[0] < 1:
        raise ValueError("point sets must both have shape (M, 2) with M >= 1")
    return _fit(p, q, None)


def grip_weights(prev_shape, new_shape, slip: float) -> np.ndarray:
    """Stick-slip grip per module from how far it moved between two body shapes.

    Grip falls from 1 (stationary within the shape) to 1/(1 + slip) for the
    fastest-sweeping module.  The measure derives from body-frame shapes only,
    so it is invariant under the accumulated world pose.
    """
    p = np.asarray(prev_shape, dtype=float)
    q = np.asarray(new_shape, dtype=float)
    delta = np.hypot(q[:, 0] - p[:, 0], q[:, 1] - p[:, 1])
    return 1.0 / (1.0 + slip * delta / (delta.max() + _TINY))


def weighted_crawl_step(
    prev_world_positions, new_body_positions, weights
) -> tuple[float, np.ndarray]:
    """crawl_step under per-module grip weights; the world update used by evaluate."""
    p = np.asarray(prev_world_positions, dtype=float)
    q = np.asarray(new_body_positions, dtype=float)
    if p.shape != q.shape or p.ndim != 2 or p.shape[1] != 2 or p.shape[0] < 1:
        raise ValueError("point sets must both have shape (M, 2) with M >= 1")
    return _fit(p, q, np.asarray(weights, dtype=float))


def _crawl_accumulate(
    positions: np.ndarray, initial_pose, slip: float | None
) -> tuple[np.ndarray, np.ndarray]:
    """Accumulate world poses (B, S, 3) and world COM (B, S, 2) from body-frame shapes."""
    x0, y0, theta0 = (float(v) for v in initial_pose)
    batch, s, n_modules, _ = positions.shape
    if slip is None:
        w = np.ones((batch, s - 1, n_modules))
    else:
        delta = np.hypot(
            positions[:, 1:, :, 0] - positions[:, :-1, :, 0],
            positions[:, 1:, :, 1] - positions[:, :-1, :, 1],
        )
        w = 1.0 / (1.0 + slip * delta / (delta.max(axis=2)[:, :, None] + _TINY))
    wsum = w.sum(axis=2)
    # grip-weighted centroids of consecutive shapes
    cqx = (w * positions[:, 1:, :, 0]).sum(axis=2) / wsum
    cqy = (w * positions[:, 1:, :, 1]).sum(axis=2) / wsum
    cpx = (w * positions[:, :-1, :, 0]).sum(axis=2) / wsum
    cpy = (w * positions[:, :-1, :, 1]).sum(axis=2) / wsum
    qx = positions[:, 1:, :, 0] - cqx[:, :, None]
    qy = positions[:, 1:, :, 1] - cqy[:, :, None]
    px = positions[:, :-1, :, 0] - cpx[:, :, None]
    py = positions[:, :-1, :, 1] - cpy[:, :, None]
    dot = (w * (qx * px + qy * py)).sum(axis=2)
    cross = (w * (qx * py - qy * px)).sum(axis=2)
    phi = np.arctan2(cross, dot)  # (B, S-1) incremental fit rotations
    cp = np.cos(phi)
    sp = np.sin(phi)
    # incremental fit translation: weighted previous centroid minus rotated new one
    tfx = cpx - (cp * cqx - sp * cqy)
    tfy = cpy - (sp * cqx + cp * cqy)
    theta = np.empty((batch, s))
    theta[:, 0] = theta0
    np.cumsum(phi, axis=1, out=theta[:, 1:])
    theta[:, 1:] += theta0
    # compose translations: u_t = u_{t-1} + R(theta_{t-1}) tf_t
    ct = np.cos(theta[:, :-1])
    st = np.sin(theta[:, :-1])
    ux = np.empty((batch, s))
    uy = np.empty((batch, s))
    ux[:, 0] = x0
    uy[:, 0] = y0
    np.cumsum(ct * tfx - st * tfy, axis=1, out=ux[:, 1:])
    np.cumsum(st * tfx + ct * tfy, axis=1, out=uy[:, 1:])
    ux[:, 1:] += x0
    uy[:, 1:] += y0
    c = positions.mean(axis=2)  # (B, S, 2) uniform centroid = center of mass
    cth = np.cos(theta)
    sth = np.sin(theta)
    com = np.empty((batch, s, 2))
    com[:, :, 0] = cth * c[:, :, 0] - sth * c[:, :, 1] + ux
    com[:, :, 1] = sth * c[:, :, 0] + cth * c[:, :, 1] + uy
    poses = np.stack([ux, uy, theta], axis=2)
    return poses, com


def _body_shapes(body: BodyPlan, weights: np.ndarray, cfg: SimConfig) -> np.ndarray:
    outputs = integrate_outputs(weights, cfg.n_steps, cfg.dt * cfg.cpg_rate)
    angles = cfg.joint_amplitude * outputs
    return _fk_batch(body, angles, cfg.module_edge)


def evaluate_batch(body: BodyPlan, weights, cfg: SimConfig) -> np.ndarray:
    """Gait fitness (cm/s) for each row of a (B, 3N) weight matrix."""
    w = np.atleast_2d(np.asarray(weights, dtype=float))
    if body.n_joints == 0:
        return np.zeros(w.shape[0])
    if w.shape[1] != WEIGHTS_PER_JOINT * body.n_joints:
        raise ValueError("weight rows must have length 3N")
    shapes = _body_shapes(body, w, cfg)
    _, com = _crawl_accumulate(shapes, (0.0, 0.0, 0.0), cfg.grip_slip)
    disp = np.hypot(com[:, -1, 0] - com[:, 0, 0], com[:, -1, 1] - com[:, 0, 1])
    return disp / cfg.eval_time * 100.0


def evaluate(body: BodyPlan, weights, cfg: SimConfig) -> float:
    """Gait fitness (cm/s) of one weight vector; 0 for bodies without joints."""
    if body.n_joints == 0:
        return 0.0
    return float(evaluate_batch(body, np.asarray(weights, dtype=float)[None, :], cfg)[0])


def simulate(body: BodyPlan, weights, cfg: SimConfig, initial_pose=(0.0, 0.0, 0.0)) -> tuple[float, Trajectory]:
    """Full trajectory of one robot; fitness is invariant to the initial pose."""
    if body.n_joints == 0:
        w = np.zeros((1, 0))
    else:
        w = np.asarray(weights, dtype=float)[None, :]
        if w.shape[1] != WEIGHTS_PER_JOINT * body.n_joints:
            raise ValueError("weight vector must have length 3N")
    shapes = _body_shapes(body, w, cfg)
    poses, com = _crawl_accumulate(shapes, initial_pose, cfg.grip_slip)
    disp = math.hypot(com[0, -1, 0] - com[0, 0, 0], com[0, -1, 1] - com[0, 0, 1])
    fitness = disp / cfg.eval_time * 100.0
    return fitness, Trajectory(poses=poses[0], com=com[0])


def format_trajectory(traj: Trajectory, dt: float) -> str:
    """Step-indexed rows: t, com_x, com_y, theta."""
    lines = ["# t com_x com_y theta"]
    for i in range(traj.poses.shape[0]):
        t = i * dt
        lines.append(
            f"{t:.6f} {traj.com[i, 0]:.9g} {traj.com[i, 1]:.9g} {traj.poses[i, 2]:.9g}"
        )
    return "\n".join(lines) + "\n"
