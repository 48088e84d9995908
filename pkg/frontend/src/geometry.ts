/** Projection helpers for sphere and rotation-group figures. */

export interface Vec3 {
  x: number;
  y: number;
  z: number;
}

export interface Projected {
  u: number;
  v: number;
  depth: number;
}

/** Fixed viewing direction shared by all 3D figures (deterministic output). */
const AZIMUTH = Math.PI / 7;
const ELEVATION = Math.PI / 9;

const view = (() => {
  const ca = Math.cos(AZIMUTH);
  const sa = Math.sin(AZIMUTH);
  const ce = Math.cos(ELEVATION);
  const se = Math.sin(ELEVATION);
  const eye: Vec3 = { x: ce * ca, y: ce * sa, z: se };
  const right: Vec3 = { x: -sa, y: ca, z: 0 };
  const up: Vec3 = {
    x: eye.y * right.z - eye.z * right.y,
    y: eye.z * right.x - eye.x * right.z,
    z: eye.x * right.y - eye.y * right.x,
  };
  return { eye, right, up };
})();

export function orthographic(p: Vec3): Projected {
  return {
    u: p.x * view.right.x + p.y * view.right.y + p.z * view.right.z,
    v: p.x * view.up.x + p.y * view.up.y + p.z * view.up.z,
    depth: p.x * view.eye.x + p.y * view.eye.y + p.z * view.eye.z,
  };
}

/** Rotation angle arccos((trace - 1)/2) of a row-major 3x3 matrix. */
export function rotationAngle(m: number[]): number {
  const tr = m[0] + m[4] + m[8];
  return Math.acos(Math.min(1, Math.max(-1, (tr - 1) / 2)));
}

/** Rotation axis; the eigenvector route handles angles near 0 and pi. */
export function rotationAxis(m: number[]): Vec3 {
  const angle = rotationAngle(m);
  const s = Math.sin(angle);
  if (s >= 1e-6) {
    const x = (m[7] - m[5]) / (2 * s);
    const y = (m[2] - m[6]) / (2 * s);
    const z = (m[3] - m[1]) / (2 * s);
    const n = Math.hypot(x, y, z);
    return { x: x / n, y: y / n, z: z / n };
  }
  if (angle < 1e-6) {
    return { x: 0, y: 0, z: 1 };
  }
  // angle ~ pi: n n^T = (R + I)/2; take the dominant column
  const cols = [
    { x: (m[0] + 1) / 2, y: m[3] / 2, z: m[6] / 2 },
    { x: m[1] / 2, y: (m[4] + 1) / 2, z: m[7] / 2 },
    { x: m[2] / 2, y: m[5] / 2, z: (m[8] + 1) / 2 },
  ];
  const diag = [cols[0].x, cols[1].y, cols[2].z];
  const k = diag.indexOf(Math.max(...diag));
  const c = cols[k];
  const n = Math.hypot(c.x, c.y, c.z);
  return { x: c.x / n, y: c.y / n, z: c.z / n };
}

/** Axis-angle ball embedding of a rotation: the point tan(angle/4) * axis. */
export function so3BallPoint(m: number[]): Vec3 {
  const angle = rotationAngle(m);
  const r = Math.tan(angle / 4);
  if (r === 0) {
    return { x: 0, y: 0, z: 0 };
  }
  const axis = rotationAxis(m);
  return { x: r * axis.x, y: r * axis.y, z: r * axis.z };
}

export function sphericalToCartesian(theta: number, phi: number): Vec3 {
  return {
    x: Math.cos(phi) * Math.sin(theta),
    y: Math.sin(phi) * Math.sin(theta),
    z: Math.cos(theta),
  };
}
