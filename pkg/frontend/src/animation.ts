/** Client-side particle advection over the sampled field (canvas layer).
 * Particles step by barycentric interpolation of the fetched mesh and
 * respawn at deterministic pseudo-random spots on exit or stagnation. */

import type { FieldMesh } from "./types.js";

export interface Particle {
  x: number;
  y: number;
  age: number;
}

export class FieldSampler {
  private tris: [number, number, number][];
  private verts: [number, number][];
  private vecs: [number, number][];

  constructor(mesh: FieldMesh) {
    this.tris = mesh.triangles;
    this.verts = mesh.vertices;
    this.vecs = mesh.vectors;
  }

  /** Linear search point location; fine for animation-sized meshes. */
  sample(x: number, y: number): [number, number] | null {
    for (const [a, b, c] of this.tris) {
      const [ax, ay] = this.verts[a];
      const [bx, by] = this.verts[b];
      const [cx, cy] = this.verts[c];
      const det = (by - cy) * (ax - cx) + (cx - bx) * (ay - cy);
      if (det === 0) continue;
      const l0 = ((by - cy) * (x - cx) + (cx - bx) * (y - cy)) / det;
      const l1 = ((cy - ay) * (x - cx) + (ax - cx) * (y - cy)) / det;
      const l2 = 1 - l0 - l1;
      if (l0 >= -1e-9 && l1 >= -1e-9 && l2 >= -1e-9) {
        const va = this.vecs[a];
        const vb = this.vecs[b];
        const vc = this.vecs[c];
        return [
          l0 * va[0] + l1 * vb[0] + l2 * vc[0],
          l0 * va[1] + l1 * vb[1] + l2 * vc[1],
        ];
      }
    }
    return null;
  }
}

/** Deterministic lightweight PRNG so the animation is reproducible. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function spawn(rand: () => number): Particle {
  for (;;) {
    const x = rand() * 2 - 1;
    const y = rand() * 2 - 1;
    if (x * x + y * y < 0.9) {
      return { x, y, age: 0 };
    }
  }
}

export interface AdvectOptions {
  dt: number;
  maxAge: number;
  stagnantSpeed: number;
}

export const DEFAULT_ADVECT: AdvectOptions = {
  dt: 0.012,
  maxAge: 220,
  stagnantSpeed: 1e-4,
};

/** One animation step; respawns particles that exit the disk, stagnate at a
 * sink or exceed their lifetime. Mutates and returns the array. */
export function advect(
  particles: Particle[],
  sampler: FieldSampler,
  rand: () => number,
  opts: AdvectOptions = DEFAULT_ADVECT,
): Particle[] {
  for (let i = 0; i < particles.length; i++) {
    const p = particles[i];
    const v = sampler.sample(p.x, p.y);
    const speed = v ? Math.hypot(v[0], v[1]) : 0;
    p.age += 1;
    if (!v || speed < opts.stagnantSpeed || p.age > opts.maxAge) {
      particles[i] = spawn(rand);
      continue;
    }
    const scale = opts.dt / Math.max(speed, 0.05);
    p.x += v[0] * scale;
    p.y += v[1] * scale;
    if (p.x * p.x + p.y * p.y >= 1) {
      particles[i] = spawn(rand);
    }
  }
  return particles;
}
