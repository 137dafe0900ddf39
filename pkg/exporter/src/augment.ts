/**
 * Weak and strong augmentation policies.
 *
 * Weak: random resized crop (scale 0.7-1.0) plus horizontal flip with
 * probability 0.5 — basic image operations only.
 *
 * Strong: pick `numOps` operations at random from a RandAugment-style pool
 * (brightness, contrast, saturation, translate, cutout, noise, posterize),
 * each applied at a magnitude drawn up to `magnitude`.
 */

import { Image, makeImage } from "./image.js";
import { Rng } from "./rng.js";

export interface WeakPolicy {
  minScale: number; // crop area scale lower bound
  flipProbability: number;
}

export interface StrongPolicy {
  numOps: number;
  magnitude: number; // in [0, 1]
  /** Include spatial ops (translate, cutout). Off by default: the frozen
   * backbone is not translation-invariant, so spatial ops move embeddings
   * off the class manifold instead of perturbing within it. */
  spatialOps?: boolean;
}

export const DEFAULT_WEAK: WeakPolicy = { minScale: 0.97, flipProbability: 0.5 };
export const DEFAULT_STRONG: StrongPolicy = { numOps: 2, magnitude: 0.5, spatialOps: false };

function sampleBilinear(img: Image, x: number, y: number, c: number): number {
  const x0 = Math.max(0, Math.min(img.width - 1, Math.floor(x)));
  const y0 = Math.max(0, Math.min(img.height - 1, Math.floor(y)));
  const x1 = Math.min(img.width - 1, x0 + 1);
  const y1 = Math.min(img.height - 1, y0 + 1);
  const fx = x - x0;
  const fy = y - y0;
  const at = (xx: number, yy: number) => img.data[(yy * img.width + xx) * 3 + c];
  return (
    at(x0, y0) * (1 - fx) * (1 - fy) +
    at(x1, y0) * fx * (1 - fy) +
    at(x0, y1) * (1 - fx) * fy +
    at(x1, y1) * fx * fy
  );
}

/** Crop a random square region and resize back to the original size. */
export function randomResizedCrop(img: Image, rng: Rng, minScale: number): Image {
  const scale = Math.sqrt(rng.uniform(minScale, 1.0));
  const cw = Math.max(1, Math.round(img.width * scale));
  const ch = Math.max(1, Math.round(img.height * scale));
  const ox = rng.int(img.width - cw + 1);
  const oy = rng.int(img.height - ch + 1);
  const out = makeImage(img.width, img.height);
  for (let y = 0; y < img.height; y++) {
    for (let x = 0; x < img.width; x++) {
      const sx = ox + (x / (img.width - 1 || 1)) * (cw - 1);
      const sy = oy + (y / (img.height - 1 || 1)) * (ch - 1);
      for (let c = 0; c < 3; c++) {
        out.data[(y * img.width + x) * 3 + c] = sampleBilinear(img, sx, sy, c);
      }
    }
  }
  return out;
}

export function horizontalFlip(img: Image): Image {
  const out = makeImage(img.width, img.height);
  for (let y = 0; y < img.height; y++) {
    for (let x = 0; x < img.width; x++) {
      const src = (y * img.width + (img.width - 1 - x)) * 3;
      const dst = (y * img.width + x) * 3;
      out.data[dst] = img.data[src];
      out.data[dst + 1] = img.data[src + 1];
      out.data[dst + 2] = img.data[src + 2];
    }
  }
  return out;
}

export function applyWeak(img: Image, rng: Rng, policy: WeakPolicy = DEFAULT_WEAK): Image {
  let out = randomResizedCrop(img, rng, policy.minScale);
  if (rng.next() < policy.flipProbability) out = horizontalFlip(out);
  return out;
}

type StrongOp = (img: Image, m: number, rng: Rng) => Image;

function mapPixels(img: Image, fn: (value: number, c: number) => number): Image {
  const out = makeImage(img.width, img.height);
  for (let i = 0; i < img.data.length; i++) {
    out.data[i] = Math.min(1, Math.max(0, fn(img.data[i], i % 3)));
  }
  return out;
}

const brightness: StrongOp = (img, m, rng) =>
  mapPixels(img, (v) => v + rng.uniform(-m, m) * 0.6);

const contrast: StrongOp = (img, m, rng) => {
  let mean = 0;
  for (const v of img.data) mean += v;
  mean /= img.data.length;
  const factor = 1 + rng.uniform(-m, m);
  return mapPixels(img, (v) => mean + factor * (v - mean));
};

const saturation: StrongOp = (img, m, rng) => {
  const factor = 1 + rng.uniform(-m, m);
  const out = makeImage(img.width, img.height);
  for (let p = 0; p < img.data.length; p += 3) {
    const grey = (img.data[p] + img.data[p + 1] + img.data[p + 2]) / 3;
    for (let c = 0; c < 3; c++) {
      const v = grey + factor * (img.data[p + c] - grey);
      out.data[p + c] = Math.min(1, Math.max(0, v));
    }
  }
  return out;
};

const translate: StrongOp = (img, m, rng) => {
  const dx = Math.round(rng.uniform(-m, m) * img.width * 0.3);
  const dy = Math.round(rng.uniform(-m, m) * img.height * 0.3);
  const out = makeImage(img.width, img.height);
  for (let y = 0; y < img.height; y++) {
    for (let x = 0; x < img.width; x++) {
      const sx = Math.min(img.width - 1, Math.max(0, x - dx));
      const sy = Math.min(img.height - 1, Math.max(0, y - dy));
      for (let c = 0; c < 3; c++) {
        out.data[(y * img.width + x) * 3 + c] = img.data[(sy * img.width + sx) * 3 + c];
      }
    }
  }
  return out;
};

const cutout: StrongOp = (img, m, rng) => {
  const size = Math.max(1, Math.round(m * img.width * 0.5));
  const ox = rng.int(img.width);
  const oy = rng.int(img.height);
  const out = makeImage(img.width, img.height);
  out.data.set(img.data);
  for (let y = oy; y < Math.min(img.height, oy + size); y++) {
    for (let x = ox; x < Math.min(img.width, ox + size); x++) {
      const p = (y * img.width + x) * 3;
      out.data[p] = out.data[p + 1] = out.data[p + 2] = 0.5;
    }
  }
  return out;
};

const noise: StrongOp = (img, m, rng) => mapPixels(img, (v) => v + m * 0.25 * rng.gauss());

const posterize: StrongOp = (img, m, _rng) => {
  const levels = Math.max(2, Math.round(8 - 6 * m));
  return mapPixels(img, (v) => Math.round(v * (levels - 1)) / (levels - 1));
};

const PHOTOMETRIC_OPS: StrongOp[] = [brightness, contrast, saturation, noise, posterize];
const SPATIAL_OPS: StrongOp[] = [translate, cutout];

export function applyStrong(img: Image, rng: Rng, policy: StrongPolicy = DEFAULT_STRONG): Image {
  const pool = policy.spatialOps ? PHOTOMETRIC_OPS.concat(SPATIAL_OPS) : PHOTOMETRIC_OPS;
  let out = img;
  for (let k = 0; k < policy.numOps; k++) {
    const op = pool[rng.int(pool.length)];
    out = op(out, policy.magnitude, rng);
  }
  return out;
}
