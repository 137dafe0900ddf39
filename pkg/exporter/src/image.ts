/**
 * Procedural image source.
 *
 * Each class is a seeded texture recipe (two sinusoidal gratings plus a
 * colored blob); each sample jitters the recipe's phases/positions and adds
 * pixel noise. This stands in for a real image folder so the full
 * image -> augmentation -> frozen backbone -> PCE1 pipeline can run and be
 * tested deterministically without any dataset download.
 */

import { Rng } from "./rng.js";

/** RGB image, channels interleaved, values in [0, 1]. */
export interface Image {
  width: number;
  height: number;
  data: Float32Array; // length = width * height * 3
}

export interface ClassRecipe {
  freqX: number;
  freqY: number;
  angle: number;
  color: [number, number, number];
  blobX: number;
  blobY: number;
  blobR: number;
}

export function makeImage(width: number, height: number): Image {
  return { width, height, data: new Float32Array(width * height * 3) };
}

export function classRecipe(classId: number, datasetSeed: number): ClassRecipe {
  const rng = new Rng(datasetSeed ^ Math.imul(classId + 1, 0x9e3779b1));
  return {
    freqX: rng.uniform(0.2, 1.2),
    freqY: rng.uniform(0.2, 1.2),
    angle: rng.uniform(0, Math.PI),
    color: [rng.uniform(0.2, 1), rng.uniform(0.2, 1), rng.uniform(0.2, 1)],
    blobX: rng.uniform(0.2, 0.8),
    blobY: rng.uniform(0.2, 0.8),
    blobR: rng.uniform(0.12, 0.3),
  };
}

/** Render one sample of a class with per-sample jitter and pixel noise. */
export function renderSample(
  recipe: ClassRecipe,
  size: number,
  rng: Rng,
  pixelNoise = 0.15,
): Image {
  const img = makeImage(size, size);
  const phase = rng.uniform(0, 2 * Math.PI);
  const jx = recipe.blobX + rng.uniform(-0.08, 0.08);
  const jy = recipe.blobY + rng.uniform(-0.08, 0.08);
  const cos = Math.cos(recipe.angle);
  const sin = Math.sin(recipe.angle);
  for (let y = 0; y < size; y++) {
    for (let x = 0; x < size; x++) {
      const u = x / size;
      const v = y / size;
      const ru = u * cos - v * sin;
      const rv = u * sin + v * cos;
      const grating =
        0.5 +
        0.25 * Math.sin(2 * Math.PI * recipe.freqX * ru * 8 + phase) +
        0.25 * Math.sin(2 * Math.PI * recipe.freqY * rv * 8);
      const d2 = (u - jx) * (u - jx) + (v - jy) * (v - jy);
      const blob = Math.exp(-d2 / (2 * recipe.blobR * recipe.blobR));
      const base = y * size + x;
      for (let c = 0; c < 3; c++) {
        const value =
          grating * recipe.color[c] + blob * (1 - recipe.color[c]) + pixelNoise * rng.gauss();
        img.data[base * 3 + c] = Math.min(1, Math.max(0, value));
      }
    }
  }
  return img;
}
