/**
 * Frozen feature backbone.
 *
 * A deterministic seeded stand-in for a pretrained network: the image is
 * pooled into a grid of per-channel patch statistics (mean + mean absolute
 * horizontal/vertical gradient), then passed through a fixed random
 * projection with a tanh nonlinearity. Weights are generated once from the
 * backbone seed and never updated, so the same id always produces the same
 * embedding for the same image — the contract the incremental engine relies
 * on. Output dimension defaults to 2048 to match common ResNet-50-width
 * feature exports.
 */

import { Image } from "./image.js";
import { Rng } from "./rng.js";

export interface Backbone {
  id: string;
  gridSize: number;
  inputDim: number;
  outputDim: number;
  weights: Float32Array; // outputDim x inputDim, row-major
  bias: Float32Array;
}

export function createBackbone(seed: number, gridSize = 8, outputDim = 2048): Backbone {
  // 3 statistics (mean, |dx|, |dy|) per channel per grid cell
  const inputDim = gridSize * gridSize * 3 * 3;
  const rng = new Rng(seed);
  const weights = new Float32Array(outputDim * inputDim);
  const scale = 1 / Math.sqrt(inputDim);
  for (let i = 0; i < weights.length; i++) weights[i] = scale * rng.gauss();
  const bias = new Float32Array(outputDim);
  for (let i = 0; i < outputDim; i++) bias[i] = 0.1 * rng.gauss();
  return { id: `seeded-patch-projection-v1/${seed}/g${gridSize}/d${outputDim}`, gridSize, inputDim, outputDim, weights, bias };
}

/**
 * Pool the image into the backbone's patch-statistics vector.
 *
 * Statistics are averaged over each grid cell and its horizontal mirror
 * cell, which makes the representation exactly invariant to horizontal
 * flips — the invariance a pretrained backbone would have learned and the
 * weak-augmentation policy relies on.
 */
export function patchStatistics(img: Image, gridSize: number): Float32Array {
  const raw = rawPatchStatistics(img, gridSize);
  const stats = new Float32Array(raw.length);
  for (let gy = 0; gy < gridSize; gy++) {
    for (let gx = 0; gx < gridSize; gx++) {
      const cell = (gy * gridSize + gx) * 9;
      const mirror = (gy * gridSize + (gridSize - 1 - gx)) * 9;
      for (let k = 0; k < 9; k++) stats[cell + k] = 0.5 * (raw[cell + k] + raw[mirror + k]);
    }
  }
  return stats;
}

function rawPatchStatistics(img: Image, gridSize: number): Float32Array {
  const stats = new Float32Array(gridSize * gridSize * 9);
  const cellW = img.width / gridSize;
  const cellH = img.height / gridSize;
  for (let gy = 0; gy < gridSize; gy++) {
    for (let gx = 0; gx < gridSize; gx++) {
      const x0 = Math.floor(gx * cellW);
      const x1 = Math.max(x0 + 1, Math.floor((gx + 1) * cellW));
      const y0 = Math.floor(gy * cellH);
      const y1 = Math.max(y0 + 1, Math.floor((gy + 1) * cellH));
      const n = (x1 - x0) * (y1 - y0);
      for (let c = 0; c < 3; c++) {
        let mean = 0;
        let dx = 0;
        let dy = 0;
        for (let y = y0; y < y1; y++) {
          for (let x = x0; x < x1; x++) {
            const p = img.data[(y * img.width + x) * 3 + c];
            mean += p;
            if (x + 1 < img.width) dx += Math.abs(img.data[(y * img.width + x + 1) * 3 + c] - p);
            if (y + 1 < img.height) dy += Math.abs(img.data[((y + 1) * img.width + x) * 3 + c] - p);
          }
        }
        const cell = (gy * gridSize + gx) * 9 + c * 3;
        stats[cell] = mean / n;
        stats[cell + 1] = dx / n;
        stats[cell + 2] = dy / n;
      }
    }
  }
  return stats;
}

/** Embed one image: pooled statistics through the frozen projection. */
export function embed(backbone: Backbone, img: Image): Float32Array {
  const x = patchStatistics(img, backbone.gridSize);
  const out = new Float32Array(backbone.outputDim);
  for (let i = 0; i < backbone.outputDim; i++) {
    let acc = backbone.bias[i];
    const row = i * backbone.inputDim;
    for (let j = 0; j < backbone.inputDim; j++) acc += backbone.weights[row + j] * x[j];
    out[i] = Math.tanh(acc);
  }
  return out;
}
