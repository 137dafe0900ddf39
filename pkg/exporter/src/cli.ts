#!/usr/bin/env node
/** Command-line entry point for the embedding exporter. */

import { parseArgs } from "node:util";

import { runExport } from "./export.js";

const USAGE = `usage: pce-export export --out FILE.pce1 [options]

options:
  --classes N         number of classes (default 10)
  --per-class N       samples per class (default 55)
  --image-size N      rendered image side length (default 32)
  --seed N            image/augmentation seed (default 0)
  --backbone-seed N   frozen backbone identity (default 7)
  --dim N             embedding dimension (default 2048)
  --pixel-noise X     per-pixel Gaussian noise sigma (default 0.25)
  --feature-scale X   constant embedding gain (default 1.64)
  --labeled-fraction X  fraction of each class exported with labels (default 1.0)
  --out FILE          output .pce1 path (required)
`;

function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        classes: { type: "string", default: "10" },
        "per-class": { type: "string", default: "55" },
        "image-size": { type: "string", default: "32" },
        seed: { type: "string", default: "0" },
        "backbone-seed": { type: "string", default: "7" },
        dim: { type: "string", default: "2048" },
        "pixel-noise": { type: "string", default: "0.25" },
        "feature-scale": { type: "string", default: "1.64" },
        "labeled-fraction": { type: "string", default: "1.0" },
        out: { type: "string" },
        help: { type: "boolean", default: false },
      },
    });
  } catch (err) {
    console.error(`error: ${(err as Error).message}\n${USAGE}`);
    return 2;
  }
  const { values, positionals } = parsed;
  if (values.help) {
    console.log(USAGE);
    return 0;
  }
  if (positionals[0] !== "export" || !values.out) {
    console.error(USAGE);
    return 2;
  }

  const summary = runExport({
    numClasses: Number(values.classes),
    samplesPerClass: Number(values["per-class"]),
    imageSize: Number(values["image-size"]),
    seed: Number(values.seed),
    backboneSeed: Number(values["backbone-seed"]),
    outputDim: Number(values.dim),
    pixelNoise: Number(values["pixel-noise"]),
    featureScale: Number(values["feature-scale"]),
    labeledFraction: Number(values["labeled-fraction"]),
    outputPath: values.out,
  });
  console.log(
    `wrote ${summary.outputPath}: ${summary.records} records, dim ${summary.dim} ` +
      `(metadata: ${summary.metadataPath})`,
  );
  return 0;
}

process.exitCode = main(process.argv.slice(2));
