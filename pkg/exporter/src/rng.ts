/**
 * Small deterministic PRNG (splitmix32 core) so every export is exactly
 * reproducible from its seed, independent of platform Math.random().
 */

export class Rng {
  private state: number;

  constructor(seed: number) {
    this.state = seed >>> 0;
  }

  /** Uniform float in [0, 1). */
  next(): number {
    // splitmix32
    this.state = (this.state + 0x9e3779b9) >>> 0;
    let z = this.state;
    z = Math.imul(z ^ (z >>> 16), 0x21f0aaad);
    z = Math.imul(z ^ (z >>> 15), 0x735a2d97);
    z = z ^ (z >>> 15);
    return (z >>> 0) / 4294967296;
  }

  /** Uniform float in [lo, hi). */
  uniform(lo: number, hi: number): number {
    return lo + (hi - lo) * this.next();
  }

  /** Uniform integer in [0, n). */
  int(n: number): number {
    return Math.floor(this.next() * n);
  }

  /** Standard normal via Box-Muller. */
  gauss(): number {
    let u = 0;
    while (u === 0) u = this.next();
    const v = this.next();
    return Math.sqrt(-2 * Math.log(u)) * Math.cos(2 * Math.PI * v);
  }

  /** Derive an independent child generator (for per-sample streams). */
  child(tag: number): Rng {
    // mix the tag into the current state without consuming from this stream
    let z = (this.state ^ Math.imul(tag + 1, 0x85ebca6b)) >>> 0;
    z = Math.imul(z ^ (z >>> 13), 0xc2b2ae35);
    return new Rng(z >>> 0);
  }
}
