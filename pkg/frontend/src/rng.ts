/** Small deterministic RNG (mulberry32) for masking and data splits. */
export class Rng {
    private state: number;

    constructor(seed: number) {
        this.state = seed >>> 0;
    }

    /** Uniform in [0, 1). */
    next(): number {
        this.state = (this.state + 0x6d2b79f5) >>> 0;
        let t = this.state;
        t = Math.imul(t ^ (t >>> 15), t | 1);
        t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
        return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
    }

    /** Integer in [0, n). */
    int(n: number): number {
        return Math.floor(this.next() * n);
    }

    /** Standard normal via Box-Muller. */
    normal(): number {
        const u = Math.max(this.next(), 1e-12);
        const v = this.next();
        return Math.sqrt(-2 * Math.log(u)) * Math.cos(2 * Math.PI * v);
    }

    /** In-place Fisher-Yates shuffle; returns the array. */
    shuffle<T>(xs: T[]): T[] {
        for (let i = xs.length - 1; i > 0; i--) {
            const j = this.int(i + 1);
            [xs[i], xs[j]] = [xs[j], xs[i]];
        }
        return xs;
    }
}
