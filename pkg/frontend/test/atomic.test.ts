import { describe, expect, it } from "vitest";

import { AtomicEncoder, EmptyGraph } from "../src/atomic.js";
import { AtomicGraph } from "../src/bundle.js";
import { tinyConfig } from "../src/config.js";

const cfg = tinyConfig();

function graph(): AtomicGraph {
    return {
        nodes: [
            { z: 6, cluster: 0, multiplicity: 4 },
            { z: 8, cluster: 1, multiplicity: 2 },
            { z: 30, cluster: 4, multiplicity: 1 },
        ],
        edges: [
            { i: 0, j: 1, distance: 1.43 },
            { i: 1, j: 2, distance: 1.96 },
        ],
        cutoff: 8,
        truncated: false,
    };
}

describe("atomic encoder", () => {
    it("produces one embedding per node", () => {
        const enc = new AtomicEncoder(cfg, 3);
        const h = enc.encode(graph());
        expect(h.shape).toEqual([3, cfg.atomicWidth]);
        expect([...h.dataSync()].every(Number.isFinite)).toBe(true);
    });

    it("rejects an empty graph", () => {
        const enc = new AtomicEncoder(cfg, 3);
        expect(() => enc.encode({
            nodes: [], edges: [], cutoff: 8, truncated: false,
        })).toThrow(EmptyGraph);
    });

    it("handles a single node without edges", () => {
        const enc = new AtomicEncoder(cfg, 3);
        const h = enc.encode({
            nodes: [{ z: 1, cluster: 3, multiplicity: 12 }],
            edges: [], cutoff: 8, truncated: false,
        });
        expect(h.shape).toEqual([1, cfg.atomicWidth]);
    });

    it("is equivariant under node relabeling", () => {
        const enc = new AtomicEncoder(cfg, 3);
        const g = graph();
        const perm = [2, 0, 1]; // new index of old node i
        const permuted: AtomicGraph = {
            nodes: [g.nodes[1], g.nodes[2], g.nodes[0]],
            edges: g.edges.map((e) => {
                const a = perm[e.i];
                const b = perm[e.j];
                return { i: Math.min(a, b), j: Math.max(a, b),
                    distance: e.distance };
            }),
            cutoff: 8,
            truncated: false,
        };
        const h = enc.encode(g).arraySync() as number[][];
        const hp = enc.encode(permuted).arraySync() as number[][];
        for (let i = 0; i < 3; i++) {
            for (let k = 0; k < cfg.atomicWidth; k++) {
                expect(Math.abs(h[i][k] - hp[perm[i]][k])).toBeLessThan(1e-6);
            }
        }
    });

    it("responds to edge changes", () => {
        const enc = new AtomicEncoder(cfg, 3);
        const g = graph();
        const h = enc.encode(g).dataSync();
        const g2 = graph();
        g2.edges.pop();
        const h2 = enc.encode(g2).dataSync();
        let diff = 0;
        for (let i = 0; i < h.length; i++) diff += Math.abs(h[i] - h2[i]);
        expect(diff).toBeGreaterThan(1e-6);
    });

    it("pads batches and masks padded rows", () => {
        const enc = new AtomicEncoder(cfg, 3);
        const { tokens, mask } = enc.encodeBatch([
            graph(),
            { nodes: [{ z: 1, cluster: 0, multiplicity: 1 }],
                edges: [], cutoff: 8, truncated: false },
        ]);
        expect(tokens.shape).toEqual([2, 3, cfg.atomicWidth]);
        expect([...mask.dataSync()]).toEqual([1, 1, 1, 1, 0, 0]);
    });
});
