import * as tf from "@tensorflow/tfjs";

import { AtomicGraph } from "./bundle.js";
import { ModelConfig } from "./config.js";

export class EmptyGraph extends Error {}

const N_CLUSTERS = 7;
const Z_BINS = 10;
const MAX_Z = 103;
const EDGE_CENTERS = 16;

/** Initial node features: cluster one-hot, binned atomic-number one-hot,
 * scaled Z and log multiplicity. */
export const NODE_FEATURES = N_CLUSTERS + Z_BINS + 2;

function nodeFeature(node: { z: number; cluster: number; multiplicity: number }): number[] {
    const f = new Array<number>(NODE_FEATURES).fill(0);
    f[node.cluster] = 1;
    const bin = Math.min(Z_BINS - 1, Math.floor(((node.z - 1) / MAX_Z) * Z_BINS));
    f[N_CLUSTERS + bin] = 1;
    f[N_CLUSTERS + Z_BINS] = node.z / MAX_Z;
    f[N_CLUSTERS + Z_BINS + 1] = Math.log1p(node.multiplicity);
    return f;
}

function edgeFeature(distance: number, cutoff: number): number[] {
    // Gaussian expansion over evenly spaced centers.
    const out = new Array<number>(EDGE_CENTERS);
    const step = cutoff / (EDGE_CENTERS - 1);
    for (let k = 0; k < EDGE_CENTERS; k++) {
        const d = distance - k * step;
        out[k] = Math.exp(-(d * d) / (step * step));
    }
    return out;
}

/** Gated graph-convolution encoder over the unique-atom graph; returns
 * per-node embeddings without pooling. */
export class AtomicEncoder {
    readonly width: number;
    readonly layers: number;
    readonly embed: tf.Variable;       // [NODE_FEATURES, width]
    readonly embedBias: tf.Variable;   // [width]
    readonly gateW: tf.Variable[];     // [2 width + EDGE_CENTERS, width]
    readonly gateB: tf.Variable[];
    readonly coreW: tf.Variable[];
    readonly coreB: tf.Variable[];

    constructor(config: ModelConfig, seed: number) {
        this.width = config.atomicWidth;
        this.layers = config.atomicConvLayers;
        const init = (shape: number[], s: number) =>
            tf.variable(tf.randomNormal(shape, 0,
                1 / Math.sqrt(shape[0]), "float32", s));
        this.embed = init([NODE_FEATURES, this.width], seed);
        this.embedBias = tf.variable(tf.zeros([this.width]));
        this.gateW = [];
        this.gateB = [];
        this.coreW = [];
        this.coreB = [];
        const zDim = 2 * this.width + EDGE_CENTERS;
        for (let l = 0; l < this.layers; l++) {
            this.gateW.push(init([zDim, this.width], seed + 10 + l));
            this.gateB.push(tf.variable(tf.zeros([this.width])));
            this.coreW.push(init([zDim, this.width], seed + 50 + l));
            this.coreB.push(tf.variable(tf.zeros([this.width])));
        }
    }

    get variables(): tf.Variable[] {
        return [this.embed, this.embedBias,
            ...this.gateW, ...this.gateB, ...this.coreW, ...this.coreB];
    }

    /** Encode one graph to [nNodes, width]. */
    encode(graph: AtomicGraph): tf.Tensor2D {
        if (graph.nodes.length === 0) {
            throw new EmptyGraph("atomic graph has no nodes");
        }
        return tf.tidy(() => {
            const n = graph.nodes.length;
            const x0 = tf.tensor2d(graph.nodes.map(nodeFeature));
            let h = tf.softplus(tf.add(tf.matMul(x0, this.embed),
                this.embedBias)) as tf.Tensor2D;
            if (graph.edges.length === 0) {
                return h;
            }
            // duplicate undirected edges into both directions
            const src = graph.edges.flatMap((e) => [e.i, e.j]);
            const dst = graph.edges.flatMap((e) => [e.j, e.i]);
            const ef = tf.tensor2d(graph.edges.flatMap((e) => {
                const f = edgeFeature(e.distance, graph.cutoff);
                return [f, f];
            }));
            const srcT = tf.tensor1d(src, "int32");
            const dstT = tf.tensor1d(dst, "int32");
            for (let l = 0; l < this.layers; l++) {
                const hi = tf.gather(h, dstT);
                const hj = tf.gather(h, srcT);
                const z = tf.concat([hi, hj, ef], 1);
                const gate = tf.sigmoid(
                    tf.add(tf.matMul(z, this.gateW[l]), this.gateB[l]));
                const core = tf.softplus(
                    tf.add(tf.matMul(z, this.coreW[l]), this.coreB[l]));
                const msg = tf.mul(gate, core);
                const agg = tf.unsortedSegmentSum(msg, dstT, n);
                h = tf.softplus(tf.add(h, agg)) as tf.Tensor2D;
            }
            return h;
        });
    }

    /** Encode and pad a batch of graphs to [B, maxNodes, width] plus the
     * padding mask [B, maxNodes]. */
    encodeBatch(graphs: AtomicGraph[]): { tokens: tf.Tensor3D; mask: tf.Tensor2D } {
        const maxNodes = Math.max(...graphs.map((g) => g.nodes.length));
        return tf.tidy(() => {
            const rows: tf.Tensor2D[] = [];
            const mask: number[][] = [];
            for (const g of graphs) {
                const h = this.encode(g);
                const pad = maxNodes - g.nodes.length;
                rows.push(pad > 0
                    ? tf.concat([h, tf.zeros([pad, this.width])]) as tf.Tensor2D
                    : h);
                mask.push([...new Array(g.nodes.length).fill(1),
                    ...new Array(pad).fill(0)]);
            }
            return {
                tokens: tf.stack(rows) as tf.Tensor3D,
                mask: tf.tensor2d(mask),
            };
        });
    }
}
