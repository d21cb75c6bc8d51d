import * as tf from "@tensorflow/tfjs";

import { AtomicEncoder } from "./atomic.js";
import { AtomicGraph, Bundle } from "./bundle.js";
import { ModelConfig, N_ELEMENTAL, N_INTERACTION } from "./config.js";

export class ShapeMismatch extends Error {}

/** Raw per-sample inputs gathered from bundles, kept as tensors plus the
 * graphs (encoded lazily so training sees the encoder variables). */
export interface PreparedBatch {
    structural: tf.Tensor2D;          // [B, S]
    elemental: tf.Tensor3D;           // [B, 7, S]
    elementalMask: tf.Tensor2D;       // [B, 7]
    interaction: tf.Tensor3D;         // [B, 42, I]
    interactionMask: tf.Tensor2D;     // [B, 42]
    graphs: AtomicGraph[];            // encoded at embed time
    size: number;
}

export interface Embedded {
    seq: tf.Tensor3D;                 // [B, 1 + 7 + A, H]
    seqMask: tf.Tensor2D;
    inter: tf.Tensor3D;               // [B, 42, H]
    interMask: tf.Tensor2D;
}

export interface ForwardResult {
    prediction: tf.Tensor1D;          // [B]
    reconstruction: tf.Tensor2D;      // [B, S]
    sequence: tf.Tensor3D;            // [B, L, H]
}

interface LayerWeights {
    ln1g: tf.Variable; ln1b: tf.Variable;
    wq: tf.Variable; wk: tf.Variable; wv: tf.Variable; wo: tf.Variable;
    ln2g: tf.Variable; ln2b: tf.Variable;
    cq: tf.Variable; ck: tf.Variable; cv: tf.Variable; co: tf.Variable;
    ln3g: tf.Variable; ln3b: tf.Variable;
    w1: tf.Variable; b1: tf.Variable; w2: tf.Variable; b2: tf.Variable;
}

function layerNorm(x: tf.Tensor, g: tf.Variable, b: tf.Variable): tf.Tensor {
    const mean = tf.mean(x, -1, true);
    const centered = tf.sub(x, mean);
    const variance = tf.mean(tf.square(centered), -1, true);
    const normed = tf.div(centered, tf.sqrt(tf.add(variance, 1e-6)));
    return tf.add(tf.mul(normed, g), b);
}

/** Transformer over topological token sets with interaction tokens attached
 * through cross-attention. Prediction and reconstruction both read the
 * first (structural) position. */
export class IttModel {
    readonly config: ModelConfig;
    readonly encoder: AtomicEncoder;
    readonly named: Map<string, tf.Variable>;
    private decayNames: Set<string>;

    constructor(config: ModelConfig, seed = 7) {
        this.config = config;
        this.encoder = new AtomicEncoder(config, seed + 1000);
        this.named = new Map();
        this.decayNames = new Set();
        const H = config.hidden;
        let counter = seed;
        const kernel = (name: string, rows: number, cols: number) => {
            const v = tf.variable(tf.randomNormal([rows, cols], 0,
                1 / Math.sqrt(rows), "float32", counter++));
            this.named.set(name, v);
            this.decayNames.add(name);
            return v;
        };
        // residual output projections start at zero so the network is the
        // identity-plus-linear-readout map at initialization; each block
        // grows into the residual stream as training demands it
        const zeroKernel = (name: string, rows: number, cols: number) => {
            const v = tf.variable(tf.zeros([rows, cols]));
            this.named.set(name, v);
            this.decayNames.add(name);
            return v;
        };
        const bias = (name: string, n: number) => {
            const v = tf.variable(tf.zeros([n]));
            this.named.set(name, v);
            return v;
        };
        const ones = (name: string, n: number) => {
            const v = tf.variable(tf.ones([n]));
            this.named.set(name, v);
            return v;
        };
        kernel("proj_structural", config.structuralDim, H);
        bias("proj_structural_b", H);
        kernel("proj_elemental", config.structuralDim, H);
        bias("proj_elemental_b", H);
        kernel("proj_atomic", config.atomicWidth, H);
        bias("proj_atomic_b", H);
        kernel("proj_interaction", config.interactionDim, H);
        bias("proj_interaction_b", H);
        // token-type embeddings: structural, elemental, atomic, interaction
        this.named.set("type_embed", tf.variable(
            tf.randomNormal([4, H], 0, 0.02, "float32", counter++)));
        this.named.set("mask_token", tf.variable(
            tf.randomNormal([H], 0, 0.02, "float32", counter++)));
        for (let l = 0; l < config.layers; l++) {
            const p = `layer${l}_`;
            ones(p + "ln1g", H); bias(p + "ln1b", H);
            kernel(p + "wq", H, H); kernel(p + "wk", H, H);
            kernel(p + "wv", H, H); zeroKernel(p + "wo", H, H);
            ones(p + "ln2g", H); bias(p + "ln2b", H);
            kernel(p + "cq", H, H); kernel(p + "ck", H, H);
            kernel(p + "cv", H, H); zeroKernel(p + "co", H, H);
            ones(p + "ln3g", H); bias(p + "ln3b", H);
            kernel(p + "w1", H, config.ff); bias(p + "b1", config.ff);
            zeroKernel(p + "w2", config.ff, H); bias(p + "b2", H);
        }
        kernel("pred_w", H, 1); bias("pred_b", 1);
        kernel("recon_w", H, config.structuralDim);
        bias("recon_b", config.structuralDim);
        this.encoder.variables.forEach((v, i) => {
            this.named.set(`encoder_${i}`, v);
            if (v.shape.length === 2) this.decayNames.add(`encoder_${i}`);
        });
    }

    get variables(): tf.Variable[] {
        return [...this.named.values()];
    }

    /** Kernel matrices subject to decoupled weight decay. */
    get decayVariables(): tf.Variable[] {
        return [...this.decayNames].map((n) => this.named.get(n)!);
    }

    private v(name: string): tf.Variable {
        return this.named.get(name)!;
    }

    private layer(l: number): LayerWeights {
        const p = `layer${l}_`;
        return {
            ln1g: this.v(p + "ln1g"), ln1b: this.v(p + "ln1b"),
            wq: this.v(p + "wq"), wk: this.v(p + "wk"),
            wv: this.v(p + "wv"), wo: this.v(p + "wo"),
            ln2g: this.v(p + "ln2g"), ln2b: this.v(p + "ln2b"),
            cq: this.v(p + "cq"), ck: this.v(p + "ck"),
            cv: this.v(p + "cv"), co: this.v(p + "co"),
            ln3g: this.v(p + "ln3g"), ln3b: this.v(p + "ln3b"),
            w1: this.v(p + "w1"), b1: this.v(p + "b1"),
            w2: this.v(p + "w2"), b2: this.v(p + "b2"),
        };
    }

    /** Collect tensors from bundles. Atomic graphs are kept as-is and only
     * encoded during `embed`, so gradients reach the encoder when the
     * forward pass runs inside a loss closure. */
    prepare(bundles: Bundle[]): PreparedBatch {
        const S = this.config.structuralDim;
        const I = this.config.interactionDim;
        for (const b of bundles) {
            if (b.structuralDim !== S || b.interactionDim !== I) {
                throw new ShapeMismatch(
                    `bundle dims ${b.structuralDim}/${b.interactionDim}, ` +
                    `model expects ${S}/${I}`);
            }
        }
        const bsz = bundles.length;
        return {
            structural: tf.tensor2d(
                bundles.flatMap((b) => [...b.structural]), [bsz, S]),
            elemental: tf.tensor3d(
                bundles.flatMap((b) => [...b.elemental]),
                [bsz, N_ELEMENTAL, S]),
            elementalMask: tf.tensor2d(bundles.map((b) =>
                b.elementalPresence.map((p) => (p ? 1 : 0)))),
            interaction: tf.tensor3d(
                bundles.flatMap((b) => [...b.interaction]),
                [bsz, N_INTERACTION, I]),
            interactionMask: tf.tensor2d(bundles.map((b) =>
                b.interactionPresence.map((p) => (p ? 1 : 0)))),
            graphs: bundles.map((b) => b.atomic),
            size: bsz,
        };
    }

    /** Project every family into the common width, add token-type
     * embeddings, and optionally replace structural inputs by the learned
     * mask token (maskFlags is 0/1 per sample). */
    embed(batch: PreparedBatch, maskFlags?: tf.Tensor1D): Embedded {
        const H = this.config.hidden;
        const bsz = batch.size;
        const type = this.v("type_embed");
        let structural = tf.add(
            tf.matMul(batch.structural, this.v("proj_structural")),
            this.v("proj_structural_b"));
        if (maskFlags !== undefined) {
            const flag = tf.reshape(maskFlags, [bsz, 1]);
            const maskTok = tf.reshape(this.v("mask_token"), [1, H]);
            structural = tf.add(
                tf.mul(structural, tf.sub(1, flag)),
                tf.mul(maskTok, flag));
        }
        structural = tf.add(structural,
            tf.reshape(tf.gather(type, [0]), [1, H]));
        const flat = (x: tf.Tensor3D, d: number) =>
            tf.reshape(x, [-1, d]);
        const elemental = tf.add(tf.reshape(
            tf.add(tf.matMul(flat(batch.elemental, this.config.structuralDim),
                this.v("proj_elemental")), this.v("proj_elemental_b")),
            [bsz, N_ELEMENTAL, H]),
            tf.reshape(tf.gather(type, [1]), [1, 1, H]));
        const encoded = this.encoder.encodeBatch(batch.graphs);
        const nAtom = encoded.tokens.shape[1];
        const atomic = tf.add(tf.reshape(
            tf.add(tf.matMul(flat(encoded.tokens, this.config.atomicWidth),
                this.v("proj_atomic")), this.v("proj_atomic_b")),
            [bsz, nAtom, H]),
            tf.reshape(tf.gather(type, [2]), [1, 1, H]));
        const inter = tf.add(tf.reshape(
            tf.add(tf.matMul(flat(batch.interaction, this.config.interactionDim),
                this.v("proj_interaction")), this.v("proj_interaction_b")),
            [bsz, N_INTERACTION, H]),
            tf.reshape(tf.gather(type, [3]), [1, 1, H]));
        const seq = tf.concat([
            tf.reshape(structural, [bsz, 1, H]), elemental, atomic], 1);
        const seqMask = tf.concat([
            tf.ones([bsz, 1]), batch.elementalMask, encoded.mask],
            1) as tf.Tensor2D;
        return {
            seq: seq as tf.Tensor3D,
            seqMask,
            inter: inter as tf.Tensor3D,
            interMask: batch.interactionMask,
        };
    }

    /** Multi-head attention with a key mask. Projections carry no bias, so
     * a fully masked key set contributes exactly zero. */
    private attend(x: tf.Tensor3D, kv: tf.Tensor3D, keyMask: tf.Tensor2D,
        wq: tf.Variable, wk: tf.Variable, wv: tf.Variable,
        wo: tf.Variable): tf.Tensor3D {
        const H = this.config.hidden;
        const heads = this.config.heads;
        const d = H / heads;
        const [bsz, lq] = [x.shape[0], x.shape[1]];
        const lk = kv.shape[1];
        const split = (t: tf.Tensor, w: tf.Variable, len: number) =>
            tf.transpose(tf.reshape(
                tf.matMul(tf.reshape(t, [-1, H]), w),
                [bsz, len, heads, d]), [0, 2, 1, 3]);
        const q = split(x, wq, lq);
        const k = split(kv, wk, lk);
        const v = split(kv, wv, lk);
        let scores = tf.div(
            tf.matMul(q, k, false, true), Math.sqrt(d));
        const maskRow = tf.reshape(keyMask, [bsz, 1, 1, lk]);
        scores = tf.add(scores, tf.mul(tf.sub(maskRow, 1), 1e9));
        // renormalize after re-applying the mask so that an all-masked key
        // set yields zero weights rather than a uniform distribution
        const weights = tf.mul(tf.softmax(scores), maskRow);
        const norm = tf.add(tf.sum(weights, -1, true), 1e-9);
        const ctx = tf.matMul(tf.div(weights, norm), v);
        const merged = tf.reshape(
            tf.transpose(ctx, [0, 2, 1, 3]), [bsz * lq, H]);
        return tf.reshape(tf.matMul(merged, wo),
            [bsz, lq, H]) as tf.Tensor3D;
    }

    /** Run the decoder stack; returns the final normalized sequence. */
    decode(e: Embedded): tf.Tensor3D {
        let seq: tf.Tensor = e.seq;
        for (let l = 0; l < this.config.layers; l++) {
            const w = this.layer(l);
            const a = this.attend(
                layerNorm(seq, w.ln1g, w.ln1b) as tf.Tensor3D,
                layerNorm(seq, w.ln1g, w.ln1b) as tf.Tensor3D,
                e.seqMask, w.wq, w.wk, w.wv, w.wo);
            seq = tf.add(seq, a);
            const c = this.attend(
                layerNorm(seq, w.ln2g, w.ln2b) as tf.Tensor3D,
                e.inter, e.interMask, w.cq, w.ck, w.cv, w.co);
            seq = tf.add(seq, c);
            const h = layerNorm(seq, w.ln3g, w.ln3b);
            const ff = tf.add(tf.matMul(tf.relu(
                tf.add(tf.matMul(tf.reshape(h, [-1, this.config.hidden]),
                    w.w1), w.b1)), w.w2), w.b2);
            seq = tf.add(seq, tf.reshape(ff, seq.shape));
        }
        // no final layer norm: the heads read the raw residual stream, so
        // the prediction can stay linear in the token contents (a final
        // norm would make it scale-invariant and unable to express linear
        // functionals of the inputs)
        return seq as tf.Tensor3D;
    }

    /** Full forward pass from an embedded batch. */
    forwardEmbedded(e: Embedded): ForwardResult {
        const H = this.config.hidden;
        const seq = this.decode(e);
        const first = tf.reshape(
            tf.slice(seq, [0, 0, 0], [-1, 1, -1]), [-1, H]);
        const prediction = tf.reshape(tf.add(
            tf.matMul(first, this.v("pred_w")), this.v("pred_b")),
            [-1]) as tf.Tensor1D;
        const reconstruction = tf.add(
            tf.matMul(first, this.v("recon_w")),
            this.v("recon_b")) as tf.Tensor2D;
        return { prediction, reconstruction, sequence: seq };
    }

    forward(batch: PreparedBatch, maskFlags?: tf.Tensor1D): ForwardResult {
        return this.forwardEmbedded(this.embed(batch, maskFlags));
    }

    /** Serialize all weights to plain arrays keyed by variable name. */
    saveWeights(): Record<string, { shape: number[]; data: number[] }> {
        const out: Record<string, { shape: number[]; data: number[] }> = {};
        for (const [name, v] of this.named) {
            out[name] = {
                shape: v.shape.slice(),
                data: [...(v.dataSync() as Float32Array)],
            };
        }
        return out;
    }

    loadWeights(saved: Record<string, { shape: number[]; data: number[] }>): void {
        for (const [name, v] of this.named) {
            const entry = saved[name];
            if (entry === undefined) {
                throw new ShapeMismatch(`checkpoint missing variable ${name}`);
            }
            if (entry.shape.join() !== v.shape.join()) {
                throw new ShapeMismatch(
                    `checkpoint shape ${entry.shape} for ${name}, ` +
                    `expected ${v.shape}`);
            }
            v.assign(tf.tensor(entry.data, entry.shape));
        }
    }
}
