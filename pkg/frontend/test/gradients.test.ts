import * as tf from "@tensorflow/tfjs";
import { describe, expect, it } from "vitest";

import { tinyConfig } from "../src/config.js";
import { IttModel, PreparedBatch } from "../src/model.js";
import { Rng } from "../src/rng.js";
import { correlatedCorpus } from "../src/synthetic.js";

// Small widths keep float32 round-off in the loss far below the
// finite-difference step so the 1e-4 relative tolerance is meaningful.
const cfg = tinyConfig({
    layers: 1,
    atomicConvLayers: 1,
    atomicWidth: 4,
    ff: 8,
    structuralDim: 6,
    interactionDim: 4,
});

function loss(model: IttModel, batch: PreparedBatch,
    flags: tf.Tensor1D): tf.Scalar {
    return tf.tidy(() => {
        const out = model.forward(batch, flags);
        const recon = tf.mean(tf.square(
            tf.sub(out.reconstruction, batch.structural)));
        const pred = tf.mean(tf.square(out.prediction));
        // the sequence term gives every parameter, in particular the deep
        // graph-encoder ones, a gradient well above the float32 noise floor
        const seq = tf.mean(tf.square(out.sequence));
        return tf.add(tf.add(recon, pred), seq) as tf.Scalar;
    });
}

describe("gradient correctness", () => {
    it("matches central finite differences at 1e-4 relative tolerance", () => {
        const model = new IttModel(cfg, 21);
        // move every weight to a common O(0.3) scale: gradient correctness
        // must hold at any parameter point, and this keeps the loss surface
        // away from the extreme-curvature regions (layer norm over
        // near-constant tokens) where finite differences cannot resolve
        // the slope in float32
        let seed = 900;
        for (const v of model.variables) {
            v.assign(tf.randomNormal(v.shape, 0, 0.3, "float32", seed++));
        }
        const bundles = correlatedCorpus(cfg, 2, 31);
        const batch = model.prepare(bundles);
        const flags = tf.tensor1d([1, 0]);

        const f = () => loss(model, batch, flags);
        const { grads } = tf.variableGrads(f, model.variables);

        const rng = new Rng(77);
        const report: string[] = [];
        for (const [name, v] of model.named) {
            const grad = grads[v.name];
            if (grad === undefined || grad === null) continue;
            const analytic = grad.dataSync();
            const data = v.dataSync().slice();
            const n = data.length;
            for (let trial = 0; trial < 2; trial++) {
                // directional derivative along a random unit vector,
                // fourth-order central difference; the direction aggregates
                // the whole gradient so float32 round-off in the loss stays
                // far below the tolerance
                const u = Array.from({ length: n }, () => rng.normal());
                const uNorm = Math.sqrt(u.reduce((a, x) => a + x * x, 0));
                for (let i = 0; i < n; i++) u[i] /= uNorm;
                const evalAt = (t: number) => {
                    const bumped = data.slice();
                    for (let i = 0; i < n; i++) bumped[i] += t * u[i];
                    v.assign(tf.tensor(bumped, v.shape));
                    return f().dataSync()[0];
                };
                // balance float32 round-off in the loss (pushes h up,
                // inversely with the gradient magnitude) against truncation
                // near small-scale embeddings (pushes h down)
                const anNorm = Math.sqrt(
                    analytic.reduce((a, x) => a + x * x, 0));
                const h = Math.min(
                    Math.max(1.2e-2 / Math.max(anNorm, 0.04), 3e-3), 1.5e-1);
                const fd = (8 * (evalAt(h) - evalAt(-h)) -
                    (evalAt(2 * h) - evalAt(-2 * h))) / (12 * h);
                v.assign(tf.tensor(data, v.shape));
                let dot = 0;
                let norm2 = 0;
                for (let i = 0; i < n; i++) {
                    dot += analytic[i] * u[i];
                    norm2 += analytic[i] * analytic[i];
                }
                const rel = Math.abs(fd - dot) /
                    Math.max(Math.sqrt(norm2), Math.abs(fd), 1e-6);
                report.push(`${name}[${trial}]: ${rel.toExponential(2)}`);
            }
        }
        const violations = report.filter((r) =>
            Number(r.split(": ")[1]) >= 1e-4);
        expect(violations, report.join("\n")).toEqual([]);
        expect(report.length).toBeGreaterThan(40);
    });
});
