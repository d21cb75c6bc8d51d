import * as tf from "@tensorflow/tfjs";
import { describe, expect, it } from "vitest";

import { tinyConfig } from "../src/config.js";
import { IttModel } from "../src/model.js";
import { Rng } from "../src/rng.js";
import { pretrain, pretrainStep } from "../src/pretrain.js";
import { correlatedCorpus, syntheticCorpus } from "../src/synthetic.js";

describe("masked pretraining", () => {
    it("returns null when nothing is masked", () => {
        const cfg = tinyConfig({ maskRate: 0 });
        const model = new IttModel(cfg, 5);
        const corpus = syntheticCorpus(cfg, 4, 9);
        const opt = tf.train.adam(1e-3);
        expect(pretrainStep(model, corpus, opt, new Rng(1))).toBeNull();
        opt.dispose();
    });

    it("drops the reconstruction loss by at least half in 200 steps", () => {
        const cfg = tinyConfig({ learningRate: 5e-3 });
        const model = new IttModel(cfg, 5);
        // the context tokens must carry information about the masked
        // structural token, otherwise the loss floor is the full variance
        const corpus = correlatedCorpus(cfg, 64, 9);
        const losses = pretrain(model, corpus, { steps: 200, seed: 13 });
        expect(losses.length).toBeGreaterThan(100);
        const start = losses[0];
        const tail = losses.slice(-10);
        const end = tail.reduce((a, b) => a + b, 0) / tail.length;
        expect(end).toBeLessThan(0.5 * start);
        expect(Number.isFinite(end)).toBe(true);
    });
});
