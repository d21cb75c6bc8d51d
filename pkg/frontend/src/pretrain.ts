import * as tf from "@tensorflow/tfjs";

import { Bundle } from "./bundle.js";
import { IttModel } from "./model.js";
import { Rng } from "./rng.js";

export interface PretrainOptions {
    steps: number;
    seed?: number;
    /** Called after each step with the masked-reconstruction loss. */
    onStep?: (step: number, loss: number) => void;
}

/** One masked-reconstruction step: a random subset of samples has the
 * structural token replaced by the learned mask token and the model is
 * trained to reproduce the raw structural vector from the first position.
 * Returns the loss, or null when no sample was masked. */
export function pretrainStep(model: IttModel, bundles: Bundle[],
    optimizer: tf.Optimizer, rng: Rng): number | null {
    const flags: number[] = bundles.map(() =>
        rng.next() < model.config.maskRate ? 1 : 0);
    if (!flags.some((f) => f === 1)) {
        return null;
    }
    const batch = model.prepare(bundles);
    const flagT = tf.tensor1d(flags);
    const nMasked = flags.reduce((a, b) => a + b, 0);
    const value = optimizer.minimize(() => {
        const out = model.forward(batch, flagT);
        const err = tf.square(tf.sub(out.reconstruction, batch.structural));
        const perSample = tf.mean(err, 1);
        return tf.div(tf.sum(tf.mul(perSample, flagT)),
            nMasked) as tf.Scalar;
    }, true, model.variables);
    const loss = value === null ? NaN : value.dataSync()[0];
    value?.dispose();
    tf.dispose([batch.structural, batch.elemental, batch.elementalMask,
        batch.interaction, batch.interactionMask, flagT]);
    return loss;
}

/** Run masked pretraining over a corpus; samples a batch per step. */
export function pretrain(model: IttModel, corpus: Bundle[],
    opts: PretrainOptions): number[] {
    const rng = new Rng(opts.seed ?? 1234);
    const optimizer = tf.train.adam(model.config.learningRate);
    const losses: number[] = [];
    const bsz = Math.min(model.config.pretrainBatch, corpus.length);
    for (let step = 0; step < opts.steps; step++) {
        const batch: Bundle[] = [];
        for (let i = 0; i < bsz; i++) {
            batch.push(corpus[rng.int(corpus.length)]);
        }
        const loss = pretrainStep(model, batch, optimizer, rng);
        if (loss !== null) {
            losses.push(loss);
            opts.onStep?.(step, loss);
        }
    }
    optimizer.dispose();
    return losses;
}
