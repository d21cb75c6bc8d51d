import * as tf from "@tensorflow/tfjs";

import { Bundle } from "./bundle.js";
import { N_ELEMENTAL } from "./config.js";
import { IttModel } from "./model.js";

export interface Saliency {
    /** L2 gradient norm of the prediction for each main-sequence token
     * (structural, 7 elemental, atomic) and each interaction token. */
    sequence: number[];
    interaction: number[];
    /** Share of total attribution per family, in percent (sums to 100). */
    families: { structural: number; elemental: number;
        atomic: number; interaction: number };
}

/** Gradient-based attribution for a single bundle: the prediction is
 * differentiated with respect to the embedded tokens and each token is
 * scored by its gradient norm. */
export function saliency(model: IttModel, bundle: Bundle): Saliency {
    const batch = model.prepare([bundle]);
    const embedded = model.embed(batch);
    const grads = tf.grads((seq: tf.Tensor, inter: tf.Tensor) =>
        model.forwardEmbedded({
            seq: seq as tf.Tensor3D,
            seqMask: embedded.seqMask,
            inter: inter as tf.Tensor3D,
            interMask: embedded.interMask,
        }).prediction.sum());
    const [gSeq, gInter] = grads([embedded.seq, embedded.inter]);
    const seqMask = embedded.seqMask.dataSync();
    const interMask = embedded.interMask.dataSync();
    const norm = (g: tf.Tensor, mask: Float32Array | Int32Array | Uint8Array) => {
        const n = tf.tidy(() =>
            tf.sqrt(tf.sum(tf.square(g), -1)).dataSync());
        return [...n].map((x, i) => (mask[i] > 0 ? x : 0));
    };
    const sequence = norm(gSeq, seqMask as Float32Array);
    const interaction = norm(gInter, interMask as Float32Array);
    tf.dispose([gSeq, gInter, embedded.seq, embedded.inter,
        embedded.seqMask, embedded.interMask, batch.structural,
        batch.elemental, batch.elementalMask, batch.interaction,
        batch.interactionMask]);

    const structural = sequence[0];
    const elemental = sequence.slice(1, 1 + N_ELEMENTAL)
        .reduce((a, b) => a + b, 0);
    const atomic = sequence.slice(1 + N_ELEMENTAL)
        .reduce((a, b) => a + b, 0);
    const interTotal = interaction.reduce((a, b) => a + b, 0);
    const total = structural + elemental + atomic + interTotal;
    const pct = (x: number) => (total > 0 ? (100 * x) / total : 0);
    return {
        sequence,
        interaction,
        families: {
            structural: pct(structural),
            elemental: pct(elemental),
            atomic: pct(atomic),
            interaction: pct(interTotal),
        },
    };
}
