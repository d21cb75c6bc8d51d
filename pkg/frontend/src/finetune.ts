import * as tf from "@tensorflow/tfjs";

import { Bundle } from "./bundle.js";
import { IttModel, PreparedBatch } from "./model.js";
import { Rng } from "./rng.js";

export class TooFewSamples extends Error {}

export interface FinetuneOptions {
    epochs?: number;
    seed?: number;
    /** Validation checkpoints kept for the prediction ensemble. */
    ensembleSize?: number;
    onEpoch?: (epoch: number, trainLoss: number, valLoss: number) => void;
}

export interface FinetuneResult {
    /** Weight snapshots of the best validation epochs. */
    checkpoints: Array<Record<string, { shape: number[]; data: number[] }>>;
    labelMean: number;
    labelStd: number;
    trainLoss: number[];
    valLoss: number[];
    testIndices: number[];
    /** Ensemble predictions on the held-out test split, in label units. */
    testPredictions: number[];
    testLabels: number[];
}

function splitIndices(n: number, rng: Rng): { train: number[]; val: number[]; test: number[] } {
    const order = rng.shuffle([...Array(n).keys()]);
    const nTrain = Math.max(1, Math.round(0.8 * n));
    const nVal = Math.max(1, Math.round(0.1 * n));
    return {
        train: order.slice(0, nTrain),
        val: order.slice(nTrain, nTrain + nVal),
        test: order.slice(nTrain + nVal),
    };
}

function disposeBatch(b: PreparedBatch): void {
    tf.dispose([b.structural, b.elemental, b.elementalMask,
        b.interaction, b.interactionMask]);
}

function mseLoss(model: IttModel, batch: PreparedBatch,
    labels: tf.Tensor1D): tf.Scalar {
    const out = model.forward(batch);
    return tf.mean(tf.square(tf.sub(out.prediction, labels))) as tf.Scalar;
}

/** Supervised fine-tuning on standardized labels with an 8:1:1 split,
 * linear warm-up, decoupled weight decay on kernel matrices, and an
 * ensemble of the best validation checkpoints. */
export function finetune(model: IttModel, bundles: Bundle[],
    labels: number[], opts: FinetuneOptions = {}): FinetuneResult {
    if (bundles.length !== labels.length) {
        throw new Error("bundles and labels differ in length");
    }
    if (bundles.length < 10) {
        throw new TooFewSamples(
            `need at least 10 labelled samples, got ${bundles.length}`);
    }
    const cfg = model.config;
    const rng = new Rng(opts.seed ?? 4242);
    const epochs = opts.epochs ?? cfg.epochs;
    const ensembleSize = opts.ensembleSize ?? 5;

    const mean = labels.reduce((a, b) => a + b, 0) / labels.length;
    const variance = labels.reduce(
        (a, b) => a + (b - mean) * (b - mean), 0) / labels.length;
    // zero-variance labels standardize to zero and de-standardize back to
    // the exact mean, so a constant dataset is reproduced perfectly
    const std = Math.sqrt(variance);
    const z = labels.map((y) => (std === 0 ? 0 : (y - mean) / std));

    const split = splitIndices(bundles.length, rng);
    const optimizer = tf.train.adam(cfg.learningRate);
    const stepsPerEpoch = Math.max(1,
        Math.ceil(split.train.length / cfg.finetuneBatch));
    const totalSteps = epochs * stepsPerEpoch;
    const warmupSteps = Math.max(1, Math.round(cfg.warmupFraction * totalSteps));
    let step = 0;

    const valBatch = model.prepare(split.val.map((i) => bundles[i]));
    const valLabels = tf.tensor1d(split.val.map((i) => z[i]));

    const best: Array<{ loss: number; weights: FinetuneResult["checkpoints"][0] }> = [];
    const trainHist: number[] = [];
    const valHist: number[] = [];

    for (let epoch = 0; epoch < epochs; epoch++) {
        const order = rng.shuffle(split.train.slice());
        let epochLoss = 0;
        let nBatches = 0;
        for (let b = 0; b < order.length; b += cfg.finetuneBatch) {
            const idx = order.slice(b, b + cfg.finetuneBatch);
            const batch = model.prepare(idx.map((i) => bundles[i]));
            const yT = tf.tensor1d(idx.map((i) => z[i]));
            // linear warm-up, then cosine decay to zero
            const progress = (step - warmupSteps) /
                Math.max(1, totalSteps - warmupSteps);
            const lr = step < warmupSteps
                ? cfg.learningRate * (step + 1) / warmupSteps
                : cfg.learningRate * 0.5 * (1 + Math.cos(Math.PI * progress));
            (optimizer as unknown as { learningRate: number }).learningRate = lr;
            const value = optimizer.minimize(
                () => mseLoss(model, batch, yT), true, model.variables);
            if (cfg.weightDecay > 0) {
                for (const v of model.decayVariables) {
                    tf.tidy(() => v.assign(
                        tf.mul(v, 1 - lr * cfg.weightDecay)));
                }
            }
            epochLoss += value === null ? 0 : value.dataSync()[0];
            nBatches += 1;
            value?.dispose();
            yT.dispose();
            disposeBatch(batch);
            step += 1;
        }
        const valLoss = tf.tidy(() =>
            mseLoss(model, valBatch, valLabels).dataSync()[0]);
        trainHist.push(epochLoss / nBatches);
        valHist.push(valLoss);
        opts.onEpoch?.(epoch, epochLoss / nBatches, valLoss);
        if (best.length < ensembleSize ||
            valLoss < best[best.length - 1].loss) {
            best.push({ loss: valLoss, weights: model.saveWeights() });
            best.sort((a, b) => a.loss - b.loss);
            if (best.length > ensembleSize) best.pop();
        }
    }
    valLabels.dispose();
    disposeBatch(valBatch);
    optimizer.dispose();

    const checkpoints = best.map((b) => b.weights);
    const testBundles = split.test.map((i) => bundles[i]);
    const testPredictions = testBundles.length === 0 ? [] :
        ensemblePredict(model, checkpoints, testBundles, mean, std);
    return {
        checkpoints,
        labelMean: mean,
        labelStd: std,
        trainLoss: trainHist,
        valLoss: valHist,
        testIndices: split.test,
        testPredictions,
        testLabels: split.test.map((i) => labels[i]),
    };
}

/** Average predictions over saved checkpoints and undo standardization. */
export function ensemblePredict(model: IttModel,
    checkpoints: FinetuneResult["checkpoints"], bundles: Bundle[],
    mean: number, std: number): number[] {
    const saved = model.saveWeights();
    const batch = model.prepare(bundles);
    const sums = new Array<number>(bundles.length).fill(0);
    for (const ckpt of checkpoints) {
        model.loadWeights(ckpt);
        const pred = tf.tidy(() =>
            model.forward(batch).prediction.dataSync());
        for (let i = 0; i < sums.length; i++) sums[i] += pred[i];
    }
    model.loadWeights(saved);
    disposeBatch(batch);
    return sums.map((s) => (s / checkpoints.length) * std + mean);
}
