/** Model hyperparameters. Defaults follow the reference configuration;
 * tests shrink the widths through `tinyConfig`. */
export interface ModelConfig {
    /** Number of decoder layers. */
    layers: number;
    /** Attention heads; must divide `hidden`. */
    heads: number;
    /** Common token width H. */
    hidden: number;
    /** Feed-forward intermediate size. */
    ff: number;
    /** Graph-convolution layers in the atomic encoder. */
    atomicConvLayers: number;
    /** Atomic embedding width before projection to H. */
    atomicWidth: number;
    /** Probability of masking the structural token during pretraining. */
    maskRate: number;
    /** Decoupled weight decay applied to kernel matrices. */
    weightDecay: number;
    /** Base learning rate. */
    learningRate: number;
    /** Fraction of total steps spent in linear warm-up. */
    warmupFraction: number;
    pretrainBatch: number;
    finetuneBatch: number;
    epochs: number;
    /** Structural / elemental vector length (3 x grid). */
    structuralDim: number;
    /** Interaction vector length (2 x grid). */
    interactionDim: number;
}

export function defaultConfig(overrides: Partial<ModelConfig> = {}): ModelConfig {
    const cfg: ModelConfig = {
        layers: 8,
        heads: 8,
        hidden: 256,
        ff: 1024,
        atomicConvLayers: 4,
        atomicWidth: 128,
        maskRate: 0.5,
        weightDecay: 0.01,
        learningRate: 1e-4,
        warmupFraction: 0.1,
        pretrainBatch: 256,
        finetuneBatch: 32,
        epochs: 200,
        structuralDim: 750,
        interactionDim: 500,
        ...overrides,
    };
    if (cfg.hidden % cfg.heads !== 0) {
        throw new Error(`hidden ${cfg.hidden} not divisible by heads ${cfg.heads}`);
    }
    for (const [k, v] of Object.entries(cfg)) {
        if (typeof v === "number" && (!Number.isFinite(v) || v <= 0) &&
            k !== "maskRate" && k !== "weightDecay" && k !== "warmupFraction") {
            throw new Error(`config field ${k} must be positive`);
        }
    }
    return cfg;
}

/** Small configuration for finite-difference and unit tests. */
export function tinyConfig(overrides: Partial<ModelConfig> = {}): ModelConfig {
    return defaultConfig({
        layers: 2,
        heads: 2,
        hidden: 16,
        ff: 32,
        atomicConvLayers: 2,
        atomicWidth: 8,
        pretrainBatch: 8,
        finetuneBatch: 8,
        epochs: 10,
        structuralDim: 24,
        interactionDim: 16,
        ...overrides,
    });
}

export const N_ELEMENTAL = 7;
export const N_INTERACTION = 42;
export const MAX_ATOMIC = 256;
