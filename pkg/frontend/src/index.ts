export { ModelConfig, defaultConfig, tinyConfig,
    N_ELEMENTAL, N_INTERACTION, MAX_ATOMIC } from "./config.js";
export { AtomicGraph, Bundle, readBundle, readBundleDir } from "./bundle.js";
export { AtomicEncoder, EmptyGraph, NODE_FEATURES } from "./atomic.js";
export { IttModel, PreparedBatch, Embedded, ForwardResult,
    ShapeMismatch } from "./model.js";
export { pretrain, pretrainStep, PretrainOptions } from "./pretrain.js";
export { finetune, ensemblePredict, FinetuneOptions, FinetuneResult,
    TooFewSamples } from "./finetune.js";
export { saliency, Saliency } from "./saliency.js";
export { syntheticBundle, syntheticCorpus, linearLabels } from "./synthetic.js";
export { Rng } from "./rng.js";
