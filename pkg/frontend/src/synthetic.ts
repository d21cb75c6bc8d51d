import { AtomicGraph, Bundle } from "./bundle.js";
import { ModelConfig, N_ELEMENTAL, N_INTERACTION } from "./config.js";
import { Rng } from "./rng.js";

/** Random but well-formed bundle for tests and demos. */
export function syntheticBundle(cfg: ModelConfig, rng: Rng): Bundle {
    const S = cfg.structuralDim;
    const I = cfg.interactionDim;
    const structural = new Float32Array(S);
    for (let i = 0; i < S; i++) structural[i] = rng.normal();
    const elemental = new Float32Array(N_ELEMENTAL * S);
    const elementalPresence: boolean[] = [];
    for (let k = 0; k < N_ELEMENTAL; k++) {
        const present = rng.next() < 0.8;
        elementalPresence.push(present);
        if (present) {
            for (let i = 0; i < S; i++) {
                elemental[k * S + i] = rng.normal();
            }
        }
    }
    const interaction = new Float32Array(N_INTERACTION * I);
    const interactionPresence: boolean[] = [];
    for (let k = 0; k < N_INTERACTION; k++) {
        const present = rng.next() < 0.5;
        interactionPresence.push(present);
        if (present) {
            for (let i = 0; i < I; i++) {
                interaction[k * I + i] = rng.normal();
            }
        }
    }
    const nNodes = 2 + rng.int(5);
    const nodes = [];
    for (let i = 0; i < nNodes; i++) {
        nodes.push({
            z: 1 + rng.int(90),
            cluster: rng.int(N_ELEMENTAL),
            multiplicity: 1 + rng.int(8),
        });
    }
    const edges: AtomicGraph["edges"] = [];
    for (let i = 0; i < nNodes; i++) {
        for (let j = i + 1; j < nNodes; j++) {
            if (rng.next() < 0.6) {
                edges.push({ i, j, distance: 1 + 6 * rng.next() });
            }
        }
    }
    return {
        structural,
        elemental,
        elementalPresence,
        interaction,
        interactionPresence,
        atomic: { nodes, edges, cutoff: 8, truncated: false },
        meta: { source: "synthetic" },
        structuralDim: S,
        interactionDim: I,
    };
}

export function syntheticCorpus(cfg: ModelConfig, n: number,
    seed: number): Bundle[] {
    const rng = new Rng(seed);
    return Array.from({ length: n }, () => syntheticBundle(cfg, rng));
}

/** Corpus whose elemental and interaction tokens are fixed linear images
 * of the structural vector (shared maps across samples) and whose atomic
 * graph is constant. All sample-to-sample variation is carried by the
 * structural token, as in a regression task that is actually learnable
 * from a few hundred samples. */
export function correlatedCorpus(cfg: ModelConfig, n: number,
    seed: number): Bundle[] {
    const rng = new Rng(seed);
    const S = cfg.structuralDim;
    const I = cfg.interactionDim;
    const mix = (rows: number) => Array.from({ length: rows },
        () => Array.from({ length: S },
            () => rng.normal() / Math.sqrt(S)));
    const elementalMaps = Array.from({ length: N_ELEMENTAL }, () => mix(S));
    const interactionMaps = Array.from({ length: N_INTERACTION },
        () => mix(I));
    const atomic: AtomicGraph = {
        nodes: [
            { z: 6, cluster: 1, multiplicity: 4 },
            { z: 8, cluster: 3, multiplicity: 2 },
            { z: 30, cluster: 4, multiplicity: 1 },
        ],
        edges: [
            { i: 0, j: 1, distance: 1.43 },
            { i: 1, j: 2, distance: 1.96 },
        ],
        cutoff: 8,
        truncated: false,
    };
    const apply = (m: number[][], x: Float32Array) =>
        m.map((row) => row.reduce((a, w, i) => a + w * x[i], 0));
    const out: Bundle[] = [];
    for (let s = 0; s < n; s++) {
        const structural = new Float32Array(S);
        for (let i = 0; i < S; i++) structural[i] = rng.normal();
        const elemental = new Float32Array(N_ELEMENTAL * S);
        for (let k = 0; k < N_ELEMENTAL; k++) {
            elemental.set(apply(elementalMaps[k], structural), k * S);
        }
        const interaction = new Float32Array(N_INTERACTION * I);
        for (let k = 0; k < N_INTERACTION; k++) {
            interaction.set(apply(interactionMaps[k], structural), k * I);
        }
        out.push({
            structural,
            elemental,
            elementalPresence: new Array(N_ELEMENTAL).fill(true),
            interaction,
            interactionPresence: new Array(N_INTERACTION).fill(true),
            atomic,
            meta: { source: "synthetic" },
            structuralDim: S,
            interactionDim: I,
        });
    }
    return out;
}

/** Labels defined as a linear function of a single structural-vector
 * entry, so a trained model should recover them almost exactly. */
export function singleEntryLabels(bundles: Bundle[], entry: number,
    scale: number, offset: number): number[] {
    return bundles.map((b) => scale * b.structural[entry] + offset);
}

/** Labels defined as a fixed linear functional of the structural vector,
 * so a trained model should recover them almost exactly. */
export function linearLabels(cfg: ModelConfig, bundles: Bundle[],
    seed: number): number[] {
    const rng = new Rng(seed);
    const w = Array.from({ length: cfg.structuralDim },
        () => rng.normal() / Math.sqrt(cfg.structuralDim));
    return bundles.map((b) => {
        let y = 0;
        for (let i = 0; i < cfg.structuralDim; i++) {
            y += w[i] * b.structural[i];
        }
        return y;
    });
}
