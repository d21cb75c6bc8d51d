import * as fs from "node:fs";
import * as path from "node:path";

import { MAX_ATOMIC, N_ELEMENTAL, N_INTERACTION } from "./config.js";

/** Unique-atom graph as serialized by the featurization pipeline. */
export interface AtomicGraph {
    /** One entry per unique atom: atomic number, cluster id, multiplicity. */
    nodes: Array<{ z: number; cluster: number; multiplicity: number }>;
    /** Undirected edges (i < j) with rounded minimum distances. */
    edges: Array<{ i: number; j: number; distance: number }>;
    cutoff: number;
    truncated: boolean;
}

/** In-memory form of one embedding bundle directory. */
export interface Bundle {
    structural: Float32Array;               // structuralDim
    elemental: Float32Array;                // 7 x structuralDim (row-major)
    elementalPresence: boolean[];           // 7
    interaction: Float32Array;              // 42 x interactionDim
    interactionPresence: boolean[];         // 42
    atomic: AtomicGraph;
    meta: Record<string, unknown>;
    structuralDim: number;
    interactionDim: number;
}

function readF32(file: string, expected: number): Float32Array {
    const buf = fs.readFileSync(file);
    if (buf.byteLength !== expected * 4) {
        throw new Error(
            `${file}: ${buf.byteLength} bytes, expected ${expected * 4}`);
    }
    return new Float32Array(buf.buffer, buf.byteOffset, expected);
}

/** Load a bundle directory written by the featurization CLI. */
export function readBundle(dir: string): Bundle {
    const manifestPath = path.join(dir, "manifest.json");
    if (!fs.existsSync(manifestPath)) {
        throw new Error(`missing manifest.json in ${dir}`);
    }
    const manifest = JSON.parse(fs.readFileSync(manifestPath, "utf-8"));
    const shapes = manifest.shapes;
    const structuralDim: number = shapes.structural[0];
    const interactionDim: number = shapes.interaction[1];
    if (shapes.elemental[0] !== N_ELEMENTAL ||
        shapes.interaction[0] !== N_INTERACTION) {
        throw new Error(`unexpected token family counts in ${manifestPath}`);
    }
    const atoms = JSON.parse(
        fs.readFileSync(path.join(dir, "atoms.json"), "utf-8"));
    if (atoms.nodes.length > MAX_ATOMIC) {
        throw new Error(`${dir}: ${atoms.nodes.length} atomic tokens > cap`);
    }
    return {
        structural: readF32(path.join(dir, "structural.f32"), structuralDim),
        elemental: readF32(path.join(dir, "elemental.f32"),
            N_ELEMENTAL * structuralDim),
        elementalPresence: manifest.elemental_presence,
        interaction: readF32(path.join(dir, "interaction.f32"),
            N_INTERACTION * interactionDim),
        interactionPresence: manifest.interaction_presence,
        atomic: atoms,
        meta: manifest.meta,
        structuralDim,
        interactionDim,
    };
}

/** Load every bundle directory directly under `root` (sorted by name). */
export function readBundleDir(root: string): Bundle[] {
    const names = fs.readdirSync(root).filter((n) =>
        fs.existsSync(path.join(root, n, "manifest.json"))).sort();
    return names.map((n) => readBundle(path.join(root, n)));
}
