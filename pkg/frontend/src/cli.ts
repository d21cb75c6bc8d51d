#!/usr/bin/env node
import * as fs from "node:fs";
import * as path from "node:path";

import { readBundle, readBundleDir } from "./bundle.js";
import { ModelConfig, defaultConfig } from "./config.js";
import { ensemblePredict, finetune } from "./finetune.js";
import { IttModel } from "./model.js";
import { pretrain } from "./pretrain.js";
import { saliency } from "./saliency.js";

const USAGE = `usage: itt-ref <command> [options]

commands:
  pretrain <bundle-root> --out ckpt.json [--steps N] [--seed N]
  finetune <bundle-root> --labels labels.json --out model.json
           [--epochs N] [--seed N]
  predict  <bundle-root> --model model.json
  saliency <bundle-dir>  --model model.json

Bundle roots contain one featurization output directory per structure.
labels.json maps bundle directory names to numeric targets.`;

interface Args {
    positional: string[];
    options: Map<string, string>;
}

function parseArgs(argv: string[]): Args {
    const positional: string[] = [];
    const options = new Map<string, string>();
    for (let i = 0; i < argv.length; i++) {
        const a = argv[i];
        if (a.startsWith("--")) {
            const key = a.slice(2);
            const value = argv[i + 1];
            if (value === undefined || value.startsWith("--")) {
                throw new Error(`option --${key} needs a value`);
            }
            options.set(key, value);
            i++;
        } else {
            positional.push(a);
        }
    }
    return { positional, options };
}

function intOption(args: Args, name: string, fallback: number): number {
    const raw = args.options.get(name);
    if (raw === undefined) return fallback;
    const v = Number(raw);
    if (!Number.isFinite(v)) throw new Error(`--${name} must be a number`);
    return Math.round(v);
}

function requireOption(args: Args, name: string): string {
    const v = args.options.get(name);
    if (v === undefined) throw new Error(`missing required --${name}`);
    return v;
}

interface Checkpoint {
    config: ModelConfig;
    labelMean?: number;
    labelStd?: number;
    checkpoints: Array<Record<string, { shape: number[]; data: number[] }>>;
}

function loadModel(file: string): { model: IttModel; ckpt: Checkpoint } {
    const ckpt = JSON.parse(fs.readFileSync(file, "utf-8")) as Checkpoint;
    const model = new IttModel(defaultConfig(ckpt.config));
    model.loadWeights(ckpt.checkpoints[0]);
    return { model, ckpt };
}

function bundleNames(root: string): string[] {
    return fs.readdirSync(root).filter((n) =>
        fs.existsSync(path.join(root, n, "manifest.json"))).sort();
}

function cmdPretrain(args: Args): number {
    const root = args.positional[0];
    const out = requireOption(args, "out");
    const corpus = readBundleDir(root);
    if (corpus.length === 0) {
        console.error(`no bundles found under ${root}`);
        return 1;
    }
    const cfg = defaultConfig({
        structuralDim: corpus[0].structuralDim,
        interactionDim: corpus[0].interactionDim,
    });
    const model = new IttModel(cfg, intOption(args, "seed", 7));
    const steps = intOption(args, "steps", 1000);
    const losses = pretrain(model, corpus, {
        steps,
        seed: intOption(args, "seed", 7),
        onStep: (s, l) => {
            if (s % 50 === 0) console.error(`step ${s}: loss ${l.toFixed(6)}`);
        },
    });
    fs.writeFileSync(out, JSON.stringify({
        config: cfg,
        checkpoints: [model.saveWeights()],
        finalLoss: losses[losses.length - 1],
    }));
    console.log(`wrote ${out} after ${steps} steps, ` +
        `final loss ${losses[losses.length - 1].toFixed(6)}`);
    return 0;
}

function cmdFinetune(args: Args): number {
    const root = args.positional[0];
    const labelFile = requireOption(args, "labels");
    const out = requireOption(args, "out");
    const labelMap = JSON.parse(fs.readFileSync(labelFile, "utf-8")) as
        Record<string, number>;
    const names = bundleNames(root).filter((n) => n in labelMap);
    const bundles = names.map((n) => readBundle(path.join(root, n)));
    if (bundles.length === 0) {
        console.error("no labelled bundles found");
        return 1;
    }
    const cfg = defaultConfig({
        structuralDim: bundles[0].structuralDim,
        interactionDim: bundles[0].interactionDim,
    });
    const model = new IttModel(cfg, intOption(args, "seed", 7));
    const init = args.options.get("init");
    if (init !== undefined) {
        model.loadWeights(loadModel(init).ckpt.checkpoints[0]);
    }
    const result = finetune(model, bundles,
        names.map((n) => labelMap[n]), {
            epochs: intOption(args, "epochs", cfg.epochs),
            seed: intOption(args, "seed", 4242),
            onEpoch: (e, tr, va) => console.error(
                `epoch ${e}: train ${tr.toFixed(6)} val ${va.toFixed(6)}`),
        });
    fs.writeFileSync(out, JSON.stringify({
        config: cfg,
        labelMean: result.labelMean,
        labelStd: result.labelStd,
        checkpoints: result.checkpoints,
    }));
    for (let i = 0; i < result.testIndices.length; i++) {
        console.log(`test ${names[result.testIndices[i]]}: ` +
            `predicted ${result.testPredictions[i].toFixed(6)}, ` +
            `actual ${result.testLabels[i].toFixed(6)}`);
    }
    console.log(`wrote ${out} (${result.checkpoints.length} checkpoints)`);
    return 0;
}

function cmdPredict(args: Args): number {
    const root = args.positional[0];
    const { model, ckpt } = loadModel(requireOption(args, "model"));
    const names = bundleNames(root);
    if (names.length === 0) {
        console.error(`no bundles found under ${root}`);
        return 1;
    }
    const bundles = names.map((n) => readBundle(path.join(root, n)));
    const preds = ensemblePredict(model, ckpt.checkpoints, bundles,
        ckpt.labelMean ?? 0, ckpt.labelStd ?? 1);
    names.forEach((n, i) => console.log(`${n}\t${preds[i].toFixed(6)}`));
    return 0;
}

function cmdSaliency(args: Args): number {
    const dir = args.positional[0];
    const { model } = loadModel(requireOption(args, "model"));
    const s = saliency(model, readBundle(dir));
    console.log(`structural: ${s.families.structural.toFixed(2)}%`);
    console.log(`elemental: ${s.families.elemental.toFixed(2)}%`);
    console.log(`atomic: ${s.families.atomic.toFixed(2)}%`);
    console.log(`interaction: ${s.families.interaction.toFixed(2)}%`);
    return 0;
}

export function main(argv: string[]): number {
    const [command, ...rest] = argv;
    if (command === undefined || command === "--help" || command === "-h") {
        console.log(USAGE);
        return command === undefined ? 2 : 0;
    }
    try {
        const args = parseArgs(rest);
        if (args.positional.length < 1) {
            throw new Error(`${command} needs a bundle path argument`);
        }
        switch (command) {
            case "pretrain": return cmdPretrain(args);
            case "finetune": return cmdFinetune(args);
            case "predict": return cmdPredict(args);
            case "saliency": return cmdSaliency(args);
            default:
                console.error(`unknown command: ${command}\n\n${USAGE}`);
                return 2;
        }
    } catch (err) {
        console.error(String(err instanceof Error ? err.message : err));
        return 2;
    }
}

if (process.argv[1] !== undefined &&
    path.basename(process.argv[1]).startsWith("cli")) {
    process.exit(main(process.argv.slice(2)));
}
