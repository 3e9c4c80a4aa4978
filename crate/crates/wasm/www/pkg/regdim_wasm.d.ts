/* tslint:disable */
/* eslint-disable */

/**
 * Ball masses of an interval system at `x`, followed by the closed form
 * and the estimate (two trailing values).
 */
export function ballMassExplorer(ratios: Float64Array, offsets: Float64Array, probs: Float64Array, x: number, depth: number): Float64Array;

/**
 * Where the local-dimension supremum changes branch.
 */
export function phaseCrossing(): number;

/**
 * Sequence table followed by the closed-form regularity dimension
 * (`Infinity` in the mixed regimes).
 */
export function sequenceTable(point_law: string, point_rate: number, weight_law: string, weight_rate: number, rows: number): Float64Array;

/**
 * Support points of an interval system at resolution `scale`, for plotting.
 */
export function supportPoints(ratios: Float64Array, offsets: Float64Array, probs: Float64Array, scale: number): Float64Array;

/**
 * Carpet curves over `[eps_min, eps_max]`.
 */
export function sweepCurves(eps_min: number, eps_max: number, steps: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly ballMassExplorer: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
    readonly phaseCrossing: () => number;
    readonly sequenceTable: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly supportPoints: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly sweepCurves: (a: number, b: number, c: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
