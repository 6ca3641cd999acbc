/* tslint:disable */
/* eslint-disable */

/**
 * Unconditioned and per-outcome fringes after reading the detector in
 * `basis` ("eigen" or "computational"). Layout: see [`curves::Erasure::flatten`].
 */
export function erasure_curves(theta: number, eps_modulus: number, basis: string, n: number): Float64Array;

/**
 * Detection probability at `n` probe phases for a canonical which-way
 * detector with coherence factor `eps_modulus · e^{i delta}`.
 */
export function fringe_curve(theta: number, phi: number, eps_modulus: number, delta: number, n: number): Float64Array;

/**
 * Normalized histogram of `shots` sampled kicks over `bins` cells of
 * (−π, π], followed by the modulus of the weight's ε.
 */
export function kick_histogram(kind: string, param: number, shots: number, bins: number, seed: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly erasure_curves: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly fringe_curve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly kick_histogram: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
