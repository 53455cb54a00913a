/* tslint:disable */
/* eslint-disable */

/**
 * Histogram of `(H − δ)/σ` from `n` mixture draws on `[−4, 4]`, with the
 * standard normal density at the bin midpoints.
 */
export function clt_histogram(body_json: string, n: number, bins: number, seed: number): string;

/**
 * Standard normal density, exported for plotting smooth overlays.
 */
export function gaussian_density(x: number): number;

/**
 * Face-dimension law on the parallel surface at distance `r`.
 */
export function surface_law(body_json: string, r: number): string;

/**
 * Intrinsic volumes and the law of `V_K`.
 */
export function vk_law(body_json: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly clt_histogram: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly gaussian_density: (a: number) => number;
    readonly surface_law: (a: number, b: number, c: number) => [number, number, number, number];
    readonly vk_law: (a: number, b: number) => [number, number, number, number];
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
