/* tslint:disable */
/* eslint-disable */

/**
 * Plain-text report of the derived constants for physical parameters.
 */
export function derive_report(theta: number, eta: number, mass: number, omega: number, hbar: number): string;

/**
 * Closed-form orbit over one period `2π/Ω` with Ω = 1, flattened as
 * `[tau, Q1, Q2, Pi1, Pi2]` per sample.
 */
export function spiral(eps_ratio: number, x: number, pi_x: number, y: number, pi_y: number, samples: number): Float64Array;

/**
 * Oscillator-1 Wigner marginal at squeezing step `k` (0..=6) on an
 * `n × n` grid, peak normalised to 1.
 *
 * Layout: `[q_min, q_max, p_min, p_max, r, tau]` followed by the values,
 * row `i` along Q1 and column `j` along Pi1. The window is the same for every
 * `k` so successive frames are comparable.
 */
export function squeezed_grid(eps_ratio: number, k: number, n: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly derive_report: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly spiral: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly squeezed_grid: (a: number, b: number, c: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
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
