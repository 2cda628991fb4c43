/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const derive_report: (a: number, b: number, c: number, d: number, e: number) => [number, number];
export const spiral: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const squeezed_grid: (a: number, b: number, c: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
