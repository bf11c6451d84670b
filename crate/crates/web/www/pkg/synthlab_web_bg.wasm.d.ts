/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const builtin_scenarios: () => [number, number];
export const bump_on_cyclic: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const canonical: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number, number];
export const certificate: (a: number, b: number, c: bigint) => [number, number, number, number];
export const union: (a: number, b: number, c: number, d: bigint, e: number, f: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_drop_slice: (a: number, b: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
