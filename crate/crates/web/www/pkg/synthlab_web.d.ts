/* tslint:disable */
/* eslint-disable */

export function builtin_scenarios(): string[];

export function bump_on_cyclic(n: number, ones: Uint32Array, zeros: Uint32Array): string;

export function canonical(n: number, offset: number, sigma: number, noise: number, seed: bigint): string;

export function certificate(name: string, seed: bigint): string;

export function union(mode: string, n: number, seed: bigint, eps: number, smoothing_radius: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly builtin_scenarios: () => [number, number];
    readonly bump_on_cyclic: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly canonical: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number, number];
    readonly certificate: (a: number, b: number, c: bigint) => [number, number, number, number];
    readonly union: (a: number, b: number, c: number, d: bigint, e: number, f: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_drop_slice: (a: number, b: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
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
