/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_round_free: (a: number, b: number) => void;
export const derive: (a: number, b: number, c: number) => [number, number, number, number];
export const derive_keys: () => [number, number];
export const ode_curves: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const round_avoidance_radius: (a: number) => number;
export const round_clock: (a: number) => number;
export const round_delivered_at: (a: number) => number;
export const round_destination: (a: number) => number;
export const round_new: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
export const round_pr_positions: (a: number) => [number, number];
export const round_pt_positions: (a: number) => [number, number];
export const round_side: (a: number) => number;
export const round_source: (a: number) => number;
export const round_states: (a: number) => [number, number];
export const round_step: (a: number) => number;
export const round_su_positions: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_drop_slice: (a: number, b: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
