/* tslint:disable */
/* eslint-disable */

/**
 * One simulated round that the page steps frame by frame.
 */
export class Round {
    free(): void;
    [Symbol.dispose](): void;
    avoidance_radius(): number;
    clock(): number;
    /**
     * Frame of delivery, or 0 while undelivered.
     */
    delivered_at(): number;
    destination(): number;
    constructor(scheme_name: string, hybrid: boolean, timer: number, seed: bigint);
    pr_positions(): Float64Array;
    pt_positions(): Float64Array;
    side(): number;
    source(): number;
    /**
     * Per SU: 0 susceptible, 1 infected, 2 recovered, plus 4 if active this slot.
     */
    states(): Uint8Array;
    /**
     * Advances one frame; returns false once the timer has expired.
     */
    step(): boolean;
    /**
     * SU coordinates as `[x0, y0, x1, y1, …]`.
     */
    su_positions(): Float64Array;
}

/**
 * Derived access quantities for the reference deployment with the given
 * SU power (mW), avoidance coefficient and PT density.
 */
export function derive(p_su: number, rho: number, lambda_pt: number): Float64Array;

/**
 * Names matching the values returned by [`derive`].
 */
export function derive_keys(): string[];

/**
 * ODE samples flattened as `[t, S, I, R, P, t, S, …]`, every quarter frame.
 */
export function ode_curves(scheme_name: string, p_su: number, rho: number, lambda_pt: number, timer: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_round_free: (a: number, b: number) => void;
    readonly derive: (a: number, b: number, c: number) => [number, number, number, number];
    readonly derive_keys: () => [number, number];
    readonly ode_curves: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly round_avoidance_radius: (a: number) => number;
    readonly round_clock: (a: number) => number;
    readonly round_delivered_at: (a: number) => number;
    readonly round_destination: (a: number) => number;
    readonly round_new: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
    readonly round_pr_positions: (a: number) => [number, number];
    readonly round_pt_positions: (a: number) => [number, number];
    readonly round_side: (a: number) => number;
    readonly round_source: (a: number) => number;
    readonly round_states: (a: number) => [number, number];
    readonly round_step: (a: number) => number;
    readonly round_su_positions: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_drop_slice: (a: number, b: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
