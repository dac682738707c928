/* tslint:disable */
/* eslint-disable */

/**
 * A factored solver on an `n × n` grid, reused across solves.
 */
export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    constructor(n: number);
    /**
     * `problem` is `1`-`4`, `test1`-`test4` or `linear`.
     */
    solve(problem: string, delta: number, seed: number): Solution;
    readonly n: number;
}

/**
 * Fields are flattened with `i` (the `x` index) varying fastest.
 */
export class Solution {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly converged: boolean;
    readonly exact: Float64Array;
    readonly field: Float64Array;
    /**
     * The same differences in the weighted `H¹` norm.
     */
    readonly hlb_diff: Float64Array;
    readonly iterations: number;
    /**
     * `‖u_{k+1} - u_k‖` in `L²`, one entry per iteration.
     */
    readonly l2_diff: Float64Array;
    readonly rel_l2: number;
    readonly rel_linf: number;
}

export function log_weight(n: number, lambda: number, beta: number, x0_x: number, x0_y: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly __wbg_solution_free: (a: number, b: number) => void;
    readonly demo_n: (a: number) => number;
    readonly demo_new: (a: number) => [number, number, number];
    readonly demo_solve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly log_weight: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly solution_converged: (a: number) => number;
    readonly solution_exact: (a: number) => [number, number];
    readonly solution_field: (a: number) => [number, number];
    readonly solution_hlb_diff: (a: number) => [number, number];
    readonly solution_iterations: (a: number) => number;
    readonly solution_l2_diff: (a: number) => [number, number];
    readonly solution_rel_l2: (a: number) => number;
    readonly solution_rel_linf: (a: number) => number;
    readonly __externref_table_alloc: () => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
