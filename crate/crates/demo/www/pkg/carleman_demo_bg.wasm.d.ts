/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demo_free: (a: number, b: number) => void;
export const __wbg_solution_free: (a: number, b: number) => void;
export const demo_n: (a: number) => number;
export const demo_new: (a: number) => [number, number, number];
export const demo_solve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const log_weight: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const solution_converged: (a: number) => number;
export const solution_exact: (a: number) => [number, number];
export const solution_field: (a: number) => [number, number];
export const solution_hlb_diff: (a: number) => [number, number];
export const solution_iterations: (a: number) => number;
export const solution_l2_diff: (a: number) => [number, number];
export const solution_rel_l2: (a: number) => number;
export const solution_rel_linf: (a: number) => number;
export const __externref_table_alloc: () => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
