/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const impact_curves: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
export const landmark_sweep: (a: number, b: number, c: number, d: number, e: number) => [number, number];
export const rating_curve: (a: number, b: number, c: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
