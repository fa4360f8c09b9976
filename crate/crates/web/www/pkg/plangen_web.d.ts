/* tslint:disable */
/* eslint-disable */

/**
 * Anonymizes a tuple and encodes its plan compactly. Returns
 * `{domain, problem, plan, compact, map}`.
 */
export function anonymize(domain: string, problem: string, plan: string): string;

/**
 * The toy ferry domain, problem and generation config the page starts with.
 */
export function examples(): string;

/**
 * Draws one problem from a generation config and solves it. Returns
 * `{problem, plan}` texts.
 */
export function generate(domain: string, dpgc: string, seed: number): string;

/**
 * Validates a plan. Returns `{outcome, reward, summary, report, atoms}`
 * where `atoms` is the state size before each executed step followed by
 * the final state size.
 */
export function validate_plan(domain: string, problem: string, plan: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly anonymize: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly examples: () => [number, number];
    readonly generate: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly validate_plan: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
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
