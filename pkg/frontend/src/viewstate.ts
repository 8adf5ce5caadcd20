/** Shareable view state: the URL encodes the full query state, so any
 * view reloads identically from its address (given the same archive
 * version) and the selection history is back-navigable. */

export interface Viewport {
  cx: number;
  cy: number;
  zoom: number;
}

export interface ViewState {
  q?: string;
  filters: Record<string, string>;
  page: number;
  selected?: string;
  viewport?: Viewport;
}

export const DEFAULT_VIEW: ViewState = { filters: {}, page: 0 };

const RESERVED = new Set(["q", "page", "selected", "vp"]);

export function encodeViewState(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.q !== undefined) params.set("q", state.q);
  for (const field of Object.keys(state.filters).sort()) {
    params.set(field, state.filters[field]);
  }
  if (state.page > 0) params.set("page", String(state.page));
  if (state.selected !== undefined) params.set("selected", state.selected);
  if (state.viewport) {
    const { cx, cy, zoom } = state.viewport;
    params.set("vp", `${cx},${cy},${zoom}`);
  }
  return params.toString();
}

export function decodeViewState(encoded: string): ViewState {
  const params = new URLSearchParams(encoded);
  const state: ViewState = { filters: {}, page: 0 };
  for (const [key, value] of params.entries()) {
    if (!RESERVED.has(key)) state.filters[key] = value;
  }
  const q = params.get("q");
  if (q !== null) state.q = q;
  const page = params.get("page");
  if (page !== null) state.page = Math.max(0, parseInt(page, 10) || 0);
  const selected = params.get("selected");
  if (selected !== null) state.selected = selected;
  const vp = params.get("vp");
  if (vp !== null) {
    const [cx, cy, zoom] = vp.split(",").map(Number);
    if ([cx, cy, zoom].every(Number.isFinite) && zoom > 0) {
      state.viewport = { cx, cy, zoom };
    }
  }
  return state;
}

/** Back-navigable selection history. */
export class History {
  private stack: ViewState[] = [];

  push(state: ViewState): void {
    this.stack.push(structuredClone(state));
  }

  back(): ViewState | undefined {
    return this.stack.pop();
  }

  get depth(): number {
    return this.stack.length;
  }
}
