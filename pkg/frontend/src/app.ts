/** Hash-routed bootstrap tying the client, view state and views together. */
import { ApiClient, ServiceError } from "./api.js";
import { RequestGate } from "./requests.js";
import type { SearchResponse } from "./types.js";
import { renderError, renderResultList, renderStatueDetail } from "./ui.js";
import { History, decodeViewState, encodeViewState, type ViewState } from "./viewstate.js";

export function mountApp(root: HTMLElement, client: ApiClient): void {
  const doc = root.ownerDocument;
  const win = doc.defaultView!;
  const gate = new RequestGate<SearchResponse>();
  const history = new History();

  const nav = {
    onFacet: (facetUrl: string) => {
      void client.followFacet(facetUrl).then((resp) => {
        root.replaceChildren(renderResultList(doc, resp.results, nav));
      });
    },
    onStatue: (id: string) => {
      const state = decodeViewState(win.location.hash.slice(1));
      history.push(state);
      win.location.hash = encodeViewState({ ...state, selected: id });
    },
  };

  async function render(): Promise<void> {
    const state: ViewState = decodeViewState(win.location.hash.slice(1));
    try {
      if (state.selected) {
        const detail = await client.statue(state.selected);
        root.replaceChildren(renderStatueDetail(doc, detail, nav));
        return;
      }
      if (state.q === undefined && Object.keys(state.filters).length === 0) {
        root.replaceChildren(renderResultList(doc, [], nav));
        return;
      }
      const key = encodeViewState(state);
      const resp = await gate.issue(key, () =>
        client.search({ q: state.q, filters: state.filters, offset: state.page * 20 }),
      );
      if (resp !== null) {
        root.replaceChildren(renderResultList(doc, resp.results, nav));
      }
    } catch (err) {
      const message = err instanceof ServiceError ? err.body.message : String(err);
      root.replaceChildren(renderError(doc, message));
    }
  }

  win.addEventListener("hashchange", () => void render());
  void render();
}
