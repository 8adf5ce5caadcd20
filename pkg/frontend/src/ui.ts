/** Framework-free view builders. Each function renders plain DOM from
 * server data; navigation intents come back through callbacks so routing
 * and fetching stay outside. Facet chips carry the server URL verbatim. */
import type { Facet, SearchResult, StatueDetail } from "./types.js";

export interface Nav {
  onFacet: (facetUrl: string) => void;
  onStatue: (id: string) => void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function facetChip(doc: Document, facet: Facet, nav: Nav): HTMLElement {
  const chip = el(doc, "button", "facet-chip", `${facet.field}: ${facet.value}`);
  chip.dataset.facetUrl = facet.url;
  chip.addEventListener("click", () => nav.onFacet(facet.url));
  return chip;
}

export function renderResultCard(
  doc: Document,
  result: SearchResult,
  nav: Nav,
): HTMLElement {
  const card = el(doc, "article", "result-card");
  card.dataset.statueId = result.id;
  const title = el(doc, "h3", "result-title", result.id);
  title.addEventListener("click", () => nav.onStatue(result.id));
  card.append(title);
  card.append(el(doc, "span", "result-score", result.score.toFixed(4)));
  const chips = el(doc, "div", "facet-row");
  for (const facet of result.facets) chips.append(facetChip(doc, facet, nav));
  card.append(chips);
  return card;
}

export function renderResultList(
  doc: Document,
  results: SearchResult[],
  nav: Nav,
): HTMLElement {
  const list = el(doc, "section", "result-list");
  if (results.length === 0) {
    list.append(el(doc, "p", "empty-state", "No statues match this query."));
    return list;
  }
  for (const result of results) list.append(renderResultCard(doc, result, nav));
  return list;
}

export function renderError(doc: Document, message: string): HTMLElement {
  return el(doc, "p", "error-banner", message);
}

export function renderStatueDetail(
  doc: Document,
  detail: StatueDetail,
  nav: Nav,
): HTMLElement {
  const page = el(doc, "section", "statue-detail");
  page.append(el(doc, "h2", "statue-id", detail.id));

  const gallery = el(doc, "div", "gallery");
  for (const image of detail.images) {
    const fig = el(doc, "figure", "picture");
    fig.dataset.imageId = image.id;
    fig.append(el(doc, "figcaption", undefined, image.path));
    gallery.append(fig);
  }
  page.append(gallery);

  const table = el(doc, "table", "metadata");
  for (const [field, value] of Object.entries(detail.metadata)) {
    const row = el(doc, "tr", "metadata-row");
    row.append(el(doc, "td", "field", field), el(doc, "td", "value", value));
    table.append(row);
  }
  // predictions are visually distinct from confirmed metadata
  for (const [field, pred] of Object.entries(detail.predicted)) {
    const row = el(doc, "tr", "metadata-row predicted");
    row.append(
      el(doc, "td", "field", field),
      el(doc, "td", "value", `${pred.label} (predicted, ${Math.round(pred.confidence * 100)}%)`),
    );
    table.append(row);
  }
  page.append(table);

  const chips = el(doc, "div", "facet-row");
  for (const facet of detail.facets) chips.append(facetChip(doc, facet, nav));
  page.append(chips);

  const viewer = el(doc, "div", "viewer-3d disabled", "3D view unavailable");
  page.append(viewer);
  return page;
}
