/** Typed client over the archive service JSON contract.
 *
 * The fetch function is injectable so tests can run without a network.
 * Facet navigation never rebuilds query strings locally: the server's
 * facet URLs are issued verbatim.
 */
import type {
  ApiError,
  ImageSearchResponse,
  MapResponse,
  SearchResponse,
  StatueDetail,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ServiceError extends Error {
  constructor(
    public readonly status: number,
    public readonly body: ApiError,
  ) {
    super(`${body.code}: ${body.message}`);
  }
}

async function parse<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    throw new ServiceError(resp.status, (await resp.json()) as ApiError);
  }
  return (await resp.json()) as T;
}

export interface SearchArgs {
  q?: string;
  field?: string;
  k?: number;
  offset?: number;
  filters?: Record<string, string>;
}

export class ApiClient {
  constructor(
    private readonly base: string,
    private readonly fetchFn: FetchLike = (i, init) => fetch(i, init),
  ) {}

  searchUrl(args: SearchArgs): string {
    const params = new URLSearchParams();
    if (args.q !== undefined) params.set("q", args.q);
    if (args.field !== undefined) params.set("field", args.field);
    if (args.k !== undefined) params.set("k", String(args.k));
    if (args.offset) params.set("offset", String(args.offset));
    for (const [f, v] of Object.entries(args.filters ?? {})) params.set(f, v);
    return `${this.base}/api/search?${params.toString()}`;
  }

  search(args: SearchArgs): Promise<SearchResponse> {
    return this.fetchFn(this.searchUrl(args)).then((r) => parse(r));
  }

  /** Issue a server-provided facet URL exactly as given. */
  followFacet(facetUrl: string): Promise<SearchResponse> {
    const absolute = facetUrl.startsWith("http") ? facetUrl : this.base + facetUrl;
    return this.fetchFn(absolute).then((r) => parse(r));
  }

  searchImage(form: FormData): Promise<ImageSearchResponse> {
    return this.fetchFn(`${this.base}/api/search/image`, {
      method: "POST",
      body: form,
    }).then((r) => parse(r));
  }

  statue(id: string): Promise<StatueDetail> {
    return this.fetchFn(`${this.base}/api/statues/${encodeURIComponent(id)}`).then(
      (r) => parse(r),
    );
  }

  editStatue(id: string, fields: Record<string, string | null>): Promise<StatueDetail> {
    return this.fetchFn(`${this.base}/api/statues/${encodeURIComponent(id)}`, {
      method: "PATCH",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(fields),
    }).then((r) => parse(r));
  }

  map(scope: "all" | "query", extra: Record<string, string> = {}): Promise<MapResponse> {
    const params = new URLSearchParams({ scope, ...extra });
    return this.fetchFn(`${this.base}/api/map?${params.toString()}`).then((r) =>
      parse(r),
    );
  }
}
