/** Shared JSON shapes of the archive service API. */

export interface Facet {
  field: string;
  value: string;
  /** Ready-to-issue search URL; clients must use it verbatim. */
  url: string;
}

export interface SearchResult {
  id: string;
  score: number;
  rank: number;
  facets: Facet[];
}

export interface SearchResponse {
  query: string | null;
  filters: Record<string, string>;
  k: number;
  offset: number;
  total: number;
  results: SearchResult[];
  archive_version: number;
}

export interface ImageRecord {
  id: string;
  path: string;
  folder_id: string;
  timestamp?: number;
  statue_id?: string;
}

export interface Prediction {
  label: string;
  confidence: number;
}

export interface StatueDetail {
  id: string;
  metadata: Record<string, string>;
  canonical_image: string;
  images: ImageRecord[];
  predicted: Record<string, Prediction>;
  facets: Facet[];
  archive_version: number;
}

export interface MapPoint {
  id: string;
  x: number;
  y: number;
}

export interface MapResponse {
  scope: string;
  namespace: string;
  points: MapPoint[];
  archive_version: number;
}

export interface ImageSearchResponse {
  global: SearchResult[];
  faces: { bbox: number[] | null; results: SearchResult[] }[];
  archive_version: number;
}

export interface ApiError {
  code: string;
  message: string;
  detail: string;
  suggestions?: string[];
}
