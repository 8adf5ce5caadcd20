export { ApiClient, ServiceError } from "./api.js";
export type { FetchLike, SearchArgs } from "./api.js";
export * from "./types.js";
export * from "./viewstate.js";
export * from "./mapview.js";
export * from "./upload.js";
export { RequestGate } from "./requests.js";
export * from "./ui.js";
