/** Request sequencing: concurrent in-flight requests are deduplicated by
 * query key and stale responses are discarded by sequence number, so a
 * slow earlier search can never overwrite a newer result. */

export class RequestGate<T> {
  private seq = 0;
  private inflight = new Map<string, Promise<T>>();

  /** Run (or join) the request for this key; resolve null when a newer
   * request was issued before this one settled. */
  async issue(key: string, run: () => Promise<T>): Promise<T | null> {
    const ticket = ++this.seq;
    let pending = this.inflight.get(key);
    if (!pending) {
      pending = run().finally(() => {
        this.inflight.delete(key);
      });
      this.inflight.set(key, pending);
    }
    const result = await pending;
    return ticket === this.seq ? result : null;
  }

  get inflightCount(): number {
    return this.inflight.size;
  }
}
