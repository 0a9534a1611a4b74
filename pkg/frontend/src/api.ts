/** Typed client for the tgforge HTTP API plus an SSE reader that works on
 * fetch streams, so the same code runs in the browser and under node. */

import type {
  FilterSpecDoc,
  GraphDoc,
  JobStatus,
  LayoutParamsDoc,
  NodeDetails,
  ProgressEvent,
  VisibleSubgraph,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function jsonOrThrow<T>(response: Response): Promise<T> {
  if (response.ok) {
    return (await response.json()) as T;
  }
  let code = "http";
  let message = `${response.status} ${response.statusText}`;
  try {
    const doc = await response.json();
    if (doc && doc.error) {
      code = doc.error.code ?? code;
      message = doc.error.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the status line
  }
  throw new ApiError(response.status, code, message);
}

/** Incremental parser for text/event-stream payloads. Feed it chunks,
 * collect whole `data:` payloads; comment lines (keep-alives) are skipped. */
export class SseParser {
  private buffer = "";

  push(chunk: string): string[] {
    this.buffer += chunk;
    const events: string[] = [];
    let cut: number;
    while ((cut = this.buffer.indexOf("\n\n")) !== -1) {
      const block = this.buffer.slice(0, cut);
      this.buffer = this.buffer.slice(cut + 2);
      const data = block
        .split("\n")
        .filter((line) => line.startsWith("data:"))
        .map((line) => line.slice(5).trimStart())
        .join("\n");
      if (data.length > 0) {
        events.push(data);
      }
    }
    return events;
  }
}

export interface EventSubscription {
  close(): void;
  /** resolves when the stream ends (terminal event, drop, or close()) */
  done: Promise<void>;
}

export class ApiClient {
  constructor(
    private base = "",
    private fetchFn: typeof fetch = fetch,
  ) {}

  graph(): Promise<GraphDoc> {
    return this.get("/api/graph");
  }

  nodeDetails(id: string): Promise<NodeDetails> {
    return this.get(`/api/node/${encodeURIComponent(id)}`);
  }

  applyFilter(spec: FilterSpecDoc): Promise<VisibleSubgraph> {
    return this.post("/api/filter", spec);
  }

  startLayout(params: LayoutParamsDoc = {}): Promise<{ id: string }> {
    return this.post("/api/layout", params);
  }

  jobStatus(id: string): Promise<JobStatus> {
    return this.get(`/api/layout/${encodeURIComponent(id)}`);
  }

  stopJob(id: string): Promise<JobStatus> {
    return this.post(`/api/layout/${encodeURIComponent(id)}/stop`, {});
  }

  /** Subscribe to a job's progress events. onEvent fires per parsed event;
   * the subscription ends after a terminal event or a stream drop. */
  subscribeEvents(
    id: string,
    onEvent: (event: ProgressEvent) => void,
  ): EventSubscription {
    const controller = new AbortController();
    const done = (async () => {
      const response = await this.fetchFn(
        `${this.base}/api/layout/${encodeURIComponent(id)}/events`,
        { signal: controller.signal },
      );
      if (!response.ok || response.body === null) {
        throw new ApiError(response.status, "stream", "cannot open event stream");
      }
      const reader = response.body.getReader();
      const decoder = new TextDecoder();
      const parser = new SseParser();
      try {
        for (;;) {
          const { done: finished, value } = await reader.read();
          if (finished) {
            return;
          }
          for (const payload of parser.push(decoder.decode(value, { stream: true }))) {
            onEvent(JSON.parse(payload) as ProgressEvent);
          }
        }
      } finally {
        reader.releaseLock();
      }
    })().catch((err) => {
      if (!controller.signal.aborted) {
        throw err;
      }
    });
    return { close: () => controller.abort(), done };
  }

  private async get<T>(path: string): Promise<T> {
    return jsonOrThrow<T>(await this.fetchFn(this.base + path));
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    return jsonOrThrow<T>(
      await this.fetchFn(this.base + path, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      }),
    );
  }
}
