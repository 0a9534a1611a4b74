/** Live layout playback: drives the store from a job's progress stream.
 *
 * Each snapshot becomes the store's new position targets (the renderer
 * animates toward them), a terminal event freezes the final result, and a
 * dropped stream reconnects with backoff — fetching the job status first,
 * in case the run finished while we were away. */

import type { ApiClient } from "./api.js";
import type { LayoutParamsDoc, ProgressEvent } from "./types.js";
import type { ViewerStore } from "./state.js";

const TERMINAL = new Set(["converged", "stopped", "failed"]);

export interface PlaybackReadout {
  state: "idle" | "running" | "done" | "failed";
  iteration: number;
  maxDisplacement: number | null;
  converged: boolean | null;
  error: string | null;
}

export class LayoutPlayback {
  readout: PlaybackReadout = {
    state: "idle",
    iteration: 0,
    maxDisplacement: null,
    converged: null,
    error: null,
  };
  jobId: string | null = null;
  /** progress events seen for the current job (terminal included) */
  eventCount = 0;
  /** events with state "running" only (position snapshots) */
  runningEvents = 0;

  private closer: (() => void) | null = null;
  private stopped = false;

  constructor(
    private api: ApiClient,
    private store: ViewerStore,
    private onChange: () => void = () => {},
    private reconnectDelayMs = 500,
  ) {}

  async start(params: LayoutParamsDoc = {}): Promise<string> {
    const { id } = await this.api.startLayout(params);
    this.jobId = id;
    this.eventCount = 0;
    this.runningEvents = 0;
    this.stopped = false;
    this.readout = {
      state: "running",
      iteration: 0,
      maxDisplacement: null,
      converged: null,
      error: null,
    };
    this.onChange();
    this.subscribe();
    return id;
  }

  async stop(): Promise<void> {
    if (this.jobId !== null) {
      await this.api.stopJob(this.jobId);
    }
  }

  close(): void {
    this.stopped = true;
    this.closer?.();
  }

  /** Resolves once the active job reaches a terminal state. */
  async waitDone(timeoutMs = 60000): Promise<void> {
    const deadline = Date.now() + timeoutMs;
    while (this.readout.state === "running") {
      if (Date.now() > deadline) {
        throw new Error("layout job did not finish in time");
      }
      await sleep(20);
    }
  }

  private subscribe(): void {
    if (this.jobId === null || this.stopped) {
      return;
    }
    const subscription = this.api.subscribeEvents(this.jobId, (event) =>
      this.handleEvent(event),
    );
    this.closer = subscription.close;
    subscription.done
      .catch(() => undefined) // drops fall through to the reconnect path
      .then(() => {
        if (this.readout.state === "running" && !this.stopped) {
          void this.reconnect();
        }
      });
  }

  private async reconnect(): Promise<void> {
    await sleep(this.reconnectDelayMs);
    if (this.stopped || this.jobId === null || this.readout.state !== "running") {
      return;
    }
    try {
      const status = await this.api.jobStatus(this.jobId);
      if (TERMINAL.has(status.state)) {
        // finished while disconnected: freeze at the final result
        if (status.layout) {
          this.store.setPositions(status.layout.positions);
        }
        this.finish(status.state === "failed" ? "failed" : "done",
          status.converged ?? null, status.error ?? null,
          status.iterations ?? this.readout.iteration);
        return;
      }
    } catch {
      // status probe failed too; fall through and retry the stream
    }
    this.subscribe();
  }

  private handleEvent(event: ProgressEvent): void {
    this.eventCount += 1;
    if (event.state === "running") {
      this.runningEvents += 1;
    }
    if (event.positions) {
      this.store.setPositions(event.positions);
    }
    if (event.iteration !== undefined) {
      this.readout.iteration = event.iteration;
    }
    if (event.maxDisplacement !== undefined) {
      this.readout.maxDisplacement = event.maxDisplacement;
    }
    if (TERMINAL.has(event.state)) {
      this.finish(event.state === "failed" ? "failed" : "done",
        event.converged ?? null, event.error ?? null,
        event.iterations ?? this.readout.iteration);
      return;
    }
    this.onChange();
  }

  private finish(
    state: "done" | "failed",
    converged: boolean | null,
    error: string | null,
    iterations: number,
  ): void {
    this.readout.state = state;
    this.readout.converged = converged;
    this.readout.error = error;
    this.readout.iteration = iterations;
    this.onChange();
  }
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
