/** Thin typed client over the server's REST API. */

import type {
  ConfigValues, JobKind, JobStatus, KeyedError, LoadModelResponse, WarningInfo,
} from "./types.js";

/** Raised for 422 responses; carries the per-key error list the form
 * highlights from. */
export class ValidationFailure extends Error {
  constructor(public errors: KeyedError[]) {
    super(errors.map((e) => `${e.key}: ${e.message}`).join("; "));
  }
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function unwrap<T>(res: Response): Promise<T> {
  if (res.status === 422) {
    const body = await res.json().catch(() => null);
    if (body && Array.isArray(body.errors)) {
      throw new ValidationFailure(body.errors as KeyedError[]);
    }
    throw new ApiError(422, typeof body?.detail === "string" ? body.detail : "invalid input");
  }
  if (!res.ok) {
    const body = await res.json().catch(() => null);
    throw new ApiError(res.status, typeof body?.detail === "string" ? body.detail : res.statusText);
  }
  return res.json() as Promise<T>;
}

export class Client {
  constructor(public baseUrl: string, private fetchFn: typeof fetch = fetch) {}

  private req(path: string, init?: RequestInit): Promise<Response> {
    return this.fetchFn(this.baseUrl + path, {
      headers: { "content-type": "application/json" },
      ...init,
    });
  }

  async createSession(): Promise<string> {
    const body = await unwrap<{ id: string }>(await this.req("/sessions", { method: "POST" }));
    return body.id;
  }

  loadModel(session: string, text: string, filename?: string): Promise<LoadModelResponse> {
    return this.req(`/sessions/${session}/model`, {
      method: "POST",
      body: JSON.stringify({ text, filename }),
    }).then((r) => unwrap<LoadModelResponse>(r));
  }

  listConfigs(session: string): Promise<string[]> {
    return this.req(`/sessions/${session}/configs`)
      .then((r) => unwrap<{ configs: string[] }>(r))
      .then((b) => b.configs);
  }

  readConfig(session: string, name: string): Promise<ConfigValues> {
    return this.req(`/sessions/${session}/configs/${encodeURIComponent(name)}`)
      .then((r) => unwrap<{ values: ConfigValues }>(r))
      .then((b) => b.values);
  }

  writeConfig(session: string, name: string, values: ConfigValues): Promise<ConfigValues> {
    return this.req(`/sessions/${session}/configs/${encodeURIComponent(name)}`, {
      method: "PUT",
      body: JSON.stringify({ values }),
    }).then((r) => unwrap<{ values: ConfigValues }>(r)).then((b) => b.values);
  }

  cloneConfig(session: string, name: string, newName?: string): Promise<string[]> {
    return this.req(`/sessions/${session}/configs/${encodeURIComponent(name)}/clone`, {
      method: "POST",
      body: JSON.stringify(newName ? { name: newName } : {}),
    }).then((r) => unwrap<{ configs: string[] }>(r)).then((b) => b.configs);
  }

  renameConfig(session: string, name: string, newName: string): Promise<string[]> {
    return this.req(`/sessions/${session}/configs/${encodeURIComponent(name)}/rename`, {
      method: "POST",
      body: JSON.stringify({ name: newName }),
    }).then((r) => unwrap<{ configs: string[] }>(r)).then((b) => b.configs);
  }

  deleteConfig(session: string, name: string): Promise<string[]> {
    return this.req(`/sessions/${session}/configs/${encodeURIComponent(name)}/delete`, {
      method: "POST",
    }).then((r) => unwrap<{ configs: string[] }>(r)).then((b) => b.configs);
  }

  warnings(session: string, config?: string): Promise<WarningInfo[]> {
    const query = config ? `?config=${encodeURIComponent(config)}` : "";
    return this.req(`/sessions/${session}/warnings${query}`)
      .then((r) => unwrap<{ warnings: WarningInfo[] }>(r))
      .then((b) => b.warnings);
  }

  submitJob(session: string, kind: JobKind, configName: string,
            extra?: { invariant?: string; baseState?: string }): Promise<string> {
    return this.req(`/sessions/${session}/jobs`, {
      method: "POST",
      body: JSON.stringify({ kind, configName, ...extra }),
    }).then((r) => unwrap<{ id: string }>(r)).then((b) => b.id);
  }

  jobStatus(jobId: string): Promise<JobStatus> {
    return this.req(`/jobs/${jobId}`).then((r) => unwrap<JobStatus>(r));
  }

  cancelJob(jobId: string): Promise<void> {
    return this.req(`/jobs/${jobId}/cancel`, { method: "POST" })
      .then((r) => unwrap<unknown>(r)).then(() => undefined);
  }

  /** Poll until the job leaves the queue; calls onTick with every status. */
  async awaitJob(jobId: string, onTick?: (s: JobStatus) => void,
                 intervalMs = 150, timeoutMs = 120_000): Promise<JobStatus> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const status = await this.jobStatus(jobId);
      onTick?.(status);
      if (status.state === "done" || status.state === "cancelled") return status;
      if (Date.now() > deadline) throw new ApiError(0, `job ${jobId} still running`);
      await new Promise((resolve) => setTimeout(resolve, intervalMs));
    }
  }
}
