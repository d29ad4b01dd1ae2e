// Typed client for the prediction service. Every label shown anywhere in
// the console comes out of these calls; the client never classifies or
// discretizes on its own.

export interface RegisterFields {
  name: string;
  gender: string;
  branch: string;
  email: string;
  password: string;
}

export interface PredictFields {
  name: string;
  app_id: string;
  gender: string;
  percent: number;
  merit: number;
  type: string;
  algorithm?: string;
  model_id?: string;
}

export interface PredictResult {
  predicted: string;
  algorithm: string;
  model_id: string;
  entry_id: string;
}

export interface UploadResult {
  dataset_id: string;
  rows: number;
}

export interface TrainResult {
  model_id: string;
  algorithm: string;
  dropped_rows: number;
  stats: { training_rows: number; node_count: number; leaf_count: number };
}

export interface RowPrediction {
  ref: string | number;
  inputs: Record<string, string | number | null>;
  predicted: string;
}

export interface EvaluateResult {
  model_id: string;
  algorithm: string;
  wall_time_ms: number;
  predictions: RowPrediction[];
}

export interface MismatchRow {
  ref: string | number;
  inputs: Record<string, string | number | null>;
  actual: string;
  predicted: string;
}

export interface VerifyResult {
  model_id: string;
  algorithm: string;
  total: number;
  correct: number;
  accuracy: number;
  wall_time_ms: number;
  mismatches: MismatchRow[];
}

export interface HistoryEntry {
  entry_id: string;
  app_id: string;
  name: string;
  gender: string;
  percent: number;
  merit: number;
  type: string;
  algorithm: string;
  predicted: string;
  created_at: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly error: string,
    readonly detail: string,
  ) {
    super(`${error}: ${detail}`);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

const MULTIPART_BOUNDARY = "gradegauge-upload-7f3a91c2";

export class ApiClient {
  private token: string | null = null;

  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  setToken(token: string | null): void {
    this.token = token;
  }

  hasToken(): boolean {
    return this.token !== null;
  }

  async register(fields: RegisterFields): Promise<{ account_id: string }> {
    return this.request("POST", "/api/register", fields, false);
  }

  async login(email: string, password: string): Promise<string> {
    const body = await this.request<{ token: string }>(
      "POST", "/api/login", { email, password }, false);
    this.token = body.token;
    return body.token;
  }

  async uploadDataset(filename: string, text: string): Promise<UploadResult> {
    // Multipart is assembled by hand so the same client runs in browsers
    // and in node-driven tests without relying on a FormData flavour.
    const b = MULTIPART_BOUNDARY;
    const body =
      `--${b}\r\n` +
      `Content-Disposition: form-data; name="file"; filename="${filename}"\r\n` +
      "Content-Type: text/csv\r\n\r\n" +
      text +
      `\r\n--${b}--\r\n`;
    return this.send("POST", "/api/datasets", body,
      `multipart/form-data; boundary=${b}`, true);
  }

  async train(datasetId: string, algorithm: string): Promise<TrainResult> {
    return this.request("POST", "/api/models",
      { dataset_id: datasetId, algorithm });
  }

  async predict(fields: PredictFields): Promise<PredictResult> {
    return this.request("POST", "/api/predict", fields);
  }

  async evaluate(datasetId: string, modelId: string): Promise<EvaluateResult> {
    return this.request("POST", "/api/evaluate",
      { dataset_id: datasetId, model_id: modelId });
  }

  async verify(datasetId: string, modelId: string): Promise<VerifyResult> {
    return this.request("POST", "/api/verify",
      { dataset_id: datasetId, model_id: modelId });
  }

  async history(): Promise<HistoryEntry[]> {
    const body = await this.request<{ entries: HistoryEntry[] }>(
      "GET", "/api/history");
    return body.entries;
  }

  async deleteHistory(entryId: string): Promise<void> {
    await this.request("DELETE", `/api/history/${entryId}`);
  }

  private async request<T>(method: string, path: string,
                           payload?: unknown, authed = true): Promise<T> {
    const body = payload === undefined ? undefined : JSON.stringify(payload);
    return this.send(method, path, body, "application/json", authed);
  }

  private async send<T>(method: string, path: string,
                        body: string | undefined, contentType: string,
                        authed: boolean): Promise<T> {
    if (authed && this.token === null) {
      throw new ApiError(0, "NoSession", "log in first");
    }
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["Content-Type"] = contentType;
    if (authed && this.token !== null) {
      headers["Authorization"] = `Bearer ${this.token}`;
    }
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path,
        { method, headers, body });
    } catch (err) {
      throw new ApiError(0, "NetworkError", String(err));
    }
    const text = await response.text();
    let parsed: unknown = null;
    try {
      parsed = text === "" ? null : JSON.parse(text);
    } catch {
      parsed = null;
    }
    if (!response.ok) {
      const shaped = parsed as { error?: string; detail?: string } | null;
      throw new ApiError(response.status,
        shaped?.error ?? `Http${response.status}`,
        shaped?.detail ?? text);
    }
    return parsed as T;
  }
}
