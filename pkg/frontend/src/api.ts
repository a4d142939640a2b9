// Thin client over the session API. Documents pass through unmodified.

import type {
  ConfigPatch,
  EntityDetail,
  GroupingDoc,
  ModelSummary,
  SceneDoc,
  SmellDoc,
} from './types.js';

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
    readonly detail: unknown = null,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(private readonly fetchImpl: FetchLike = fetch.bind(globalThis)) {}

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchImpl(path);
    if (!response.ok) {
      throw new ApiError(`GET ${path} -> ${response.status}`, response.status);
    }
    return (await response.json()) as T;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await this.fetchImpl(path, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    });
    if (!response.ok) {
      let detail: unknown = null;
      try {
        detail = (await response.json()).detail;
      } catch {
        /* body was not JSON */
      }
      throw new ApiError(`POST ${path} -> ${response.status}`, response.status, detail);
    }
    return (await response.json()) as T;
  }

  fetchScene(): Promise<SceneDoc> {
    return this.get<SceneDoc>('/api/scene');
  }

  fetchSummary(): Promise<ModelSummary> {
    return this.get<ModelSummary>('/api/model/summary');
  }

  fetchGrouping(): Promise<GroupingDoc> {
    return this.get<GroupingDoc>('/api/grouping');
  }

  fetchSmells(): Promise<SmellDoc[]> {
    return this.get<SmellDoc[]>('/api/smells');
  }

  fetchEntity(entityId: string): Promise<EntityDetail> {
    return this.get<EntityDetail>(`/api/entity/${encodeURIComponent(entityId)}`);
  }

  updateConfig(patch: ConfigPatch): Promise<{ revision: number }> {
    return this.post<{ revision: number }>('/api/config', patch);
  }

  recluster(algorithm: 'lp' | 'greedy'): Promise<{ revision: number }> {
    return this.post<{ revision: number }>('/api/recluster', { algorithm });
  }
}
