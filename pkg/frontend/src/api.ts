// Typed client for the analysis service. The UI never computes scores,
// bins, or distances itself; every number rendered comes from a payload.

export interface DatasetInfo {
    counts: { train: number; test: number };
    spaces: Record<string, number>;
    methods: { method: string; space: string }[];
    clusters_available: boolean;
    projection_available: boolean;
}

export interface InstanceItem {
    id: string;
    split: "train" | "test";
    suspicion: number;
}

export interface InstancePage {
    total: number;
    offset: number;
    items: InstanceItem[];
}

export interface ScoreEntry {
    method: string;
    space: string;
    raw: number;
    ratio: number | null;
    suspicion: number;
}

export interface InstanceDetail {
    id: string;
    split: string;
    image: string;
    attributes: Record<string, number> | null;
    scores: ScoreEntry[];
}

export interface HistogramBin {
    lo: number;
    hi: number;
    train: string[];
    test: string[];
}

export interface HistogramPayload {
    subject: string | number;
    n_bins: number;
    bins: HistogramBin[];
}

export interface NeighborhoodPayload {
    focus: string;
    space: string;
    radius: number;
    train: string[];
    test: string[];
}

export interface ClusterSummary {
    cluster_id: number;
    size: number;
    mean_suspicion: number;
    representatives: string[];
}

export interface ClusterList {
    space: string;
    n_clusters: number;
    clusters: ClusterSummary[];
}

export interface ProjectionPoint {
    id: string;
    x: number;
    y: number;
}

export interface Finding {
    description: string;
    instance_ids?: string[];
}

export class ApiError extends Error {
    constructor(public status: number, message: string) {
        super(message);
    }
}

export class SchemaMismatch extends Error {}

/** The histogram view refuses to render a payload it cannot trust. */
export function validateHistogram(payload: unknown): HistogramPayload {
    const p = payload as HistogramPayload;
    if (!p || !Array.isArray(p.bins) || typeof p.n_bins !== "number") {
        throw new SchemaMismatch("histogram payload missing bins/n_bins");
    }
    if (p.bins.length !== p.n_bins) {
        throw new SchemaMismatch(
            `expected ${p.n_bins} bins, payload has ${p.bins.length}`,
        );
    }
    for (const bin of p.bins) {
        if (
            typeof bin.lo !== "number" || typeof bin.hi !== "number" ||
            !Array.isArray(bin.train) || !Array.isArray(bin.test)
        ) {
            throw new SchemaMismatch("histogram bin is malformed");
        }
    }
    return p;
}

export class ApiClient {
    constructor(private base: string = "") {}

    private async get<T>(path: string): Promise<T> {
        const resp = await fetch(this.base + path);
        if (!resp.ok) {
            throw new ApiError(resp.status, await resp.text());
        }
        return resp.json() as Promise<T>;
    }

    dataset(): Promise<DatasetInfo> {
        return this.get("/api/dataset");
    }

    instances(opts: { split?: string; offset?: number; limit?: number } = {}):
        Promise<InstancePage> {
        const params = new URLSearchParams();
        if (opts.split) params.set("split", opts.split);
        if (opts.offset !== undefined) params.set("offset", String(opts.offset));
        if (opts.limit !== undefined) params.set("limit", String(opts.limit));
        const qs = params.toString();
        return this.get(`/api/instances${qs ? "?" + qs : ""}`);
    }

    instanceDetail(id: string): Promise<InstanceDetail> {
        return this.get(`/api/instances/${encodeURIComponent(id)}`);
    }

    neighbors(id: string): Promise<NeighborhoodPayload> {
        return this.get(`/api/neighbors/${encodeURIComponent(id)}`);
    }

    async focusHistogram(id: string): Promise<HistogramPayload> {
        const raw = await this.get<unknown>(
            `/api/histogram/focus/${encodeURIComponent(id)}`,
        );
        return validateHistogram(raw);
    }

    clusters(): Promise<ClusterList> {
        return this.get("/api/clusters");
    }

    async clusterHistogram(clusterId: number): Promise<HistogramPayload> {
        const raw = await this.get<unknown>(
            `/api/clusters/${clusterId}/histogram`,
        );
        return validateHistogram(raw);
    }

    projection(): Promise<ProjectionPoint[]> {
        return this.get("/api/projection");
    }

    imageUrl(id: string): string {
        return `${this.base}/images/${encodeURIComponent(id)}`;
    }

    async submitFinding(finding: Finding): Promise<Finding> {
        const resp = await fetch(`${this.base}/api/findings`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(finding),
        });
        if (!resp.ok) {
            throw new ApiError(resp.status, await resp.text());
        }
        return resp.json() as Promise<Finding>;
    }
}
