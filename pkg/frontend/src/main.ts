// Application shell: hash routing between the two workflows, with the
// projection scatter and findings panel linked to whichever view is open.
//
// Routes:  #/list            sorted entry list (nearest-neighbor workflow)
//          #/focus/<id>      side-by-side histogram for one image
//          #/groups          group cards (group-to-group workflow)
//          #/group/<id>      side-by-side histogram for one group

import { ApiClient, ApiError } from "./api.js";
import { banner, clear, el } from "./dom.js";
import { renderClusterGrid } from "./clusterGrid.js";
import { renderFindingForm } from "./findings.js";
import { ProjectionView } from "./projection.js";
import { renderSideBySide } from "./sideBySide.js";
import { renderSortedList } from "./sortedList.js";

const PAGE_SIZE = 24;

function apiBase(): string {
    const override = new URLSearchParams(window.location.search).get("api");
    return override ?? `http://${window.location.hostname}:8080`;
}

class App {
    private api = new ApiClient(apiBase());
    private main = document.getElementById("main") as HTMLElement;
    private side = document.getElementById("sidebar") as HTMLElement;
    private pinned = new Set<string>();
    private projection: ProjectionView | null = null;
    private projectionLoaded = false;

    private imageUrl = (id: string) => this.api.imageUrl(id);

    private thumbHandlers() {
        return {
            onFocus: (id: string) => {
                window.location.hash = `#/focus/${encodeURIComponent(id)}`;
            },
            onHover: (id: string | null) =>
                this.projection?.highlight(id ?? null),
            onTogglePin: (id: string) => {
                if (this.pinned.has(id)) this.pinned.delete(id);
                else this.pinned.add(id);
                this.renderSidebar();
            },
            isPinned: (id: string) => this.pinned.has(id),
        };
    }

    async route(): Promise<void> {
        const hash = window.location.hash || "#/list";
        const [, view, arg] = hash.split("/");
        try {
            if (view === "focus" && arg) {
                await this.showFocus(decodeURIComponent(arg));
            } else if (view === "groups") {
                await this.showGroups();
            } else if (view === "group" && arg) {
                await this.showGroupHistogram(Number(arg));
            } else {
                await this.showList();
            }
        } catch (err) {
            if (err instanceof ApiError && err.status === 409) {
                banner(this.main, "notice",
                    "This view needs artifacts that are not computed yet " +
                    "(run the pipeline's cluster/project steps).");
            } else {
                banner(this.main, "error",
                    "Cannot reach the analysis service. Is `serve` running?");
            }
        }
        this.renderSidebar();
    }

    private async showList(offset = 0): Promise<void> {
        const page = await this.api.instances({
            split: "test", offset, limit: PAGE_SIZE,
        });
        renderSortedList(this.main, page, this.imageUrl, {
            ...this.thumbHandlers(),
            onPage: (next) => void this.showList(next),
        });
    }

    private async showFocus(id: string): Promise<void> {
        const [payload, hood] = await Promise.all([
            this.api.focusHistogram(id),
            this.api.neighbors(id),
        ]);
        renderSideBySide(this.main, payload, this.imageUrl,
            this.thumbHandlers());
        await this.ensureProjection();
        this.projection?.highlight(id, hood.test);
    }

    private async showGroups(): Promise<void> {
        const payload = await this.api.clusters();
        renderClusterGrid(this.main, payload, this.imageUrl, {
            ...this.thumbHandlers(),
            onOpenCluster: (cid) => {
                window.location.hash = `#/group/${cid}`;
            },
        });
    }

    private async showGroupHistogram(clusterId: number): Promise<void> {
        const payload = await this.api.clusterHistogram(clusterId);
        renderSideBySide(this.main, payload, this.imageUrl,
            this.thumbHandlers());
        await this.ensureProjection();
        const testIds = payload.bins.flatMap((b) => b.test);
        this.projection?.highlight(null, testIds);
    }

    private async ensureProjection(): Promise<void> {
        if (this.projectionLoaded) return;
        const host = document.getElementById("projection");
        if (!host) return;
        this.projection = new ProjectionView(host);
        try {
            const points = await this.api.projection();
            this.projection.render(points, (id) => {
                window.location.hash = `#/focus/${encodeURIComponent(id)}`;
            });
            this.projectionLoaded = true;
        } catch {
            // overview is optional; views stay usable without it
            banner(host, "notice", "No 2D overview available.");
        }
    }

    private renderSidebar(): void {
        clear(this.side);
        const nav = el(document, "nav", "workflow-nav");
        for (const [label, target] of [
            ["images one by one", "#/list"],
            ["groups", "#/groups"],
        ] as const) {
            const link = el(document, "a", "nav-link", label);
            link.href = target;
            nav.appendChild(link);
        }
        this.side.appendChild(nav);

        const projectionHost = el(document, "div", "projection-host");
        projectionHost.id = "projection";
        this.side.appendChild(projectionHost);
        this.projectionLoaded = false;
        void this.ensureProjection();

        const findingsHost = el(document, "div", "findings-host");
        this.side.appendChild(findingsHost);
        renderFindingForm(findingsHost, this.pinned, {
            onSubmit: async (description, instanceIds) => {
                await this.api.submitFinding({
                    description, instance_ids: instanceIds,
                });
            },
        });
    }
}

export function start(): void {
    const app = new App();
    window.addEventListener("hashchange", () => void app.route());
    void app.route();
}

if (typeof document !== "undefined" && document.getElementById("main")) {
    start();
}
