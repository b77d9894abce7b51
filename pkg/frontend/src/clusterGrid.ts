// Front page of the group-to-group workflow: one card per high-suspicion
// group, each previewing its top outlier images.

import { ClusterList } from "./api.js";
import { clear, el } from "./dom.js";
import { ThumbHandlers, thumbnail } from "./thumbnails.js";

export interface ClusterGridHandlers extends ThumbHandlers {
    onOpenCluster(clusterId: number): void;
}

export function renderClusterGrid(
    container: HTMLElement,
    payload: ClusterList,
    imageUrl: (id: string) => string,
    handlers: ClusterGridHandlers,
): void {
    const doc = container.ownerDocument;
    clear(container);
    container.appendChild(el(
        doc, "h2", "view-title", "Groups with the most suspicious images",
    ));

    const grid = el(doc, "div", "cluster-grid");
    for (const summary of payload.clusters) {
        const card = el(doc, "div", "cluster-card");
        card.dataset.clusterId = String(summary.cluster_id);

        const title = el(
            doc, "h3", "cluster-title",
            `Group #${summary.cluster_id}`,
        );
        card.appendChild(title);
        card.appendChild(el(
            doc, "p", "cluster-meta",
            `${summary.size} images · mean suspicion ` +
                summary.mean_suspicion.toFixed(2),
        ));

        const reps = el(doc, "div", "cluster-reps");
        for (const id of summary.representatives) {
            reps.appendChild(thumbnail(doc, id, imageUrl, {
                // a representative click opens the whole group
                onFocus: () => handlers.onOpenCluster(summary.cluster_id),
                onHover: handlers.onHover,
            }));
        }
        card.appendChild(reps);

        const open = el(doc, "button", "open-cluster", "compare to original");
        open.addEventListener("click", () =>
            handlers.onOpenCluster(summary.cluster_id));
        card.appendChild(open);
        grid.appendChild(card);
    }
    container.appendChild(grid);
}
