// @vitest-environment jsdom
//
// Fixture-replay tests: every payload below was recorded from the live
// analysis service, so rendered counts are checked against real responses.

import { readFileSync } from "node:fs";
import { join } from "node:path";
import { beforeEach, describe, expect, it, vi } from "vitest";

import {
    ClusterList,
    HistogramPayload,
    InstancePage,
    SchemaMismatch,
    validateHistogram,
} from "../src/api.js";
import { renderClusterGrid } from "../src/clusterGrid.js";
import { renderFindingForm } from "../src/findings.js";
import { ProjectionView } from "../src/projection.js";
import { renderSideBySide } from "../src/sideBySide.js";
import { renderSortedList } from "../src/sortedList.js";

function fixture<T>(name: string): T {
    const path = join(__dirname, "fixtures", name);
    return JSON.parse(readFileSync(path, "utf-8")) as T;
}

const imageUrl = (id: string) => `/images/${id}`;

function handlers() {
    return {
        onFocus: vi.fn(),
        onPage: vi.fn(),
        onOpenCluster: vi.fn(),
    };
}

let container: HTMLElement;

beforeEach(() => {
    container = document.createElement("div");
    document.body.appendChild(container);
});

describe("side-by-side histogram", () => {
    const payload = fixture<HistogramPayload>("focus_histogram.json");

    it("renders five aligned rows, top suspicion interval first", () => {
        renderSideBySide(container, payload, imageUrl, handlers());
        const rows = container.querySelectorAll(
            ".histogram-row:not(.histogram-heading)",
        );
        expect(rows.length).toBe(5);
        const los = [...rows].map((r) => Number((r as HTMLElement).dataset.lo));
        expect(los).toEqual([0.8, 0.6, 0.4, 0.2, 0.0]);
    });

    it("thumbnail counts equal payload counts per side and bin", () => {
        renderSideBySide(container, payload, imageUrl, handlers());
        const rows = container.querySelectorAll(
            ".histogram-row:not(.histogram-heading)",
        );
        payload.bins.forEach((bin, i) => {
            const left = rows[i].querySelectorAll(".bin-train img").length;
            const right = rows[i].querySelectorAll(".bin-test img").length;
            expect(left).toBe(bin.train.length);
            expect(right).toBe(bin.test.length);
        });
        const total = container.querySelectorAll(".histogram img").length;
        const expected = payload.bins.reduce(
            (n, b) => n + b.train.length + b.test.length, 0,
        );
        expect(total).toBe(expected);
    });

    it("clicking a thumbnail issues a focus request for exactly that id", () => {
        const h = handlers();
        renderSideBySide(container, payload, imageUrl, h);
        const firstTestId = payload.bins.flatMap((b) => b.test)[0];
        const tile = container.querySelector(
            `.bin-test .thumb[data-id="${firstTestId}"] img`,
        ) as HTMLElement;
        tile.click();
        expect(h.onFocus).toHaveBeenCalledTimes(1);
        expect(h.onFocus).toHaveBeenCalledWith(firstTestId);
    });

    it("keeps five aligned rows when one side is empty", () => {
        const clusterPayload =
            fixture<HistogramPayload>("cluster_histogram.json");
        const stripped: HistogramPayload = {
            ...clusterPayload,
            bins: clusterPayload.bins.map((b) => ({ ...b, train: [] })),
        };
        renderSideBySide(container, stripped, imageUrl, handlers());
        const rows = container.querySelectorAll(
            ".histogram-row:not(.histogram-heading)",
        );
        expect(rows.length).toBe(5);
        expect(container.querySelectorAll(".bin-train img").length).toBe(0);
        expect(container.querySelectorAll(".bin-test img").length).toBe(
            stripped.bins.reduce((n, b) => n + b.test.length, 0),
        );
    });

    it("shows the focal image for the image workflow and the group id for groups", () => {
        renderSideBySide(container, payload, imageUrl, handlers());
        const focal = container.querySelector(".focus-header .thumb img");
        expect(focal?.getAttribute("alt")).toBe(payload.subject);

        const clusterPayload =
            fixture<HistogramPayload>("cluster_histogram.json");
        renderSideBySide(container, clusterPayload, imageUrl, handlers());
        const title = container.querySelector(".focus-header .view-title");
        expect(title?.textContent).toContain(`#${clusterPayload.subject}`);
    });

    it("rejects a payload that fails schema validation", () => {
        expect(() => validateHistogram({ subject: 1 })).toThrow(SchemaMismatch);
        expect(() => validateHistogram({
            subject: 1, n_bins: 5, bins: [],
        })).toThrow(SchemaMismatch);
    });
});

describe("cluster grid", () => {
    const payload = fixture<ClusterList>("clusters.json");

    it("renders one card per summary with at most nine representatives", () => {
        renderClusterGrid(container, payload, imageUrl, handlers());
        const cards = container.querySelectorAll(".cluster-card");
        expect(cards.length).toBe(payload.clusters.length);
        payload.clusters.forEach((summary, i) => {
            const thumbs = cards[i].querySelectorAll(".cluster-reps img");
            expect(thumbs.length).toBe(summary.representatives.length);
            expect(thumbs.length).toBeLessThanOrEqual(9);
        });
    });

    it("clicking a card requests that cluster's histogram", () => {
        const h = handlers();
        renderClusterGrid(container, payload, imageUrl, h);
        const second = container.querySelectorAll(".open-cluster")[1];
        (second as HTMLElement).click();
        expect(h.onOpenCluster).toHaveBeenCalledWith(
            payload.clusters[1].cluster_id,
        );
    });

    it("renders all cards when fewer than ten groups exist", () => {
        const small: ClusterList = {
            ...payload, clusters: payload.clusters.slice(0, 3),
        };
        renderClusterGrid(container, small, imageUrl, handlers());
        expect(container.querySelectorAll(".cluster-card").length).toBe(3);
    });
});

describe("sorted list", () => {
    const page = fixture<InstancePage>("instances.json");

    it("puts the most suspicious image first", () => {
        renderSortedList(container, page, imageUrl, handlers());
        const first = container.querySelector(".thumb-grid .thumb");
        const maxId = page.items.reduce(
            (best, item) => item.suspicion > best.suspicion ? item : best,
        ).id;
        expect((first as HTMLElement).dataset.id).toBe(maxId);
    });

    it("click navigates to that image's histogram", () => {
        const h = handlers();
        renderSortedList(container, page, imageUrl, h);
        const img = container.querySelector(
            ".thumb-grid .thumb img",
        ) as HTMLElement;
        img.click();
        expect(h.onFocus).toHaveBeenCalledWith(page.items[0].id);
    });

    it("shows an empty state when nothing is scored", () => {
        renderSortedList(container, { total: 0, offset: 0, items: [] },
            imageUrl, handlers());
        expect(container.querySelector(".empty-state")).not.toBeNull();
        expect(container.querySelectorAll("img").length).toBe(0);
    });
});

describe("finding form", () => {
    it("blocks empty text client-side", async () => {
        const onSubmit = vi.fn().mockResolvedValue(undefined);
        renderFindingForm(container, new Set(), { onSubmit });
        (container.querySelector(".finding-submit") as HTMLElement).click();
        await Promise.resolve();
        expect(onSubmit).not.toHaveBeenCalled();
        expect(container.querySelector(".finding-error")).not.toBeNull();
    });

    it("submits description plus pinned ids", async () => {
        const onSubmit = vi.fn().mockResolvedValue(undefined);
        renderFindingForm(container, new Set(["b", "a"]), { onSubmit });
        const text = container.querySelector(
            ".finding-text",
        ) as HTMLTextAreaElement;
        text.value = "faces with sunglasses";
        (container.querySelector(".finding-submit") as HTMLElement).click();
        await vi.waitFor(() => expect(onSubmit).toHaveBeenCalled());
        expect(onSubmit).toHaveBeenCalledWith(
            "faces with sunglasses", ["a", "b"],
        );
    });

    it("offers a retry message when the service is down", async () => {
        const onSubmit = vi.fn().mockRejectedValue(new Error("down"));
        renderFindingForm(container, new Set(), { onSubmit });
        const text = container.querySelector(
            ".finding-text",
        ) as HTMLTextAreaElement;
        text.value = "anything";
        (container.querySelector(".finding-submit") as HTMLElement).click();
        await vi.waitFor(() =>
            expect(container.querySelector(".finding-error")).not.toBeNull());
        expect(container.textContent).toContain("try again");
    });
});

describe("projection scatter", () => {
    it("renders one point per test instance and highlights selections", () => {
        const points = fixture<{ id: string; x: number; y: number }[]>(
            "projection.json",
        );
        const view = new ProjectionView(container);
        const onSelect = vi.fn();
        view.render(points, onSelect);
        expect(container.querySelectorAll("circle").length).toBe(points.length);

        view.highlight(points[0].id, [points[1].id, points[2].id]);
        expect(container.querySelectorAll("circle.focus").length).toBe(1);
        expect(container.querySelectorAll("circle.neighbor").length).toBe(2);

        // re-highlighting replaces the previous marks
        view.highlight(points[3].id, []);
        expect(container.querySelectorAll("circle.neighbor").length).toBe(0);
        const focused = container.querySelector("circle.focus");
        expect(focused?.getAttribute("data-id")).toBe(points[3].id);

        (container.querySelector("circle") as SVGCircleElement).dispatchEvent(
            new MouseEvent("click", { bubbles: true }),
        );
        expect(onSelect).toHaveBeenCalledWith(points[0].id);
    });
});
