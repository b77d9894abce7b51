// The side-by-side histogram: five aligned rows of image tiles, original
// collection on the left, new collection on the right, highest suspicion
// row first. The focal image (or group id) sits above the rows.

import { HistogramPayload, validateHistogram } from "./api.js";
import { clear, el } from "./dom.js";
import { ThumbHandlers, thumbnail } from "./thumbnails.js";

export function renderSideBySide(
    container: HTMLElement,
    payload: HistogramPayload,
    imageUrl: (id: string) => string,
    handlers: ThumbHandlers,
): void {
    const doc = container.ownerDocument;
    validateHistogram(payload);
    clear(container);

    const header = el(doc, "div", "focus-header");
    if (typeof payload.subject === "string") {
        header.appendChild(el(doc, "h2", "view-title", "Selected image"));
        header.appendChild(
            thumbnail(doc, payload.subject, imageUrl, handlers),
        );
    } else {
        header.appendChild(el(
            doc, "h2", "view-title", `Group #${payload.subject}`,
        ));
    }
    container.appendChild(header);

    const table = el(doc, "div", "histogram");
    const heading = el(doc, "div", "histogram-row histogram-heading");
    heading.appendChild(el(doc, "div", "side-label", "original"));
    heading.appendChild(el(doc, "div", "range-label", "suspicion score"));
    heading.appendChild(el(doc, "div", "side-label", "new"));
    table.appendChild(heading);

    for (const bin of payload.bins) {
        const row = el(doc, "div", "histogram-row");
        row.dataset.lo = String(bin.lo);

        const left = el(doc, "div", "bin-side bin-train");
        for (const id of bin.train) {
            left.appendChild(thumbnail(doc, id, imageUrl, handlers));
        }
        const label = el(
            doc, "div", "range-label",
            `${bin.lo.toFixed(1)}–${bin.hi.toFixed(1)}`,
        );
        const right = el(doc, "div", "bin-side bin-test");
        for (const id of bin.test) {
            right.appendChild(thumbnail(doc, id, imageUrl, handlers));
        }

        row.appendChild(left);
        row.appendChild(label);
        row.appendChild(right);
        table.appendChild(row);
    }
    container.appendChild(table);
}
