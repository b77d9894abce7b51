// Entry list of the nearest-neighbor workflow: new-collection images in
// descending suspicion order, examined one by one.

import { InstancePage } from "./api.js";
import { clear, el } from "./dom.js";
import { ThumbHandlers, thumbnail } from "./thumbnails.js";

export interface SortedListHandlers extends ThumbHandlers {
    onPage(offset: number): void;
}

export function renderSortedList(
    container: HTMLElement,
    page: InstancePage,
    imageUrl: (id: string) => string,
    handlers: SortedListHandlers,
): void {
    const doc = container.ownerDocument;
    clear(container);

    if (page.total === 0) {
        container.appendChild(el(
            doc, "p", "empty-state",
            "No scored images yet. Run the scoring pipeline first.",
        ));
        return;
    }

    container.appendChild(el(
        doc, "h2", "view-title",
        "New images, most suspicious first",
    ));

    const grid = el(doc, "div", "thumb-grid");
    for (const item of page.items) {
        const tile = thumbnail(doc, item.id, imageUrl, handlers);
        tile.appendChild(el(
            doc, "figcaption", "thumb-caption",
            `suspicion ${item.suspicion.toFixed(2)}`,
        ));
        grid.appendChild(tile);
    }
    container.appendChild(grid);

    const pager = el(doc, "div", "pager");
    const prev = el(doc, "button", "pager-prev", "previous");
    prev.disabled = page.offset === 0;
    prev.addEventListener("click", () =>
        handlers.onPage(Math.max(0, page.offset - page.items.length)));
    const next = el(doc, "button", "pager-next", "next");
    next.disabled = page.offset + page.items.length >= page.total;
    next.addEventListener("click", () =>
        handlers.onPage(page.offset + page.items.length));
    pager.appendChild(prev);
    pager.appendChild(el(
        doc, "span", "pager-status",
        `${page.offset + 1}-${page.offset + page.items.length} of ${page.total}`,
    ));
    pager.appendChild(next);
    container.appendChild(pager);
}
