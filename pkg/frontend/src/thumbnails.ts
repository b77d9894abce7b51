// One image tile, used by every view: click to focus, pin to collect
// evidence for a finding, hover to highlight the matching projection point.

import { el } from "./dom.js";

export interface ThumbHandlers {
    onFocus(id: string): void;
    onHover?(id: string | null): void;
    onTogglePin?(id: string): void;
    isPinned?(id: string): boolean;
}

export function thumbnail(
    doc: Document,
    id: string,
    imageUrl: (id: string) => string,
    handlers: ThumbHandlers,
): HTMLElement {
    const tile = el(doc, "figure", "thumb");
    tile.dataset.id = id;

    const img = el(doc, "img");
    img.src = imageUrl(id);
    img.alt = id;
    img.loading = "lazy";
    img.addEventListener("click", () => handlers.onFocus(id));
    tile.appendChild(img);

    if (handlers.onHover) {
        tile.addEventListener("mouseenter", () => handlers.onHover!(id));
        tile.addEventListener("mouseleave", () => handlers.onHover!(null));
    }

    if (handlers.onTogglePin) {
        const pin = el(doc, "button", "pin", "+");
        pin.title = "add to finding";
        if (handlers.isPinned?.(id)) tile.classList.add("pinned");
        pin.addEventListener("click", (event) => {
            event.stopPropagation();
            handlers.onTogglePin!(id);
            tile.classList.toggle("pinned");
        });
        tile.appendChild(pin);
    }
    return tile;
}
