// 2D overview scatter of the new collection. Pure rendering: coordinates
// arrive precomputed; highlighting is driven by the other views.

import { ProjectionPoint } from "./api.js";
import { clear } from "./dom.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const SIZE = 280;
const PAD = 12;

export class ProjectionView {
    private circles = new Map<string, SVGCircleElement>();

    constructor(private container: HTMLElement) {}

    render(points: ProjectionPoint[], onSelect: (id: string) => void): void {
        const doc = this.container.ownerDocument;
        clear(this.container);
        this.circles.clear();
        if (points.length === 0) return;

        const xs = points.map((p) => p.x);
        const ys = points.map((p) => p.y);
        const xmin = Math.min(...xs), xmax = Math.max(...xs);
        const ymin = Math.min(...ys), ymax = Math.max(...ys);
        const scale = (v: number, lo: number, hi: number) =>
            hi === lo ? SIZE / 2 : PAD + ((v - lo) / (hi - lo)) * (SIZE - 2 * PAD);

        const svg = doc.createElementNS(SVG_NS, "svg");
        svg.setAttribute("viewBox", `0 0 ${SIZE} ${SIZE}`);
        svg.setAttribute("class", "projection");
        for (const point of points) {
            const circle = doc.createElementNS(SVG_NS, "circle");
            circle.setAttribute("cx", scale(point.x, xmin, xmax).toFixed(1));
            // screen y grows downward
            circle.setAttribute(
                "cy", (SIZE - scale(point.y, ymin, ymax)).toFixed(1),
            );
            circle.setAttribute("r", "3");
            circle.setAttribute("data-id", point.id);
            circle.addEventListener("click", () => onSelect(point.id));
            svg.appendChild(circle);
            this.circles.set(point.id, circle);
        }
        this.container.appendChild(svg);
    }

    /** Mark the focal image and its neighborhood in the scatter. */
    highlight(focusId: string | null, neighborIds: Iterable<string> = []): void {
        for (const circle of this.circles.values()) {
            circle.classList.remove("focus", "neighbor");
        }
        for (const id of neighborIds) {
            this.circles.get(id)?.classList.add("neighbor");
        }
        if (focusId !== null) {
            this.circles.get(focusId)?.classList.add("focus");
        }
    }
}
