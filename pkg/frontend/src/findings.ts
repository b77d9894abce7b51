// Findings panel: the analyst writes down what changed in the new
// collection, optionally backed by pinned images.

import { clear, el } from "./dom.js";

export interface FindingsHandlers {
    onSubmit(description: string, instanceIds: string[]): Promise<void>;
}

export function renderFindingForm(
    container: HTMLElement,
    selection: ReadonlySet<string>,
    handlers: FindingsHandlers,
): void {
    const doc = container.ownerDocument;
    clear(container);
    container.appendChild(el(doc, "h2", "view-title", "Describe a shift"));

    const text = el(doc, "textarea", "finding-text");
    text.placeholder = "e.g. many new faces wear sunglasses";
    container.appendChild(text);

    container.appendChild(el(
        doc, "p", "finding-selection",
        selection.size === 0
            ? "No images pinned."
            : `${selection.size} pinned image(s) will be attached.`,
    ));

    const status = el(doc, "p", "finding-status");
    const submit = el(doc, "button", "finding-submit", "save finding");
    submit.addEventListener("click", async () => {
        const description = text.value.trim();
        if (!description) {
            status.textContent = "Please describe the shift first.";
            status.className = "finding-status finding-error";
            return;
        }
        submit.disabled = true;
        try {
            await handlers.onSubmit(description, [...selection].sort());
            status.textContent = "Saved.";
            status.className = "finding-status finding-ok";
            text.value = "";
        } catch {
            status.textContent = "Could not reach the service; try again.";
            status.className = "finding-status finding-error";
        } finally {
            submit.disabled = false;
        }
    });
    container.appendChild(submit);
    container.appendChild(status);
}
