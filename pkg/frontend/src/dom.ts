// Tiny DOM helpers shared by the views (no framework).

export function el<K extends keyof HTMLElementTagNameMap>(
    doc: Document,
    tag: K,
    className?: string,
    text?: string,
): HTMLElementTagNameMap[K] {
    const node = doc.createElement(tag);
    if (className) node.className = className;
    if (text !== undefined) node.textContent = text;
    return node;
}

export function clear(container: HTMLElement): void {
    while (container.firstChild) container.removeChild(container.firstChild);
}

export function banner(container: HTMLElement, kind: string, message: string): void {
    clear(container);
    container.appendChild(
        el(container.ownerDocument, "div", `banner banner-${kind}`, message),
    );
}
