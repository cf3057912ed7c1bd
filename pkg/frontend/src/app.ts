/** DOM layer: renders UiSearchState and wires user actions to the controller. */

import type { FileView, SearchController } from "./controller.js";
import { candidateResults, dialogVisible, originalResults, type UiSearchState } from "./state.js";
import { countLabel } from "./wire.js";
import type { MatchEvent, Proposal } from "./wire.js";

export interface AppHandles {
  form: HTMLFormElement;
  input: HTMLInputElement;
  dialog: HTMLElement;
  errorBox: HTMLElement;
  status: HTMLElement;
  originalList: HTMLElement;
  smartSection: HTMLElement;
  smartList: HTMLElement;
  filePane: HTMLElement;
  render(state: UiSearchState): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function mountApp(root: HTMLElement, controller: SearchController): AppHandles {
  const doc = root.ownerDocument;

  const form = el(doc, "form", "search-form");
  const input = el(doc, "input");
  input.name = "q";
  input.type = "search";
  input.placeholder = "Search code…";
  const submit = el(doc, "button", "", "Search");
  submit.type = "submit";
  form.append(input, submit);

  const status = el(doc, "p", "status", "");
  const errorBox = el(doc, "div", "error");
  errorBox.hidden = true;

  const dialog = el(doc, "section", "dialog");
  dialog.hidden = true;

  const originalSection = el(doc, "section", "results-original");
  const originalList = el(doc, "ul", "results");
  originalSection.append(originalList);

  const smartSection = el(doc, "section", "results-smart");
  smartSection.hidden = true;
  smartSection.append(el(doc, "h2", "", "Smart Search"));
  const smartList = el(doc, "ul", "results");
  smartSection.append(smartList);

  const filePane = el(doc, "aside", "file-view");
  filePane.hidden = true;

  root.append(form, status, errorBox, dialog, originalSection, smartSection, filePane);

  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    filePane.hidden = true;
    void controller.runSearch(input.value);
  });

  function applyProposal(proposal: Proposal): void {
    input.value = proposal.query;
    filePane.hidden = true;
    void controller.applyProposal(proposal);
  }

  function openResult(result: MatchEvent): void {
    controller.reportClick(result).catch(() => {
      // telemetry is best-effort in the UI too
    });
    void controller.openFileView(result).then((view) => renderFileView(view));
  }

  function resultItem(result: MatchEvent, badge: string | null): HTMLElement {
    const item = el(doc, "li", "result");
    const link = el(doc, "button", "result-link", `${result.repo}/${result.path}:${result.line}`);
    link.type = "button";
    link.addEventListener("click", () => openResult(result));
    item.append(link);
    if (badge !== null) {
      item.append(el(doc, "span", "badge", badge));
    }
    item.append(el(doc, "code", "snippet", result.text));
    return item;
  }

  function renderDialog(state: UiSearchState): void {
    dialog.replaceChildren();
    if (!dialogVisible(state)) {
      dialog.hidden = true;
      return;
    }
    dialog.hidden = false;
    dialog.append(el(doc, "h2", "", state.alertTitle ?? "Alternatives"));
    const list = el(doc, "ul", "proposals");
    for (const proposal of state.proposals ?? []) {
      const item = el(doc, "li", "proposal");
      item.append(el(doc, "span", "description", proposal.description));
      item.append(el(doc, "code", "query", proposal.query));
      item.append(el(doc, "span", "count", countLabel(proposal)));
      const apply = el(doc, "button", "apply", "Apply");
      apply.type = "button";
      apply.addEventListener("click", () => applyProposal(proposal));
      item.append(apply);
      list.append(item);
    }
    dialog.append(list);
  }

  function renderFileView(view: FileView): void {
    filePane.replaceChildren();
    filePane.hidden = false;
    const header = el(doc, "header");
    header.append(el(doc, "code", "file-name", `${view.repo}/${view.path}`));
    const close = el(doc, "button", "close", "Close");
    close.type = "button";
    close.addEventListener("click", () => {
      filePane.hidden = true;
    });
    header.append(close);
    filePane.append(header);
    const list = el(doc, "ol", "file-lines");
    for (const line of view.lines) {
      const item = el(doc, "li", line.line === view.anchorLine ? "line anchor" : "line", line.text);
      item.value = line.line;
      list.append(item);
    }
    filePane.append(list);
    const anchor = list.querySelector(".anchor");
    if (anchor && typeof (anchor as HTMLElement).scrollIntoView === "function") {
      (anchor as HTMLElement).scrollIntoView({ block: "center" });
    }
  }

  function statusText(state: UiSearchState): string {
    switch (state.status) {
      case "idle":
        return "";
      case "streaming":
        return "Searching…";
      case "error":
        return "Search failed";
      case "done": {
        const n = state.results.length;
        return `${n} ${n === 1 ? "result" : "results"}`;
      }
    }
  }

  function render(state: UiSearchState): void {
    status.textContent = statusText(state);
    errorBox.hidden = state.error === null;
    errorBox.textContent = state.error ?? "";
    renderDialog(state);

    originalList.replaceChildren(
      ...originalResults(state).map((result) => resultItem(result, null)),
    );
    const candidates = candidateResults(state);
    smartSection.hidden = candidates.length === 0;
    smartList.replaceChildren(
      ...candidates.map((result) =>
        resultItem(
          result,
          result.source.origin === "candidate" ? `alternative #${result.source.rank}` : null,
        ),
      ),
    );
  }

  controller.onChange(render);
  render(controller.state);

  return {
    form,
    input,
    dialog,
    errorBox,
    status,
    originalList,
    smartSection,
    smartList,
    filePane,
    render,
  };
}
