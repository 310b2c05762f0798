// DOM rendering. Pure function of UiState plus event wiring back into the
// controller; no source mutation happens here.

import { Span, Todo } from "./api.js";
import { UiController, UiState, isSelectorLoc, spanAt } from "./state.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) {
    node.setAttribute(k, v);
  }
  node.append(...children);
  return node;
}

export class View {
  private readonly source: HTMLElement;
  private readonly palette: HTMLElement;
  private readonly dialogue: HTMLElement;
  private readonly todos: HTMLElement;
  private readonly historyPanel: HTMLElement;
  private readonly status: HTMLElement;
  private highlight: Span | null = null;

  constructor(private readonly root: HTMLElement, private readonly controller: UiController) {
    this.source = el("pre", { class: "source" });
    this.palette = el("div", { class: "palette" });
    this.dialogue = el("div", { class: "dialogue" });
    this.todos = el("div", { class: "todos" });
    this.historyPanel = el("div", { class: "history" });
    this.status = el("div", { class: "status" });
    const left = el("div", { class: "left" }, this.source, this.status);
    const right = el(
      "div",
      { class: "right" },
      this.dialogue,
      this.palette,
      this.todos,
      this.historyPanel,
    );
    root.append(left, right);
    this.source.addEventListener("click", (ev) => this.onSourceClick(ev));
    controller.onChange = () => this.render(controller.state);
  }

  private onSourceClick(ev: MouseEvent): void {
    const target = ev.target as HTMLElement;
    const loc = target.getAttribute("data-loc");
    if (loc === null || !isSelectorLoc(loc)) {
      return;
    }
    if (ev.shiftKey) {
      void this.controller.extendTo(loc);
    } else {
      void this.controller.clickLoc(loc);
    }
  }

  render(state: UiState): void {
    this.renderSource(state);
    this.renderDialogue(state);
    this.renderPalette(state);
    this.renderTodos(state);
    this.renderHistory(state);
    this.renderStatus(state);
  }

  private renderSource(state: UiState): void {
    // wrap each innermost addressable span in a clickable element
    const text = state.text;
    const marks: { at: number; open?: Span; close?: Span }[] = [];
    const spans = [...state.spans].sort((a, b) => a.start - b.start || b.end - a.end);
    this.source.textContent = "";
    // simple renderer: walk characters, opening the smallest span starting
    // at each offset (sufficient because the span map nests cleanly)
    const frag = document.createDocumentFragment();
    let i = 0;
    const openAt = new Map<number, Span[]>();
    for (const s of spans) {
      const list = openAt.get(s.start) ?? [];
      list.push(s);
      openAt.set(s.start, list);
    }
    const emit = (parent: Node, from: number, to: number): void => {
      let pos = from;
      while (pos < to) {
        const starting = (openAt.get(pos) ?? []).filter((s) => s.end <= to);
        const inner = starting.sort((a, b) => b.end - b.start - (a.end - a.start))[0];
        if (inner && inner.end > pos) {
          const wrapped = el("span", { "data-loc": inner.loc, class: this.classFor(state, inner) });
          openAt.set(
            pos,
            (openAt.get(pos) ?? []).filter((s) => s !== inner),
          );
          emit(wrapped, inner.start, inner.end);
          parent.appendChild(wrapped);
          pos = inner.end;
        } else {
          let next = to;
          for (const at of openAt.keys()) {
            if (at > pos && at < next && (openAt.get(at) ?? []).some((s) => s.end <= to)) {
              next = at;
            }
          }
          parent.appendChild(document.createTextNode(text.slice(pos, next)));
          pos = next;
        }
      }
    };
    emit(frag, 0, text.length);
    this.source.appendChild(frag);
  }

  private classFor(state: UiState, span: Span): string {
    const classes = ["loc"];
    if (state.focus !== null && span.loc === state.focus) {
      classes.push("focused");
    }
    if (state.changed.includes(span.loc)) {
      classes.push("changed");
    }
    if (state.refusal !== null && state.refusal.locations.includes(span.loc)) {
      classes.push("offending");
    }
    if (this.highlight !== null && span.loc === this.highlight.loc) {
      classes.push("todo-highlight");
    }
    return classes.join(" ");
  }

  private renderDialogue(state: UiState): void {
    this.dialogue.textContent = "";
    const d = state.dialogue;
    const openBtn = el("button", {}, "Extract / fold selection");
    openBtn.addEventListener("click", () => void this.controller.openFoldDialogue());
    this.dialogue.append(el("h3", {}, "Fold"), openBtn);
    if (!d) {
      return;
    }
    const nameField = el("input", { value: d.typeName, placeholder: "type name" });
    nameField.addEventListener("input", () => void this.controller.setTypeName(nameField.value));
    const introduce = el("input", { type: "checkbox" }) as HTMLInputElement;
    introduce.checked = d.introduce;
    introduce.addEventListener("change", () => this.controller.setIntroduce(introduce.checked));
    const kinds = el("div", {});
    (["type", "newtype", "data"] as const).forEach((kind) => {
      const radio = el("input", { type: "radio", name: "kind" }) as HTMLInputElement;
      radio.checked = d.kind === kind;
      radio.addEventListener("change", () => this.controller.setKind(kind));
      kinds.append(radio, kind + " ");
    });
    const consField = el("input", { value: d.consName, placeholder: "cons name" }) as HTMLInputElement;
    consField.disabled = !this.controller.consNameEnabled();
    consField.addEventListener("input", () => this.controller.setConsName(consField.value));
    const replace = el("button", {}, "Replace") as HTMLButtonElement;
    replace.disabled = !this.controller.canReplace();
    replace.addEventListener("click", () => void this.controller.replace());
    const replaceAll = el("button", {}, "Replace All") as HTMLButtonElement;
    replaceAll.disabled = !this.controller.canReplaceAll();
    replaceAll.addEventListener("click", () => void this.controller.replaceAll());
    const next = el("button", {}, "Next") as HTMLButtonElement;
    next.addEventListener("click", () => void this.controller.next());
    this.dialogue.append(
      el("div", {}, "type name: ", nameField),
      el("div", {}, "introduce: ", introduce),
      el("div", {}, "kind: ", kinds),
      el("div", {}, "cons name: ", consField),
      el("div", {}, replace, replaceAll, next),
      el(
        "div",
        { class: "positions" },
        `occurrence ${d.positions.length === 0 ? 0 : d.cursor + 1} of ${d.positions.length}`,
      ),
    );
  }

  private renderPalette(state: UiState): void {
    this.palette.textContent = "";
    this.palette.append(el("h3", {}, "Applicable operators"));
    for (const op of state.ops) {
      const btn = el("button", { class: "op" }, op.line);
      btn.addEventListener("click", () => void this.controller.applyTemplate(op.line));
      this.palette.append(el("div", {}, btn));
    }
    const undoBtn = el("button", {}, "Undo");
    undoBtn.addEventListener("click", () => void this.controller.undo());
    this.palette.append(el("div", {}, undoBtn));
  }

  private renderTodos(state: UiState): void {
    this.todos.textContent = "";
    if (state.todos.length === 0) {
      this.todos.style.display = "none";
      return;
    }
    this.todos.style.display = "";
    this.todos.append(el("h3", {}, "To-do markers"));
    for (const todo of state.todos) {
      const item = el("button", { class: "todo" }, todo.loc);
      item.addEventListener("click", () => this.jumpToTodo(todo));
      this.todos.append(el("div", {}, item));
    }
  }

  private jumpToTodo(todo: Todo): void {
    const span = this.controller.todoSpan(todo);
    if (span) {
      this.highlight = span;
      this.render(this.controller.state);
      const target = this.source.querySelector(`[data-loc="${CSS.escape(span.loc)}"]`);
      target?.scrollIntoView({ block: "center" });
    }
  }

  private renderHistory(state: UiState): void {
    this.historyPanel.textContent = "";
    this.historyPanel.append(el("h3", {}, "History"));
    for (const line of state.history) {
      this.historyPanel.append(el("div", { class: "step" }, line));
    }
  }

  private renderStatus(state: UiState): void {
    this.status.textContent = "";
    if (state.refusal) {
      this.status.append(
        el(
          "div",
          { class: "refusal" },
          `${state.refusal.code}: ${state.refusal.detail} @ ${state.refusal.locations.join(", ")}`,
        ),
      );
    }
    if (state.notice) {
      this.status.append(el("div", { class: "notice" }, state.notice));
    }
    for (const diag of state.diagnostics) {
      this.status.append(el("div", { class: "refusal" }, diag));
    }
  }
}

export { spanAt };
