// UI state machine. The controller never edits source text locally: every
// change round-trips through the service, and the rendered text is always
// the last rendering the service returned.

import {
  ApplyResult,
  OpTemplate,
  Refusal,
  RefusalError,
  Rendering,
  ServiceClient,
  Span,
  Todo,
} from "./api.js";

export type Kind = "type" | "newtype" | "data";

export interface FoldDialogue {
  typeName: string;
  introduce: boolean;
  introduceTouched: boolean;
  kind: Kind;
  consName: string;
  /** selector strings; entry 0 is the original selection until replaced */
  positions: string[];
  cursor: number;
  rangeReplaced: boolean;
  /** EqualsType predicate text, derived once from the opening selection */
  typeText: string | null;
}

export interface UiState {
  sessionId: string | null;
  text: string;
  spans: Span[];
  focus: string | null;
  selectionAnchor: string | null;
  dialogue: FoldDialogue | null;
  ops: OpTemplate[];
  declaredTypes: string[];
  todos: Todo[];
  history: string[];
  changed: string[];
  refusal: Refusal | null;
  notice: string | null;
  diagnostics: string[];
}

const CONS_LOC = /^cons:([^.]+)\.([^/]+)\/(\d+)(?:-(\d+))?$/;

export function parseConsLoc(loc: string): { ty: string; cons: string; lo: number; hi: number } | null {
  const m = CONS_LOC.exec(loc);
  if (!m) {
    return null;
  }
  const lo = Number(m[3]);
  return { ty: m[1]!, cons: m[2]!, lo, hi: m[4] ? Number(m[4]) : lo };
}

export function isSelectorLoc(loc: string): boolean {
  return ["cons:", "alias:", "newtype:", "sig:"].some((p) => loc.startsWith(p));
}

/** Smallest span covering the offset whose loc addresses a type fragment. */
export function spanAt(spans: Span[], offset: number): Span | null {
  let best: Span | null = null;
  for (const s of spans) {
    if (s.start <= offset && offset < s.end && isSelectorLoc(s.loc)) {
      if (best === null || s.end - s.start < best.end - best.start) {
        best = s;
      }
    }
  }
  return best;
}

export class UiController {
  state: UiState = {
    sessionId: null,
    text: "",
    spans: [],
    focus: null,
    selectionAnchor: null,
    dialogue: null,
    ops: [],
    declaredTypes: [],
    todos: [],
    history: [],
    changed: [],
    refusal: null,
    notice: null,
    diagnostics: [],
  };

  onChange: (state: UiState) => void = () => undefined;

  constructor(private readonly api: ServiceClient) {}

  private emit(): void {
    this.onChange(this.state);
  }

  private setRendering(r: Rendering): void {
    this.state.text = r.text;
    this.state.spans = r.spans;
    this.state.focus = r.focus;
  }

  private async refreshContext(): Promise<void> {
    const id = this.state.sessionId!;
    const [ops, todos, history] = await Promise.all([
      this.api.getOps(id),
      this.api.getTodos(id),
      this.api.getHistory(id),
    ]);
    this.state.ops = ops.ops;
    this.state.declaredTypes = ops.declaredTypes;
    this.state.todos = todos.todos;
    this.state.history = history.history;
  }

  async open(source: string): Promise<void> {
    this.state.refusal = null;
    this.state.notice = null;
    this.state.diagnostics = [];
    try {
      const opened = await this.api.openSession(source);
      this.state.sessionId = opened.sessionId;
      this.setRendering(opened);
      this.state.dialogue = null;
      this.state.changed = [];
      await this.refreshContext();
    } catch (err) {
      if (err instanceof Object && "status" in (err as object)) {
        this.state.diagnostics = [String(err)];
      } else {
        throw err;
      }
    }
    this.emit();
  }

  /** Click on a span: focus it; component spans become range anchors. */
  async clickLoc(loc: string): Promise<void> {
    if (!isSelectorLoc(loc)) {
      return;
    }
    this.state.refusal = null;
    this.state.notice = null;
    const rendering = await this.api.setFocus(this.state.sessionId!, loc);
    this.setRendering(rendering);
    const cons = parseConsLoc(loc);
    this.state.selectionAnchor = cons !== null ? loc : null;
    this.emit();
  }

  /** Shift-click: extend the anchored component selection to a range. */
  async extendTo(loc: string): Promise<void> {
    const anchor = this.state.selectionAnchor ? parseConsLoc(this.state.selectionAnchor) : null;
    const target = parseConsLoc(loc);
    if (!anchor || !target || anchor.ty !== target.ty || anchor.cons !== target.cons) {
      return this.clickLoc(loc);
    }
    const lo = Math.min(anchor.lo, target.lo);
    const hi = Math.max(anchor.hi, target.hi);
    const range = `cons:${anchor.ty}.${anchor.cons}/${lo}-${hi}`;
    const rendering = await this.api.setFocus(this.state.sessionId!, range);
    this.setRendering(rendering);
    this.emit();
  }

  /** The source text of the current selection, e.g. "([Dec], [Stat])". */
  selectionTypeText(): string | null {
    const focus = this.state.focus;
    if (focus === null) {
      return null;
    }
    const range = parseConsLoc(focus);
    if (range === null) {
      const span = this.state.spans.find((s) => s.loc === focus);
      return span ? this.state.text.slice(span.start, span.end) : null;
    }
    const parts: string[] = [];
    for (let i = range.lo; i <= range.hi; i++) {
      const span = this.state.spans.find((s) => s.loc === `cons:${range.ty}.${range.cons}/${i}`);
      if (!span) {
        return null;
      }
      parts.push(this.state.text.slice(span.start, span.end));
    }
    return parts.length === 1 ? parts[0]! : `(${parts.join(", ")})`;
  }

  /** Open the fold dialogue on the current component-range selection. */
  async openFoldDialogue(): Promise<void> {
    const focus = this.state.focus;
    if (focus === null || parseConsLoc(focus) === null) {
      this.state.notice = "select a run of constructor components first";
      this.emit();
      return;
    }
    this.state.dialogue = {
      typeName: "",
      introduce: true,
      introduceTouched: false,
      kind: "data",
      consName: "",
      positions: [focus],
      cursor: 0,
      rangeReplaced: false,
      typeText: this.selectionTypeText(),
    };
    await this.refreshOccurrences();
    this.emit();
  }

  private async refreshOccurrences(): Promise<void> {
    const dialogue = this.state.dialogue;
    if (!dialogue) {
      return;
    }
    if (dialogue.typeText === null) {
      dialogue.positions = dialogue.rangeReplaced ? [] : dialogue.positions.slice(0, 1);
      return;
    }
    const { selectors } = await this.api.occurrences(this.state.sessionId!, dialogue.typeText);
    const head = dialogue.rangeReplaced ? [] : dialogue.positions.slice(0, 1);
    // the defining right-hand side of the dialogue's own type is not an
    // occurrence to step through
    const own = `alias:${dialogue.typeName}`;
    const rest = selectors.filter(
      (s) => !head.includes(s) && s !== own && !s.startsWith(`${own}/`),
    );
    dialogue.positions = [...head, ...rest];
    if (dialogue.cursor >= dialogue.positions.length) {
      dialogue.cursor = 0;
    }
  }

  async setTypeName(name: string): Promise<void> {
    const dialogue = this.state.dialogue;
    if (!dialogue) {
      return;
    }
    dialogue.typeName = name;
    if (!dialogue.introduceTouched) {
      // the introduce box is auto-checked exactly when the name is new;
      // declaredTypes comes from the service's /ops payload
      const ops = await this.api.getOps(this.state.sessionId!);
      this.state.declaredTypes = ops.declaredTypes;
      dialogue.introduce = !ops.declaredTypes.includes(name);
    }
    if (!dialogue.consName) {
      dialogue.consName = name;
    }
    this.emit();
  }

  setIntroduce(value: boolean): void {
    if (this.state.dialogue) {
      this.state.dialogue.introduce = value;
      this.state.dialogue.introduceTouched = true;
      this.emit();
    }
  }

  setKind(kind: Kind): void {
    if (this.state.dialogue) {
      this.state.dialogue.kind = kind;
      this.emit();
    }
  }

  setConsName(name: string): void {
    if (this.state.dialogue) {
      this.state.dialogue.consName = name;
      this.emit();
    }
  }

  consNameEnabled(): boolean {
    return this.state.dialogue !== null && this.state.dialogue.kind !== "type";
  }

  canReplace(): boolean {
    const d = this.state.dialogue;
    if (!d || d.positions.length === 0 || !d.typeName) {
      return false;
    }
    return d.kind === "type" || d.consName !== "";
  }

  canReplaceAll(): boolean {
    return this.canReplace();
  }

  /** Replace at the cursor: the fold dialogue's main action. */
  async replace(): Promise<boolean> {
    const d = this.state.dialogue;
    if (!d || !this.canReplace()) {
      return false;
    }
    const position = d.positions[d.cursor]!;
    this.state.refusal = null;
    this.state.notice = null;
    try {
      let result: ApplyResult;
      if (!d.rangeReplaced && d.cursor === 0) {
        const range = parseConsLoc(position)!;
        result = await this.api.fold(this.state.sessionId!, {
          range: `cons:${range.ty}.${range.cons}/${range.lo}-${range.hi}`,
          typeName: d.typeName,
          kind: d.kind,
          consName: d.kind === "type" ? undefined : d.consName,
          introduce: d.introduce,
        });
        d.rangeReplaced = true;
      } else {
        result = await this.api.apply(
          this.state.sessionId!,
          `fold-alias alias:${d.typeName} at ${position}`,
        );
      }
      this.applyResult(result);
      d.positions.splice(d.cursor, 1);
      if (d.cursor >= d.positions.length) {
        d.cursor = 0;
      }
      // a successful first replace declares the name: the box un-checks
      if (!d.introduceTouched) {
        d.introduce = false;
      }
      await this.refreshOccurrences();
      await this.refreshContext();
      this.emit();
      return true;
    } catch (err) {
      if (err instanceof RefusalError) {
        this.state.refusal = err.refusal;
        this.emit();
        return false;
      }
      throw err;
    }
  }

  /** Replace every occurrence, one undoable step at a time. */
  async replaceAll(): Promise<number> {
    let done = 0;
    for (let guard = 0; guard < 100; guard++) {
      const d = this.state.dialogue;
      if (!d || d.positions.length === 0) {
        break;
      }
      d.cursor = 0;
      const advanced = await this.replace();
      if (!advanced) {
        break;
      }
      done += 1;
    }
    return done;
  }

  /** Advance the occurrence cursor without applying; wraps with a notice. */
  async next(): Promise<void> {
    const d = this.state.dialogue;
    if (!d || d.positions.length === 0) {
      this.state.notice = "no occurrences";
      this.emit();
      return;
    }
    d.cursor += 1;
    if (d.cursor >= d.positions.length) {
      d.cursor = 0;
      this.state.notice = "wrapped to the first occurrence";
    } else {
      this.state.notice = null;
    }
    const target = d.positions[d.cursor]!;
    const rendering = await this.api.setFocus(this.state.sessionId!, target);
    this.setRendering(rendering);
    this.emit();
  }

  closeDialogue(): void {
    this.state.dialogue = null;
    this.emit();
  }

  private applyResult(result: ApplyResult): void {
    this.setRendering(result);
    this.state.changed = result.changed;
    this.state.todos = result.todos;
  }

  /** Run one operator template from the palette. */
  async applyTemplate(line: string): Promise<boolean> {
    this.state.refusal = null;
    try {
      const result = await this.api.apply(this.state.sessionId!, line);
      this.applyResult(result);
      await this.refreshContext();
      this.emit();
      return true;
    } catch (err) {
      if (err instanceof RefusalError) {
        this.state.refusal = err.refusal;
        this.emit();
        return false;
      }
      throw err;
    }
  }

  async undo(): Promise<boolean> {
    this.state.refusal = null;
    try {
      const rendering = await this.api.undo(this.state.sessionId!);
      this.setRendering(rendering);
      this.state.changed = [];
      await this.refreshContext();
      this.emit();
      return true;
    } catch (err) {
      if (err instanceof RefusalError) {
        this.state.refusal = err.refusal;
        this.emit();
        return false;
      }
      throw err;
    }
  }

  /** Span of a to-do marker, for scroll-and-highlight. */
  todoSpan(todo: Todo): Span | null {
    return this.state.spans.find((s) => s.loc === `todo:${todo.loc}`) ?? null;
  }

  /** Spans the last change summary points at. */
  changedSpans(): Span[] {
    return this.state.spans.filter((s) => this.state.changed.includes(s.loc));
  }
}
