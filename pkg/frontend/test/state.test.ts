// Pure controller logic against a stubbed client: selection parsing, span
// lookup, dialogue field rules.
import { describe, expect, it } from "vitest";

import { ServiceClient, Span } from "../src/api.js";
import { UiController, parseConsLoc, isSelectorLoc, spanAt } from "../src/state.js";

describe("selector loc parsing", () => {
  it("single component", () => {
    expect(parseConsLoc("cons:Prog.Prog/2")).toEqual({ ty: "Prog", cons: "Prog", lo: 2, hi: 2 });
  });

  it("range", () => {
    expect(parseConsLoc("cons:Prog.Prog/2-3")).toEqual({ ty: "Prog", cons: "Prog", lo: 2, hi: 3 });
  });

  it("primed names", () => {
    expect(parseConsLoc("cons:Maybe'.Just'/1")).toEqual({ ty: "Maybe'", cons: "Just'", lo: 1, hi: 1 });
  });

  it("non-component locs", () => {
    expect(parseConsLoc("alias:Block")).toBeNull();
    expect(parseConsLoc("cons:Prog.Prog/2/path:1")).toBeNull();
    expect(isSelectorLoc("todo:run/1/")).toBe(false);
    expect(isSelectorLoc("sig:run")).toBe(true);
  });
});

describe("span lookup", () => {
  const spans: Span[] = [
    { loc: "decl:Prog", start: 0, end: 40 },
    { loc: "cons:Prog.Prog/2", start: 10, end: 15 },
    { loc: "cons:Prog.Prog/2/path:1", start: 11, end: 14 },
    { loc: "eq:run/1", start: 50, end: 70 },
  ];

  it("innermost selector span wins", () => {
    expect(spanAt(spans, 12)!.loc).toBe("cons:Prog.Prog/2/path:1");
    expect(spanAt(spans, 10)!.loc).toBe("cons:Prog.Prog/2");
  });

  it("non-selector regions yield nothing", () => {
    expect(spanAt(spans, 55)).toBeNull();
  });
});

function stubClient(overrides: Partial<Record<string, unknown>> = {}): ServiceClient {
  const rendering = { text: "data T = K;\n", spans: [], focus: null };
  const fetchFn = async (input: string, init?: RequestInit): Promise<Response> => {
    const url = new URL(input, "http://stub");
    const body = (payload: unknown, status = 200) =>
      new Response(JSON.stringify(payload), { status, headers: { "content-type": "application/json" } });
    if (url.pathname === "/session") {
      return body({ sessionId: "s1", ...rendering, diagnostics: [] });
    }
    if (url.pathname.endsWith("/ops")) {
      return body({ ops: [], declaredTypes: (overrides.declaredTypes as string[]) ?? [], focus: null });
    }
    if (url.pathname.endsWith("/todos")) {
      return body({ todos: [] });
    }
    if (url.pathname.endsWith("/history")) {
      return body({ history: [] });
    }
    if (url.pathname.endsWith("/focus")) {
      const selector = JSON.parse(String(init?.body ?? "{}")).selector;
      return body({ ...rendering, focus: selector });
    }
    if (url.pathname.endsWith("/occurrences")) {
      return body({ selectors: (overrides.occurrences as string[]) ?? [] });
    }
    throw new Error(`stub has no route for ${url.pathname}`);
  };
  return new ServiceClient("http://stub", fetchFn);
}

describe("fold dialogue rules", () => {
  it("needs a component selection", async () => {
    const ui = new UiController(stubClient());
    await ui.open("data T = K;");
    await ui.openFoldDialogue();
    expect(ui.state.dialogue).toBeNull();
    expect(ui.state.notice).toContain("select");
  });

  it("introduce auto-checks against declared types", async () => {
    const ui = new UiController(stubClient({ declaredTypes: ["Block"] }));
    await ui.open("data T = K;");
    await ui.clickLoc("cons:T.K/1");
    await ui.openFoldDialogue();
    await ui.setTypeName("Block");
    expect(ui.state.dialogue!.introduce).toBe(false);
    await ui.setTypeName("Fresh");
    expect(ui.state.dialogue!.introduce).toBe(true);
  });

  it("manual introduce toggle stops auto-validation", async () => {
    const ui = new UiController(stubClient({ declaredTypes: ["Block"] }));
    await ui.open("data T = K;");
    await ui.clickLoc("cons:T.K/1");
    await ui.openFoldDialogue();
    ui.setIntroduce(true);
    await ui.setTypeName("Block");
    expect(ui.state.dialogue!.introduce).toBe(true);
  });

  it("cons name disabled exactly for kind type", async () => {
    const ui = new UiController(stubClient());
    await ui.open("data T = K;");
    await ui.clickLoc("cons:T.K/1");
    await ui.openFoldDialogue();
    ui.setKind("type");
    expect(ui.consNameEnabled()).toBe(false);
    ui.setKind("newtype");
    expect(ui.consNameEnabled()).toBe(true);
    ui.setKind("data");
    expect(ui.consNameEnabled()).toBe(true);
  });

  it("replace requires a cons name unless kind is type", async () => {
    const ui = new UiController(stubClient());
    await ui.open("data T = K;");
    await ui.clickLoc("cons:T.K/1");
    await ui.openFoldDialogue();
    await ui.setTypeName("Fresh");
    ui.setConsName("");
    ui.setKind("data");
    expect(ui.canReplace()).toBe(false);
    ui.setKind("type");
    expect(ui.canReplace()).toBe(true);
  });
});
