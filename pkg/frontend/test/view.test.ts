import { describe, expect, it } from "vitest";

import { ServerMessage } from "../src/protocol.js";
import {
  ClientView, applyMessage, emptyView, pendingFor, recordAck,
} from "../src/view.js";

function play(messages: ServerMessage[], start?: ClientView): ClientView {
  return messages.reduce(
    (view, message) => applyMessage(view, message, 1000),
    start ?? emptyView(),
  );
}

const mcpJoin: ServerMessage[] = [
  { type: "joined", role: "[alice]" },
  { type: "rules", source: "name(mcp)." },
  { type: "init", facts: ["[start]"], accounts: { "[alice]": 0, "[bob]": 0 } },
  { type: "chronon", number: 1, deadline_ms: 0 },
];

describe("join flow", () => {
  it("renders rules, snapshot and accounts after joining", () => {
    const view = play(mcpJoin);
    expect(view.phase).toBe("running");
    expect(view.role).toBe("[alice]");
    expect(view.rules).toContain("mcp");
    expect(view.facts).toEqual(["[start]"]);
    expect(view.accounts["[bob]"]).toBe(0);
    expect(view.chronon).toBe(1);
  });

  it("shows only the words the server sent, never the hidden ones", () => {
    // the server filters [dirty, alice] out of alice's delta; the view
    // must not reconstruct it from anywhere
    const view = play([
      ...mcpJoin,
      { type: "delta", created: ["[dirty, bob]"], deleted: ["[start]"] },
      { type: "accounts", accounts: { "[alice]": 0, "[bob]": 0 } },
      { type: "chronon", number: 2, deadline_ms: 0 },
    ]);
    expect(view.facts).toEqual(["[dirty, bob]"]);
    expect(view.facts.join(" ")).not.toContain("[dirty, alice]");
  });

  it("drops fact strings that are not ground terms", () => {
    const view = play([
      { type: "init", facts: ["[ok]", "BadVar"], accounts: {} },
    ]);
    expect(view.facts).toEqual(["[ok]"]);
  });

  it("turns a pre-join reject into an error screen", () => {
    const view = play([
      { type: "reject", switch: "", reason: "unknown_role", detail: "[zed]" },
    ]);
    expect(view.phase).toBe("error");
    expect(view.error).toContain("unknown_role");
  });
});

describe("submission lifecycle", () => {
  const base = play(mcpJoin);

  it("acked actions are pending until the chronon closes", () => {
    let view = applyMessage(base, { type: "ack", switch: "[alice]" });
    view = recordAck(view, "[alice]", "[alice, stay]");
    expect(pendingFor(view, "[alice]")).toEqual({
      switch: "[alice]",
      action: "[alice, stay]",
    });
    view = play([
      { type: "delta", created: [], deleted: [] },
      { type: "accounts", accounts: {} },
      { type: "chronon", number: 2, deadline_ms: 3000 },
    ], view);
    expect(view.pending).toEqual([]);
    expect(view.resolved).toEqual([
      { switch: "[alice]", action: "[alice, stay]" },
    ]);
  });

  it("a second ack replaces the first (rock to paper)", () => {
    let view = recordAck(base, "[role1]", "[role1, rock]");
    view = recordAck(view, "[role1]", "[role1, paper]");
    expect(view.pending).toEqual([
      { switch: "[role1]", action: "[role1, paper]" },
    ]);
  });

  it("a reject clears the pending entry and lands in the history", () => {
    let view = recordAck(base, "[alice]", "[alice, 9.0]");
    view = applyMessage(view, {
      type: "reject",
      switch: "[alice]",
      reason: "guard_unprovable",
      detail: "[alice, 9.0]",
    });
    expect(view.pending).toEqual([]);
    expect(view.history.at(-1)?.text).toContain("guard_unprovable");
  });
});

describe("game end", () => {
  it("shows the final accounts", () => {
    const view = play([
      ...mcpJoin,
      { type: "end", accounts: { "[alice]": 1, "[bob]": -1 } },
    ]);
    expect(view.phase).toBe("ended");
    expect(view.accounts).toEqual({ "[alice]": 1, "[bob]": -1 });
    expect(view.pending).toEqual([]);
  });
});

describe("delta application", () => {
  it("applies deletions before creations and keeps order stable", () => {
    const view = play([
      { type: "init", facts: ["[a]", "[b]"], accounts: {} },
      { type: "delta", created: ["[c]"], deleted: ["[a]"] },
    ]);
    expect(view.facts).toEqual(["[b]", "[c]"]);
  });

  it("does not duplicate facts recreated by a delta", () => {
    const view = play([
      { type: "init", facts: ["[a]"], accounts: {} },
      { type: "delta", created: ["[a]"], deleted: [] },
    ]);
    expect(view.facts).toEqual(["[a]"]);
  });
});
