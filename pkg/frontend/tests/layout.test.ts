import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";
import { layoutSchema } from "../src/layout.js";
import { SchemaJson } from "../src/types.js";

const refined: SchemaJson = JSON.parse(
  readFileSync(new URL("./fixtures/c2_refined.json", import.meta.url), "utf-8"),
);

describe("layered layout", () => {
  it("puts the fact leftmost and respects roll-up order", () => {
    const { positions } = layoutSchema(refined);
    const fact = positions.get("PURCHASES")!;
    expect(fact.layer).toBe(0);
    for (const [node, pos] of positions) {
      if (node !== "PURCHASES") expect(pos.x).toBeGreaterThan(fact.x);
    }
    expect(positions.get("Date")!.layer).toBeLessThan(positions.get("Month")!.layer);
    expect(positions.get("Month")!.layer).toBeLessThan(positions.get("Year")!.layer);
  });

  it("places shared nodes once, past all parents", () => {
    const shared: SchemaJson = {
      fact: { name: "F" },
      measures: [],
      dependencies: [
        { from: "F", to: "A" },
        { from: "A", to: "B" },
        { from: "F", to: "C" },
        { from: "B", to: "C" },
      ],
    };
    const { positions } = layoutSchema(shared);
    // C is reachable in one hop and in three; longest path wins
    expect(positions.get("C")!.layer).toBe(3);
  });

  it("is deterministic", () => {
    const a = layoutSchema(refined);
    const b = layoutSchema(refined);
    expect([...a.positions.entries()]).toEqual([...b.positions.entries()]);
  });

  it("still places disconnected attributes", () => {
    const broken: SchemaJson = {
      fact: { name: "F" },
      measures: [],
      dependencies: [
        { from: "F", to: "A" },
        { from: "X", to: "Y" },
      ],
    };
    const { positions } = layoutSchema(broken);
    expect(positions.has("X")).toBe(true);
    expect(positions.has("Y")).toBe(true);
  });
});
