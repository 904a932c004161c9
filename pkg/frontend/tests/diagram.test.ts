import { describe, expect, it } from "vitest";

import { layout, toSvg } from "../src/diagram.js";
import { STATE } from "./fixtures.js";

describe("layout", () => {
  it("produces one node per object and one edge per link", () => {
    const d = layout(STATE);
    expect(d.nodes).toHaveLength(3);
    expect(d.edges).toHaveLength(2);
    expect(d.nodes.map((n) => n.name).sort()).toEqual(["customer1", "order1", "order2"]);
  });

  it("renders attribute values inside the node", () => {
    const d = layout(STATE);
    const customer = d.nodes.find((n) => n.name === "customer1")!;
    expect(customer.cls).toBe("Customer");
    expect(customer.lines).toContain("age = 21");
    expect(customer.lines).toContain("name = 'ann'");
  });

  it("shows unset attributes as Undefined", () => {
    const d = layout({
      objects: [{ name: "o1", class: "Order", attrs: { ref: null } }],
      links: [],
    });
    expect(d.nodes[0].lines).toEqual(["ref = Undefined"]);
  });

  it("keeps nodes inside the reported canvas", () => {
    const d = layout(STATE);
    for (const n of d.nodes) {
      expect(n.x - n.width / 2).toBeGreaterThanOrEqual(0);
      expect(n.y - n.height / 2).toBeGreaterThanOrEqual(0);
      expect(n.x + n.width / 2).toBeLessThanOrEqual(d.width);
      expect(n.y + n.height / 2).toBeLessThanOrEqual(d.height);
    }
  });

  it("separates distinct nodes", () => {
    const d = layout(STATE);
    for (const a of d.nodes) {
      for (const b of d.nodes) {
        if (a === b) continue;
        expect(Math.hypot(a.x - b.x, a.y - b.y)).toBeGreaterThan(30);
      }
    }
  });

  it("is deterministic", () => {
    expect(layout(STATE)).toEqual(layout(STATE));
  });

  it("handles the empty state", () => {
    const d = layout({ objects: [], links: [] });
    expect(d.nodes).toEqual([]);
    expect(d.edges).toEqual([]);
    expect(d.width).toBeGreaterThan(0);
  });
});

describe("toSvg", () => {
  it("emits a box per object and a line per link", () => {
    const svg = toSvg(layout(STATE));
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg.match(/<rect /g)).toHaveLength(3);
    expect(svg.match(/<line /g)).toHaveLength(2);
    expect(svg).toContain("customer1 : Customer");
    expect(svg.match(/>Places</g)).toHaveLength(2);
  });

  it("escapes markup in names and values", () => {
    const svg = toSvg(layout({
      objects: [{ name: "o1", class: "Order", attrs: { note: "<b>&" } }],
      links: [],
    }));
    expect(svg).toContain("&lt;b&gt;&amp;");
    expect(svg).not.toContain("<b>&");
  });
});
