/** Object diagram layout: turns an exported system state into positioned
 * nodes and edges for SVG rendering. Deterministic circular layout with a
 * few relaxation passes to shorten edges; no DOM access here. */

import type { StateExport } from "./types.js";

export interface DiagramNode {
  name: string;
  cls: string;
  lines: string[]; // "attr = value" rows
  x: number;
  y: number;
  width: number;
  height: number;
}

export interface DiagramEdge {
  assoc: string;
  from: string;
  to: string;
}

export interface Diagram {
  nodes: DiagramNode[];
  edges: DiagramEdge[];
  width: number;
  height: number;
}

const CHAR_W = 7.2;
const LINE_H = 16;
const PAD = 8;

function attrLine(name: string, value: unknown): string {
  if (value === null) return `${name} = Undefined`;
  if (typeof value === "string") return `${name} = '${value}'`;
  return `${name} = ${JSON.stringify(value)}`;
}

function nodeBox(name: string, cls: string, attrs: Record<string, unknown>): DiagramNode {
  const lines = Object.keys(attrs).sort().map((a) => attrLine(a, attrs[a]));
  const title = `${name} : ${cls}`;
  const longest = Math.max(title.length, ...lines.map((l) => l.length));
  return {
    name,
    cls,
    lines,
    x: 0,
    y: 0,
    width: Math.ceil(longest * CHAR_W) + 2 * PAD,
    height: (lines.length + 1) * LINE_H + 2 * PAD,
  };
}

/** Average each node toward its linked neighbours, then push overlapping
 * pairs apart. Keeps the layout stable for a given input. */
function relax(nodes: DiagramNode[], edges: DiagramEdge[], rounds: number): void {
  const byName = new Map(nodes.map((n) => [n.name, n]));
  for (let r = 0; r < rounds; r++) {
    for (const e of edges) {
      const a = byName.get(e.from);
      const b = byName.get(e.to);
      if (!a || !b || a === b) continue;
      const mx = (a.x + b.x) / 2;
      const my = (a.y + b.y) / 2;
      a.x += (mx - a.x) * 0.15;
      a.y += (my - a.y) * 0.15;
      b.x += (mx - b.x) * 0.15;
      b.y += (my - b.y) * 0.15;
    }
    for (const a of nodes) {
      for (const b of nodes) {
        if (a === b) continue;
        const dx = b.x - a.x;
        const dy = b.y - a.y;
        const need = (a.width + b.width) / 2 + 40;
        const dist = Math.hypot(dx, dy) || 1;
        if (dist < need) {
          const push = (need - dist) / 2;
          a.x -= (dx / dist) * push;
          a.y -= (dy / dist) * push;
          b.x += (dx / dist) * push;
          b.y += (dy / dist) * push;
        }
      }
    }
  }
}

export function layout(state: StateExport): Diagram {
  const nodes = state.objects.map((o) => nodeBox(o.name, o.class, o.attrs));
  const edges: DiagramEdge[] = state.links.map((l) => ({
    assoc: l.assoc,
    from: l.ends[0],
    to: l.ends[1],
  }));

  const n = nodes.length;
  const radius = Math.max(120, n * 60);
  nodes.forEach((node, i) => {
    const angle = (2 * Math.PI * i) / Math.max(n, 1) - Math.PI / 2;
    node.x = radius * Math.cos(angle);
    node.y = radius * Math.sin(angle);
  });
  relax(nodes, edges, 30);

  // shift into positive coordinates with a margin
  const minX = Math.min(0, ...nodes.map((p) => p.x - p.width / 2));
  const minY = Math.min(0, ...nodes.map((p) => p.y - p.height / 2));
  for (const node of nodes) {
    node.x = node.x - minX + 30;
    node.y = node.y - minY + 30;
  }
  const width = Math.max(300, ...nodes.map((p) => p.x + p.width / 2)) + 30;
  const height = Math.max(200, ...nodes.map((p) => p.y + p.height / 2)) + 30;
  return { nodes, edges, width, height };
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Render the diagram as an SVG string; edges first so boxes sit on top. */
export function toSvg(diagram: Diagram): string {
  const byName = new Map(diagram.nodes.map((n) => [n.name, n]));
  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" ` +
    `viewBox="0 0 ${Math.ceil(diagram.width)} ${Math.ceil(diagram.height)}" ` +
    `class="diagram">`);
  for (const e of diagram.edges) {
    const a = byName.get(e.from);
    const b = byName.get(e.to);
    if (!a || !b) continue;
    parts.push(`<line class="edge" x1="${a.x}" y1="${a.y}" x2="${b.x}" y2="${b.y}"/>`);
    const lx = (a.x + b.x) / 2;
    const ly = (a.y + b.y) / 2 - 4;
    parts.push(`<text class="edge-label" x="${lx}" y="${ly}">${esc(e.assoc)}</text>`);
  }
  for (const node of diagram.nodes) {
    const left = node.x - node.width / 2;
    const top = node.y - node.height / 2;
    parts.push(`<g class="object">`);
    parts.push(`<rect x="${left}" y="${top}" width="${node.width}" height="${node.height}" rx="4"/>`);
    parts.push(`<text class="title" x="${node.x}" y="${top + PAD + 11}">` +
      `${esc(node.name)} : ${esc(node.cls)}</text>`);
    node.lines.forEach((line, i) => {
      parts.push(`<text class="attr" x="${left + PAD}" y="${top + PAD + 11 + (i + 1) * LINE_H}">` +
        `${esc(line)}</text>`);
    });
    parts.push(`</g>`);
  }
  parts.push(`</svg>`);
  return parts.join("");
}
