import { SchemaJson } from "./types.js";
import { attributeNames, renderedMeasureNames } from "./model.js";

export interface NodePosition {
  x: number;
  y: number;
  layer: number;
}

export interface Layout {
  positions: Map<string, NodePosition>;
  width: number;
  height: number;
}

export const X_SPACING = 170;
export const Y_SPACING = 64;
export const MARGIN = 60;

// Layered left-to-right layout: a node's layer is the longest arc path
// from the fact, so hierarchies read as roll-up chains and shared nodes
// are placed once, past all their parents.
export function layoutSchema(schema: SchemaJson): Layout {
  const fact = schema.fact.name;
  const measures = new Set(renderedMeasureNames(schema));
  const arcs = (schema.dependencies ?? []).filter((d) => !measures.has(d.to));

  const layers = new Map<string, number>([[fact, 0]]);
  const attrs = attributeNames(schema);
  // relaxation passes; schemata are small and acyclic
  for (let pass = 0; pass < attrs.length + 1; pass++) {
    let changed = false;
    for (const d of arcs) {
      const from = layers.get(d.from);
      if (from === undefined) continue;
      const next = from + 1;
      if ((layers.get(d.to) ?? 0) < next) {
        layers.set(d.to, next);
        changed = true;
      }
    }
    if (!changed) break;
  }
  for (const a of attrs) {
    if (!layers.has(a)) layers.set(a, 1); // disconnected, still drawn
  }

  const byLayer = new Map<number, string[]>();
  for (const [node, layer] of layers) {
    const bucket = byLayer.get(layer) ?? [];
    bucket.push(node);
    byLayer.set(layer, bucket);
  }
  const positions = new Map<string, NodePosition>();
  let maxLayer = 0;
  let maxRows = 0;
  for (const [layer, nodes] of byLayer) {
    nodes.sort();
    nodes.forEach((node, row) => {
      positions.set(node, {
        x: MARGIN + layer * X_SPACING,
        y: MARGIN + row * Y_SPACING,
        layer,
      });
    });
    maxLayer = Math.max(maxLayer, layer);
    maxRows = Math.max(maxRows, nodes.length);
  }
  return {
    positions,
    width: 2 * MARGIN + maxLayer * X_SPACING + 120,
    height: 2 * MARGIN + Math.max(0, maxRows - 1) * Y_SPACING + 40,
  };
}
