import { SchemaJson, ValidationJson } from "./types.js";
import {
  attributeNames,
  isDescriptive,
  isOptional,
  renderedMeasureNames,
} from "./model.js";
import { layoutSchema } from "./layout.js";

// DFM notation: the fact is a box listing its measures (with additivity
// suffixes), attributes are circles, descriptive attributes lose the
// circle, optional attributes are dashed, and role-tagged arcs carry a
// label. Built as a plain string so it is testable without a DOM.

const CIRCLE_R = 9;

export interface RenderOptions {
  selected?: string | null;
  highlight?: Map<string, string>; // node -> category color
}

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderSchemaSvg(
  schema: SchemaJson,
  validation?: ValidationJson,
  options: RenderOptions = {},
): string {
  const { positions, width, height } = layoutSchema(schema);
  const fact = schema.fact.name;
  const measures = renderedMeasureNames(schema);
  const measureSet = new Set(measures);
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" data-fact="${esc(fact)}">`,
  );

  // arcs first, under the nodes; measure arcs are implicit in the box
  for (const d of schema.dependencies ?? []) {
    if (measureSet.has(d.to)) continue;
    const a = positions.get(d.from);
    const b = positions.get(d.to);
    if (!a || !b) continue;
    const label = d.role
      ? `<text class="role" x="${(a.x + b.x) / 2}" y="${(a.y + b.y) / 2 - 4}">${esc(d.role)}</text>`
      : "";
    parts.push(
      `<g class="arc"><line x1="${a.x}" y1="${a.y}" x2="${b.x}" y2="${b.y}"/>${label}</g>`,
    );
  }

  // fact box with its measure list
  const factPos = positions.get(fact)!;
  const boxH = 26 + measures.length * 16;
  const boxW = 130;
  parts.push(`<g class="fact" transform="translate(${factPos.x - boxW / 2},${factPos.y - boxH / 2})">`);
  parts.push(`<rect width="${boxW}" height="${boxH}"/>`);
  parts.push(`<text class="fact-name" x="${boxW / 2}" y="17">${esc(fact)}</text>`);
  measures.forEach((m, i) => {
    parts.push(
      `<text class="measure" x="${boxW / 2}" y="${33 + i * 16}">${esc(m)}</text>`,
    );
  });
  parts.push("</g>");

  for (const attr of attributeNames(schema)) {
    const pos = positions.get(attr);
    if (!pos) continue;
    const classes = ["attr"];
    if (isDescriptive(schema, attr)) classes.push("descriptive");
    if (isOptional(schema, attr)) classes.push("optional");
    if (options.selected === attr) classes.push("selected");
    const color = options.highlight?.get(attr);
    const style = color ? ` style="--hl:${color}"` : "";
    parts.push(`<g class="${classes.join(" ")}" data-node="${esc(attr)}"${style}>`);
    if (!isDescriptive(schema, attr)) {
      const dash = isOptional(schema, attr) ? ' stroke-dasharray="4 3"' : "";
      parts.push(`<circle cx="${pos.x}" cy="${pos.y}" r="${CIRCLE_R}"${dash}/>`);
    }
    parts.push(`<text x="${pos.x + CIRCLE_R + 4}" y="${pos.y + 4}">${esc(attr)}</text>`);
    parts.push("</g>");
  }

  if (validation && !validation.ok) {
    const codes = [...new Set(validation.violations.map((v) => v.code))];
    parts.push(
      `<g class="badge"><rect x="8" y="8" width="${40 + codes.join(", ").length * 7}" height="22"/>` +
        `<text x="16" y="23">⚠ ${esc(codes.join(", "))}</text></g>`,
    );
  }

  parts.push("</svg>");
  return parts.join("\n");
}
