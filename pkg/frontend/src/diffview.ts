import { DiffReportJson } from "./types.js";

// One color per error category, keyed to the diff report's buckets.
export const CATEGORY_COLORS: Record<string, string> = {
  Renaming: "#c77d00",
  Additivity: "#8e44ad",
  DescriptiveOrDiscretized: "#2980b9",
  Optional: "#16a085",
  TimeHierarchy: "#27ae60",
  Removal: "#c0392b",
  Structure: "#7f2d2d",
};

// Pull node names out of the discrepancy detail so the diagram can tint
// the offending nodes with their category color.
export function highlightFromReport(report: DiffReportJson): Map<string, string> {
  const map = new Map<string, string>();
  for (const d of report.detail) {
    const color = CATEGORY_COLORS[d.category];
    if (!color) continue;
    for (const field of [d.found, d.expected]) {
      const name = field
        .replace(/^(fake node|measure|attribute|fact)\s+/, "")
        .replace(/\s+(descriptive|optional)=.*$/, "")
        .trim();
      if (name && !name.startsWith("(") && !name.includes("->")) {
        if (!map.has(name)) map.set(name, color);
      }
    }
  }
  return map;
}

export function summarizeReport(report: DiffReportJson): string {
  const lines = [`total: ${report.total}`];
  for (const [category, count] of Object.entries(report.errors_by_category)) {
    if (count > 0) lines.push(`${category}: ${count}`);
  }
  return lines.join("\n");
}
