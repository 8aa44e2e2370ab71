import { SchemaJson } from "./types.js";

const SUFFIXES: [string, string][] = [
  [" (SUM-AVG)", "semi-additive"],
  [" (AVG)", "non-additive"],
];

export function renderedMeasureNames(schema: SchemaJson): string[] {
  return schema.measures.map((m) => m.name);
}

export function baseMeasureName(rendered: string): string {
  for (const [suffix] of SUFFIXES) {
    if (rendered.endsWith(suffix)) return rendered.slice(0, -suffix.length);
  }
  return rendered;
}

export function attributeNames(schema: SchemaJson): string[] {
  const excluded = new Set([schema.fact.name, ...renderedMeasureNames(schema)]);
  const names = new Set<string>();
  for (const d of schema.dependencies ?? []) {
    if (!excluded.has(d.from)) names.add(d.from);
    if (!excluded.has(d.to)) names.add(d.to);
  }
  return [...names].sort();
}

export function childrenOf(schema: SchemaJson, node: string): string[] {
  const measures = new Set(renderedMeasureNames(schema));
  return (schema.dependencies ?? [])
    .filter((d) => d.from === node && !measures.has(d.to))
    .map((d) => d.to);
}

export function inDegree(schema: SchemaJson, node: string): number {
  return (schema.dependencies ?? []).filter((d) => d.to === node).length;
}

export function sharedEntries(schema: SchemaJson): string[] {
  return attributeNames(schema).filter((a) => inDegree(schema, a) >= 2);
}

export function isDescriptive(schema: SchemaJson, node: string): boolean {
  return (schema.descriptive ?? []).includes(node);
}

export function isOptional(schema: SchemaJson, node: string): boolean {
  return (schema.optional ?? []).includes(node);
}
