// JSON shapes served by the schema service; field names mirror the YAML tags.

export interface DependencyJson {
  from: string;
  to: string;
  role?: string;
}

export interface SchemaJson {
  fact: { name: string };
  measures: { name: string }[];
  dependencies?: DependencyJson[];
  descriptive?: string[];
  optional?: string[];
}

export interface ValidationJson {
  ok: boolean;
  violations: { code: string; subject: string; message: string }[];
}

export interface SchemaEnvelope {
  id: string;
  version: number;
  schema: SchemaJson;
  yaml: string;
  validation: ValidationJson;
}

export interface DiffReportJson {
  errors_by_category: Record<string, number>;
  total: number;
  node_precision: number;
  node_recall: number;
  arc_precision: number;
  arc_recall: number;
  detail: { category: string; expected: string; found: string }[];
}

export interface LlmExchange {
  extraction_ok: boolean;
  response_text: string;
  schema: SchemaJson | null;
  yaml?: string;
  validation?: ValidationJson;
}
