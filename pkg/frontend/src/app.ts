import { ApiClient, ApiError } from "./api.js";
import { renderSchemaSvg } from "./svg.js";
import { highlightFromReport, summarizeReport } from "./diffview.js";
import { LlmExchange, SchemaEnvelope } from "./types.js";

// Workbench wiring. State lives on the server (id + version per D-series
// versioning); the client re-renders from server truth after every call
// and disables mutation buttons while a request is in flight.

const api = new ApiClient();

interface Workbench {
  current: SchemaEnvelope | null;
  compare: SchemaEnvelope | null;
  pending: LlmExchange | null;
  selected: string | null;
  busy: boolean;
}

const state: Workbench = {
  current: null,
  compare: null,
  pending: null,
  selected: null,
  busy: false,
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setStatus(text: string, isError = false): void {
  const status = el<HTMLElement>("status");
  status.textContent = text;
  status.classList.toggle("error", isError);
}

function redraw(highlight?: Map<string, string>): void {
  const host = el<HTMLElement>("diagram");
  if (!state.current) {
    host.innerHTML = "<p>Upload a schema to begin.</p>";
    return;
  }
  host.innerHTML = renderSchemaSvg(state.current.schema, state.current.validation, {
    selected: state.selected,
    highlight,
  });
  el<HTMLElement>("version").textContent = `v${state.current.version}`;
  for (const node of host.querySelectorAll<SVGGElement>("g.attr")) {
    node.addEventListener("click", () => {
      state.selected = node.dataset.node ?? null;
      redraw(highlight);
    });
  }
}

async function guarded(action: () => Promise<void>): Promise<void> {
  if (state.busy) return;
  state.busy = true;
  document.body.classList.add("busy");
  try {
    await action();
    setStatus("ok");
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      setStatus("schema changed elsewhere; reload before editing", true);
    } else {
      setStatus(String(err), true);
    }
  } finally {
    state.busy = false;
    document.body.classList.remove("busy");
  }
}

function needSelection(): string {
  if (!state.selected) throw new Error("select a node first");
  return state.selected;
}

async function applyOp(kind: string, params: Record<string, unknown>): Promise<void> {
  if (!state.current) throw new Error("no schema loaded");
  state.current = await api.applyOps(state.current.id, state.current.version, [
    { kind, params },
  ]);
  state.pending = null;
  redraw();
}

function showExchange(exchange: LlmExchange): void {
  state.pending = exchange.extraction_ok ? exchange : null;
  el<HTMLElement>("chat-raw").textContent = exchange.response_text;
  const preview = el<HTMLElement>("chat-preview");
  if (exchange.extraction_ok && exchange.schema) {
    preview.innerHTML = renderSchemaSvg(exchange.schema, exchange.validation);
  } else {
    preview.innerHTML = "<p>No schema could be extracted from the answer.</p>";
  }
  el<HTMLButtonElement>("chat-accept").disabled = !exchange.extraction_ok;
}

function bind(): void {
  el<HTMLButtonElement>("upload").addEventListener("click", () =>
    guarded(async () => {
      const yaml = el<HTMLTextAreaElement>("yaml-input").value;
      state.current = await api.uploadYaml(yaml);
      state.selected = null;
      state.pending = null;
      redraw();
    }),
  );

  const ops: [string, string, () => Record<string, unknown>][] = [
    ["op-rename", "Rename", () => {
      const old = needSelection();
      const next = prompt("New name", old);
      if (!next) throw new Error("rename cancelled");
      return { old, new: next };
    }],
    ["op-descriptive", "MarkDescriptive", () => ({ attr: needSelection() })],
    ["op-optional", "MarkOptional", () => ({ attr: needSelection() })],
    ["op-remove", "RemoveAttribute", () => ({ attr: needSelection() })],
    ["op-time", "CompleteTimeHierarchy", () => ({ date_attr: needSelection() })],
  ];
  for (const [id, kind, build] of ops) {
    el<HTMLButtonElement>(id).addEventListener("click", () =>
      guarded(async () => applyOp(kind, build())),
    );
  }

  el<HTMLButtonElement>("chat-run").addEventListener("click", () =>
    guarded(async () => {
      if (!state.current) throw new Error("no schema loaded");
      const step = el<HTMLSelectElement>("chat-step").value;
      const statement = el<HTMLInputElement>("chat-statement").value || undefined;
      showExchange(
        await api.llmStep(state.current.id, state.current.version, step, statement),
      );
    }),
  );

  el<HTMLButtonElement>("chat-fix").addEventListener("click", () =>
    guarded(async () => {
      if (!state.current) throw new Error("no schema loaded");
      const text = el<HTMLInputElement>("chat-fix-text").value;
      showExchange(await api.llmFix(state.current.id, state.current.version, text));
    }),
  );

  el<HTMLButtonElement>("chat-accept").addEventListener("click", () =>
    guarded(async () => {
      if (!state.current || !state.pending) throw new Error("nothing to accept");
      state.current = await api.llmAccept(state.current.id, state.current.version);
      state.pending = null;
      el<HTMLElement>("chat-preview").innerHTML = "";
      el<HTMLButtonElement>("chat-accept").disabled = true;
      redraw();
    }),
  );

  el<HTMLButtonElement>("compare-upload").addEventListener("click", () =>
    guarded(async () => {
      state.compare = await api.uploadYaml(el<HTMLTextAreaElement>("compare-input").value);
      el<HTMLElement>("compare-note").textContent = `truth loaded (id ${state.compare.id})`;
    }),
  );

  el<HTMLButtonElement>("compare-run").addEventListener("click", () =>
    guarded(async () => {
      if (!state.current || !state.compare) throw new Error("load both schemata first");
      const { report } = await api.diff(state.current.id, state.compare.id);
      el<HTMLElement>("compare-report").textContent = summarizeReport(report);
      redraw(highlightFromReport(report));
    }),
  );
}

document.addEventListener("DOMContentLoaded", () => {
  bind();
  redraw();
});
