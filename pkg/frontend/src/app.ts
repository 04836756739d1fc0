/** Panel wiring: every user action round-trips through the service and the
 * affected panels re-render from fresh payloads (no optimistic state). */

import { ApiError, SessionClient } from "./api.js";
import {
  renderCooccurrence,
  renderEmptyState,
  renderLattice,
  renderSchemaPanel,
  renderStatsTable,
  renderValidationPanel,
} from "./render.js";
import type { EditOpJson, SchemaPayload } from "./types.js";

type Panels = {
  schema: HTMLElement;
  data: HTMLElement;
  validation: HTMLElement;
  messages: HTMLElement;
};

function parseSteps(path: string): [string, number][] {
  // "conjunct[2]/branch[0]" -> [["conjunct", 2], ["branch", 0]]
  return path.split("/").map((part) => {
    const match = /^(conjunct|branch|nested)\[(\d+)\]$/.exec(part);
    if (!match) throw new Error(`bad path segment ${part}`);
    return [match[1], Number(match[2])];
  });
}

export class App {
  schemaPayload: SchemaPayload | null = null;
  private statsLabel: string | null = null;

  constructor(
    readonly client: SessionClient,
    readonly panels: Panels,
  ) {}

  note(text: string, isError = false): void {
    const item = document.createElement("p");
    item.className = isError ? "message error" : "message";
    item.textContent = text;
    this.panels.messages.prepend(item);
    while (this.panels.messages.children.length > 6) {
      this.panels.messages.lastChild?.remove();
    }
  }

  async guard<T>(work: () => Promise<T>): Promise<T | undefined> {
    try {
      return await work();
    } catch (err) {
      if (err instanceof ApiError) {
        this.note(`${err.envelope.code}: ${err.envelope.message}`, true);
      } else {
        this.note(String(err), true);
      }
      return undefined;
    }
  }

  renderEmpty(): void {
    this.panels.schema.innerHTML = renderEmptyState(
      "schema",
      "No session: load a graph, then infer or add shapes.",
    );
    this.panels.data.innerHTML = renderEmptyState(
      "data",
      "Statistics appear once a shape with a target exists.",
    );
    this.panels.validation.innerHTML = renderEmptyState(
      "validation",
      "Validation results appear after the first run.",
    );
  }

  async refreshSchema(): Promise<void> {
    const payload = await this.guard(() => this.client.schema());
    if (!payload) return;
    this.schemaPayload = payload;
    this.panels.schema.innerHTML = renderSchemaPanel(payload);
    const labels = Object.keys(payload.ast.shapes);
    if (labels.length && !this.statsLabel) {
      this.statsLabel = labels[0];
    }
  }

  async refreshValidation(): Promise<void> {
    const payload = await this.guard(() => this.client.validation());
    if (!payload) return;
    this.panels.validation.innerHTML = renderValidationPanel(payload);
  }

  async refreshData(): Promise<void> {
    if (!this.statsLabel) return;
    const label = this.statsLabel;
    const stats = await this.guard(() => this.client.stats(label));
    const matrix = await this.guard(() => this.client.cooccurrence(label));
    if (!stats || !matrix) return;
    const labels = this.schemaPayload ? Object.keys(this.schemaPayload.ast.shapes) : [label];
    const options = labels
      .map(
        (l) =>
          `<option value="${l}"${l === label ? " selected" : ""}>&lt;${l}&gt;</option>`,
      )
      .join("");
    const lattices = stats.predicates
      .filter((row) => row.lattice.length)
      .map((row) => renderLattice(row))
      .join("\n");
    this.panels.data.innerHTML =
      `<h3>sample of <select id="stats-label">${options}</select> ` +
      `(${stats.sample_size} nodes)</h3>` +
      renderStatsTable(stats) +
      renderCooccurrence(matrix) +
      `<div class="lattices">${lattices}</div>`;
    this.panels.data.querySelector<HTMLSelectElement>("#stats-label")?.addEventListener(
      "change",
      (event) => {
        this.statsLabel = (event.target as HTMLSelectElement).value;
        void this.refreshData();
      },
    );
  }

  async refreshAll(): Promise<void> {
    await this.refreshSchema();
    await this.refreshValidation();
    await this.refreshData();
  }

  async applyEdit(op: EditOpJson): Promise<void> {
    const response = await this.guard(() => this.client.applyEdit(op));
    if (!response) return;
    const triggered = Object.entries(response.result.triggered);
    for (const [label, nodes] of triggered) {
      this.note(`target of <${label}> grew by ${nodes.length} node(s)`);
    }
    await this.refreshAll();
  }

  /** Click-to-navigate: a violation row highlights its schema constraint. */
  wireValidationNavigation(): void {
    this.panels.validation.addEventListener("click", (event) => {
      const row = (event.target as HTMLElement).closest<HTMLElement>("li.violation");
      if (!row) return;
      const path = row.dataset.path ?? "";
      const label = row.dataset.label ?? "";
      this.panels.schema
        .querySelectorAll(".conjunct.highlight")
        .forEach((el) => el.classList.remove("highlight"));
      const selector = `.shape[data-label="${CSS.escape(label)}"] [data-path="${CSS.escape(path)}"]`;
      const target = this.panels.schema.querySelector(selector);
      target?.classList.add("highlight");
      target?.scrollIntoView({ block: "center" });
    });
  }

  wireSchemaActions(): void {
    this.panels.schema.addEventListener("click", (event) => {
      const button = (event.target as HTMLElement).closest<HTMLButtonElement>("button[data-action]");
      if (!button) return;
      const action = button.dataset.action!;
      const shape = button.closest<HTMLElement>(".shape");
      const label = button.dataset.label ?? shape?.dataset.label;
      if (!label) return;
      const path = button.dataset.path;
      const steps = path ? parseSteps(path) : [];
      if (action === "set-cardinality") {
        void this.applyEdit({
          kind: "set-cardinality",
          label,
          steps,
          cardinality: button.dataset.cardinality ?? "{1;1}",
        });
      } else if (action === "set-cardinality-free") {
        const value = window.prompt("cardinality as {min;max}, e.g. {2;5} or {1;*}");
        if (value) {
          void this.applyEdit({ kind: "set-cardinality", label, steps, cardinality: value });
        }
      } else if (action === "set-object") {
        const value = window.prompt(
          "object constraint (e.g. iri, xsd:string, @<Label>, [ex:a])",
        );
        if (value) void this.applyEdit({ kind: "set-object", label, steps, object: value });
      } else if (action === "infer-nested") {
        void this.applyEdit({ kind: "infer-nested", label, steps, mode: "msc" });
      } else if (action === "remove-conjunct") {
        void this.applyEdit({ kind: "remove-conjunct", label, steps });
      } else if (action === "split-choice") {
        void this.applyEdit({ kind: "split-choice", label, steps });
      } else if (action === "add-conjunct") {
        const text = window.prompt("constraint (e.g. foaf:name xsd:string {1;1})");
        if (text) void this.applyEdit({ kind: "add-conjunct", label, steps: [], conjunct: text });
      } else if (action === "group-into-choice") {
        const section = shape!;
        const indices = [...section.querySelectorAll<HTMLInputElement>(".group-pick:checked")].map(
          (box) => Number(box.dataset.index),
        );
        if (indices.length >= 2) {
          void this.applyEdit({ kind: "group-into-choice", label, steps: [], indices, at: [] });
        } else {
          this.note("select at least two constraints to group", true);
        }
      }
    });
  }
}

function element(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

export function mount(): void {
  const client = new SessionClient("");
  const app = new App(client, {
    schema: element("schema-panel"),
    data: element("data-panel"),
    validation: element("validation-panel"),
    messages: element("messages"),
  });
  app.renderEmpty();
  app.wireSchemaActions();
  app.wireValidationNavigation();

  element("load-graph").addEventListener("click", () => {
    const path = (element("graph-path") as HTMLInputElement).value.trim();
    if (!path) return;
    void app.guard(async () => {
      const created = await client.createSession({ graph_path: path });
      app.note(`session ${created.session_id.slice(0, 8)}…: ${created.triples} triples`);
      const params = new URLSearchParams(window.location.search);
      params.set("session", created.session_id);
      history.replaceState(null, "", `?${params}`);
      await app.refreshAll();
    });
  });

  element("run-infer").addEventListener("click", () => {
    const label = (element("infer-label") as HTMLInputElement).value.trim() || "S";
    const classIri = (element("infer-class") as HTMLInputElement).value.trim();
    const mode = (element("infer-mode") as HTMLSelectElement).value;
    const errorRate = (element("infer-error") as HTMLInputElement).value.trim() || "0";
    const pattern = (element("infer-pattern") as HTMLTextAreaElement).value.trim();
    void app.guard(async () => {
      const body = {
        label,
        mode,
        target: classIri
          ? { selector: "class", iri: classIri }
          : { selector: "all" as const },
        config: { error_rate: errorRate },
        ...(pattern ? { pattern } : {}),
      };
      const response = await client.infer(body);
      app.note(`inferred ${response.created.join(", ")}`);
      for (const warning of response.report?.warnings ?? []) {
        app.note(`${warning.kind} <${warning.label}> ${warning.predicate ?? ""}: ${warning.detail}`);
      }
      await app.refreshAll();
    });
  });

  element("refresh-validation").addEventListener("click", () => {
    void app.refreshValidation();
  });

  for (const [id, format] of [
    ["export-shex", "shex"],
    ["export-shacl", "shacl"],
  ] as const) {
    element(id).addEventListener("click", () => {
      void app.guard(async () => {
        const text = await client.exportText(format);
        const blob = new Blob([text], { type: "text/plain;charset=utf-8" });
        const link = document.createElement("a");
        link.href = URL.createObjectURL(blob);
        link.download = format === "shex" ? "schema.shex" : "shapes.ttl";
        link.click();
        URL.revokeObjectURL(link.href);
      });
    });
  }

  element("save-workspace").addEventListener("click", () => {
    void app.guard(async () => {
      const doc = await client.save();
      const blob = new Blob([JSON.stringify(doc, null, 2)], { type: "application/json" });
      const link = document.createElement("a");
      link.href = URL.createObjectURL(blob);
      link.download = "workspace.json";
      link.click();
      URL.revokeObjectURL(link.href);
    });
  });

  (element("load-workspace") as HTMLInputElement).addEventListener("change", (event) => {
    const input = event.target as HTMLInputElement;
    const file = input.files?.[0];
    const path = (element("graph-path") as HTMLInputElement).value.trim();
    if (!file) return;
    void app.guard(async () => {
      const doc = JSON.parse(await file.text());
      const created = await client.createSession({ graph_path: path, document: doc });
      app.note(`workspace restored into session ${created.session_id.slice(0, 8)}…`);
      for (const warning of created.warnings) app.note(warning, true);
      await app.refreshAll();
    });
  });
}

if (typeof document !== "undefined" && document.getElementById("schema-panel")) {
  mount();
}
