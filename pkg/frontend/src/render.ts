/** Pure HTML renderers for the three panels.
 *
 * Every value shown comes verbatim from an API payload; the functions hold
 * no state and do no formatting beyond HTML escaping, so the contract tests
 * can compare rendered output against recorded responses byte by byte.
 */

import type {
  ChoiceAst,
  ConjunctAst,
  CooccurrencePayload,
  NodeReport,
  PredicateStatsRow,
  SchemaPayload,
  StatsPayload,
  TripleConstraintAst,
  ValidationPayload,
} from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function isChoice(conjunct: ConjunctAst): conjunct is ChoiceAst {
  return (conjunct as ChoiceAst).choice !== undefined;
}

const CARDINALITIES = ["{0;1}", "{1;1}", "{0;*}", "{1;*}"];

function shrink(iri: string, prefixes: Record<string, string>): string {
  let best: string | null = null;
  let bestLen = -1;
  for (const [name, ns] of Object.entries(prefixes)) {
    if (iri.startsWith(ns) && ns.length > bestLen) {
      best = `${name}:${iri.slice(ns.length)}`;
      bestLen = ns.length;
    }
  }
  return best ?? `<${iri}>`;
}

function constraintRow(
  tc: TripleConstraintAst,
  path: string,
  prefixes: Record<string, string>,
): string {
  const cardButtons =
    CARDINALITIES.map(
      (card) =>
        `<button class="card-pick" data-action="set-cardinality" data-path="${escapeHtml(path)}"` +
        ` data-cardinality="${escapeHtml(card)}">${escapeHtml(card)}</button>`,
    ).join("") +
    `<button data-action="set-cardinality-free" data-path="${escapeHtml(path)}">{m;n}…</button>`;
  return (
    `<span class="predicate">${escapeHtml(shrink(tc.predicate, prefixes))}</span> ` +
    `<span class="object">${escapeHtml(tc.object)}</span> ` +
    `<span class="cardinality">${escapeHtml(tc.cardinality)}</span>` +
    `<span class="actions">${cardButtons}` +
    `<button data-action="set-object" data-path="${escapeHtml(path)}">object…</button>` +
    `<button data-action="infer-nested" data-path="${escapeHtml(path)}">infer nested</button>` +
    `<button data-action="remove-conjunct" data-path="${escapeHtml(path)}">remove</button>` +
    `</span>`
  );
}

export function renderSchemaPanel(payload: SchemaPayload): string {
  const parts: string[] = ['<div class="schema-panel">'];
  parts.push(`<pre class="scl-text">${escapeHtml(payload.scl)}</pre>`);
  for (const [label, shape] of Object.entries(payload.ast.shapes)) {
    const target = payload.targets[label];
    const targetText = target
      ? `${target.selector}${target.iri ? ` ${target.iri}` : ""}`
      : "no target";
    parts.push(
      `<section class="shape" data-label="${escapeHtml(label)}">` +
        `<h3>&lt;${escapeHtml(label)}&gt; <small class="target">${escapeHtml(targetText)}</small></h3>`,
    );
    if (shape.values.length) {
      parts.push(
        `<div class="value-part">${shape.values
          .map((v) => `<code>${escapeHtml(v)}</code>`)
          .join(" AND ")}</div>`,
      );
    }
    parts.push('<ol class="conjuncts">');
    shape.conjuncts.forEach((conjunct, index) => {
      const path = `conjunct[${index}]`;
      if (isChoice(conjunct)) {
        const branches = conjunct.choice
          .map(
            (branch, branchIndex) =>
              `<li class="branch" data-path="${escapeHtml(path)}/branch[${branchIndex}]">` +
              constraintRow(branch, `${path}/branch[${branchIndex}]`, payload.ast.prefixes) +
              `</li>`,
          )
          .join("");
        parts.push(
          `<li class="conjunct choice" data-label="${escapeHtml(label)}" data-path="${escapeHtml(path)}">` +
            `<span class="choice-mark">exactly one of</span>` +
            `<button data-action="split-choice" data-path="${escapeHtml(path)}">split choice</button>` +
            `<ul>${branches}</ul></li>`,
        );
      } else {
        parts.push(
          `<li class="conjunct single" data-label="${escapeHtml(label)}" data-path="${escapeHtml(path)}">` +
            `<input type="checkbox" class="group-pick" data-index="${index}">` +
            constraintRow(conjunct, path, payload.ast.prefixes) +
            `</li>`,
        );
      }
    });
    parts.push("</ol>");
    parts.push(
      `<div class="shape-actions">` +
        `<button data-action="add-conjunct" data-label="${escapeHtml(label)}">add constraint…</button>` +
        `<button data-action="group-into-choice" data-label="${escapeHtml(label)}">group selected into choice</button>` +
        `</div></section>`,
    );
  }
  parts.push("</div>");
  return parts.join("\n");
}

export function renderStatsTable(payload: StatsPayload): string {
  const rows = payload.predicates
    .map(
      (row) =>
        `<tr data-predicate="${escapeHtml(row.predicate)}">` +
        `<td class="predicate">${escapeHtml(row.predicate)}</td>` +
        `<td class="nodes">${row.nodes_with_predicate}</td>` +
        `<td class="min">${row.min_occurs}</td>` +
        `<td class="max">${row.max_occurs}</td>` +
        `<td class="mean">${escapeHtml(row.mean_occurs)}</td>` +
        `</tr>`,
    )
    .join("\n");
  return (
    `<table class="stats-table" data-label="${escapeHtml(payload.label)}" ` +
    `data-sample-size="${payload.sample_size}">` +
    `<thead><tr><th>predicate</th><th>nodes</th><th>min</th><th>max</th><th>mean</th></tr></thead>` +
    `<tbody>\n${rows}\n</tbody></table>`
  );
}

export function renderLattice(row: PredicateStatsRow): string {
  const parents = new Map(row.lattice_edges.map(([child, parent]) => [child, parent]));
  const items = row.lattice
    .map((annotation) => {
      const parent = parents.get(annotation.option);
      return (
        `<li class="option" data-option="${escapeHtml(annotation.option)}"` +
        (parent ? ` data-parent="${escapeHtml(parent)}"` : "") +
        `><code>${escapeHtml(annotation.option)}</code> ` +
        `<span class="votes">(${annotation.direct}; ${annotation.accumulated})</span></li>`
      );
    })
    .join("\n");
  return `<ul class="value-lattice" data-predicate="${escapeHtml(row.predicate)}">\n${items}\n</ul>`;
}

export function renderCooccurrence(payload: CooccurrencePayload): string {
  const counts = new Map<string, number>();
  for (const cell of payload.counts) {
    counts.set(`${cell.a}|${cell.b}`, cell.count);
    counts.set(`${cell.b}|${cell.a}`, cell.count);
  }
  const header = payload.predicates
    .map((p) => `<th title="${escapeHtml(p)}">${escapeHtml(p.split(/[\/#]/).pop() ?? p)}</th>`)
    .join("");
  const body = payload.predicates
    .map((p) => {
      const cells = payload.predicates
        .map((q) => {
          const count = counts.get(`${p}|${q}`) ?? 0;
          return `<td data-a="${escapeHtml(p)}" data-b="${escapeHtml(q)}">${count}</td>`;
        })
        .join("");
      return `<tr><th title="${escapeHtml(p)}">${escapeHtml(p.split(/[\/#]/).pop() ?? p)}</th>${cells}</tr>`;
    })
    .join("\n");
  return (
    `<table class="cooccurrence" data-label="${escapeHtml(payload.label)}">` +
    `<thead><tr><th></th>${header}</tr></thead><tbody>\n${body}\n</tbody></table>`
  );
}

export function renderNodeReport(report: NodeReport): string {
  const cls = report.conforms ? "conforms" : "violating";
  const violations = report.violations
    .map(
      (v) =>
        `<li class="violation" data-kind="${escapeHtml(v.kind)}" ` +
        `data-label="${escapeHtml(report.label)}" ` +
        `data-path="${escapeHtml(v.path.join("/"))}">` +
        `<span class="kind">${escapeHtml(v.kind)}</span>` +
        (v.predicate ? ` <span class="predicate">${escapeHtml(v.predicate)}</span>` : "") +
        ` <span class="observed">observed ${escapeHtml(v.observed)}</span>` +
        ` <span class="expected">expected ${escapeHtml(v.expected)}</span></li>`,
    )
    .join("\n");
  return (
    `<li class="node-report ${cls}" data-node="${escapeHtml(report.node)}" ` +
    `data-label="${escapeHtml(report.label)}">` +
    `<span class="node">${escapeHtml(report.node)}</span> against ` +
    `<span class="label">&lt;${escapeHtml(report.label)}&gt;</span>` +
    (report.violations.length ? `<ul class="violations">\n${violations}\n</ul>` : "") +
    `</li>`
  );
}

export function renderValidationPanel(payload: ValidationPayload): string {
  const status = payload.conforms ? "all nodes conform" : "violations found";
  const rows = payload.reports.map(renderNodeReport).join("\n");
  return (
    `<div class="validation-panel ${payload.conforms ? "ok" : "failing"}">` +
    `<p class="status">${status}</p><ul class="node-reports">\n${rows}\n</ul></div>`
  );
}

export function renderEmptyState(panel: string, hint: string): string {
  return `<div class="empty-state" data-panel="${escapeHtml(panel)}">${escapeHtml(hint)}</div>`;
}
