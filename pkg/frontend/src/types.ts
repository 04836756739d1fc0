/** JSON payload shapes of the session service. */

export interface SessionCreated {
  session_id: string;
  triples: number;
  warnings: string[];
}

export interface TripleConstraintAst {
  predicate: string;
  object: string;
  cardinality: string;
}

export interface ChoiceAst {
  choice: TripleConstraintAst[];
}

export type ConjunctAst = TripleConstraintAst | ChoiceAst;

export interface ShapeAst {
  values: string[];
  conjuncts: ConjunctAst[];
}

export interface TargetSpecJson {
  selector: string;
  iri?: string;
  include?: string[];
  exclude?: string[];
}

export interface SchemaPayload {
  scl: string;
  ast: { prefixes: Record<string, string>; shapes: Record<string, ShapeAst> };
  targets: Record<string, TargetSpecJson>;
  edit_count: number;
}

export interface LatticeRow {
  option: string;
  direct: number;
  accumulated: number;
}

export interface PredicateStatsRow {
  predicate: string;
  sample_size: number;
  nodes_with_predicate: number;
  min_occurs: number;
  max_occurs: number;
  mean_occurs: string;
  mean_occurs_decimal: number;
  lattice: LatticeRow[];
  lattice_edges: [string, string][];
}

export interface StatsPayload {
  label: string;
  sample_size: number;
  predicates: PredicateStatsRow[];
}

export interface CooccurrenceCell {
  a: string;
  b: string;
  count: number;
}

export interface CooccurrencePayload {
  label: string;
  predicates: string[];
  counts: CooccurrenceCell[];
}

export interface Violation {
  kind: string;
  path: string[];
  predicate: string | null;
  observed: string;
  expected: string;
}

export interface NodeReport {
  node: string;
  label: string;
  conforms: boolean;
  violations: Violation[];
}

export interface ValidationPayload {
  conforms: boolean;
  reports: NodeReport[];
}

export interface EditOpJson {
  kind: string;
  label: string;
  steps: [string, number][];
  [extra: string]: unknown;
}

export interface EditResponse {
  schema: string;
  result: {
    op: EditOpJson;
    triggered: Record<string, string[]>;
    created_labels: string[];
  };
}

export interface InferResponse {
  schema: string;
  created: string[];
  report: {
    sample_sizes: Record<string, number>;
    warnings: { kind: string; label: string; predicate: string | null; detail: string }[];
  } | null;
}

export interface ErrorEnvelope {
  code: string;
  message: string;
  location?: string;
}
