/** Payload shapes of the validation server's REST API. */

export interface ModelClass {
  name: string;
  abstract: boolean;
  parents: string[];
  attributes: { name: string; type: string }[];
}

export interface ModelAssociation {
  name: string;
  ends: { class: string; role: string; multiplicity: string }[];
}

export interface ModelInvariant {
  name: string; // qualified, Class::inv
  expression: string;
}

export interface ModelInfo {
  name: string;
  classes: ModelClass[];
  associations: ModelAssociation[];
  invariants: ModelInvariant[];
}

export interface LoadModelResponse {
  model: ModelInfo;
  configs: string[];
  sidecar: string | null;
  warnings: string[];
}

export type ConfigValues = Record<string, string>;

export interface KeyedError {
  key: string;
  message: string;
  location: { file: string; line: number; column: number } | null;
}

export interface StateExport {
  objects: { name: string; class: string; attrs: Record<string, unknown> }[];
  links: { assoc: string; ends: [string, string] }[];
}

export type JobKind = "validate" | "consistency" | "independence";
export type JobState = "queued" | "running" | "done" | "cancelled";

export interface JobStatus {
  id: string;
  kind: JobKind;
  state: JobState;
  result: {
    verdict?: string;
    state?: StateExport;
    outcome?: string;
    details?: string;
    witness?: StateExport;
    message?: string;
  } | null;
}

export interface WarningInfo {
  kind: string;
  message: string;
  location: { file: string; line: number; column: number } | null;
  expression: string;
}
