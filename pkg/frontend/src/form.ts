/** Configuration form model: three tabs of typed fields that serialize back
 * to the flat key/value mapping the server validates. Pure data + functions;
 * the DOM layer renders whatever this produces. */

import type { ConfigValues, KeyedError, ModelInfo } from "./types.js";

export type TabId = "basic" | "bounds" | "invariants";

export interface FormField {
  key: string;            // server-side config key, e.g. "Customer_min"
  label: string;
  kind: "text" | "flag";  // flag = tri-state invariant selector
  value: string;
  editable: boolean;      // false for abstract-class placeholders
  expert: boolean;        // hidden until the expert checkbox is set
  error: string | null;   // server message when highlighted red
}

export interface FormRow {
  label: string;
  note?: string;          // e.g. "abstract" or an invariant's expression
  fields: FormField[];
}

export interface FormTab {
  id: TabId;
  title: string;
  rows: FormRow[];
}

export interface ConfigForm {
  name: string;
  tabs: FormTab[];
}

export const FLAG_OPTIONS = ["active", "inactive", "negated"] as const;

function field(key: string, label: string, values: ConfigValues,
               opts?: Partial<FormField>): FormField {
  return {
    key,
    label,
    kind: "text",
    value: values[key] ?? "",
    editable: true,
    expert: false,
    error: null,
    ...opts,
  };
}

export function buildForm(model: ModelInfo, name: string, values: ConfigValues): ConfigForm {
  const basic: FormRow[] = [
    { label: "Integer", fields: [
      field("Integer_min", "min", values),
      field("Integer_max", "max", values),
    ]},
    { label: "String", fields: [
      field("String_count", "count", values),
      field("String_values", "values", values, { expert: true }),
    ]},
    { label: "Real", fields: [
      field("Real_values", "values", values, { expert: true }),
    ]},
    { label: "Search", fields: [
      field("default_upper", "default upper", values),
      field("bitwidth", "bitwidth", values, { expert: true }),
    ]},
  ];

  const bounds: FormRow[] = [];
  for (const cls of model.classes) {
    if (cls.abstract) {
      bounds.push({
        label: cls.name,
        note: "abstract",
        fields: [
          field(`${cls.name}_min`, "min", values, { editable: false, value: "" }),
          field(`${cls.name}_max`, "max", values, { editable: false, value: "" }),
        ],
      });
    } else {
      bounds.push({
        label: cls.name,
        fields: [
          field(`${cls.name}_min`, "min", values),
          field(`${cls.name}_max`, "max", values),
        ],
      });
    }
    for (const attr of cls.attributes) {
      const key = `${cls.name}_${attr.name}`;
      const fields = [field(key, "domain", values)];
      if (attr.type === "Integer" || attr.type === "Real") {
        fields.push(field(`${key}_min`, "min", values));
        fields.push(field(`${key}_max`, "max", values));
      }
      bounds.push({ label: `${cls.name}.${attr.name} : ${attr.type}`, fields });
    }
  }
  for (const assoc of model.associations) {
    bounds.push({
      label: assoc.name,
      note: assoc.ends.map((e) => `${e.class}[${e.multiplicity}]`).join(" - "),
      fields: [
        field(`${assoc.name}_min`, "min", values),
        field(`${assoc.name}_max`, "max", values),
        field(`link::${assoc.name}`, "required link", values, { expert: true }),
      ],
    });
  }

  const invariants: FormRow[] = model.invariants.map((inv) => ({
    label: inv.name,
    note: inv.expression,
    fields: [field(`inv::${inv.name}`, "flag", values, {
      kind: "flag",
      value: values[`inv::${inv.name}`] ?? "active",
    })],
  }));

  return {
    name,
    tabs: [
      { id: "basic", title: "Basic types", rows: basic },
      { id: "bounds", title: "Classes and associations", rows: bounds },
      { id: "invariants", title: "Invariants", rows: invariants },
    ],
  };
}

export function allFields(form: ConfigForm): FormField[] {
  return form.tabs.flatMap((t) => t.rows.flatMap((r) => r.fields));
}

export function findField(form: ConfigForm, key: string): FormField | undefined {
  return allFields(form).find((f) => f.key === key);
}

export function setValue(form: ConfigForm, key: string, value: string): void {
  const f = findField(form, key);
  if (!f) throw new Error(`no field for key '${key}'`);
  if (!f.editable) throw new Error(`field '${key}' is read-only`);
  f.value = value;
  f.error = null;
}

/** Editable, non-empty fields as the key/value mapping the server expects. */
export function serializeForm(form: ConfigForm): ConfigValues {
  const values: ConfigValues = {};
  for (const f of allFields(form)) {
    if (f.editable && f.value !== "") values[f.key] = f.value;
  }
  return values;
}

export function clearErrors(form: ConfigForm): void {
  for (const f of allFields(form)) f.error = null;
}

/** Attach server-side 422 messages to their fields; unmatched keys are
 * returned so the caller can show them globally. */
export function applyErrors(form: ConfigForm, errors: KeyedError[]): KeyedError[] {
  clearErrors(form);
  const orphans: KeyedError[] = [];
  for (const e of errors) {
    const f = findField(form, e.key);
    if (f) f.error = e.message;
    else orphans.push(e);
  }
  return orphans;
}

/** Fields currently shown given the expert checkbox state. */
export function visibleFields(form: ConfigForm, expert: boolean): FormField[] {
  return allFields(form).filter((f) => expert || !f.expert);
}
