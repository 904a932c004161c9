/** Browser entry point: wires the REST client, the configuration form and
 * the diagram renderer onto the static page in index.html. */

import { ApiError, Client, ValidationFailure } from "./api.js";
import { layout, toSvg } from "./diagram.js";
import {
  ConfigForm, FLAG_OPTIONS, applyErrors, buildForm, serializeForm, setValue,
} from "./form.js";
import type { JobStatus, ModelInfo, StateExport } from "./types.js";

interface AppState {
  session: string | null;
  model: ModelInfo | null;
  configs: string[];
  current: string | null;
  form: ConfigForm | null;
  expert: boolean;
  job: string | null;
}

const state: AppState = {
  session: null,
  model: null,
  configs: [],
  current: null,
  form: null,
  expert: false,
  job: null,
};

const client = new Client("");

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function flash(message: string, isError = false): void {
  const bar = el<HTMLDivElement>("status");
  bar.textContent = message;
  bar.classList.toggle("error", isError);
}

// -- model loading ---------------------------------------------------------

async function loadModel(): Promise<void> {
  const text = el<HTMLTextAreaElement>("model-text").value;
  if (!text.trim()) {
    flash("paste a model first", true);
    return;
  }
  try {
    if (!state.session) state.session = await client.createSession();
    const res = await client.loadModel(state.session, text);
    state.model = res.model;
    state.configs = res.configs;
    state.current = res.configs[0] ?? null;
    flash(res.sidecar
      ? `loaded '${res.model.name}' with configurations from ${res.sidecar}`
      : `loaded '${res.model.name}'`);
    renderModelSummary(res.warnings);
    await refreshConfigList();
    await openConfig();
  } catch (e) {
    if (e instanceof ValidationFailure) {
      flash(e.errors.map((err) => {
        const where = err.location ? ` (line ${err.location.line})` : "";
        return `${err.message}${where}`;
      }).join("; "), true);
    } else {
      flash(String(e), true);
    }
  }
}

function renderModelSummary(warnings: string[]): void {
  const m = state.model;
  if (!m) return;
  el<HTMLDivElement>("model-summary").textContent =
    `${m.name}: ${m.classes.length} classes, ${m.associations.length} associations, ` +
    `${m.invariants.length} invariants` +
    (warnings.length ? `; ${warnings.length} warning(s)` : "");
  const invSelect = el<HTMLSelectElement>("run-invariant");
  invSelect.innerHTML = "";
  for (const inv of m.invariants) {
    const opt = document.createElement("option");
    opt.value = inv.name;
    opt.textContent = inv.name;
    invSelect.appendChild(opt);
  }
  el<HTMLElement>("workbench").hidden = false;
}

// -- configuration manager -------------------------------------------------

async function refreshConfigList(): Promise<void> {
  if (!state.session) return;
  state.configs = await client.listConfigs(state.session);
  if (state.current && !state.configs.includes(state.current)) {
    state.current = state.configs[0] ?? null;
  }
  const select = el<HTMLSelectElement>("config-select");
  select.innerHTML = "";
  for (const name of state.configs) {
    const opt = document.createElement("option");
    opt.value = name;
    opt.textContent = name;
    opt.selected = name === state.current;
    select.appendChild(opt);
  }
}

async function openConfig(): Promise<void> {
  if (!state.session || !state.model || !state.current) return;
  const values = await client.readConfig(state.session, state.current);
  state.form = buildForm(state.model, state.current, values);
  renderForm();
  await refreshWarnings();
}

async function saveConfig(): Promise<void> {
  if (!state.session || !state.form || !state.current) return;
  try {
    await client.writeConfig(state.session, state.current, serializeForm(state.form));
    applyErrors(state.form, []);
    renderForm();
    flash(`saved configuration '${state.current}'`);
    await refreshWarnings();
  } catch (e) {
    if (e instanceof ValidationFailure && state.form) {
      const orphans = applyErrors(state.form, e.errors);
      renderForm();
      flash(orphans.length
        ? orphans.map((o) => o.message).join("; ")
        : "configuration has errors; fix the highlighted fields", true);
    } else {
      flash(String(e), true);
    }
  }
}

async function cloneCurrent(): Promise<void> {
  if (!state.session || !state.current) return;
  const configs = await client.cloneConfig(state.session, state.current);
  state.current = configs[configs.length - 1];
  await refreshConfigList();
  await openConfig();
}

async function renameCurrent(): Promise<void> {
  if (!state.session || !state.current) return;
  const name = window.prompt("new name", state.current);
  if (!name || name === state.current) return;
  try {
    await client.renameConfig(state.session, state.current, name);
    state.current = name;
    await refreshConfigList();
    await openConfig();
  } catch (e) {
    flash(String(e), true);
  }
}

async function deleteCurrent(): Promise<void> {
  if (!state.session || !state.current) return;
  try {
    await client.deleteConfig(state.session, state.current);
    state.current = null;
    await refreshConfigList();
    await openConfig();
  } catch (e) {
    flash(String(e), true);
  }
}

// -- form rendering --------------------------------------------------------

function renderForm(): void {
  const host = el<HTMLDivElement>("config-form");
  host.innerHTML = "";
  const form = state.form;
  if (!form) return;
  for (const tab of form.tabs) {
    const section = document.createElement("section");
    section.className = "tab";
    const h = document.createElement("h3");
    h.textContent = tab.title;
    section.appendChild(h);
    const table = document.createElement("table");
    for (const row of tab.rows) {
      const visible = row.fields.filter((f) => state.expert || !f.expert);
      if (!visible.length) continue;
      const tr = document.createElement("tr");
      const th = document.createElement("th");
      th.textContent = row.label;
      if (row.note) {
        const note = document.createElement("small");
        note.textContent = row.note;
        th.appendChild(note);
      }
      tr.appendChild(th);
      const td = document.createElement("td");
      for (const f of visible) {
        const wrap = document.createElement("label");
        wrap.className = "field" + (f.error ? " invalid" : "");
        const caption = document.createElement("span");
        caption.textContent = f.label;
        wrap.appendChild(caption);
        if (f.kind === "flag") {
          const sel = document.createElement("select");
          sel.dataset.key = f.key;
          for (const opt of FLAG_OPTIONS) {
            const o = document.createElement("option");
            o.value = opt;
            o.textContent = opt;
            o.selected = opt === f.value;
            sel.appendChild(o);
          }
          sel.addEventListener("change", () => setValue(form, f.key, sel.value));
          wrap.appendChild(sel);
        } else {
          const input = document.createElement("input");
          input.type = "text";
          input.value = f.value;
          input.disabled = !f.editable;
          input.dataset.key = f.key;
          input.addEventListener("input", () => setValue(form, f.key, input.value));
          wrap.appendChild(input);
        }
        if (f.error) {
          const msg = document.createElement("em");
          msg.className = "field-error";
          msg.textContent = f.error;
          wrap.appendChild(msg);
        }
        td.appendChild(wrap);
      }
      tr.appendChild(td);
      table.appendChild(tr);
    }
    section.appendChild(table);
    host.appendChild(section);
  }
}

async function refreshWarnings(): Promise<void> {
  if (!state.session || !state.current) return;
  const warnings = await client.warnings(state.session, state.current);
  const host = el<HTMLUListElement>("warnings");
  host.innerHTML = "";
  for (const w of warnings) {
    const li = document.createElement("li");
    const where = w.location ? ` [line ${w.location.line}]` : "";
    li.textContent = `${w.message}${where}`;
    host.appendChild(li);
  }
  el<HTMLElement>("warnings-panel").hidden = warnings.length === 0;
}

// -- jobs and results ------------------------------------------------------

function showResult(status: JobStatus): void {
  const panel = el<HTMLDivElement>("result-panel");
  panel.hidden = false;
  const verdictBox = el<HTMLDivElement>("result-verdict");
  const r = status.result ?? {};
  if (status.state === "cancelled") {
    verdictBox.textContent = "cancelled";
  } else if (r.verdict) {
    verdictBox.textContent = r.verdict;
  } else if (r.outcome) {
    verdictBox.textContent = `${r.outcome}: ${r.details ?? ""}`;
  } else {
    verdictBox.textContent = r.message ?? "done";
  }
  const witness = (r.state ?? r.witness) as StateExport | undefined;
  const host = el<HTMLDivElement>("result-diagram");
  if (witness) {
    host.innerHTML = toSvg(layout(witness));
  } else {
    host.innerHTML = "";
  }
}

async function runJob(): Promise<void> {
  if (!state.session || !state.current || !state.form) return;
  await saveConfig();
  const kind = el<HTMLSelectElement>("run-kind").value as
    "validate" | "consistency" | "independence";
  const extra = kind === "independence"
    ? { invariant: el<HTMLSelectElement>("run-invariant").value }
    : undefined;
  try {
    state.job = await client.submitJob(state.session, kind, state.current, extra);
    el<HTMLButtonElement>("run-cancel").disabled = false;
    flash(`running ${kind}...`);
    const status = await client.awaitJob(state.job, (s) => {
      flash(`job ${s.id}: ${s.state}`);
    });
    showResult(status);
    flash(`job ${status.id} ${status.state}`);
  } catch (e) {
    flash(e instanceof ApiError ? e.message : String(e), true);
  } finally {
    el<HTMLButtonElement>("run-cancel").disabled = true;
    state.job = null;
  }
}

async function cancelJob(): Promise<void> {
  if (state.job) await client.cancelJob(state.job);
}

// -- wiring ----------------------------------------------------------------

export function init(): void {
  el<HTMLButtonElement>("model-load").addEventListener("click", () => void loadModel());
  el<HTMLSelectElement>("config-select").addEventListener("change", (ev) => {
    state.current = (ev.target as HTMLSelectElement).value;
    void openConfig();
  });
  el<HTMLButtonElement>("config-save").addEventListener("click", () => void saveConfig());
  el<HTMLButtonElement>("config-clone").addEventListener("click", () => void cloneCurrent());
  el<HTMLButtonElement>("config-rename").addEventListener("click", () => void renameCurrent());
  el<HTMLButtonElement>("config-delete").addEventListener("click", () => void deleteCurrent());
  el<HTMLInputElement>("expert-mode").addEventListener("change", (ev) => {
    state.expert = (ev.target as HTMLInputElement).checked;
    renderForm();
  });
  el<HTMLButtonElement>("run-start").addEventListener("click", () => void runJob());
  el<HTMLButtonElement>("run-cancel").addEventListener("click", () => void cancelJob());
  el<HTMLSelectElement>("run-kind").addEventListener("change", (ev) => {
    const kind = (ev.target as HTMLSelectElement).value;
    el<HTMLElement>("run-invariant-row").hidden = kind !== "independence";
  });
}

if (typeof document !== "undefined" && document.getElementById("model-load")) {
  init();
}
