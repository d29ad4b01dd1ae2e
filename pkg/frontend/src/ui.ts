// The whole console: login/register screen plus the five staff tabs.
// Rendering is one-way: every screen is rebuilt from ViewState, and every
// label in the DOM is a string that arrived in an API response.

import { ApiClient, ApiError } from "./api.js";
import type { HistoryEntry } from "./api.js";
import { initialState, TABS, ViewState } from "./state.js";
import type { TabName } from "./state.js";
import { isValid, validateSingular } from "./validate.js";
import type { SingularDraft } from "./validate.js";

const ALGORITHM_OPTIONS = ["ID3", "C4.5"];

type Attrs = Record<string, string>;
type Child = Node | string;

function el(tag: string, attrs: Attrs = {}, ...children: Child[]): HTMLElement {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

function option(value: string, label?: string): HTMLElement {
  return el("option", { value }, label ?? value);
}

function labelled(text: string, field: HTMLElement): HTMLElement {
  return el("label", { class: "field" }, el("span", {}, text), field);
}

function readFileText(file: File): Promise<string> {
  if (typeof file.text === "function") {
    return file.text();
  }
  return new Promise((resolve, reject) => {
    const reader = new FileReader();
    reader.onload = () => resolve(String(reader.result ?? ""));
    reader.onerror = () => reject(reader.error);
    reader.readAsText(file);
  });
}

export class Console {
  readonly state: ViewState = initialState();
  private banner = "";
  private notice = "";
  private pending: Promise<void> = Promise.resolve();

  constructor(private readonly root: HTMLElement,
              private readonly api: ApiClient) {}

  mount(): void {
    this.render();
  }

  // Tests (and callers) can await the latest chain of event handlers.
  whenIdle(): Promise<void> {
    return this.pending;
  }

  private track(work: () => Promise<void>): void {
    this.pending = this.pending.then(work).catch((err) => {
      this.banner = err instanceof ApiError
        ? `${err.error}: ${err.detail}`
        : String(err);
      this.render();
    });
  }

  private fail(err: unknown): void {
    this.banner = err instanceof ApiError
      ? `${err.error}: ${err.detail}`
      : String(err);
  }

  // ---------------------------------------------------------- rendering

  render(): void {
    this.root.replaceChildren();
    this.root.append(el("h1", {}, "GradeGauge Console"));
    if (this.banner) {
      this.root.append(el("div", { class: "error-banner", role: "alert" },
        this.banner));
    }
    if (this.notice) {
      this.root.append(el("div", { class: "notice" }, this.notice));
    }
    if (!this.api.hasToken()) {
      this.root.append(this.loginScreen());
      return;
    }
    this.root.append(this.tabBar(), this.activePanel());
  }

  private tabBar(): HTMLElement {
    const bar = el("nav", { class: "tabs" });
    for (const tab of TABS) {
      const button = el("button", {
        "data-tab": tab,
        class: tab === this.state.activeTab ? "tab active" : "tab",
      }, tab);
      button.addEventListener("click", () => this.switchTab(tab));
      bar.append(button);
    }
    return bar;
  }

  switchTab(tab: TabName): void {
    this.state.activeTab = tab;
    this.banner = "";
    this.notice = "";
    if (tab === "History") {
      this.track(async () => {
        this.state.history = await this.api.history();
        this.render();
      });
    }
    this.render();
  }

  private activePanel(): HTMLElement {
    switch (this.state.activeTab) {
      case "Singular": return this.singularPanel();
      case "Upload": return this.uploadPanel();
      case "Bulk": return this.bulkPanel();
      case "Verify": return this.verifyPanel();
      case "History": return this.historyPanel();
    }
  }

  // ------------------------------------------------------ login screen

  private loginScreen(): HTMLElement {
    const screen = el("div", { class: "login-screen" });

    const registerForm = el("form", { class: "register-form" },
      el("h2", {}, "Register"),
      labelled("Name", el("input", { name: "name" })),
      labelled("Gender", el("select", { name: "gender" },
        option("Female"), option("Male"))),
      labelled("Branch", el("input", { name: "branch" })),
      labelled("Email", el("input", { name: "email", type: "email" })),
      labelled("Password",
        el("input", { name: "password", type: "password" })),
      el("button", { type: "submit" }, "Register"));
    registerForm.addEventListener("submit", (event) => {
      event.preventDefault();
      const fields = this.formValues(registerForm,
        ["name", "gender", "branch", "email", "password"]);
      this.track(async () => {
        await this.api.register({
          name: fields.name ?? "", gender: fields.gender ?? "",
          branch: fields.branch ?? "", email: fields.email ?? "",
          password: fields.password ?? "",
        });
        this.banner = "";
        this.notice = "Registered. Log in with your new credentials.";
        this.render();
      });
    });

    const loginForm = el("form", { class: "login-form" },
      el("h2", {}, "Log in"),
      labelled("Email", el("input", { name: "email", type: "email" })),
      labelled("Password",
        el("input", { name: "password", type: "password" })),
      el("button", { type: "submit" }, "Log in"));
    loginForm.addEventListener("submit", (event) => {
      event.preventDefault();
      const fields = this.formValues(loginForm, ["email", "password"]);
      this.track(async () => {
        const token = await this.api.login(fields.email ?? "",
          fields.password ?? "");
        sessionStorage.setItem("gradegauge-token", token);
        this.banner = "";
        this.notice = "";
        this.state.activeTab = "Singular";
        this.render();
      });
    });

    screen.append(registerForm, loginForm);
    return screen;
  }

  private formValues(form: HTMLElement,
                     names: string[]): Record<string, string> {
    const values: Record<string, string> = {};
    for (const name of names) {
      const input = form.querySelector<HTMLInputElement>(`[name="${name}"]`);
      values[name] = input?.value ?? "";
    }
    return values;
  }

  // ------------------------------------------------------- singular tab

  private singularPanel(): HTMLElement {
    const form = el("form", { class: "singular-form" },
      el("h2", {}, "Enter Student Information"),
      labelled("Name", el("input", { name: "name" })),
      labelled("Application id", el("input", { name: "app_id" })),
      labelled("Gender", el("select", { name: "gender" },
        option("Male"), option("Female"))),
      labelled("PCM percent", el("input", { name: "percent" })),
      labelled("Merit marks (of 200)", el("input", { name: "merit" })),
      labelled("Admission type",
        el("input", { name: "type", placeholder: "AI or other seat code" })),
      labelled("Algorithm", el("select", { name: "algorithm" },
        ...ALGORITHM_OPTIONS.map((a) => option(a)))),
      el("button", { type: "submit" }, "Predict"));
    const result = el("div", { class: "predict-result" });
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      this.submitSingular(form, result);
    });
    return el("section", { class: "panel singular" }, form, result);
  }

  private submitSingular(form: HTMLElement, result: HTMLElement): void {
    for (const stale of form.querySelectorAll(".field-error")) {
      stale.remove();
    }
    const draft = this.formValues(form,
      ["name", "app_id", "gender", "percent", "merit", "type",
        "algorithm"]) as unknown as SingularDraft;
    const errors = validateSingular(draft);
    if (!isValid(errors)) {
      for (const [field, message] of Object.entries(errors)) {
        const input = form.querySelector(`[name="${field}"]`);
        input?.parentElement?.append(
          el("span", { class: "field-error", "data-field": field }, message));
      }
      return;
    }
    this.track(async () => {
      const outcome = await this.api.predict({
        name: draft.name, app_id: draft.app_id, gender: draft.gender,
        percent: Number(draft.percent), merit: Number(draft.merit),
        type: draft.type, algorithm: draft.algorithm,
      });
      this.banner = "";
      result.replaceChildren(
        el("span", {}, "Predicted result: "),
        el("strong", { class: "predicted-label" }, outcome.predicted));
    });
  }

  // --------------------------------------------------------- upload tab

  private uploadPanel(): HTMLElement {
    const fileInput = el("input",
      { type: "file", accept: ".csv", name: "dataset" }) as HTMLInputElement;
    const uploadButton = el("button", { class: "upload-button" }, "Upload");
    uploadButton.addEventListener("click", () => {
      const file = fileInput.files?.[0];
      if (!file) {
        this.banner = "Choose a CSV file first.";
        this.render();
        return;
      }
      this.track(async () => {
        const text = await readFileText(file);
        const uploaded = await this.api.uploadDataset(file.name, text);
        this.state.datasets.push({
          dataset_id: uploaded.dataset_id,
          filename: file.name,
          rows: uploaded.rows,
        });
        this.banner = "";
        this.render();
      });
    });

    const trainSelect = this.datasetSelect("train-dataset");
    const algoSelect = el("select", { name: "train-algorithm" },
      ...ALGORITHM_OPTIONS.map((a) => option(a)));
    const trainButton = el("button", { class: "train-button" }, "Train");
    trainButton.addEventListener("click", () => {
      const datasetId = (trainSelect as HTMLSelectElement).value;
      const algorithm = (algoSelect as HTMLSelectElement).value;
      if (!datasetId) {
        this.banner = "Upload a dataset first.";
        this.render();
        return;
      }
      this.track(async () => {
        const trained = await this.api.train(datasetId, algorithm);
        this.state.models.push({
          model_id: trained.model_id,
          algorithm: trained.algorithm,
          leaf_count: trained.stats.leaf_count,
        });
        this.banner = "";
        this.render();
      });
    });

    const datasetTable = this.state.datasets.length === 0
      ? el("p", { class: "empty-state" }, "No datasets uploaded yet.")
      : this.table(["Dataset id", "File", "Rows"], this.state.datasets.map(
        (d) => [d.dataset_id, d.filename, String(d.rows)]), "dataset-table");
    const modelTable = this.state.models.length === 0
      ? el("p", { class: "empty-state" }, "No models trained yet.")
      : this.table(["Model id", "Algorithm", "Leaves"], this.state.models.map(
        (m) => [m.model_id, m.algorithm, String(m.leaf_count)]),
        "model-table");

    return el("section", { class: "panel upload" },
      el("h2", {}, "Upload spreadsheet"),
      el("div", { class: "upload-controls" }, fileInput, uploadButton),
      datasetTable,
      el("h2", {}, "Train model"),
      el("div", { class: "train-controls" },
        trainSelect, algoSelect, trainButton),
      modelTable);
  }

  private datasetSelect(name: string): HTMLElement {
    return el("select", { name },
      ...this.state.datasets.map(
        (d) => option(d.dataset_id, `${d.filename} (${d.rows} rows)`)));
  }

  private modelSelect(name: string): HTMLElement {
    return el("select", { name },
      ...this.state.models.map(
        (m) => option(m.model_id, `${m.algorithm} ${m.model_id}`)));
  }

  // ----------------------------------------------------------- bulk tab

  private bulkPanel(): HTMLElement {
    const panel = el("section", { class: "panel bulk" },
      el("h2", {}, "Bulk Evaluation"));
    if (this.state.datasets.length === 0 || this.state.models.length === 0) {
      panel.append(el("p", { class: "empty-state" },
        "Upload a dataset and train a model first."));
      return panel;
    }
    const datasetPick = this.datasetSelect("bulk-dataset");
    const modelPick = this.modelSelect("bulk-model");
    const runButton = el("button", { class: "evaluate-button" }, "Evaluate");
    runButton.addEventListener("click", () => {
      this.track(async () => {
        this.state.bulk = await this.api.evaluate(
          (datasetPick as HTMLSelectElement).value,
          (modelPick as HTMLSelectElement).value);
        this.banner = "";
        this.render();
      });
    });
    panel.append(el("div", { class: "bulk-controls" },
      datasetPick, modelPick, runButton));

    const bulk = this.state.bulk;
    if (bulk === null) {
      return panel;
    }
    if (bulk.predictions.length === 0) {
      panel.append(el("p", { class: "empty-state" }, "No rows."));
      return panel;
    }
    const columns = Object.keys(bulk.predictions[0]!.inputs);
    const rows = bulk.predictions.map((p) => [
      String(p.ref),
      ...columns.map((c) => this.cellText(p.inputs[c] ?? null)),
      p.predicted.toUpperCase(),
    ]);
    panel.append(this.table(["Ref", ...columns, "Predicted"], rows,
      "bulk-table", (cell, column) => {
        if (column === columns.length + 1) cell.classList.add("label-cell");
      }));
    return panel;
  }

  private cellText(value: string | number | null): string {
    return value === null ? "" : String(value);
  }

  // --------------------------------------------------------- verify tab

  private verifyPanel(): HTMLElement {
    const panel = el("section", { class: "panel verify" },
      el("h2", {}, "Verify accuracy"));
    if (this.state.datasets.length === 0 || this.state.models.length === 0) {
      panel.append(el("p", { class: "empty-state" },
        "Upload a labeled dataset and train a model first."));
      return panel;
    }
    const datasetPick = this.datasetSelect("verify-dataset");
    const modelPick = this.modelSelect("verify-model");
    const runButton = el("button", { class: "verify-button" }, "Verify");
    runButton.addEventListener("click", () => {
      this.track(async () => {
        this.state.report = await this.api.verify(
          (datasetPick as HTMLSelectElement).value,
          (modelPick as HTMLSelectElement).value);
        this.banner = "";
        this.render();
      });
    });
    panel.append(el("div", { class: "verify-controls" },
      datasetPick, modelPick, runButton));

    const report = this.state.report;
    if (report === null) {
      return panel;
    }
    panel.append(
      el("div", { class: "accuracy-banner" },
        `Accuracy achieved: ${report.accuracy.toFixed(3)}%`),
      el("p", { class: "verify-counts" },
        `${report.correct} of ${report.total} records matched ` +
        `(${report.algorithm}, ${report.wall_time_ms.toFixed(3)} ms).`));
    if (report.mismatches.length === 0) {
      panel.append(el("p", { class: "empty-state" }, "No mismatches."));
      return panel;
    }
    const columns = Object.keys(report.mismatches[0]!.inputs);
    const rows = report.mismatches.map((m) => [
      String(m.ref),
      ...columns.map((c) => this.cellText(m.inputs[c] ?? null)),
      m.actual,
      m.predicted.toUpperCase(),
    ]);
    panel.append(this.table(
      ["Ref", ...columns, "Actual", "Predicted"], rows, "mismatch-table",
      (cell, column) => {
        if (column === columns.length + 2) {
          cell.classList.add("mismatch-pred");
        }
      }));
    return panel;
  }

  // -------------------------------------------------------- history tab

  private historyPanel(): HTMLElement {
    const panel = el("section", { class: "panel history" },
      el("h2", {}, "Prediction history"));
    const entries = this.state.history;
    if (entries === null) {
      panel.append(el("p", { class: "loading" }, "Loading..."));
      return panel;
    }
    if (entries.length === 0) {
      panel.append(el("p", { class: "empty-state" },
        "No prediction history."));
      return panel;
    }
    const table = this.table(
      ["App id", "Name", "Gender", "Percent", "Merit", "Type", "Algorithm",
        "Predicted", ""],
      entries.map((e) => [
        e.app_id, e.name, e.gender, String(e.percent), String(e.merit),
        e.type, e.algorithm, e.predicted, "",
      ]), "history-table",
      (cell, column, row) => {
        if (column === 7) cell.classList.add("history-label");
        if (column === 8) {
          const button = el("button", { class: "delete-button" }, "Delete");
          button.addEventListener("click",
            () => this.deleteEntry(entries[row]!));
          cell.replaceChildren(button);
        }
      });
    panel.append(table);
    return panel;
  }

  // Row disappears immediately; a failed DELETE puts it back.
  private deleteEntry(entry: HistoryEntry): void {
    const entries = this.state.history ?? [];
    const index = entries.indexOf(entry);
    this.state.history = entries.filter((e) => e !== entry);
    this.render();
    this.track(async () => {
      try {
        await this.api.deleteHistory(entry.entry_id);
      } catch (err) {
        const restored = [...(this.state.history ?? [])];
        restored.splice(Math.min(index, restored.length), 0, entry);
        this.state.history = restored;
        this.fail(err);
      }
      this.render();
    });
  }

  // ------------------------------------------------------------ helpers

  private table(headers: string[], rows: string[][], cssClass: string,
                decorate?: (cell: HTMLElement, column: number,
                            row: number) => void): HTMLElement {
    const head = el("tr", {},
      ...headers.map((h) => el("th", {}, h)));
    const body = rows.map((cells, rowIndex) => {
      const tr = el("tr", {});
      cells.forEach((text, columnIndex) => {
        const td = el("td", {}, text);
        decorate?.(td, columnIndex, rowIndex);
        tr.append(td);
      });
      return tr;
    });
    return el("table", { class: cssClass },
      el("thead", {}, head), el("tbody", {}, ...body));
  }
}
