// @vitest-environment jsdom
import { beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import type { HistoryEntry, VerifyResult } from "../src/api.js";
import { Console } from "../src/ui.js";

function mounted(withToken = true) {
  document.body.innerHTML = '<div id="app"></div>';
  sessionStorage.clear();
  const api = new ApiClient("http://svc",
    async () => new Response("{}", { status: 200 }));
  if (withToken) api.setToken("tok");
  const root = document.getElementById("app")!;
  const ui = new Console(root, api);
  ui.mount();
  return { ui, api, root };
}

function setInput(scope: HTMLElement, name: string, value: string) {
  const field = scope.querySelector<HTMLInputElement>(`[name="${name}"]`);
  if (!field) throw new Error(`no field ${name}`);
  field.value = value;
}

function fillSingular(root: HTMLElement,
                      overrides: Record<string, string> = {}) {
  const values: Record<string, string> = {
    name: "Row One", app_id: "EN555", gender: "Male",
    percent: "89.17", merit: "157", type: "OTHER", ...overrides,
  };
  for (const [name, value] of Object.entries(values)) {
    setInput(root, name, value);
  }
}

function submit(form: HTMLElement) {
  form.dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
}

const ENTRY: HistoryEntry = {
  entry_id: "e1", app_id: "EN555", name: "Row One", gender: "Male",
  percent: 89.17, merit: 157, type: "OTHER", algorithm: "C45",
  predicted: "pass", created_at: "2026-01-05T10:00:00+00:00",
};

describe("login screen", () => {
  it("renders register and login forms when there is no token", () => {
    const { root } = mounted(false);
    expect(root.querySelector(".register-form")).not.toBeNull();
    expect(root.querySelector(".login-form")).not.toBeNull();
    expect(root.querySelector(".tabs")).toBeNull();
  });

  it("logs in, stores the token, and shows the tabs", async () => {
    const { ui, api, root } = mounted(false);
    vi.spyOn(api, "login").mockImplementation(async () => {
      api.setToken("fresh");
      return "fresh";
    });
    const form = root.querySelector(".login-form") as HTMLElement;
    setInput(form, "email", "a@b.edu");
    setInput(form, "password", "long-enough-pw");
    submit(form);
    await ui.whenIdle();
    expect(sessionStorage.getItem("gradegauge-token")).toBe("fresh");
    const tabs = [...root.querySelectorAll(".tab")].map((t) => t.textContent);
    expect(tabs).toEqual(["Singular", "Upload", "Bulk", "Verify", "History"]);
  });

  it("surfaces register errors verbatim", async () => {
    const { ui, api, root } = mounted(false);
    vi.spyOn(api, "register").mockRejectedValue(
      new ApiError(409, "DuplicateEmail", "already registered: a@b.edu"));
    const form = root.querySelector(".register-form") as HTMLElement;
    submit(form);
    await ui.whenIdle();
    expect(root.querySelector(".error-banner")?.textContent)
      .toBe("DuplicateEmail: already registered: a@b.edu");
  });
});

describe("cold load", () => {
  it("renders every tab from a bare token", async () => {
    const { ui, api, root } = mounted();
    vi.spyOn(api, "history").mockResolvedValue([]);
    for (const tab of ["Singular", "Upload", "Bulk", "Verify", "History"]) {
      const button = [...root.querySelectorAll(".tab")]
        .find((b) => b.textContent === tab) as HTMLElement;
      button.click();
      await ui.whenIdle();
      expect(root.querySelector(".panel"), tab).not.toBeNull();
      expect(root.querySelector(".error-banner"), tab).toBeNull();
    }
  });
});

describe("singular evaluation", () => {
  it("shows an inline range error for percent 123 and calls nothing", () => {
    const { api, root } = mounted();
    const predict = vi.spyOn(api, "predict");
    fillSingular(root, { percent: "123" });
    submit(root.querySelector(".singular-form") as HTMLElement);
    const inline = root.querySelector('.field-error[data-field="percent"]');
    expect(inline?.textContent).toBe("PCM percent must be between 0 and 100");
    expect(predict).not.toHaveBeenCalled();
  });

  it("shows a required error for missing merit marks and calls nothing", () => {
    const { api, root } = mounted();
    const predict = vi.spyOn(api, "predict");
    fillSingular(root, { merit: "" });
    submit(root.querySelector(".singular-form") as HTMLElement);
    expect(root.querySelector('.field-error[data-field="merit"]')
      ?.textContent).toBe("required");
    expect(predict).not.toHaveBeenCalled();
  });

  it("renders the label returned by the service", async () => {
    const { ui, api, root } = mounted();
    const predict = vi.spyOn(api, "predict").mockResolvedValue({
      predicted: "pass", algorithm: "C45", model_id: "m1", entry_id: "e1",
    });
    fillSingular(root);
    submit(root.querySelector(".singular-form") as HTMLElement);
    await ui.whenIdle();
    expect(root.querySelector(".predicted-label")?.textContent).toBe("pass");
    expect(predict).toHaveBeenCalledWith({
      name: "Row One", app_id: "EN555", gender: "Male",
      percent: 89.17, merit: 157, type: "OTHER", algorithm: "ID3",
    });
  });

  it("clears stale field errors on resubmit", () => {
    const { root } = mounted();
    fillSingular(root, { percent: "123" });
    const form = root.querySelector(".singular-form") as HTMLElement;
    submit(form);
    expect(root.querySelectorAll(".field-error")).toHaveLength(1);
    submit(form);
    expect(root.querySelectorAll(".field-error")).toHaveLength(1);
  });
});

describe("upload tab", () => {
  function onUploadTab(ui: Console, root: HTMLElement) {
    ui.switchTab("Upload");
    return root.querySelector(".panel.upload") as HTMLElement;
  }

  it("uploads the chosen file and lists the dataset", async () => {
    const { ui, api, root } = mounted();
    vi.spyOn(api, "uploadDataset").mockResolvedValue(
      { dataset_id: "d1", rows: 7 });
    const panel = onUploadTab(ui, root);
    const input = panel.querySelector('input[type="file"]') as HTMLInputElement;
    const file = new File(["merit,gender,percent,type,class\n"],
      "batch.csv", { type: "text/csv" });
    Object.defineProperty(input, "files", { value: [file] });
    (panel.querySelector(".upload-button") as HTMLElement).click();
    await ui.whenIdle();
    const cells = [...root.querySelectorAll(".dataset-table td")]
      .map((c) => c.textContent);
    expect(cells).toEqual(["d1", "batch.csv", "7"]);
    expect(api.uploadDataset).toHaveBeenCalledWith(
      "batch.csv", "merit,gender,percent,type,class\n");
  });

  it("renders parse errors from the service verbatim", async () => {
    const { ui, api, root } = mounted();
    vi.spyOn(api, "uploadDataset").mockRejectedValue(
      new ApiError(400, "MalformedCsv", "line 3: expected 5 cells, got 4"));
    const panel = onUploadTab(ui, root);
    const input = panel.querySelector('input[type="file"]') as HTMLInputElement;
    Object.defineProperty(input, "files",
      { value: [new File(["x"], "bad.csv")] });
    (panel.querySelector(".upload-button") as HTMLElement).click();
    await ui.whenIdle();
    expect(root.querySelector(".error-banner")?.textContent)
      .toBe("MalformedCsv: line 3: expected 5 cells, got 4");
  });

  it("trains against the selected dataset and lists the model", async () => {
    const { ui, api, root } = mounted();
    ui.state.datasets.push({ dataset_id: "d1", filename: "b.csv", rows: 7 });
    vi.spyOn(api, "train").mockResolvedValue({
      model_id: "m1", algorithm: "C45", dropped_rows: 0,
      stats: { training_rows: 7, node_count: 5, leaf_count: 3 },
    });
    const panel = onUploadTab(ui, root);
    (panel.querySelector(".train-button") as HTMLElement).click();
    await ui.whenIdle();
    const cells = [...root.querySelectorAll(".model-table td")]
      .map((c) => c.textContent);
    expect(cells).toEqual(["m1", "C45", "3"]);
    expect(api.train).toHaveBeenCalledWith("d1", "ID3");
  });
});

describe("bulk evaluation tab", () => {
  function primed() {
    const context = mounted();
    context.ui.state.datasets.push(
      { dataset_id: "d1", filename: "b.csv", rows: 7 });
    context.ui.state.models.push(
      { model_id: "m1", algorithm: "C45", leaf_count: 5 });
    return context;
  }

  it("renders every input column plus an uppercase predicted column",
    async () => {
      const { ui, api, root } = primed();
      vi.spyOn(api, "evaluate").mockResolvedValue({
        model_id: "m1", algorithm: "C45", wall_time_ms: 1.25,
        predictions: Array.from({ length: 7 }, (_, i) => ({
          ref: `S${i + 1}`,
          inputs: { merit: "good", gender: "Male", percent: "distinction",
            type: "AI" },
          predicted: "pass",
        })),
      });
      ui.switchTab("Bulk");
      (root.querySelector(".evaluate-button") as HTMLElement).click();
      await ui.whenIdle();
      const headers = [...root.querySelectorAll(".bulk-table th")]
        .map((h) => h.textContent);
      expect(headers).toEqual(
        ["Ref", "merit", "gender", "percent", "type", "Predicted"]);
      const labels = [...root.querySelectorAll(".bulk-table .label-cell")]
        .map((c) => c.textContent);
      expect(labels).toEqual(Array(7).fill("PASS"));
    });

  it("shows the no-rows state for an empty dataset", async () => {
    const { ui, api, root } = primed();
    vi.spyOn(api, "evaluate").mockResolvedValue({
      model_id: "m1", algorithm: "C45", wall_time_ms: 0.0, predictions: [],
    });
    ui.switchTab("Bulk");
    (root.querySelector(".evaluate-button") as HTMLElement).click();
    await ui.whenIdle();
    expect(root.querySelector(".panel.bulk .empty-state")?.textContent)
      .toBe("No rows.");
  });

  it("asks for uploads before offering controls", () => {
    const { ui, root } = mounted();
    ui.switchTab("Bulk");
    expect(root.querySelector(".evaluate-button")).toBeNull();
    expect(root.querySelector(".panel.bulk .empty-state")?.textContent)
      .toContain("Upload a dataset");
  });
});

describe("verify tab", () => {
  const REPORT: VerifyResult = {
    model_id: "m1", algorithm: "C45", total: 173, correct: 130,
    accuracy: 75.145, wall_time_ms: 2.031,
    mismatches: [{
      ref: "S9",
      inputs: { merit: "good", gender: "Male", percent: "distinction",
        type: "OTHER" },
      actual: "fail", predicted: "pass",
    }],
  };

  it("renders the accuracy banner to three decimals", async () => {
    const { ui, api, root } = mounted();
    ui.state.datasets.push({ dataset_id: "d1", filename: "v.csv", rows: 173 });
    ui.state.models.push({ model_id: "m1", algorithm: "C45", leaf_count: 5 });
    vi.spyOn(api, "verify").mockResolvedValue(REPORT);
    ui.switchTab("Verify");
    (root.querySelector(".verify-button") as HTMLElement).click();
    await ui.whenIdle();
    expect(root.querySelector(".accuracy-banner")?.textContent)
      .toBe("Accuracy achieved: 75.145%");
    expect(root.querySelector(".verify-counts")?.textContent)
      .toContain("130 of 173");
  });

  it("styles the predicted side of a mismatch row distinctly", async () => {
    const { ui, api, root } = mounted();
    ui.state.datasets.push({ dataset_id: "d1", filename: "v.csv", rows: 173 });
    ui.state.models.push({ model_id: "m1", algorithm: "C45", leaf_count: 5 });
    vi.spyOn(api, "verify").mockResolvedValue(REPORT);
    ui.switchTab("Verify");
    (root.querySelector(".verify-button") as HTMLElement).click();
    await ui.whenIdle();
    const row = [...root.querySelectorAll(".mismatch-table tbody td")]
      .map((c) => c.textContent);
    expect(row).toEqual(
      ["S9", "good", "Male", "distinction", "OTHER", "fail", "PASS"]);
    expect(root.querySelector(".mismatch-table .mismatch-pred")?.textContent)
      .toBe("PASS");
  });
});

describe("history tab", () => {
  it("lists entries with the wire-format lowercase label", async () => {
    const { ui, api, root } = mounted();
    vi.spyOn(api, "history").mockResolvedValue([ENTRY]);
    ui.switchTab("History");
    await ui.whenIdle();
    expect(root.querySelector(".history-label")?.textContent).toBe("pass");
    expect(root.querySelector(".delete-button")).not.toBeNull();
  });

  it("deletes optimistically and shows the empty state", async () => {
    const { ui, api, root } = mounted();
    vi.spyOn(api, "history").mockResolvedValue([ENTRY]);
    const remove = vi.spyOn(api, "deleteHistory").mockResolvedValue();
    ui.switchTab("History");
    await ui.whenIdle();
    (root.querySelector(".delete-button") as HTMLElement).click();
    expect(root.querySelector(".history-table")).toBeNull();
    await ui.whenIdle();
    expect(remove).toHaveBeenCalledWith("e1");
    expect(root.querySelector(".panel.history .empty-state")?.textContent)
      .toBe("No prediction history.");
  });

  it("restores the row when the delete is rejected", async () => {
    const { ui, api, root } = mounted();
    vi.spyOn(api, "history").mockResolvedValue([ENTRY]);
    vi.spyOn(api, "deleteHistory").mockRejectedValue(
      new ApiError(404, "NotFound", "no history entry e1"));
    ui.switchTab("History");
    await ui.whenIdle();
    (root.querySelector(".delete-button") as HTMLElement).click();
    await ui.whenIdle();
    expect([...root.querySelectorAll(".history-table tbody tr")])
      .toHaveLength(1);
    expect(root.querySelector(".error-banner")?.textContent)
      .toBe("NotFound: no history entry e1");
  });
});
