import type { EvaluateResult, HistoryEntry, VerifyResult } from "./api.js";

export type TabName = "Singular" | "Upload" | "Bulk" | "Verify" | "History";

export const TABS: TabName[] = [
  "Singular", "Upload", "Bulk", "Verify", "History",
];

export interface DatasetRow {
  dataset_id: string;
  filename: string;
  rows: number;
}

export interface ModelRow {
  model_id: string;
  algorithm: string;
  leaf_count: number;
}

// Everything a tab renders lives here; views are pure functions of this
// object plus the session token, so a cold reload with just a token
// reproduces every screen.
export interface ViewState {
  activeTab: TabName;
  datasets: DatasetRow[];
  models: ModelRow[];
  bulk: EvaluateResult | null;
  report: VerifyResult | null;
  history: HistoryEntry[] | null;
}

export function initialState(): ViewState {
  return {
    activeTab: "Singular",
    datasets: [],
    models: [],
    bulk: null,
    report: null,
    history: null,
  };
}
