// Browser entry point: restore the per-tab session (if any) and mount the
// console. Each browser tab keeps its own session in sessionStorage.

import { ApiClient } from "./api.js";
import { Console } from "./ui.js";

export function bootstrap(root: HTMLElement,
                          baseUrl = ""): Console {
  const api = new ApiClient(baseUrl);
  const token = sessionStorage.getItem("gradegauge-token");
  if (token) {
    api.setToken(token);
  }
  const console_ = new Console(root, api);
  console_.mount();
  return console_;
}

if (typeof document !== "undefined") {
  const root = document.getElementById("app");
  if (root) {
    bootstrap(root);
  }
}
