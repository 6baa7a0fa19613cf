/** Entry point: create a session against the backing service and mount the
 * five-panel app. The service origin defaults to same-host port 8765. */

import { createSession } from "./api.js";
import { App } from "./panels.js";

const BASE =
  new URLSearchParams(window.location.search).get("service") ??
  `${window.location.protocol}//${window.location.hostname}:8765`;

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");
  const session = await createSession(BASE);
  const app = new App(session, root);
  await app.start();
}

boot().catch((err) => {
  const root = document.getElementById("app");
  if (root) {
    root.textContent = `failed to start: ${err}`;
  }
});
