/** Browser entry point. The service origin defaults to the page origin and
 * can be overridden with ?api=http://host:port for local development.
 */

import { bootApp } from "./app.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("api") ?? "http://127.0.0.1:8737";
const root = document.getElementById("app");
if (root) {
  bootApp(root, baseUrl).catch((error) => {
    root.textContent = `Failed to start: ${error}`;
  });
}
