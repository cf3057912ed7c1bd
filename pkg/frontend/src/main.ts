/** Browser entry point: mount the app against the same-origin service. */

import { mountApp } from "./app.js";
import { SearchClient } from "./client.js";
import { SearchController } from "./controller.js";
import { getSessionId } from "./session.js";

const root = document.getElementById("app");
if (root) {
  const controller = new SearchController(new SearchClient(""), getSessionId());
  mountApp(root, controller);
}
