/**
 * Browser entry point.  Expects a page with #app and query parameters
 * ?session=<id>&role=<canonical player text>, served next to the game server.
 */

import { GameClient } from "./client.js";
import { remainingMs, startCountdown } from "./countdown.js";
import { buildAction, schemaFor } from "./templates.js";
import {
  renderAccounts, renderFacts, renderHistory, renderPending, renderStatus,
  renderTemplateForm,
} from "./render.js";
import { ClientView } from "./view.js";

function mount(root: HTMLElement): void {
  const params = new URLSearchParams(window.location.search);
  const sessionId = params.get("session") ?? "";
  const role = params.get("role") ?? "spectator";
  let stopCountdown: (() => void) | null = null;

  const client = new GameClient({
    serverUrl: window.location.origin,
    sessionId,
    onChange: (view) => {
      draw(view);
      if (stopCountdown) stopCountdown();
      if (view.phase === "running" && view.deadlineMs > 0 &&
          view.chrononOpenedAt !== null) {
        stopCountdown = startCountdown(
          view.deadlineMs, view.chrononOpenedAt,
          () => drawStatus(view),
        );
      }
    },
  });

  function drawStatus(view: ClientView): void {
    const status = root.querySelector(".status-slot");
    if (status && view.chrononOpenedAt !== null) {
      status.innerHTML = renderStatus(
        view, remainingMs(view.deadlineMs, view.chrononOpenedAt, Date.now()));
    }
  }

  function draw(view: ClientView): void {
    root.innerHTML = [
      `<h1>${view.role ?? role}</h1>`,
      `<div class="status-slot">${renderStatus(view, 0)}</div>`,
      renderAccounts(view),
      renderFacts(view),
      renderPending(view),
      renderHistory(view),
      `<div class="controls"></div>`,
    ].join("\n");
    drawStatus(view);
  }

  root.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const switchText = target.dataset.switch;
    const actionText = target.dataset.action;
    if (switchText && actionText) client.act(switchText, actionText);
  });

  root.addEventListener("submit", (event) => {
    const form = event.target as HTMLFormElement;
    if (!form.classList.contains("template")) return;
    event.preventDefault();
    const values: Record<string, number> = {};
    form.querySelectorAll("input[type=number]").forEach((input) => {
      const field = input as HTMLInputElement;
      values[field.name] = Number(field.value);
    });
    const template = form.dataset.template ?? "";
    client.act(form.dataset.switch ?? "", buildAction(template, values));
  });

  client.join(role);
}

// allow the module to load in tests without a DOM
const appRoot = typeof document !== "undefined"
  ? document.getElementById("app")
  : null;
if (appRoot) mount(appRoot);

export { mount, schemaFor, renderTemplateForm };
