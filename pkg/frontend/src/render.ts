/** HTML renderers: pure functions from view state to markup strings. */

import { formatCountdown } from "./countdown.js";
import { FormSchema } from "./templates.js";
import { ClientView } from "./view.js";

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderFacts(view: ClientView): string {
  const items = view.facts
    .map((f) => `<li class="fact">${escapeHtml(f)}</li>`)
    .join("");
  return `<ul class="facts">${items}</ul>`;
}

export function renderAccounts(view: ClientView): string {
  const rows = Object.entries(view.accounts)
    .map(
      ([player, amount]) =>
        `<tr><td>${escapeHtml(player)}</td><td>${amount.toFixed(1)}</td></tr>`,
    )
    .join("");
  return `<table class="accounts">${rows}</table>`;
}

export function renderStatus(view: ClientView, remainingMs: number): string {
  if (view.phase === "error") {
    return `<div class="error">${escapeHtml(view.error ?? "error")}</div>`;
  }
  if (view.phase === "ended") {
    return `<div class="end">game over</div>`;
  }
  const countdown =
    view.deadlineMs > 0 ? formatCountdown(remainingMs) : "waiting for players";
  return `<div class="status">chronon ${view.chronon} — ${countdown}</div>`;
}

export function renderPending(view: ClientView): string {
  const pending = view.pending
    .map(
      (p) =>
        `<li class="pending">${escapeHtml(p.switch)} → ${escapeHtml(p.action)}</li>`,
    )
    .join("");
  const resolved = view.resolved
    .map(
      (p) =>
        `<li class="resolved">${escapeHtml(p.switch)} → ${escapeHtml(p.action)}</li>`,
    )
    .join("");
  return `<ul class="submissions">${pending}${resolved}</ul>`;
}

/** Enumerated switches become a button per action. */
export function renderActionPicker(
  switchText: string,
  actions: string[],
): string {
  const buttons = actions
    .map(
      (a) =>
        `<button data-switch="${escapeHtml(switchText)}" ` +
        `data-action="${escapeHtml(a)}">${escapeHtml(a)}</button>`,
    )
    .join("");
  return `<div class="picker" data-switch="${escapeHtml(switchText)}">${buttons}</div>`;
}

/** Unlimited switches render their template as a form. */
export function renderTemplateForm(
  switchText: string,
  schema: FormSchema,
): string {
  const parts = schema.fields
    .map((field) =>
      field.kind === "label"
        ? `<span class="part">${escapeHtml(field.text)}</span>`
        : `<input type="number" name="${escapeHtml(field.name)}" ` +
          `${field.slotType === "int" ? 'step="1"' : 'step="any"'} />`,
    )
    .join("");
  return (
    `<form class="template" data-switch="${escapeHtml(switchText)}" ` +
    `data-template="${escapeHtml(schema.template)}">${parts}` +
    `<button type="submit">bid</button></form>`
  );
}

export function renderHistory(view: ClientView, limit = 20): string {
  const items = view.history
    .slice(-limit)
    .map(
      (entry) =>
        `<li><span class="chronon">${entry.chronon}</span> ` +
        `${escapeHtml(entry.text)}</li>`,
    )
    .join("");
  return `<ol class="history">${items}</ol>`;
}
