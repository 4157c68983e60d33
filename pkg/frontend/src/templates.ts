/**
 * Unlimited switches arrive as action templates like
 * `[alice, (price, double)]`.  The template is the form schema: typed slots
 * become number inputs, everything fixed renders as a label.
 */

import { Term, formatTerm, parseTerm } from "./terms.js";

export type SlotType = "double" | "int";

export interface SlotField {
  kind: "input";
  name: string;
  slotType: SlotType;
}

export interface LabelField {
  kind: "label";
  text: string;
}

export type FormField = SlotField | LabelField;

export interface FormSchema {
  template: string;
  fields: FormField[];
}

function slotOf(term: Term): SlotField | null {
  if (
    term.kind === "tuple" &&
    term.items.length === 2 &&
    term.items[0].kind === "atom" &&
    term.items[1].kind === "atom" &&
    (term.items[1].name === "double" || term.items[1].name === "int")
  ) {
    return {
      kind: "input",
      name: term.items[0].name,
      slotType: term.items[1].name as SlotType,
    };
  }
  return null;
}

function collect(term: Term, fields: FormField[]): void {
  const slot = slotOf(term);
  if (slot) {
    fields.push(slot);
    return;
  }
  if (term.kind === "list" || term.kind === "tuple") {
    for (const item of term.items) collect(item, fields);
    return;
  }
  if (term.kind === "struct") {
    for (const arg of term.args) collect(arg, fields);
    return;
  }
  fields.push({ kind: "label", text: formatTerm(term) });
}

/** Turn one template text into the fields a form should render. */
export function schemaFor(template: string): FormSchema {
  const fields: FormField[] = [];
  collect(parseTerm(template), fields);
  return { template, fields };
}

function fill(term: Term, values: Map<string, number>): Term {
  const slot = slotOf(term);
  if (slot) {
    const value = values.get(slot.name);
    if (value === undefined) {
      throw new Error(`no value for slot '${slot.name}'`);
    }
    if (slot.slotType === "int") {
      if (!Number.isInteger(value)) {
        throw new Error(`slot '${slot.name}' needs an integer, got ${value}`);
      }
      return { kind: "int", value };
    }
    return { kind: "real", value };
  }
  if (term.kind === "list" || term.kind === "tuple") {
    return { ...term, items: term.items.map((t) => fill(t, values)) };
  }
  if (term.kind === "struct") {
    return { ...term, args: term.args.map((t) => fill(t, values)) };
  }
  return term;
}

/**
 * Substitute slot values into the template, producing the canonical action
 * text to submit.  Double slots always serialize with a decimal point.
 */
export function buildAction(
  template: string,
  values: Record<string, number>,
): string {
  return formatTerm(fill(parseTerm(template), new Map(Object.entries(values))));
}
