/**
 * Minimal reader for the canonical term text the server emits.  The client
 * never evaluates terms; this exists so the view can assert that every fact
 * string it renders is a well-formed ground term, and so forms can echo
 * actions back in the exact canonical shape.
 */

export type Term =
  | { kind: "atom"; name: string }
  | { kind: "int"; value: number }
  | { kind: "real"; value: number }
  | { kind: "list"; items: Term[] }
  | { kind: "tuple"; items: Term[] }
  | { kind: "struct"; functor: string; args: Term[] };

class Reader {
  pos = 0;
  constructor(readonly text: string) {}

  error(message: string): never {
    throw new SyntaxError(`${message} at ${this.pos} in ${this.text}`);
  }

  skipSpace(): void {
    while (this.pos < this.text.length && /\s/.test(this.text[this.pos])) {
      this.pos += 1;
    }
  }

  peek(): string {
    return this.text[this.pos] ?? "";
  }

  expect(ch: string): void {
    if (this.text[this.pos] !== ch) this.error(`expected '${ch}'`);
    this.pos += 1;
  }

  readTerm(): Term {
    this.skipSpace();
    const ch = this.peek();
    if (ch === "[") return this.readList();
    if (ch === "(") return this.readTuple();
    if (ch === "'") return this.readQuotedAtom();
    if (/[0-9-]/.test(ch)) return this.readNumber();
    if (/[a-z]/.test(ch)) return this.readAtomOrStruct();
    this.error("unexpected character");
  }

  readList(): Term {
    this.expect("[");
    this.skipSpace();
    if (this.peek() === "]") {
      this.pos += 1;
      return { kind: "list", items: [] };
    }
    const items = [this.readTerm()];
    this.skipSpace();
    while (this.peek() === ",") {
      this.pos += 1;
      items.push(this.readTerm());
      this.skipSpace();
    }
    this.expect("]");
    return { kind: "list", items };
  }

  readTuple(): Term {
    this.expect("(");
    const items = [this.readTerm()];
    this.skipSpace();
    while (this.peek() === ",") {
      this.pos += 1;
      items.push(this.readTerm());
      this.skipSpace();
    }
    this.expect(")");
    return items.length === 1 ? items[0] : { kind: "tuple", items };
  }

  readQuotedAtom(): Term {
    this.expect("'");
    let name = "";
    while (this.pos < this.text.length && this.peek() !== "'") {
      if (this.peek() === "\\") this.pos += 1;
      name += this.text[this.pos];
      this.pos += 1;
    }
    this.expect("'");
    return { kind: "atom", name };
  }

  readNumber(): Term {
    const match = /^-?\d+(\.\d+(?:[eE][+-]?\d+)?)?/.exec(
      this.text.slice(this.pos),
    );
    if (!match) this.error("bad number");
    this.pos += match[0].length;
    return match[1] !== undefined
      ? { kind: "real", value: Number(match[0]) }
      : { kind: "int", value: Number(match[0]) };
  }

  readAtomOrStruct(): Term {
    const match = /^[a-z][A-Za-z0-9_]*/.exec(this.text.slice(this.pos));
    if (!match) this.error("bad atom");
    this.pos += match[0].length;
    if (this.peek() === "(") {
      this.expect("(");
      const args = [this.readTerm()];
      this.skipSpace();
      while (this.peek() === ",") {
        this.pos += 1;
        args.push(this.readTerm());
        this.skipSpace();
      }
      this.expect(")");
      return { kind: "struct", functor: match[0], args };
    }
    return { kind: "atom", name: match[0] };
  }
}

/** Parse canonical term text; throws SyntaxError on malformed input. */
export function parseTerm(text: string): Term {
  const reader = new Reader(text.trim());
  const term = reader.readTerm();
  reader.skipSpace();
  if (reader.pos !== reader.text.length) reader.error("trailing input");
  return term;
}

export function isGroundTermText(text: string): boolean {
  try {
    parseTerm(text);
    return true;
  } catch {
    return false;
  }
}

/** Render a term back to canonical text (inverse of parseTerm). */
export function formatTerm(term: Term): string {
  switch (term.kind) {
    case "atom":
      return /^[a-z][A-Za-z0-9_]*$/.test(term.name) || term.name === "[]"
        ? term.name
        : `'${term.name.replace(/\\/g, "\\\\").replace(/'/g, "\\'")}'`;
    case "int":
      return String(term.value);
    case "real": {
      const text = String(term.value);
      return text.includes(".") || text.includes("e") ? text : `${text}.0`;
    }
    case "list":
      return `[${term.items.map(formatTerm).join(", ")}]`;
    case "tuple":
      return `(${term.items.map(formatTerm).join(", ")})`;
    case "struct":
      return `${term.functor}(${term.args.map(formatTerm).join(", ")})`;
  }
}
