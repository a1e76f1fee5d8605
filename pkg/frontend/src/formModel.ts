/**
 * Parsing of the server's form XML into a typed model.
 *
 * The client never interprets the ontology: everything it displays comes
 * from this document. A malformed document throws FormParseError so the
 * caller can keep the previous state and show an error banner.
 */

export interface NumericRange {
  lo: string;
  hi: string;
}

export interface FormComponent {
  property: string;
  widget: string;
  impl: string;
  label: string;
  value?: string;
  options?: string[];
  range?: NumericRange;
}

export interface FormModel {
  instance: string;
  components: FormComponent[];
  recommendations: string[][];
}

export class FormParseError extends Error {}

interface XmlElement {
  tag: string;
  attrs: Record<string, string>;
  children: XmlElement[];
  text: string;
}

const ENTITIES: Record<string, string> = {
  "&amp;": "&",
  "&lt;": "<",
  "&gt;": ">",
  "&quot;": '"',
  "&apos;": "'",
};

function decodeEntities(raw: string): string {
  return raw.replace(/&(amp|lt|gt|quot|apos);/g, (m) => ENTITIES[m] ?? m);
}

/** Minimal strict reader for the form document subset of XML. */
function parseXml(text: string): XmlElement {
  let pos = 0;

  function error(message: string): never {
    throw new FormParseError(`${message} at offset ${pos}`);
  }

  function skipWhitespace(): void {
    while (pos < text.length && /\s/.test(text[pos]!)) pos += 1;
  }

  function parseAttrs(): Record<string, string> {
    const attrs: Record<string, string> = {};
    for (;;) {
      skipWhitespace();
      const ch = text[pos];
      if (ch === ">" || ch === "/" || ch === undefined) return attrs;
      const nameMatch = /^[A-Za-z_][A-Za-z0-9_-]*/.exec(text.slice(pos));
      if (!nameMatch) error("bad attribute name");
      const name = nameMatch[0];
      pos += name.length;
      if (text[pos] !== "=") error(`missing '=' after ${name}`);
      pos += 1;
      if (text[pos] !== '"') error("attribute value must be double-quoted");
      pos += 1;
      const end = text.indexOf('"', pos);
      if (end < 0) error("unterminated attribute value");
      attrs[name] = decodeEntities(text.slice(pos, end));
      pos = end + 1;
    }
  }

  function parseElement(): XmlElement {
    if (text[pos] !== "<") error("expected '<'");
    pos += 1;
    const nameMatch = /^[A-Za-z_][A-Za-z0-9_-]*/.exec(text.slice(pos));
    if (!nameMatch) error("bad element name");
    const tag = nameMatch[0];
    pos += tag.length;
    const attrs = parseAttrs();
    if (text.startsWith("/>", pos)) {
      pos += 2;
      return { tag, attrs, children: [], text: "" };
    }
    if (text[pos] !== ">") error(`unclosed start tag <${tag}>`);
    pos += 1;
    const children: XmlElement[] = [];
    let textContent = "";
    for (;;) {
      if (pos >= text.length) error(`missing </${tag}>`);
      if (text.startsWith("</", pos)) {
        pos += 2;
        if (!text.startsWith(tag, pos)) error(`mismatched close tag for <${tag}>`);
        pos += tag.length;
        skipWhitespace();
        if (text[pos] !== ">") error(`bad close tag for <${tag}>`);
        pos += 1;
        return { tag, attrs, children, text: textContent };
      }
      if (text[pos] === "<") {
        children.push(parseElement());
      } else {
        const next = text.indexOf("<", pos);
        if (next < 0) error(`missing </${tag}>`);
        textContent += decodeEntities(text.slice(pos, next));
        pos = next;
      }
    }
  }

  skipWhitespace();
  const root = parseElement();
  skipWhitespace();
  if (pos !== text.length) error("trailing content after document element");
  return root;
}

function requireAttr(element: XmlElement, name: string): string {
  const value = element.attrs[name];
  if (value === undefined) {
    throw new FormParseError(`<${element.tag}> is missing @${name}`);
  }
  return value;
}

function childByTag(element: XmlElement, tag: string): XmlElement | undefined {
  return element.children.find((c) => c.tag === tag);
}

export function parseFormXml(document: string): FormModel {
  const root = parseXml(document);
  if (root.tag !== "form") throw new FormParseError(`expected <form>, got <${root.tag}>`);
  const componentsEl = childByTag(root, "components");
  const recommendationsEl = childByTag(root, "recommendations");
  if (!componentsEl || !recommendationsEl) {
    throw new FormParseError("<form> must contain <components> and <recommendations>");
  }

  const components: FormComponent[] = componentsEl.children.map((el) => {
    if (el.tag !== "component") throw new FormParseError(`unexpected <${el.tag}> in <components>`);
    const label = childByTag(el, "label");
    if (!label) throw new FormParseError("<component> is missing <label>");
    const component: FormComponent = {
      property: requireAttr(el, "property"),
      widget: requireAttr(el, "widget"),
      impl: requireAttr(el, "impl"),
      label: label.text,
    };
    const value = childByTag(el, "value");
    if (value) component.value = value.text;
    const options = childByTag(el, "options");
    if (options) {
      component.options = options.children.map((o) => {
        if (o.tag !== "option") throw new FormParseError(`unexpected <${o.tag}> in <options>`);
        return o.text;
      });
    }
    const range = childByTag(el, "range");
    if (range) component.range = { lo: requireAttr(range, "lo"), hi: requireAttr(range, "hi") };
    return component;
  });

  const recommendations: string[][] = recommendationsEl.children.map((group) => {
    if (group.tag !== "group") throw new FormParseError(`unexpected <${group.tag}> in <recommendations>`);
    return group.children.map((t) => {
      if (t.tag !== "treatment") throw new FormParseError(`unexpected <${t.tag}> in <group>`);
      return requireAttr(t, "class");
    });
  });

  return { instance: requireAttr(root, "instance"), components, recommendations };
}
