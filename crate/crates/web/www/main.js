import init, { analyze, evaluate, witnesses } from "./pkg/crashlens_web.js";

const LEN = "let len = rec len(x) -> match x { Nil -> Zero | Cons(h, t) -> Succ(len t) };\n\n";

const EXAMPLES = {
  length: LEN + "len Zero\n",
  check: LEN +
    "let check = rec check(n) ->\n" +
    "  match n {\n" +
    "    Succ(a) -> match a {\n" +
    "      Succ(b) -> match b {\n" +
    "        Succ(c) -> match c {\n" +
    "          Succ(d) -> match d { Zero -> Ok }\n" +
    "        }\n" +
    "      }\n" +
    "    }\n" +
    "  };\n\n" +
    "check (len Cons(1, Cons(2, Cons(3, Cons(4, Cons(5, Nil))))))\n",
  generator: LEN + "let gen = rec gen(u) -> Cons(Zero, gen u);\n\nlen (gen Unused)\n",
};

const $ = (id) => document.getElementById(id);
const source = $("source");
const output = $("output");

function text(tag, content, cls) {
  const el = document.createElement(tag);
  el.textContent = content;
  if (cls) el.className = cls;
  return el;
}

function show(...nodes) {
  output.replaceChildren(...nodes);
}

function attempt(f) {
  try {
    f();
  } catch (e) {
    show(text("pre", String(e.message ?? e), "error"));
  }
}

function params() {
  return { k: Number($("k").value), depth: Number($("depth").value), fuel: Number($("fuel").value) };
}

function fillDefs(defs) {
  const select = $("defs");
  const current = select.value;
  select.replaceChildren(...defs.map((d) => text("option", d.def)));
  if (defs.some((d) => d.def === current)) select.value = current;
}

function runAnalyze() {
  attempt(() => {
    const { k, depth } = params();
    const defs = JSON.parse(analyze(source.value, k, depth));
    fillDefs(defs.filter((d) => d.def !== "main"));
    show(...defs.flatMap((d) => {
      const verdict = d.verdict === "crash" ? "crash" : `${d.verdict} (k = ${d.k})`;
      const lines = [`${d.def} : ${d.type}`, `  crash:   ${d.crash_condition}`];
      if (d.witnesses.length > 0) lines.push(`  crashes on: ${d.witnesses.join(", ")}`);
      const pre = text("pre", lines.join("\n") + "\n  verdict: ");
      pre.append(text("span", verdict, d.verdict === "crash" ? "crash" : ""));
      return [pre];
    }));
  });
}

function describe(run) {
  switch (run.outcome) {
    case "value": return run.value;
    case "error": return "err";
    default: return `fuel exhausted after ${run.steps} steps`;
  }
}

function runEvaluate() {
  attempt(() => show(text("pre", describe(JSON.parse(evaluate(source.value, params().fuel))))));
}

function runWitnesses() {
  attempt(() => {
    const name = $("defs").value;
    if (!name) throw new Error("analyze first, then pick a function definition");
    const { k, depth, fuel } = params();
    const rows = JSON.parse(witnesses(source.value, name, depth, k, fuel));
    if (rows.length === 0) {
      show(text("p", `no crashing inputs for ${name} up to depth ${depth} at k = ${k}`));
      return;
    }
    const table = document.createElement("table");
    const head = document.createElement("tr");
    head.append(text("th", "argument type"), text("th", "input"), text("th", `${name} input`));
    table.append(head);
    for (const r of rows) {
      const tr = document.createElement("tr");
      tr.append(text("td", r.type), text("td", r.input), text("td", describe(r.run)));
      table.append(tr);
    }
    show(table);
  });
}

function loadExample() {
  source.value = EXAMPLES[$("examples").value];
  runAnalyze();
}

await init();
$("k").addEventListener("input", () => {
  $("k-value").textContent = $("k").value;
  runAnalyze();
});
$("examples").addEventListener("change", loadExample);
$("analyze").addEventListener("click", runAnalyze);
$("evaluate").addEventListener("click", runEvaluate);
$("witnesses").addEventListener("click", runWitnesses);
loadExample();
