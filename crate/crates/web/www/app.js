import init, { validate_plan, generate, anonymize, examples } from "./pkg/plangen_web.js";

const $ = (id) => document.getElementById(id);

function status(text, cls) {
  $("status").textContent = text;
  $("status").className = cls || "";
}

function run(f) {
  try {
    f();
  } catch (e) {
    status(String(e), "error");
    $("output").textContent = "";
  }
}

// One bar per executed step: state size before the step, last bar is the
// final state. A failed step is drawn in red.
function drawTrace(atoms, outcome) {
  const c = $("trace");
  const g = c.getContext("2d");
  g.clearRect(0, 0, c.width, c.height);
  if (atoms.length === 0) return;
  const max = Math.max(...atoms, 1);
  const w = Math.min(48, (c.width - 20) / atoms.length);
  atoms.forEach((n, i) => {
    const h = ((c.height - 30) * n) / max;
    const failed = outcome === "PreconditionFailure" && i === atoms.length - 1;
    g.fillStyle = failed ? "#cf222e" : "#0969da";
    g.fillRect(10 + i * w, c.height - 20 - h, w - 4, h);
    g.fillStyle = "#222";
    g.font = "10px sans-serif";
    g.fillText(String(n), 10 + i * w, c.height - 24 - h);
    g.fillText(i < atoms.length - 1 || failed ? `s${i + 1}` : "end", 10 + i * w, c.height - 6);
  });
}

function doValidate() {
  const r = JSON.parse(validate_plan($("domain").value, $("problem").value, $("plan").value));
  status(`${r.outcome} (reward ${r.reward})`, r.outcome);
  $("output").textContent = r.report;
  drawTrace(r.atoms, r.outcome);
}

function doGenerate() {
  const seed = Math.max(0, parseInt($("seed").value, 10) || 0);
  const r = JSON.parse(generate($("domain").value, $("dpgc").value, seed));
  $("problem").value = r.problem;
  $("plan").value = r.plan || "";
  status(r.plan ? "generated and solved" : "generated; no plan found", r.plan ? "Valid" : "ExecutableNoGoal");
  $("output").textContent = "";
  drawTrace([], "");
}

function doAnonymize() {
  const r = JSON.parse(anonymize($("domain").value, $("problem").value, $("plan").value));
  $("domain").value = r.domain;
  $("problem").value = r.problem;
  $("plan").value = r.plan;
  status("anonymized", "Valid");
  $("output").textContent = `compact plan:\n${r.compact}\n\nsymbol map:\n${JSON.stringify(r.map, null, 2)}`;
}

await init();
const ex = JSON.parse(examples());
for (const k of ["domain", "problem", "plan", "dpgc"]) $(k).value = ex[k];
$("validate").onclick = () => run(doValidate);
$("generate").onclick = () => run(doGenerate);
$("anonymize").onclick = () => run(doAnonymize);
run(doValidate);
