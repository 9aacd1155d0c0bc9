import init, { simulateAndDetect, checkAssortativity, sweepR3 } from "./pkg/dhnet_demo.js";

const $ = (id) => document.getElementById(id);
const out = $("out");

function params() {
  return JSON.stringify({
    preset: $("preset").value,
    setting: $("setting").value,
    r3: Number($("r3").value),
    alpha: Number($("alpha").value),
    varying: $("varying").checked,
    sizes: [Number($("n0").value), Number($("n1").value)],
    snapshots: Number($("snapshots").value),
    kappa: Number($("kappa").value),
    seed: Number($("seed").value),
  });
}

function run(fn) {
  $("error").textContent = "";
  try {
    const t0 = performance.now();
    fn();
    out.insertAdjacentHTML("beforeend", `<p><small>${(performance.now() - t0).toFixed(0)} ms</small></p>`);
  } catch (e) {
    $("error").textContent = e.message ?? String(e);
  }
}

// columns: nodes in planted order, rows: planted vs found, colored by label
function labelStrip(truth, labels) {
  const c = document.createElement("canvas");
  const n = truth.length;
  c.width = n;
  c.height = 2;
  c.style.width = Math.min(900, n * 4) + "px";
  c.style.height = "40px";
  const ctx = c.getContext("2d");
  const order = [...truth.keys()].sort((a, b) => truth[a] - truth[b] || a - b);
  order.forEach((node, x) => {
    ctx.fillStyle = `hsl(${(truth[node] * 137) % 360} 60% 50%)`;
    ctx.fillRect(x, 0, 1, 1);
    ctx.fillStyle = `hsl(${(labels[node] * 137 + 60) % 360} 60% 50%)`;
    ctx.fillRect(x, 1, 1, 1);
  });
  return c;
}

$("detect").onclick = () => run(() => {
  const r = JSON.parse(simulateAndDetect(params()));
  out.innerHTML = `<h2>Detection</h2>
    <pre>Q=${r.modularity.toFixed(6)}  K=${r.communities}  restarts=${r.restarts}
NMI=${r.nmi.toFixed(4)}  misclassification=${r.misclassification.toFixed(4)}
per type NMI: ${r.nmi_per_type.map((v) => v.toFixed(4)).join(", ")}
edges per snapshot: ${r.edges_per_snapshot.join(" ")}</pre>
    <p>Top row: planted communities. Bottom row: detected communities.</p>`;
  out.appendChild(labelStrip(r.truth, r.labels));
});

$("check").onclick = () => run(() => {
  const r = JSON.parse(checkAssortativity(params()));
  const k = r.communities;
  let rows = "";
  for (let a = 0; a < k; a++) {
    rows += "<tr><th>" + a + "</th>";
    for (let b = 0; b < k; b++) rows += `<td>${r.aggregate[a * k + b].toFixed(4)}</td>`;
    rows += "</tr>";
  }
  out.innerHTML = `<h2>Assortativity: ${r.holds ? "holds" : "fails"}</h2>
    <table><tr><th></th>${[...Array(k).keys()].map((b) => `<th>${b}</th>`).join("")}</tr>${rows}</table>
    <p>min diagonal ${r.diagonal_margin.toFixed(4)} (needs &gt; 0),
    max off-diagonal ${r.off_diagonal_margin.toFixed(4)} (needs &lt; 0)</p>`;
});

$("sweep").onclick = () => run(() => {
  const values = $("values").value.split(",").map((v) => Number(v.trim())).filter((v) => !Number.isNaN(v));
  const pts = JSON.parse(sweepR3(params(), JSON.stringify(values)));
  const bar = (v, cls) => `<span class="bar ${cls}" style="width:${(v * 200).toFixed(0)}px"></span> ${v.toFixed(3)}`;
  out.innerHTML = `<h2>NMI against r3</h2>
    <table><tr><th>r3</th><th>all snapshots</th><th>one snapshot</th></tr>
    ${pts.map((p) => `<tr><td>${p.r3}</td><td style="text-align:left">${bar(p.nmi_dhnet, "dh")}</td>
      <td style="text-align:left">${bar(p.nmi_single_snapshot, "m3")}</td></tr>`).join("")}</table>`;
});

await init();
