import init, { leafProbabilities, simulate, sweep } from "./pkg/photon_tow_web.js";

const $ = (id) => document.getElementById(id);
const nums = (s) => s.split(/[\s,]+/).filter(Boolean).map(Number);
const int = (id) => Number($(id).value);

function fail(el, e) {
  el.innerHTML = `<p class="err">${e.message ?? e}</p>`;
}

function plot(canvas, series) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 30;
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, 10, w - pad - 10, h - pad - 10);
  ctx.fillStyle = "#333";
  ctx.fillText("1", 10, 14);
  ctx.fillText("0", 10, h - pad);
  const n = Math.max(...series.map((s) => s.ys.length));
  const x = (i) => pad + ((w - pad - 10) * i) / Math.max(1, n - 1);
  const y = (v) => h - pad - (h - pad - 10) * v;
  series.forEach((s, k) => {
    ctx.strokeStyle = s.color;
    ctx.setLineDash(s.dash ?? []);
    ctx.beginPath();
    s.ys.forEach((v, i) => (i ? ctx.lineTo(x(i), y(v)) : ctx.moveTo(x(i), y(v))));
    ctx.stroke();
    ctx.setLineDash([]);
    ctx.fillStyle = s.color;
    ctx.fillText(s.label, w - 200, 24 + 14 * k);
  });
  ctx.fillStyle = "#333";
  ctx.fillText(`cycle 1..${n}`, w / 2, h - 10);
}

function route() {
  const out = $("pa-out");
  try {
    const p = leafProbabilities(Float64Array.from(nums($("pa").value)), int("pa-res"));
    out.innerHTML = Array.from(p, (v, i) => `<span>arm ${i + 1}<br>${v.toFixed(4)}</span>`).join("");
  } catch (e) {
    fail(out, e);
  }
}

function run() {
  const out = $("sim-out");
  try {
    const probs = Float64Array.from(nums($("probs").value));
    const args = [int("res"), int("cycles"), int("reps")];
    const seed = BigInt(int("seed"));
    const std = simulate(probs, ...args, 0, seed);
    const alt = simulate(probs, ...args, int("round1"), seed);
    plot($("sim-plot"), [
      { label: "standard fine", ys: std.fine(), color: "#1f77b4" },
      { label: "standard coarse L1", ys: std.coarse(1), color: "#1f77b4", dash: [4, 3] },
      { label: "chosen fine", ys: alt.fine(), color: "#d62728" },
      { label: "chosen coarse L1", ys: alt.coarse(1), color: "#d62728", dash: [4, 3] },
    ]);
    const last = (c) => c.fine()[c.cycles() - 1].toFixed(3);
    out.textContent = `final fine rate: standard ${last(std)}, chosen ${last(alt)}`;
    std.free();
    alt.free();
  } catch (e) {
    fail(out, e);
  }
}

function runSweep() {
  const out = $("sweep-out");
  try {
    const rows = sweep(
      Float64Array.from(nums($("probs").value)),
      Uint32Array.from(nums($("sweep-res").value)),
      int("sweep-cycles"),
      int("sweep-reps"),
      int("sweep-snap"),
      BigInt(int("seed")),
    );
    let html = "<table><tr><th>resolution</th><th>fine @ snapshot</th><th>coarse L1 @ snapshot</th><th>fine, last 10%</th></tr>";
    for (let i = 0; i < rows.length; i += 4) {
      html += `<tr><td>${rows[i]}</td>${[1, 2, 3].map((k) => `<td>${rows[i + k].toFixed(3)}</td>`).join("")}</tr>`;
    }
    out.innerHTML = html + "</table>";
  } catch (e) {
    fail(out, e);
  }
}

await init();
$("pa-go").onclick = route;
$("sim-go").onclick = run;
$("sweep-go").onclick = runSweep;
route();
