// Expects the output of `wasm-pack build --target web` in ./pkg.
import init, { efficiency_curve, optimize, plane_map } from "./pkg/enaqt_demo.js";

const $ = (id) => document.getElementById(id);
const status = (msg) => { $("status").textContent = msg; };

function system() {
  return [
    $("topology").value,
    Number($("n").value),
    Number($("trap").value),
    Number($("init").value),
  ];
}

function drawCurve(data) {
  const c = $("curve"), ctx = c.getContext("2d");
  ctx.clearRect(0, 0, c.width, c.height);
  // gamma = 0 is drawn at the left edge, the log grid after it.
  const pts = [];
  for (let i = 2; i < data.length; i += 2) pts.push([Math.log10(data[i]), data[i + 1]]);
  const lo = pts[0][0], hi = pts[pts.length - 1][0];
  const x = (v) => 40 + (v - lo) / (hi - lo) * (c.width - 60);
  const y = (v) => c.height - 30 - v * (c.height - 50);
  ctx.strokeStyle = "#999";
  ctx.beginPath(); ctx.moveTo(40, y(data[1])); ctx.lineTo(c.width - 20, y(data[1])); ctx.stroke();
  ctx.strokeStyle = "#1f5fbf"; ctx.lineWidth = 2;
  ctx.beginPath();
  pts.forEach(([g, eta], i) => (i ? ctx.lineTo(x(g), y(eta)) : ctx.moveTo(x(g), y(eta))));
  ctx.stroke();
  ctx.fillStyle = "#000";
  ctx.fillText(`log10 gamma: ${lo.toFixed(1)} .. ${hi.toFixed(1)}   (grey: eta at gamma = 0)`, 40, c.height - 10);
  ctx.fillText("eta", 10, 20);
}

function drawMap(xi, count) {
  const c = $("map"), ctx = c.getContext("2d");
  const cell = c.width / count;
  const max = Math.max(...xi.filter(Number.isFinite), 1e-12);
  for (let k = 0; k < count; k++) {
    for (let m = 0; m < count; m++) {
      const v = xi[k * count + m];
      const t = Number.isFinite(v) ? v / max : 0;
      ctx.fillStyle = `rgb(${Math.round(255 * t)}, ${Math.round(80 * t)}, ${Math.round(255 * (1 - t))})`;
      // kappa grows to the right, mu grows upward.
      ctx.fillRect(k * cell, c.height - (m + 1) * cell, cell + 1, cell + 1);
    }
  }
  status(`max gain ${max.toFixed(4)}; kappa increases to the right, mu upward, both 1e-4 .. 1e2`);
}

function guard(f) {
  return () => {
    status("");
    try { f(); } catch (e) { status(String(e.message ?? e)); }
  };
}

await init();

$("run-curve").onclick = guard(() => {
  drawCurve(efficiency_curve(...system(), Number($("kappa").value), Number($("mu").value), 1e-3, 1e3, 96));
});

$("run-optimize").onclick = guard(() => {
  const [eta0, etaMax, gammaOpt, xi] = optimize(...system(), Number($("kappa").value), Number($("mu").value));
  $("optimum").textContent =
    `eta0 = ${eta0.toFixed(5)}, eta_max = ${etaMax.toFixed(5)}, gamma_opt = ${gammaOpt.toFixed(4)}, gain = ${xi.toFixed(5)}`;
});

$("run-map").onclick = guard(() => {
  const count = Number($("count").value);
  drawMap(plane_map(...system(), 1e-4, 1e2, count), count);
});
