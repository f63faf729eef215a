import init, { sigma_map, defect_curve, f_slice } from "./pkg/sqc_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

// blue (low) -> yellow (high)
function color(t) {
  const c = Math.max(0, Math.min(1, t));
  return [Math.round(255 * c), Math.round(60 + 180 * c), Math.round(255 * (1 - c))];
}

function report(id, f) {
  try {
    $(id).textContent = f();
  } catch (e) {
    $(id).textContent = `error: ${e.message ?? e}`;
  }
}

function drawSigma() {
  report("sigma-out", () => {
    const v = sigma_map(num("n"), $("rule").value, num("grid"), num("excl"));
    const canvas = $("sigma");
    const ctx = canvas.getContext("2d");
    ctx.fillStyle = "#fff";
    ctx.fillRect(0, 0, canvas.width, canvas.height);
    const logs = [];
    for (let i = 4; i < v.length; i += 5) if (v[i + 3] > 0) logs.push(Math.log10(v[i + 3]));
    const lo = Math.min(...logs), hi = Math.max(...logs);
    for (let i = 4; i < v.length; i += 5) {
      const [a1, a2, a3, s, adm] = v.slice(i, i + 5);
      const lon = Math.atan2(a2, a1), lat = Math.asin(a3);
      const x = ((lon + Math.PI) / (2 * Math.PI)) * canvas.width;
      const y = ((Math.PI / 2 - lat) / Math.PI) * canvas.height;
      const [r, g, b] = s > 0 ? color((Math.log10(s) - lo) / (hi - lo || 1)) : [0, 0, 0];
      ctx.fillStyle = adm ? `rgb(${r},${g},${b})` : "#999";
      ctx.fillRect(x - 2, y - 2, 4, 4);
    }
    return `refined min sigma_n = ${v[0].toExponential(6)} at alpha = (${v.slice(1, 4).map((a) => a.toFixed(4)).join(", ")})\n` +
      `colour: log10 sigma_n from ${lo.toFixed(2)} to ${hi.toFixed(2)}; grey = excluded near the axes`;
  });
}

function drawCurve() {
  report("curve-out", () => {
    const v = defect_curve(num("n"), $("rule").value, num("eps-max"), 200);
    const [i0, i2, i4, zero] = v;
    const pts = [];
    for (let i = 4; i < v.length; i += 2) pts.push([v[i], v[i + 1]]);
    const canvas = $("curve");
    const ctx = canvas.getContext("2d");
    const W = canvas.width, H = canvas.height, pad = 30;
    ctx.clearRect(0, 0, W, H);
    const ys = pts.map((p) => p[1]);
    const ymin = Math.min(...ys, 0), ymax = Math.max(...ys, 0);
    const xmax = pts[pts.length - 1][0];
    const sx = (x) => pad + (x / xmax) * (W - 2 * pad);
    const sy = (y) => H - pad - ((y - ymin) / (ymax - ymin || 1)) * (H - 2 * pad);
    ctx.strokeStyle = "#bbb";
    ctx.beginPath();
    ctx.moveTo(pad, sy(0));
    ctx.lineTo(W - pad, sy(0));
    ctx.stroke();
    ctx.strokeStyle = "#c0392b";
    ctx.lineWidth = 2;
    ctx.beginPath();
    pts.forEach(([x, y], i) => (i ? ctx.lineTo(sx(x), sy(y)) : ctx.moveTo(sx(x), sy(y))));
    ctx.stroke();
    return `I0 = ${i0.toFixed(6)}, I2 = ${i2.toFixed(6)}, I4 = ${i4.toFixed(6)}\n` +
      `defect = I0 + eps (I2 + I4) is negative for eps < ${zero.toFixed(7)}`;
  });
}

function drawSlice() {
  report("slice-out", () => {
    const res = num("res");
    const v = f_slice(num("n"), $("rule").value, num("eps"), num("k"), res);
    const [mean, lo, hi] = v;
    const canvas = $("slice");
    const ctx = canvas.getContext("2d");
    const img = ctx.createImageData(res, res);
    for (let i = 0; i < res * res; i++) {
      // rows run along x3 upwards
      const row = res - 1 - Math.floor(i / res), col = i % res;
      const [r, g, b] = color((v[3 + i] - lo) / (hi - lo || 1));
      const o = 4 * (row * res + col);
      img.data.set([r, g, b, 255], o);
    }
    const tmp = new OffscreenCanvas(res, res);
    tmp.getContext("2d").putImageData(img, 0, 0);
    ctx.imageSmoothingEnabled = false;
    ctx.drawImage(tmp, 0, 0, canvas.width, canvas.height);
    return `mean over the torus = ${mean.toFixed(9)} (this is the defect, since the field has mean zero)\n` +
      `range [${lo.toFixed(4)}, ${hi.toFixed(4)}]; x1 to the right, x3 upwards`;
  });
}

await init();
$("run-sigma").onclick = drawSigma;
$("run-curve").onclick = drawCurve;
$("run-slice").onclick = drawSlice;
drawSigma();
drawCurve();
drawSlice();
