import init, { cutTree, tailProfile, cutComparison } from "./pkg/rrtcut_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function guarded(statsId, fn) {
  return () => {
    const out = $(statsId);
    out.classList.remove("error");
    try {
      fn(out);
    } catch (e) {
      out.classList.add("error");
      out.textContent = String(e.message ?? e);
    }
  };
}

function drawTree(view, mode) {
  const canvas = $("tree-canvas");
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const px = (i) => w / 2 + view.x[i] * (w / 2 - 12);
  const py = (i) => h / 2 + view.y[i] * (h / 2 - 12);
  ctx.clearRect(0, 0, w, h);

  // Vertices cut off from the root, and the step at which it happened.
  const removed = mode === "targeted" ? view.targeted_removed : view.uniform_removed;
  const step = new Map(removed.map((v, k) => [v, k]));
  const lost = new Array(view.n).fill(-1);
  for (let v = 2; v <= view.n; v++) {
    const p = view.parents[v - 1];
    const own = step.has(v) ? step.get(v) : -1;
    const inherited = lost[p - 1];
    lost[v - 1] = inherited >= 0 && (own < 0 || inherited < own) ? inherited : own;
  }
  const shade = (k) => `hsl(${200 - (160 * k) / Math.max(1, removed.length)}, 70%, 55%)`;

  ctx.lineWidth = 0.8;
  for (let v = 2; v <= view.n; v++) {
    const p = view.parents[v - 1];
    ctx.strokeStyle = lost[v - 1] >= 0 ? shade(lost[v - 1]) : "#999";
    ctx.beginPath();
    ctx.moveTo(px(p - 1), py(p - 1));
    ctx.lineTo(px(v - 1), py(v - 1));
    ctx.stroke();
  }
  for (let v = 1; v <= view.n; v++) {
    const r = 1.5 + Math.sqrt(view.degrees[v - 1]);
    ctx.fillStyle = v === 1 ? "#000" : step.has(v) ? "#c22" : "#555";
    ctx.beginPath();
    ctx.arc(px(v - 1), py(v - 1), r, 0, 2 * Math.PI);
    ctx.fill();
  }
}

function runTree(out) {
  const view = JSON.parse(cutTree(num("tree-n"), num("tree-seed")));
  const mode = $("tree-mode").value;
  drawTree(view, mode);
  out.textContent =
    `root degree D = ${view.root_degree}, Z(>=D) = ${view.z_at_root_degree}\n` +
    `targeted cuts = ${view.targeted_removed.length} ` +
    `(visited ${view.targeted_order.length} vertices before reaching the root)\n` +
    `uniform edge cuts = ${view.uniform_removed.length}`;
}

function axes(ctx, w, h, pad) {
  ctx.strokeStyle = "#444";
  ctx.beginPath();
  ctx.moveTo(pad, pad / 2);
  ctx.lineTo(pad, h - pad);
  ctx.lineTo(w - pad / 2, h - pad);
  ctx.stroke();
}

function runProfile(out) {
  const p = JSON.parse(tailProfile(num("profile-n"), num("profile-reps"), num("profile-seed")));
  const canvas = $("profile-canvas");
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, w, h);
  axes(ctx, w, h, pad);
  const top = Math.log2(p.n) + 0.5;
  const dMax = p.d.length - 1;
  const x = (d) => pad + ((w - 1.5 * pad) * d) / Math.max(1, dMax);
  const y = (v) => h - pad - ((h - 1.5 * pad) * (Math.log2(Math.max(v, 0.25)) + 2)) / (top + 2);

  ctx.strokeStyle = "#aaa";
  ctx.setLineDash([4, 4]);
  ctx.beginPath();
  p.reference.forEach((v, i) => (i ? ctx.lineTo(x(p.d[i]), y(v)) : ctx.moveTo(x(p.d[i]), y(v))));
  ctx.stroke();
  ctx.setLineDash([]);

  ctx.fillStyle = "#1565c0";
  p.mean.forEach((m, i) => {
    ctx.beginPath();
    ctx.arc(x(p.d[i]), y(m), 3, 0, 2 * Math.PI);
    ctx.fill();
  });
  ctx.fillStyle = "#333";
  ctx.fillText("d", w - pad, h - pad + 16);
  ctx.fillText("mean Z(>=d), log scale; dashed: n / 2^d", pad + 6, pad / 2 + 4);

  const modal = p.root_degree_freq.indexOf(Math.max(...p.root_degree_freq));
  out.textContent =
    p.d.slice(0, Math.min(p.d.length, 16))
      .map((d, i) => `d=${String(d).padStart(2)}  mean ${p.mean[i].toFixed(2).padStart(10)}  n/2^d ${p.reference[i].toFixed(2).padStart(10)}`)
      .join("\n") + `\nmost frequent root degree: ${modal} (ln n = ${Math.log(p.n).toFixed(2)})`;
}

function histogram(values) {
  const h = new Map();
  for (const v of values) h.set(v, (h.get(v) ?? 0) + 1);
  return h;
}

function runCompare(out) {
  const c = JSON.parse(cutComparison(num("compare-n"), num("compare-reps"), num("compare-seed")));
  const canvas = $("compare-canvas");
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, w, h);
  axes(ctx, w, h, pad);

  // Log-scaled x axis so both processes fit on one chart.
  const hi = Math.log10(Math.max(...c.uniform, ...c.z_at_root_degree, 10)) + 0.1;
  const x = (v) => pad + ((w - 1.5 * pad) * Math.log10(v + 1)) / hi;
  const series = [
    [c.targeted, "#c62828", "targeted cuts"],
    [c.z_at_root_degree, "#f9a825", "Z(>=D)"],
    [c.uniform, "#1565c0", "uniform edge cuts"],
  ];
  const binOf = (v) => Math.round(x(v) / 4) * 4;
  const hists = series.map(([vals]) => histogram(vals.map(binOf)));
  const peak = Math.max(...hists.flatMap((m) => [...m.values()]));
  series.forEach(([, color, label], s) => {
    ctx.fillStyle = color;
    for (const [bx, count] of hists[s]) {
      const bh = ((h - 1.5 * pad) * count) / peak;
      ctx.globalAlpha = 0.6;
      ctx.fillRect(bx - 2, h - pad - bh, 4, bh);
    }
    ctx.globalAlpha = 1;
    ctx.fillText(label, w - 170, pad / 2 + 14 * s + 4);
  });
  ctx.fillStyle = "#333";
  for (let e = 0; e <= Math.floor(hi); e++) {
    ctx.fillText(String(10 ** e), x(10 ** e) - 4, h - pad + 16);
  }

  out.textContent =
    `mean targeted cuts  ${c.mean_targeted.toFixed(2)}\n` +
    `mean Z(>=D)         ${c.mean_z_at_root_degree.toFixed(2)}   n^(1-ln 2) = ${c.n_to_gamma.toFixed(2)}\n` +
    `mean uniform cuts   ${c.mean_uniform.toFixed(2)}   n / ln n = ${c.n_over_ln_n.toFixed(2)}`;
}

await init();
$("tree-run").addEventListener("click", guarded("tree-stats", runTree));
$("tree-mode").addEventListener("change", guarded("tree-stats", runTree));
$("profile-run").addEventListener("click", guarded("profile-stats", runProfile));
$("compare-run").addEventListener("click", guarded("compare-stats", runCompare));
guarded("tree-stats", runTree)();
