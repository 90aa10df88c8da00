import init, { default_config, solve_slot, load_curve, latency_curve } from "./pkg/franopt_web.js";

const $ = (id) => document.getElementById(id);
const fmt = (x, d = 3) => (x === null || x === undefined ? "-" : Number(x).toFixed(d));

function run(button, work) {
  $("error").textContent = "";
  button.disabled = true;
  // Let the browser repaint the disabled button before the solver blocks the thread.
  setTimeout(() => {
    try {
      work();
    } catch (e) {
      $("error").textContent = String(e);
    } finally {
      button.disabled = false;
    }
  }, 20);
}

function slotTable(res) {
  const kinds = ["OLT", "ONU", "ENODEB", "UD"];
  const rows = res.policies.map((p) => {
    const hosts = kinds.map((k) => `<td>${p.requests_by_host_kind[k] || 0}</td>`).join("");
    return `<tr><td>${p.policy}</td><td>${p.status}</td><td>${fmt(p.total_w)}</td><td>${fmt(p.proc_w)}</td>
      <td>${fmt(p.vm_w)}</td><td>${fmt(p.traffic_w)}</td><td>${p.vms_on}</td>${hosts}<td>${p.bnb_nodes}</td></tr>`;
  });
  const [c, f] = res.policies;
  const saving = c.status === "OPTIMAL" && f.status === "OPTIMAL" && c.total_w > 0
    ? `${fmt((100 * (c.total_w - f.total_w)) / c.total_w, 1)}%` : "-";
  return `<p>${res.active_uds} active UDs, ${res.requests} requests. F-RAN saving: <b>${saving}</b></p>
    <table><tr><th>policy</th><th>status</th><th>total W</th><th>proc W</th><th>VM W</th><th>traffic W</th>
    <th>VMs</th>${kinds.map((k) => `<th>on ${k}</th>`).join("")}<th>B&amp;B nodes</th></tr>${rows.join("")}</table>`;
}

// Line chart of both power columns; `xs` are plotted on a log axis when `log` is set.
function chart(xs, series, { log = false, xlabel = "" } = {}) {
  const W = 900, H = 300, L = 60, R = 20, T = 15, B = 40;
  const xv = xs.map((x) => (log ? Math.log10(x) : x));
  const ys = series.flatMap((s) => s.values).filter((v) => v !== null);
  const [x0, x1] = [Math.min(...xv), Math.max(...xv)];
  const [y0, y1] = [0, Math.max(...ys) * 1.08];
  const px = (x) => L + ((x - x0) / (x1 - x0 || 1)) * (W - L - R);
  const py = (y) => H - B - ((y - y0) / (y1 - y0 || 1)) * (H - T - B);
  let svg = `<svg width="${W}" height="${H}" viewBox="0 0 ${W} ${H}">`;
  for (let i = 0; i <= 4; i++) {
    const y = y0 + ((y1 - y0) * i) / 4;
    svg += `<line x1="${L}" x2="${W - R}" y1="${py(y)}" y2="${py(y)}" stroke="#eee"/>
      <text x="${L - 6}" y="${py(y) + 4}" font-size="11" text-anchor="end">${fmt(y, 1)}</text>`;
  }
  xs.forEach((x, i) => {
    if (xs.length <= 24 || i % 3 === 0) {
      const label = log ? Number(x).toPrecision(2) : x;
      svg += `<text x="${px(xv[i])}" y="${H - B + 16}" font-size="11" text-anchor="middle">${label}</text>`;
    }
  });
  svg += `<text x="${(W + L) / 2}" y="${H - 6}" font-size="12" text-anchor="middle">${xlabel}</text>
    <text x="14" y="${(H - B) / 2}" font-size="12" transform="rotate(-90 14 ${(H - B) / 2})" text-anchor="middle">power (W)</text>`;
  for (const s of series) {
    const pts = s.values.map((v, i) => (v === null ? null : `${px(xv[i])},${py(v)}`)).filter(Boolean);
    svg += `<polyline class="${s.cls}" fill="none" stroke-width="2" points="${pts.join(" ")}"/>`;
    s.values.forEach((v, i) => {
      if (v !== null) svg += `<circle class="${s.cls}" cx="${px(xv[i])}" cy="${py(v)}" r="3"/>`;
    });
  }
  const legend = series.map((s, i) =>
    `<rect class="${s.cls}" x="${W - R - 110}" y="${T + 6 + i * 18}" width="12" height="3"/>
     <text x="${W - R - 92}" y="${T + 11 + i * 18}" font-size="12">${s.name}</text>`).join("");
  return svg + legend + "</svg>";
}

function sweepSummary(res, ms) {
  const avg = res.average_saving_pct === null ? "-" : `${fmt(res.average_saving_pct, 1)}%`;
  const excl = res.excluded ? `, ${res.excluded} points excluded` : "";
  return `<p>Average F-RAN saving <b>${avg}</b>${excl}. Solved in ${fmt(ms / 1000, 2)} s.</p>`;
}

function timed(f) {
  const t0 = performance.now();
  const out = f();
  return [out, performance.now() - t0];
}

async function main() {
  await init();
  const fresh = default_config();
  $("config").value = fresh;
  $("reset").onclick = () => ($("config").value = fresh);
  $("fraction").oninput = () => ($("fraction-label").textContent = `${Math.round($("fraction").value * 100)}%`);

  $("solve").onclick = () => run($("solve"), () => {
    const res = JSON.parse(solve_slot($("config").value, Number($("fraction").value)));
    $("slot").innerHTML = slotTable(res);
  });

  $("load").onclick = () => run($("load"), () => {
    const [text, ms] = timed(() => load_curve($("config").value));
    const res = JSON.parse(text);
    $("load-out").innerHTML = sweepSummary(res, ms) + chart(res.keys, [
      { name: "C-RAN", cls: "cran", values: res.cran },
      { name: "F-RAN", cls: "fran", values: res.fran },
    ], { xlabel: "hour of day" });
  });

  $("latency").onclick = () => run($("latency"), () => {
    const [text, ms] = timed(() => latency_curve($("config").value));
    const res = JSON.parse(text);
    $("latency-out").innerHTML = sweepSummary(res, ms) + chart(res.keys, [
      { name: "C-RAN", cls: "cran", values: res.cran },
      { name: "F-RAN", cls: "fran", values: res.fran },
    ], { log: true, xlabel: "maximum latency (s, log scale)" });
  });
}

main().catch((e) => ($("error").textContent = `failed to load: ${e}`));
