/**
 * Hand-rolled SVG line charts. No DOM, no plotting dependency; the
 * output is a plain string so rendering stays deterministic and reruns
 * are byte-identical.
 */

export interface Band {
  lower: number[];
  upper: number[];
}

export interface LineSeries {
  label: string;
  color: string;
  x: number[];
  y: number[];
  band?: Band;
  markers?: boolean;
  dash?: string;
}

export interface ChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  series: LineSeries[];
}

const W = 720;
const H = 360;
const ML = 70;
const MR = 20;
const MT = 36;
const MB = 48;

export function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Round tick positions covering [min, max] with steps of 1/2/5 times a power of ten. */
export function niceTicks(min: number, max: number, count: number): number[] {
  const range = max - min || 1;
  const rough = range / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((n) => n >= rough) ?? rough;
  const start = Math.ceil(min / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= max + step * 1e-9; v += step) {
    // snap away accumulated float error so labels stay clean
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

function fmtTick(v: number): string {
  if (v === 0) {
    return "0";
  }
  const a = Math.abs(v);
  if (a >= 10000 || a < 0.001) {
    return v.toExponential(1);
  }
  return String(Number(v.toPrecision(4)));
}

interface Range {
  min: number;
  max: number;
}

function padRange(min: number, max: number, frac: number): Range {
  if (max === min) {
    const pad = Math.abs(max) * frac || 1;
    return { min: min - pad, max: max + pad };
  }
  const pad = (max - min) * frac;
  return { min: min - pad, max: max + pad };
}

export function renderLineChart(opts: ChartOptions): string {
  const { series } = opts;
  if (series.length === 0) {
    throw new Error("nothing to plot: no series");
  }
  const pw = W - ML - MR;
  const ph = H - MT - MB;

  const xs = series.flatMap((s) => s.x);
  const ys = series.flatMap((s) => [...s.y, ...(s.band ? [...s.band.lower, ...s.band.upper] : [])]);
  const xr = padRange(Math.min(...xs), Math.max(...xs), 0.0);
  if (xr.max === xr.min) {
    xr.min -= 0.5;
    xr.max += 0.5;
  }
  const yr = padRange(Math.min(...ys), Math.max(...ys), 0.05);

  const xOf = (v: number) => ML + ((v - xr.min) / (xr.max - xr.min)) * pw;
  const yOf = (v: number) => MT + ph - ((v - yr.min) / (yr.max - yr.min)) * ph;

  let s = `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}" font-family="Helvetica, Arial, sans-serif">\n`;
  s += `<rect width="${W}" height="${H}" fill="#fff"/>\n`;
  s += `<text x="${ML}" y="${MT - 12}" font-size="13" font-weight="600" fill="#222">${escapeXml(opts.title)}</text>\n`;
  s += `<defs><clipPath id="plot"><rect x="${ML}" y="${MT}" width="${pw}" height="${ph}"/></clipPath></defs>\n`;

  // grid and y ticks
  const yTicks = niceTicks(yr.min, yr.max, 5);
  for (const v of yTicks) {
    const y = yOf(v).toFixed(1);
    s += `<line x1="${ML}" y1="${y}" x2="${ML + pw}" y2="${y}" stroke="#eee" stroke-width="0.6"/>\n`;
    s += `<line x1="${ML - 4}" y1="${y}" x2="${ML}" y2="${y}" stroke="#333" stroke-width="0.6"/>\n`;
    s += `<text x="${ML - 7}" y="${(yOf(v) + 3.5).toFixed(1)}" text-anchor="end" font-size="9" fill="#555">${escapeXml(fmtTick(v))}</text>\n`;
  }

  // x ticks: use the data's own positions when there are only a few
  const distinctX = [...new Set(xs)].sort((a, b) => a - b);
  const xTicks = distinctX.length <= 8 ? distinctX : niceTicks(xr.min, xr.max, 8);
  for (const v of xTicks) {
    const x = xOf(v).toFixed(1);
    s += `<line x1="${x}" y1="${MT + ph}" x2="${x}" y2="${MT + ph + 4}" stroke="#333" stroke-width="0.6"/>\n`;
    s += `<text x="${x}" y="${MT + ph + 15}" text-anchor="middle" font-size="9" fill="#555">${escapeXml(fmtTick(v))}</text>\n`;
  }

  // std bands under the curves
  for (const sr of series) {
    if (!sr.band) {
      continue;
    }
    const fwd = sr.x.map((v, i) => `${xOf(v).toFixed(1)},${yOf(sr.band!.upper[i]).toFixed(1)}`);
    const back = sr.x
      .map((v, i) => `${xOf(v).toFixed(1)},${yOf(sr.band!.lower[i]).toFixed(1)}`)
      .reverse();
    s += `<polygon class="band" clip-path="url(#plot)" fill="${sr.color}" opacity="0.15" points="${[...fwd, ...back].join(" ")}"/>\n`;
  }

  // curves and markers
  for (const sr of series) {
    const pts = sr.x.map((v, i) => `${xOf(v).toFixed(1)},${yOf(sr.y[i]).toFixed(1)}`);
    s += `<polyline class="curve" clip-path="url(#plot)" fill="none" stroke="${sr.color}" stroke-width="1.4" ${sr.dash ? `stroke-dasharray="${sr.dash}" ` : ""}points="${pts.join(" ")}"/>\n`;
    if (sr.markers) {
      for (const p of pts) {
        const [px, py] = p.split(",");
        s += `<circle clip-path="url(#plot)" cx="${px}" cy="${py}" r="2.5" fill="${sr.color}"/>\n`;
      }
    }
  }

  // axes frame
  s += `<line x1="${ML}" y1="${MT}" x2="${ML}" y2="${MT + ph}" stroke="#333" stroke-width="0.8"/>\n`;
  s += `<line x1="${ML}" y1="${MT + ph}" x2="${ML + pw}" y2="${MT + ph}" stroke="#333" stroke-width="0.8"/>\n`;
  s += `<text x="${ML + pw / 2}" y="${H - 8}" text-anchor="middle" font-size="11" fill="#333">${escapeXml(opts.xLabel)}</text>\n`;
  s += `<text x="16" y="${MT + ph / 2}" text-anchor="middle" font-size="11" fill="#333" transform="rotate(-90,16,${MT + ph / 2})">${escapeXml(opts.yLabel)}</text>\n`;

  // legend, top right
  const legendW = Math.max(...series.map((sr) => sr.label.length)) * 5.4 + 26;
  const legendH = series.length * 13 + 6;
  const lx = ML + pw - legendW - 6;
  const ly = MT + 6;
  s += `<rect x="${lx}" y="${ly}" width="${legendW}" height="${legendH}" rx="2" fill="#fff" fill-opacity="0.85" stroke="#ddd" stroke-width="0.5"/>\n`;
  series.forEach((sr, i) => {
    const yy = ly + 10 + i * 13;
    s += `<line x1="${lx + 6}" y1="${yy}" x2="${lx + 20}" y2="${yy}" stroke="${sr.color}" stroke-width="1.4" ${sr.dash ? `stroke-dasharray="${sr.dash}" ` : ""}/>\n`;
    s += `<text x="${lx + 24}" y="${yy + 3}" font-size="9" fill="#444">${escapeXml(sr.label)}</text>\n`;
  });

  s += `</svg>\n`;
  return s;
}
